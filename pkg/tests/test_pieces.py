import itertools
import math

import pytest

from flagcomb.pieces import (
    ChainError, ParaType, enumerate_tt, piece_dim, shift_tt, tt_from_z, validate_tt,
)
from flagcomb.rootdata import load_datum
from flagcomb.weyl import coset_minima, from_word, group_enumerate, identity, parabolic_subgroup

DATA = ["a1-sc", "a1xa1-sc", "a2-sc", "a2-sc-twisted", "b2-sc", "g2", "a3-sc", "a3-sc-twisted"]


def subsets(n):
    return [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]


def brute_chain(d, J, z):
    """Iterate the recurrence with coset minima found by scanning whole double cosets."""
    def dmin(K, w, Kp):
        coset = {u * w * v for u in parabolic_subgroup(d, K) for v in parabolic_subgroup(d, Kp)}
        return min(coset, key=lambda x: x.length)

    Jn = frozenset(J)
    chain = []
    for _ in range(d.n + 3):
        wn = dmin(frozenset(J), z, d.sigma_subset(Jn))
        chain.append((Jn, wn))
        # J_{n+1} = J_n cap w_n sigma(J_n) w_n^-1, read on simple roots
        simple = d.simple_root_index
        imgs = {wn.act_root(simple[j]) for j in d.sigma_subset(Jn)}
        Jn = frozenset(i for i in Jn if simple[i] in imgs)
    while len(chain) > 1 and chain[-1] == chain[-2]:
        chain.pop()
    return tuple(chain)


def test_a1_full_J():
    d = load_datum("a1-sc")
    t = tt_from_z(d, {0}, identity(d))
    assert t.chain == ((frozenset({0}), identity(d)),)
    assert piece_dim(d, t) == 0
    assert len(enumerate_tt(d, {0})) == 1
    assert sorted(t.w_inf.reduced_word for t in enumerate_tt(d, ())) == [(), (0,)]


def test_a2_hand_iteration():
    d = load_datum("a2-sc")
    s2 = from_word(d, [1])
    t = tt_from_z(d, {0}, s2)
    assert t.chain == ((frozenset({0}), s2), (frozenset(), s2))
    assert t.J_inf == frozenset() and t.w_inf == s2
    assert piece_dim(d, t) == 1
    assert shift_tt(t, 1) == ParaType(frozenset(), ((frozenset(), s2),))
    assert shift_tt(t, 0) == t
    assert shift_tt(t, math.inf) == shift_tt(t, 5)
    limits = sorted(t.w_inf.reduced_word for t in enumerate_tt(d, {0}))
    assert limits == [(), (1,), (1, 0)]


def test_empty_J_is_constant():
    d = load_datum("b2-sc")
    for z in group_enumerate(d):
        t = tt_from_z(d, (), z)
        assert t.chain == ((frozenset(), z),)
        assert shift_tt(t, 3) == t


@pytest.mark.parametrize("name", DATA)
def test_bijection_with_coset_minima(name):
    d = load_datum(name)
    for J in subsets(d.n):
        types = enumerate_tt(d, J)
        left = coset_minima(d, J, ())[0]
        assert len(types) == len(left)
        assert {t.w_inf for t in types} == set(left)
        for t in types:
            validate_tt(d, t)
            assert tt_from_z(d, J, t.w_inf) == t
            assert t.chain == brute_chain(d, J, t.w_inf)


@pytest.mark.parametrize("name", ["a2-sc", "b2-sc", "g2", "a3-sc"])
def test_dimension_is_length_for_empty_J(name):
    d = load_datum(name)
    for t in enumerate_tt(d, ()):
        assert piece_dim(d, t) == t.w_inf.length


@pytest.mark.parametrize("name", ["a2-sc-twisted", "a3-sc-twisted"])
def test_dimension_empty_J_twisted(name):
    d = load_datum(name)
    sig = d.sigma_root_perm
    for t in enumerate_tt(d, ()):
        expected = sum(1 for k in range(d.npos) if not d.is_positive(t.w_inf.act_root(sig[k])))
        assert piece_dim(d, t) == expected


@pytest.mark.parametrize("name", ["a2-sc", "b2-sc", "a2-sc-twisted", "a3-sc"])
def test_largest_piece_has_full_dimension(name):
    # finitely many pieces cover P_J, so one of them is dense
    d = load_datum(name)
    for J in subsets(d.n):
        npos_J = sum(1 for k in range(d.npos)
                     if all(c == 0 for i, c in enumerate(d.root_coeffs[k]) if i not in J))
        assert max(piece_dim(d, t) for t in enumerate_tt(d, J)) == d.npos - npos_J


def test_validate_rejects_broken_chain():
    d = load_datum("a2-sc")
    s2 = from_word(d, [1])
    with pytest.raises(ChainError):
        validate_tt(d, ParaType(frozenset({0}), ((frozenset({0}), from_word(d, [0])),)))
    with pytest.raises(ChainError):
        validate_tt(d, ParaType(frozenset({0}), ((frozenset({0}), s2), (frozenset({0}), s2))))
    with pytest.raises(ChainError):
        tt_from_z(d, {0}, from_word(d, [0]))
