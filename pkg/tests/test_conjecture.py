import itertools
import random
from fractions import Fraction as F

import pytest

from flagcomb.conjecture import (
    HypothesisError, centre_hypothesis, family_sweep, omega_invariance, phi_check, xell_family,
)
from flagcomb.intertwine import ConsistencyError
from flagcomb.kummer import KummerClass, is_wF_fixed, subsystem
from flagcomb.rootdata import has_connected_centre, load_datum
from flagcomb.seqdecomp import decompose_sequence, seq_product
from flagcomb.suites import lambda_panel
from flagcomb.weyl import identity

import oracles as O
from conftest import bundled_spec

H = F(1, 2)


def K(*vals):
    return KummerClass(tuple(F(v) for v in vals))


def _hypothesis_by_oracle(name, L):
    G = O.BruteGroup(bundled_spec(name))
    wl = O.wl_elements(G, L.values)
    return all(w in wl for w in G.elts if tuple(O.pull(L.values, w)) == L.values)


@pytest.mark.parametrize("name", ["a1-sc", "a1-adj", "a2-sc", "a2-adj", "b2-sc", "b2-adj", "gl3"])
def test_hypothesis_matches_scan(name):
    d = load_datum(name)
    for L in lambda_panel(d, (1, 2, 3)):
        assert centre_hypothesis(d, L) == _hypothesis_by_oracle(name, L)
    assert centre_hypothesis(d, KummerClass.zero(d.rank_torus))


def test_rank_one_ground_truth():
    # scan results: the adjoint form satisfies it, the simply connected form does not
    assert centre_hypothesis(load_datum("a1-adj"), K(H))
    assert centre_hypothesis(load_datum("a1-adj").with_q(5), K(F(1, 4)))
    assert not centre_hypothesis(load_datum("a1-sc"), K(H))


@pytest.mark.parametrize("name", ["a1-adj", "gl2", "a2-adj", "b2-adj", "g2", "gl3"])
def test_connected_centre_implies_hypothesis(name):
    d = load_datum(name)
    assert has_connected_centre(d)
    for L in lambda_panel(d, (1, 2, 3)):
        assert centre_hypothesis(d, L)


def test_family_members_are_stable():
    d = load_datum("a2-adj")
    L = K(H, 0)
    fam = xell_family(d, L, 4)
    assert fam.members
    assert all(is_wF_fixed(d, seq_product(d, ss), L) for ss in fam.members)
    everything = [ss for k in range(5) for ss in itertools.product(range(2), repeat=k)]
    assert len(fam.members) == sum(is_wF_fixed(d, seq_product(d, ss), L) for ss in everything)


def test_omega_trivial_for_zero_class():
    d = load_datum("b2-adj")
    omega, fam = omega_invariance(d, KummerClass.zero(2), 4)
    assert omega == identity(d)
    assert len(fam.members) == sum(2 ** k for k in range(5))


def test_omega_for_empty_subsystem_is_the_product():
    d = load_datum("a2-adj")
    L = K(F(1, 3), F(1, 3))
    assert subsystem(d, L).roots == frozenset() and centre_hypothesis(d, L)
    omega, fam = omega_invariance(d, L, 4)
    assert {seq_product(d, ss) for ss in fam.members} == {omega}


def test_omega_half_class_adjoint():
    d = load_datum("a2-adj")
    L = K(H, H)
    omega, fam = omega_invariance(d, L, 4)
    assert all(decompose_sequence(d, L, ss).omega == omega for ss in fam.members)


def test_hypothesis_failure_is_reported():
    with pytest.raises(HypothesisError):
        omega_invariance(load_datum("a1-sc"), K(H), 3)
    with pytest.raises(HypothesisError):
        phi_check(load_datum("a1-sc"), K(H), (0, 0), (0, 0))


def test_empty_family_is_reported():
    d = load_datum("a2-adj-twisted")
    with pytest.raises(HypothesisError, match="no sequence"):
        omega_invariance(d, K(F(1, 3), F(2, 3)), 5)


def test_phi_a1_zero():
    d = load_datum("a1-adj")
    r = phi_check(d, KummerClass.zero(1), (0,), (0,))
    assert (r.lhs_card, r.rhs_card, r.roundtrip_ok) == (4, 4, True)
    assert r.F_set == (identity(d),) and r.ok


def test_phi_a2_half_class():
    d = load_datum("a2-adj-twisted")
    r = phi_check(d, K(H, 0), (0, 1, 0), (1, 0, 1))
    assert r.lhs_card == r.rhs_card == 4 and r.roundtrip_ok
    counts = phi_check(d, K(H, 0), (0, 1, 0), (1, 0, 1), roundtrip=False)
    assert (counts.lhs_card, counts.rhs_card, counts.roundtrip_ok) == (4, 4, None)


def test_phi_needs_stable_sequences():
    d = load_datum("a2-adj")
    L = K(H, 0)
    bad = next(ss for ss in itertools.product(range(2), repeat=2)
               if not is_wF_fixed(d, seq_product(d, ss), L))
    with pytest.raises(HypothesisError, match="stabilise"):
        phi_check(d, L, bad, bad)


@pytest.mark.parametrize("name", ["a1-adj", "gl2", "a2-adj", "b2-adj", "gl3", "a3-adj"])
def test_phi_roundtrip_short_sequences(name):
    d = load_datum(name)
    for L in lambda_panel(d, (1, 2)):
        fam = xell_family(d, L, 2)
        for a, b in itertools.product(fam.members, repeat=2):
            assert phi_check(d, L, a, b).ok


@pytest.mark.parametrize("name, vals", [
    ("a2-adj-twisted", (H, 0)), ("gl3", (F(1, 3), 0, 0)), ("b2-adj", (H, H)), ("a3-adj", (H, 0, H)),
])
def test_sweep_agrees_with_pairwise_counts(name, vals):
    d = load_datum(name)
    L = K(*vals)
    sw = family_sweep(d, L, 4)
    assert sw.ok and sw.F_set == (identity(d),)
    n = len(sw.members)
    rng = random.Random(7)
    for _ in range(40):
        i, j = rng.randrange(n), rng.randrange(n)
        r = phi_check(d, L, sw.members[i], sw.members[j], roundtrip=False)
        assert (r.lhs_card, r.rhs_card) == (sw.lhs[i, j], sw.rhs[i, j])


def test_sweep_flags_hypothesis_failure():
    with pytest.raises(HypothesisError):
        family_sweep(load_datum("a1-sc"), K(H), 3)


def test_consistency_error_is_an_assertion():
    assert issubclass(ConsistencyError, AssertionError)
