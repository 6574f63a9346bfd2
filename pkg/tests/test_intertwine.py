import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from flagcomb.intertwine import (
    StabilityError, count_A, count_chains, enumerate_A, enumerate_chains, enumerate_rhs, f_set,
    frakA_check, hom_dim_table, intertwiner_problem, lhs_shape, n_aa, psi_forward, psi_inverse,
    rhs_shape,
)
from flagcomb.kummer import KummerClass, is_wF_fixed, pullback, weyl_subgroup, wprime0
from flagcomb.rootdata import load_datum
from flagcomb.seqdecomp import seq_product
from flagcomb.suites import lambda_panel
from flagcomb.weyl import from_word, group_enumerate, identity, longest_element, sigma_twist

import oracles as O
from conftest import bundled_spec

A1 = load_datum("a1-sc")
H = F(1, 2)


def stable_pairs(d, L, max_len):
    seqs = [ss for k in range(max_len + 1) for ss in itertools.product(range(d.n), repeat=k)
            if is_wF_fixed(d, seq_product(d, ss), L)]
    return list(itertools.product(seqs, repeat=2))


def mats(x):
    return tuple(v.matrix for v in x.a)


def test_a1_four_chains():
    p = intertwiner_problem(A1, KummerClass.zero(1), (0,), (0,))
    one, s = identity(A1), from_word(A1, [0])
    got = {x.a for x in enumerate_A(p)}
    assert got == {(one, one, one), (one, s, one), (s, s, s), (s, one, s)}
    assert count_A(p) == 4


def test_a1_psi_examples():
    p = intertwiner_problem(A1, KummerClass.zero(1), (0,), (0,))
    one, s = identity(A1), from_word(A1, [0])
    by_a = {x.a: x for x in enumerate_A(p)}
    assert psi_forward(by_a[(one, s, one)]) == (one, (one, s, one))
    assert psi_forward(by_a[(s, s, s)]) == (one, (s, s, s))
    assert n_aa(by_a[(one, s, one)]) == (1, True)
    assert n_aa(by_a[(s, s, s)])[0] == 2
    for x in by_a.values():
        assert psi_inverse(p, *psi_forward(x)) == x


def test_a1_table():
    p = intertwiner_problem(A1, KummerClass.zero(1), (0,), (0,))
    # N values by hand: (1,1,1) -> 0, (1,s,1) -> 1, (s,1,s) -> 1, (s,s,s) -> 2
    assert hom_dim_table(p, identity(A1)) == {0: 1, 1: 2, 2: 1}


def test_table_empty_without_translate():
    d = load_datum("a1-adj").with_q(5)
    L = KummerClass((F(1, 2),))
    lt = KummerClass((F(1, 4),))
    p = intertwiner_problem(d, L, (0,), (0,), Ltilde=lt)
    assert hom_dim_table(p, identity(d)) == {}


def test_neutral_letters_rejected():
    with pytest.raises(ValueError):
        intertwiner_problem(A1, KummerClass.zero(1), (None,), (0,))


def test_unstable_rejected():
    d = load_datum("a2-sc")
    p = intertwiner_problem(d, KummerClass((H, F(0))), (0, 1, 0), (0, 1, 0))
    with pytest.raises(StabilityError):
        enumerate_A(p)


@pytest.mark.parametrize("name, max_len", [("a1-sc", 3), ("a1-adj", 3), ("a2-sc", 2),
                                           ("a2-sc-twisted", 3), ("b2-sc", 2), ("a2-adj", 2)])
def test_strict_matches_step_oracle(name, max_len):
    d = load_datum(name)
    G = O.BruteGroup(bundled_spec(name))
    c = G.sigma_y()
    assert c == sigma_twist(d).matrix
    for L in lambda_panel(d, (1, 2, 3)):
        for ss, tss in stable_pairs(d, L, max_len):
            assert O.is_stable(G, L.values, ss, c, d.q) and O.is_stable(G, L.values, tss, c, d.q)
            p = intertwiner_problem(d, L, ss, tss)
            got = sorted(mats(x) for x in enumerate_A(p))
            assert got == O.strict_index_chains_by_steps(G, L.values, ss, tss, c)
            assert count_A(p) == len(got)


@pytest.mark.parametrize("name", ["a1-sc", "a2-sc-twisted"])
def test_step_oracle_matches_full_product(name):
    d = load_datum(name)
    G = O.BruteGroup(bundled_spec(name))
    c = G.sigma_y()
    L = lambda_panel(d, (2,))[-1]
    for ss, tss in stable_pairs(d, L, 2)[:12]:
        if len(ss) + len(tss) > 3:
            continue
        full = sorted(O.strict_index_chains(G, L.values, ss, tss, c))
        assert full == O.strict_index_chains_by_steps(G, L.values, ss, tss, c)


def test_a2_twisted_frozen_counts():
    # values frozen from the step oracle
    d = load_datum("a2-sc-twisted")
    cases = {((0, 0), (0, 1, 0), (0, 1, 0)): 65, ((0, 0), (0, 1, 0), (1, 0, 1)): 65,
             ((H, 0), (0, 1, 0), (0, 1, 0)): 4, ((H, 0), (0, 1, 0), (1, 0, 1)): 4}
    for (vals, ss, tss), n in cases.items():
        p = intertwiner_problem(d, KummerClass(tuple(F(v) for v in vals)), ss, tss)
        assert count_A(p) == len(enumerate_A(p)) == n


def _rhs_oracle(d, p, f):
    wl = {a.matrix for a in weyl_subgroup(d, p.L)}
    fi = O.G_inv_any(f.matrix)
    right = [O.mat_mul(O.mat_mul(f.matrix, S.matrix), fi) for S in p.tdec.SS]
    left = [S.matrix for S in p.dec.SS]
    oc = O.mat_mul(p.dec.omega.matrix, p.c.matrix)
    oci = O.G_inv_any(oc)
    return sorted(O.trivial_class_chains(wl, left, right, lambda a: O.mat_mul(O.mat_mul(oc, a), oci)))


@pytest.mark.parametrize("name, max_len", [("a1-sc", 3), ("a2-sc-twisted", 3), ("b2-sc", 2),
                                           ("a2-adj", 2)])
def test_bijection_and_rhs_oracle(name, max_len):
    d = load_datum(name)
    for L in lambda_panel(d, (1, 2, 3)):
        for ss, tss in stable_pairs(d, L, max_len):
            p = intertwiner_problem(d, L, ss, tss)
            lhs = enumerate_A(p)
            fs = f_set(p)
            rhs = {f: enumerate_rhs(p, f) for f in fs}
            for f in fs:
                assert sorted(tuple(v.matrix for v in A) for A in rhs[f]) == _rhs_oracle(d, p, f)
                assert count_chains(rhs_shape(p, f)) == len(rhs[f])
            images = set()
            for x in lhs:
                f, A = psi_forward(x)
                assert A in rhs[f]
                images.add((f, A))
                assert psi_inverse(p, f, A) == x
            assert len(images) == len(lhs) == sum(len(v) for v in rhs.values())


def test_fset_scan():
    d = load_datum("a2-sc-twisted")
    L = KummerClass((H, F(0)))
    p = intertwiner_problem(d, L, (0, 1, 0), (1, 0, 1))
    oc = p.dec.omega * p.c
    toc = p.tdec.omega * p.c
    brute = [f for f in group_enumerate(d) if f in wprime0(d, L)
             and O.mat_mul(O.mat_mul(O.G_inv_any(f.matrix), oc.matrix), f.matrix) == toc.matrix]
    assert f_set(p) == brute
    same = intertwiner_problem(d, L, (0, 1, 0), (0, 1, 0))
    assert identity(d) in f_set(same)


@pytest.mark.parametrize("name, vals, several", [
    ("a2-sc", (F(1, 3), F(1, 3)), True),
    ("b2-sc", (H, F(0)), True),
    # the flip does not centralise the 3-cycle in W'^0_L, so F stays a single element
    ("a2-sc-twisted", (F(1, 3), F(1, 3)), False),
])
def test_fset_with_nontrivial_wprime0(name, vals, several):
    d = load_datum(name)
    L = KummerClass(vals)
    assert len(wprime0(d, L)) > 1
    sizes = []
    for ss, tss in stable_pairs(d, L, 3):
        p = intertwiner_problem(d, L, ss, tss)
        fs = f_set(p)
        sizes.append(len(fs))
        assert count_A(p) == sum(count_chains(rhs_shape(p, f)) for f in fs)
    assert (max(sizes) > 1) == several


@pytest.mark.parametrize("name, max_len", [("a1-sc", 3), ("a2-sc-twisted", 2), ("b2-sc", 2)])
def test_grading_bound_and_top(name, max_len):
    d = load_datum(name)
    for L in lambda_panel(d, (1, 2)):
        for ss, tss in stable_pairs(d, L, max_len):
            p = intertwiner_problem(d, L, ss, tss)
            for x in enumerate_A(p):
                N, _ = n_aa(x)
                assert 0 <= N <= p.rho
                if N == p.rho:
                    assert len(set(x.a)) == 1


@pytest.mark.parametrize("name, max_len", [("a1-sc", 3), ("a2-sc-twisted", 2), ("b2-sc", 2),
                                           ("a2-adj", 2)])
def test_strict_equals_graded_at_identity(name, max_len):
    d = load_datum(name)
    for L in lambda_panel(d, (1, 2, 3)):
        for ss, tss in stable_pairs(d, L, max_len):
            p = intertwiner_problem(d, L, ss, tss)
            strict = [x.a for x in enumerate_A(p, "strict")]
            graded = [x.a for x in enumerate_A(p, "graded", w=identity(d))]
            assert strict == graded
            assert count_A(p, "graded", w=identity(d)) == len(graded)


def test_graded_table_total_b2():
    d = load_datum("b2-sc")
    L = KummerClass((H, F(0)))
    for ss, tss in stable_pairs(d, L, 2)[:20]:
        p = intertwiner_problem(d, L, ss, tss)
        for w in group_enumerate(d):
            if pullback(d, w, -L) != p.Ltilde:
                continue
            table = hom_dim_table(p, w)
            assert sum(table.values()) == count_A(p, "graded", w=w) == len(enumerate_A(p, "graded", w=w))


def test_parabolic_variant_extremes():
    d = load_datum("a2-sc")
    L = KummerClass.zero(2)
    p = intertwiner_problem(d, L, (0, 1), (1, 0))
    assert [x.a for x in enumerate_A(p, "parabolic", J=(0, 1))] == [x.a for x in enumerate_A(p, "general")]
    assert all(x.a[0] == identity(d) for x in enumerate_A(p, "parabolic", J=()))


def test_general_variant_uses_conditional_steps():
    d = load_datum("a2-sc")
    L = KummerClass.zero(2)
    p = intertwiner_problem(d, L, (0, 1), (1, 0))
    shape = lhs_shape(p, "general")
    assert count_chains(shape) == len(enumerate_chains(shape)) == count_A(p, "general")


def test_frakA_examples():
    r = frakA_check(A1, KummerClass.zero(1), (0,), (0,))
    assert r.count_top == 1 and r.n_L == 1 and r.witness == from_word(A1, [0])
    odd = load_datum("a1-sc").with_q(3)
    r = frakA_check(odd, KummerClass((H,)), (0,), (0,))
    assert (r.count_top, r.n_L, r.witness) == (0, 0, None)
    a2 = load_datum("a2-sc")
    r = frakA_check(a2, KummerClass.zero(2), (0, 1, 0), (0, 1, 0))
    assert r.count_top == 1 and r.witness == longest_element(a2)


def test_frakA_needs_orbit_cover():
    with pytest.raises(ValueError, match="orbit"):
        frakA_check(load_datum("a2-sc"), KummerClass.zero(2), (0,), (0,))


B2 = load_datum("b2-sc")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=3), st.lists(st.integers(0, 1), max_size=3),
       st.sampled_from(lambda_panel(B2, (1, 2))), st.sampled_from(["strict", "general"]))
def test_count_agrees_with_enumeration(ss, tss, L, variant):
    from hypothesis import assume
    assume(is_wF_fixed(B2, seq_product(B2, ss), L) and is_wF_fixed(B2, seq_product(B2, tss), L))
    p = intertwiner_problem(B2, L, ss, tss)
    shape = lhs_shape(p, variant)
    assert count_chains(shape) == len(enumerate_chains(shape))
