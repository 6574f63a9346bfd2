"""Finite checks around the W_L-side functor for groups with connected centre.

Every check runs over sequences up to a length cap, so a pass is a
certificate for that truncation only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .intertwine import (
    ConsistencyError, chain_halves, count_chains, enumerate_A, enumerate_rhs, f_set, intertwiner_problem,
    lhs_shape, psi_forward, psi_inverse, rhs_shape,
)
from .kummer import KummerClass, in_weyl_subgroup, is_wF_fixed, wprime
from .rootdata import RootDatum
from .seqdecomp import decompose_sequence, seq_product
from .weyl import WeylElt, identity

__all__ = [
    "XellFamily", "xell_family", "centre_hypothesis", "omega_invariance", "phi_check",
    "PhiReport", "HypothesisError", "FamilySweep", "family_sweep",
]

DEFAULT_MAX_LEN = 5


class HypothesisError(ValueError):
    """The centre hypothesis fails or the family is empty."""


@lru_cache(maxsize=1024)
def centre_hypothesis(d: RootDatum, L: KummerClass) -> bool:
    """Whether every w with w^* L = L already lies in W_L."""
    return all(in_weyl_subgroup(d, L, w) for w in wprime(d, L))


@dataclass(frozen=True)
class XellFamily:
    L: KummerClass
    max_len: int
    members: tuple[tuple[int, ...], ...]


def xell_family(d: RootDatum, L: KummerClass, max_len: int = DEFAULT_MAX_LEN) -> XellFamily:
    members = []
    for k in range(max_len + 1):
        for ss in itertools.product(range(d.n), repeat=k):
            if is_wF_fixed(d, seq_product(d, ss), L):
                members.append(ss)
    return XellFamily(L, max_len, tuple(members))


def omega_invariance(d: RootDatum, L: KummerClass, max_len: int = DEFAULT_MAX_LEN):
    """(common omega, family); raises if omega depends on the member."""
    if not centre_hypothesis(d, L):
        raise HypothesisError("W'_L is larger than W_L")
    fam = xell_family(d, L, max_len)
    if not fam.members:
        raise HypothesisError(f"no sequence of length <= {max_len} stabilises the class")
    first = fam.members[0]
    omega = decompose_sequence(d, L, first).omega
    for ss in fam.members[1:]:
        other = decompose_sequence(d, L, ss).omega
        if other != omega:
            raise ConsistencyError(f"omega differs between {first} and {ss}")
    return omega, fam


@dataclass(frozen=True)
class PhiReport:
    ss: tuple[int, ...]
    tss: tuple[int, ...]
    SS: tuple[WeylElt, ...]
    tSS: tuple[WeylElt, ...]
    omega: WeylElt
    F_set: tuple[WeylElt, ...]
    lhs_card: int
    rhs_card: int
    roundtrip_ok: bool | None

    @property
    def ok(self) -> bool:
        return (self.F_set == (identity(self.omega.d),) and self.lhs_card == self.rhs_card
                and self.roundtrip_ok is not False)


def phi_check(d: RootDatum, L: KummerClass, ss: Sequence[int], tss: Sequence[int],
              roundtrip: bool = True) -> PhiReport:
    """Compare the two distinguished bases; ``roundtrip=False`` compares counts only."""
    if not centre_hypothesis(d, L):
        raise HypothesisError("W'_L is larger than W_L")
    for s in (ss, tss):
        if not is_wF_fixed(d, seq_product(d, s), L):
            raise HypothesisError(f"{tuple(s)} does not stabilise the class")
    p = intertwiner_problem(d, L, ss, tss)
    fs = tuple(f_set(p))
    one = identity(d)
    if fs != (one,):
        raise ConsistencyError(f"F = {list(fs)} rather than {{1}}")
    ok = None
    if roundtrip:
        lhs = enumerate_A(p, "strict")
        rhs = enumerate_rhs(p, one)
        images = set()
        ok = True
        for x in lhs:
            f, A = psi_forward(x)
            images.add(A)
            ok &= f == one and psi_inverse(p, f, A) == x
        ok &= images == set(rhs)
        lhs_card, rhs_card = len(lhs), len(rhs)
    else:
        lhs_card = count_chains(lhs_shape(p, "strict"))
        rhs_card = count_chains(rhs_shape(p, one))
    return PhiReport(p.ss, p.tss, p.dec.SS, p.tdec.SS, p.dec.omega, fs, lhs_card, rhs_card, ok)


@dataclass(frozen=True)
class FamilySweep:
    omega: WeylElt
    members: tuple[tuple[int, ...], ...]
    F_set: tuple[WeylElt, ...]
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def mismatches(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        rows, cols = np.nonzero(self.lhs != self.rhs)
        return [(self.members[i], self.members[j]) for i, j in zip(rows, cols)]

    @property
    def ok(self) -> bool:
        return self.F_set == (identity(self.omega.d),) and not self.mismatches


def _bilinear(shapes) -> tuple[np.ndarray, np.ndarray]:
    """Head and closed-tail matrices whose product gives every pairwise chain count.

    Needs one start set and one closing map shared by all shapes.
    """
    n = len(shapes[0].table)
    starts, closing = shapes[0].starts, shapes[0].closing
    heads = np.zeros((len(shapes), len(starts) * n), dtype=np.int64)
    tails = np.zeros_like(heads)
    for row, shape in enumerate(shapes):
        if shape.starts != starts or shape.closing != closing:
            raise ConsistencyError("shapes do not share starts and closing map")
        hs, ts = chain_halves(shape)
        for i, (a0, dist) in enumerate(zip(starts, hs)):
            end = closing[a0]
            for m, mult in dist.items():
                heads[row, i * n + m] = mult
            for m in range(n):
                tails[row, i * n + m] = ts[m].get(end, 0)
    return heads, tails


def family_sweep(d: RootDatum, L: KummerClass, max_len: int = DEFAULT_MAX_LEN) -> FamilySweep:
    """Both basis counts for every pair of the family at once.

    The strict count for (ss, tss) pairs the right half of tss with the left
    half of ss, so the whole table is one matrix product; the same holds on
    the W_L side once omega is known to be constant.
    """
    omega, fam = omega_invariance(d, L, max_len)
    problems = [intertwiner_problem(d, L, ss, ss) for ss in fam.members]
    fs = tuple(f_set(problems[0]))
    one = identity(d)
    if fs != (one,):
        raise ConsistencyError(f"F = {list(fs)} rather than {{1}}")
    lh, lt = _bilinear([lhs_shape(p, "strict") for p in problems])
    rh, rt = _bilinear([rhs_shape(p, one) for p in problems])
    # entry [i, j] is the count for (members[i], members[j])
    return FamilySweep(omega, fam.members, fs, lt @ lh.T, rt @ rh.T)
