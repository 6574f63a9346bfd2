"""Chains (J_n, w_n) indexing the pieces of the partial flag manifold P_J.

A chain starts at J_0 = J, shrinks by J_{n+1} = J_n cap w_n sigma(J_n) w_n^-1
and keeps w_n minimal in its (W_{J_n}, W_{sigma(J_n)}) double coset. It is
stored up to the first index N with (J_N, w_N) = (J_{N+1}, w_{N+1}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .rootdata import RootDatum
from .weyl import (
    WeylElt, coset_minima, cross_type, double_coset_min, left_descents, parabolic_subgroup,
    right_descents,
)

__all__ = [
    "ParaType", "ChainError", "tt_from_z", "enumerate_tt", "shift_tt", "piece_dim",
    "validate_tt", "parabolic_positive_roots",
]


class ChainError(ValueError):
    """A chain violates one of the defining conditions."""


@dataclass(frozen=True)
class ParaType:
    J: frozenset[int]
    chain: tuple[tuple[frozenset[int], WeylElt], ...]

    @property
    def N(self) -> int:
        return len(self.chain) - 1

    @property
    def J_inf(self) -> frozenset[int]:
        return self.chain[-1][0]

    @property
    def w_inf(self) -> WeylElt:
        return self.chain[-1][1]

    def entry(self, n: int) -> tuple[frozenset[int], WeylElt]:
        return self.chain[min(n, self.N)]


def _next_J(d: RootDatum, Jn: frozenset[int], wn: WeylElt) -> frozenset[int]:
    return cross_type(d, Jn, d.sigma_subset(Jn), wn)


def _hard_stop(d: RootDatum) -> int:
    return d.n + 1


def tt_from_z(d: RootDatum, J: Iterable[int], z: WeylElt) -> ParaType:
    """The chain whose limit element is z, for z in ^J W."""
    J = frozenset(J)
    if left_descents(z) & J:
        raise ChainError(f"{z!r} is not minimal in W_J z")
    Jn = J
    wn = double_coset_min(d, J, z, d.sigma_subset(Jn))
    chain = [(Jn, wn)]
    while True:
        Jn1 = _next_J(d, Jn, wn)
        wn1 = double_coset_min(d, J, z, d.sigma_subset(Jn1))
        if (Jn1, wn1) == (Jn, wn):
            break
        if len(chain) > _hard_stop(d):
            raise RuntimeError("chain failed to stabilise")
        chain.append((Jn1, wn1))
        Jn, wn = Jn1, wn1
    t = ParaType(J, tuple(chain))
    if t.w_inf != z:
        raise RuntimeError(f"limit {t.w_inf!r} differs from {z!r}")
    return t


def _double_coset(d: RootDatum, K: frozenset[int], w: WeylElt, Kp: frozenset[int]) -> set[WeylElt]:
    left, right = parabolic_subgroup(d, K), parabolic_subgroup(d, Kp)
    return {u * w * v for u in left for v in right}


def enumerate_tt(d: RootDatum, J: Iterable[int]) -> list[ParaType]:
    """All admissible chains for J, found by searching over every branch."""
    J = frozenset(J)
    out: list[ParaType] = []
    sJ = d.sigma_subset(J)
    _, _, starts = coset_minima(d, J, sJ)

    def extend(chain: list):
        if len(chain) > _hard_stop(d):
            raise RuntimeError("chain failed to stabilise")
        Jn, wn = chain[-1]
        Jn1 = _next_J(d, Jn, wn)
        sJn1 = d.sigma_subset(Jn1)
        coset = _double_coset(d, Jn1, wn, d.sigma_subset(Jn))
        cands = [v for v in coset if not (left_descents(v) & Jn1) and not (right_descents(v) & sJn1)]
        for v in sorted(cands, key=lambda x: (x.length, x.reduced_word)):
            if (Jn1, v) == (Jn, wn):
                out.append(ParaType(J, tuple(chain)))
            else:
                extend(chain + [(Jn1, v)])

    for w0 in starts:
        extend([(J, w0)])
    return out


def shift_tt(t: ParaType, m: int | float) -> ParaType:
    """The chain (J_{n+m}, w_{n+m}); m = math.inf gives the constant limit chain."""
    if m == math.inf or m >= t.N:
        return ParaType(t.J_inf, ((t.J_inf, t.w_inf),))
    if m < 0:
        raise ValueError("shift must be non-negative")
    m = int(m)
    return ParaType(t.chain[m][0], t.chain[m:])


def parabolic_positive_roots(d: RootDatum, K: Iterable[int]) -> frozenset[int]:
    K = frozenset(K)
    return frozenset(
        k for k in range(d.npos)
        if all(c == 0 for i, c in enumerate(d.root_coeffs[k]) if i not in K)
    )


def piece_dim(d: RootDatum, t: ParaType) -> int:
    # U_{P_K} is the product of root subgroups over R+ minus R+_K, and F(U_a) = U_{sigma(a)}
    K = parabolic_positive_roots(d, t.J_inf)
    w = t.w_inf
    sig = d.sigma_root_perm
    count = 0
    for k in range(d.npos):
        if k in K:
            continue
        img = w.act_root(sig[k])
        if not d.is_positive(img) or img in K:
            count += 1
    return count


def validate_tt(d: RootDatum, t: ParaType) -> None:
    """Raise ChainError unless t satisfies every defining condition of a chain."""
    if t.chain[0][0] != t.J:
        raise ChainError("J_0 differs from J")
    for n, (Jn, wn) in enumerate(t.chain):
        sJn = d.sigma_subset(Jn)
        if (left_descents(wn) & Jn) or (right_descents(wn) & sJn):
            raise ChainError(f"w_{n} is not a minimal double coset representative")
        if n == 0:
            continue
        Jp, wp = t.chain[n - 1]
        if Jn != _next_J(d, Jp, wp):
            raise ChainError(f"J_{n} does not follow from (J_{n-1}, w_{n-1})")
        if wn not in _double_coset(d, Jn, wp, d.sigma_subset(Jp)):
            raise ChainError(f"w_{n} leaves the double coset of w_{n-1}")
    Jl, wl = t.chain[-1]
    if _next_J(d, Jl, wl) != Jl:
        raise ChainError("chain does not stabilise at its last entry")
    if len(t.chain) > _hard_stop(d):
        raise ChainError("chain longer than the stabilisation bound")
    if left_descents(t.w_inf) & t.J:
        raise ChainError("limit element is not in ^J W")
