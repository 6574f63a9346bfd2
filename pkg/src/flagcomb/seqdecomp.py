"""Splitting a sequence of simple reflections along the subsystem of a Kummer class.

Sequences are tuples of 0-based simple indices, with ``None`` standing for
the neutral letter. For a class L the sequence s_1..s_r is rewritten as
S_1 ... S_b omega, where each S_e is a simple reflection of W_L and omega
makes no positive root of R_L negative under its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from . import _linalg as la
from .kummer import (
    KummerClass, in_weyl_subgroup, is_twist_fixed, ltilde, subsystem,
)
from .rootdata import RootDatum
from .weyl import Twist, WeylElt, from_word, identity, sigma_twist

__all__ = [
    "Seq", "SeqDecomposition", "DecompositionError", "seq_product", "palindrome",
    "palindrome_root", "compute_iss", "decompose_sequence", "drop_index", "check_twist",
    "normalize_seq",
]

Seq = tuple[Optional[int], ...]


class DecompositionError(AssertionError):
    pass


def normalize_seq(ss: Sequence[Optional[int]]) -> Seq:
    return tuple(None if s is None else int(s) for s in ss)


def seq_product(d: RootDatum, ss: Seq) -> WeylElt:
    return _product(d, tuple(s for s in ss if s is not None))


@lru_cache(maxsize=1 << 16)
def _product(d: RootDatum, word: tuple[int, ...]) -> WeylElt:
    return from_word(d, word)


def palindrome(d: RootDatum, ss: Seq, i: int) -> WeylElt:
    """s_1 ... s_i ... s_1 (0-based i), skipping neutral letters."""
    head = [s for s in ss[:i] if s is not None]
    mid = [] if ss[i] is None else [ss[i]]
    return from_word(d, head + mid + head[::-1])


def palindrome_root(d: RootDatum, ss: Seq, i: int) -> int:
    """Index of s_1 ... s_{i-1}(alpha_{s_i}); the palindrome is its reflection."""
    prefix = seq_product(d, ss[:i])
    return prefix.act_root(d.simple_root_index[ss[i]])


def compute_iss(d: RootDatum, L: KummerClass, ss: Seq) -> tuple[int, ...]:
    """Positions i (0-based) with s_i non-neutral and the i-th palindrome in W_L."""
    return _iss(d, L, normalize_seq(ss))


@lru_cache(maxsize=1 << 16)
def _iss(d: RootDatum, L: KummerClass, ss: Seq) -> tuple[int, ...]:
    roots = subsystem(d, L).roots
    out = []
    for i, s in enumerate(ss):
        if s is None:
            continue
        by_root = palindrome_root(d, ss, i) in roots
        by_search = in_weyl_subgroup(d, L, palindrome(d, ss, i))
        if by_root != by_search:
            raise DecompositionError(f"palindrome criterion disagrees at position {i + 1}")
        if by_root:
            out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class SeqDecomposition:
    ss: Seq
    iss: tuple[int, ...]
    SS: tuple[WeylElt, ...]
    omega: WeylElt

    @property
    def b(self) -> int:
        return len(self.iss)


def decompose_sequence(d: RootDatum, L: KummerClass, ss: Seq) -> SeqDecomposition:
    return _decompose(d, L, normalize_seq(ss))


@lru_cache(maxsize=1 << 16)
def _decompose(d: RootDatum, L: KummerClass, ss: Seq) -> SeqDecomposition:
    iss = compute_iss(d, L, ss)
    SS = []
    cur = list(ss)
    for i in iss:
        SS.append(palindrome(d, tuple(cur), i))
        cur[i] = None
    omega = seq_product(d, tuple(cur))
    dec = SeqDecomposition(ss, iss, tuple(SS), omega)
    _verify(d, L, dec)
    return dec


def _verify(d: RootDatum, L: KummerClass, dec: SeqDecomposition) -> None:
    refl = set(subsystem(d, L).reflections)
    for e, S in enumerate(dec.SS):
        if S not in refl:
            raise DecompositionError(f"S_{e + 1} is not a simple reflection of W_L")
    if ltilde(d, L, dec.omega.inverse()) != 0:
        raise DecompositionError("omega^-1 sends a positive root of R_L to a negative root")
    prod = identity(d)
    for S in dec.SS:
        prod = prod * S
    if prod * dec.omega != seq_product(d, dec.ss):
        raise DecompositionError("S_1 ... S_b omega differs from the product of the sequence")
    if dec.iss and palindrome(d, dec.ss, dec.iss[0]) not in refl:
        raise DecompositionError("first palindrome is not a simple reflection of W_L")


def drop_index(d: RootDatum, L: KummerClass, ss: Seq, j: int) -> Seq:
    """Replace entry j (0-based, in the index set) by the neutral letter."""
    ss = normalize_seq(ss)
    iss = compute_iss(d, L, ss)
    if j not in iss:
        raise ValueError(f"position {j + 1} is not in the index set {[i + 1 for i in iss]}")
    out = ss[:j] + (None,) + ss[j + 1:]
    if set(compute_iss(d, L, out)) != set(iss) - {j}:
        raise DecompositionError("dropping an index changed the other indices")
    return out


def _x_matrix(tw: Twist) -> la.Mat:
    # the action on X is the inverse transpose of the action on Y
    return la.transpose(tw.inv_matrix)


def check_twist(d: RootDatum, L: KummerClass, ss: Seq, twist: Twist | None = None):
    """Return (omega c, report) after checking omega c permutes R_L, its coroots and R+_L."""
    ss = normalize_seq(ss)
    c = sigma_twist(d) if twist is None else twist
    if not is_twist_fixed(d, seq_product(d, ss) * c, L):
        raise ValueError("the class is not fixed by the sequence times Frobenius")
    dec = decompose_sequence(d, L, ss)
    oc = dec.omega * c
    sub = subsystem(d, L)
    xmat = _x_matrix(oc)
    root_img = {d.root_index.get(la.matvec(xmat, d.roots[k])) for k in sub.roots}
    coroot_img = {oc.perm[k] for k in sub.roots}
    pos_img = {d.root_index.get(la.matvec(xmat, d.roots[k])) for k in sub.positive}
    report = {
        "permutes_roots": root_img == set(sub.roots),
        "permutes_coroots": coroot_img == set(sub.roots),
        "preserves_positive": pos_img == set(sub.positive),
        "fixes_class": is_twist_fixed(d, oc, L),
    }
    if not all(report.values()):
        raise DecompositionError(f"omega c fails: {report}")
    return oc, report
