"""Weyl group elements, parabolic cosets and Bruhat order.

An element is stored by its matrix on Y. Words are certificates only; two
elements are equal exactly when their matrices are. Root actions are read
off the coroots, using w(alpha)^vee = w(alpha^vee).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cache, cached_property
from typing import Iterable, Sequence

from . import _linalg as la
from ._linalg import Mat
from .rootdata import RootDatum

__all__ = [
    "WeylElt", "Twist", "WeylCapExceeded", "identity", "simple_reflection", "from_word",
    "group_enumerate", "element_index", "longest_element", "parabolic_subgroup",
    "coset_minima", "double_coset_min", "bruhat_leq", "bruhat_interval", "cross_type",
    "left_descents", "right_descents", "sigma_twist", "sigma_on_w", "reduced_words",
]

DEFAULT_CAP = 10**5


class WeylCapExceeded(RuntimeError):
    pass


class WeylElt:
    """An element of W acting on Y, with an optional (not necessarily reduced) word."""

    __slots__ = ("d", "matrix", "_word", "_perm", "_length", "_hash", "_rword")

    def __init__(self, d: RootDatum, matrix: Mat, word: Sequence[int] | None = None,
                 perm: tuple[int, ...] | None = None):
        self.d = d
        self.matrix = matrix
        self._word = None if word is None else tuple(word)
        self._perm = perm
        self._length = None
        self._hash = None
        self._rword = None

    def __eq__(self, other):
        return isinstance(other, WeylElt) and self.matrix == other.matrix

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.matrix)
        return self._hash

    def __repr__(self):
        w = "".join(f"s{i+1}" for i in self.reduced_word) or "1"
        return f"WeylElt({w})"

    @property
    def perm(self) -> tuple[int, ...]:
        """perm[k] is the index of w(root k)."""
        if self._perm is None:
            d = self.d
            idx = d.coroot_index
            try:
                self._perm = tuple(idx[la.matvec(self.matrix, c)] for c in d.coroots)
            except KeyError:
                raise ValueError("matrix does not permute the coroots") from None
        return self._perm

    @property
    def length(self) -> int:
        if self._length is None:
            npos = self.d.npos
            self._length = sum(1 for k in range(npos) if self.perm[k] >= npos)
        return self._length

    @property
    def word(self) -> tuple[int, ...]:
        return self._word if self._word is not None else self.reduced_word

    @property
    def reduced_word(self) -> tuple[int, ...]:
        """Reduced word obtained by repeatedly stripping the smallest left descent."""
        if self._rword is None:
            out = []
            w = self
            while True:
                ds = left_descents(w)
                if not ds:
                    break
                i = min(ds)
                out.append(i)
                w = simple_reflection(self.d, i) * w
            self._rword = tuple(out)
        return self._rword

    def is_identity(self) -> bool:
        return self.matrix == la.identity(len(self.matrix))

    def __mul__(self, other):
        if not isinstance(other, WeylElt):
            return NotImplemented
        word = None
        if self._word is not None and other._word is not None:
            word = self._word + other._word
        perm = None
        if self._perm is not None and other._perm is not None:
            p = self._perm
            perm = tuple(p[k] for k in other._perm)
        return WeylElt(self.d, la.matmul(self.matrix, other.matrix), word, perm)

    def inverse(self) -> WeylElt:
        return from_word(self.d, tuple(reversed(self.word)))

    def act_root(self, k: int) -> int:
        return self.perm[k]

    def act_y(self, y: Sequence[int]) -> tuple[int, ...]:
        return la.matvec(self.matrix, y)


@cache
def identity(d: RootDatum) -> WeylElt:
    return WeylElt(d, la.identity(d.rank_torus), (), tuple(range(len(d.roots))))


@cache
def simple_reflection(d: RootDatum, i: int) -> WeylElt:
    if not 0 <= i < d.n:
        raise IndexError(f"simple index {i + 1} out of range 1..{d.n}")
    a, c = d.simple_roots[i], d.simple_coroots[i]
    m = d.rank_torus
    # y -> y - <alpha_i, y> a_i^vee
    mat = tuple(tuple(int(r == s) - c[r] * a[s] for s in range(m)) for r in range(m))
    return WeylElt(d, mat, (i,))


def from_word(d: RootDatum, word: Iterable[int]) -> WeylElt:
    word = tuple(word)
    for i in word:
        if not 0 <= i < d.n:
            raise IndexError(f"simple index {i + 1} out of range 1..{d.n}")
    w = identity(d)
    for i in word:
        w = w * simple_reflection(d, i)
    return WeylElt(d, w.matrix, word, w.perm)


def left_descents(w: WeylElt) -> frozenset[int]:
    """{i : l(s_i w) < l(w)}, i.e. w^-1(alpha_i) is negative."""
    d = w.d
    perm = w.perm
    npos = d.npos
    hits = {perm[k] for k in range(npos, 2 * npos)}
    return frozenset(i for i, r in enumerate(d.simple_root_index) if r in hits)


def right_descents(w: WeylElt) -> frozenset[int]:
    """{i : l(w s_i) < l(w)}, i.e. w(alpha_i) is negative."""
    d = w.d
    return frozenset(i for i, r in enumerate(d.simple_root_index) if w.perm[r] >= d.npos)


@cache
def _enumerate(d: RootDatum, cap: int) -> tuple[WeylElt, ...]:
    seen = {identity(d)}
    level = [identity(d)]
    while level:
        nxt = []
        for w in level:
            for i in range(d.n):
                if i in right_descents(w):
                    continue
                v = w * simple_reflection(d, i)
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
                    if len(seen) > cap:
                        raise WeylCapExceeded(f"|W| exceeds the cap {cap}")
        level = nxt
    return tuple(sorted(seen, key=lambda w: (w.length, w.reduced_word)))


def group_enumerate(d: RootDatum, cap: int = DEFAULT_CAP) -> list[WeylElt]:
    """All elements of W, sorted by length then reduced word."""
    return list(_enumerate(d, cap))


@cache
def element_index(d: RootDatum) -> dict[WeylElt, int]:
    return {w: k for k, w in enumerate(_enumerate(d, DEFAULT_CAP))}


@cache
def longest_element(d: RootDatum) -> WeylElt:
    """The unique element sending every positive root to a negative one."""
    w = identity(d)
    while True:
        asc = [i for i in range(d.n) if i not in right_descents(w)]
        if not asc:
            return w
        w = w * simple_reflection(d, asc[0])


@cache
def parabolic_subgroup(d: RootDatum, J: frozenset[int]) -> frozenset[WeylElt]:
    gens = [simple_reflection(d, j) for j in sorted(J)]
    seen = {identity(d)}
    frontier = [identity(d)]
    while frontier:
        nxt = []
        for w in frontier:
            for s in gens:
                v = w * s
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return frozenset(seen)


def coset_minima(d: RootDatum, J, Jp) -> tuple[list[WeylElt], list[WeylElt], list[WeylElt]]:
    """(^J W, W^J', ^J W^J'): elements with no left descent in J / right descent in J'."""
    J, Jp = frozenset(J), frozenset(Jp)
    left, right, both = [], [], []
    for w in group_enumerate(d):
        lmin = not (left_descents(w) & J)
        rmin = not (right_descents(w) & Jp)
        if lmin:
            left.append(w)
        if rmin:
            right.append(w)
        if lmin and rmin:
            both.append(w)
    return left, right, both


def double_coset_min(d: RootDatum, J, w: WeylElt, K) -> WeylElt:
    """min(W_J w W_K), reached by stripping left descents in J and right descents in K."""
    J, K = frozenset(J), frozenset(K)
    while True:
        ld = left_descents(w) & J
        if ld:
            w = simple_reflection(d, min(ld)) * w
            continue
        rd = right_descents(w) & K
        if rd:
            w = w * simple_reflection(d, min(rd))
            continue
        return w


def bruhat_interval(y: WeylElt) -> frozenset[WeylElt]:
    """{x : x <= y}: products of subwords of a reduced word of y."""
    d = y.d
    cur = {identity(d)}
    for i in y.reduced_word:
        s = simple_reflection(d, i)
        cur |= {u * s for u in cur}
    return frozenset(cur)


def bruhat_leq(d: RootDatum, x: WeylElt, y: WeylElt) -> bool:
    if x.length > y.length:
        return False
    return x in bruhat_interval(y)


def cross_type(d: RootDatum, J, Jp, u: WeylElt) -> frozenset[int]:
    """J cap u J' u^-1, for u in ^J W^J'."""
    J, Jp = frozenset(J), frozenset(Jp)
    if (left_descents(u) & J) or (right_descents(u) & Jp):
        raise ValueError(f"{u!r} is not a minimal double coset representative")
    simple = d.simple_root_index
    images = {u.act_root(simple[j]) for j in Jp}
    return frozenset(i for i in J if simple[i] in images)


def sigma_on_w(d: RootDatum, w: WeylElt) -> WeylElt:
    """The diagram automorphism applied to w (sigma w sigma^-1)."""
    return sigma_twist(d).conj(w)


def reduced_words(w: WeylElt) -> list[tuple[int, ...]]:
    """Every reduced word of w."""
    d = w.d
    out: list[tuple[int, ...]] = []

    def walk(v: WeylElt, suffix: tuple[int, ...]):
        rd = right_descents(v)
        if not rd:
            out.append(suffix)
            return
        for i in sorted(rd):
            walk(v * simple_reflection(d, i), (i,) + suffix)

    walk(w, ())
    return sorted(out)


@dataclass(frozen=True)
class Twist:
    """An automorphism of T permuting R, R^vee and R^+, given by its Y-matrix.

    Products with Weyl elements are again twists; ``conj`` applies the
    induced automorphism of W.
    """

    d: RootDatum = field(repr=False)
    matrix: Mat

    def __eq__(self, other):
        return isinstance(other, Twist) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    @cached_property
    def inv_matrix(self) -> Mat:
        return la.integer_inverse(self.matrix)

    @cached_property
    def perm(self) -> tuple[int, ...]:
        idx = self.d.coroot_index
        return tuple(idx[la.matvec(self.matrix, c)] for c in self.d.coroots)

    def act_root(self, k: int) -> int:
        return self.perm[k]

    def conj(self, w: WeylElt) -> WeylElt:
        mat = la.matmul(la.matmul(self.matrix, w.matrix), self.inv_matrix)
        return WeylElt(self.d, mat)

    def order(self, cap: int = 64) -> int:
        ident = la.identity(len(self.matrix))
        cur = self.matrix
        for k in range(1, cap + 1):
            if cur == ident:
                return k
            cur = la.matmul(cur, self.matrix)
        raise ValueError("twist does not have finite order")

    def __mul__(self, other):
        if isinstance(other, WeylElt):
            return Twist(self.d, la.matmul(self.matrix, other.matrix))
        if isinstance(other, Twist):
            return Twist(self.d, la.matmul(self.matrix, other.matrix))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, WeylElt):
            return Twist(self.d, la.matmul(other.matrix, self.matrix))
        return NotImplemented


@cache
def sigma_twist(d: RootDatum) -> Twist:
    return Twist(d, d.sigma_y)
