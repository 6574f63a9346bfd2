"""Kummer classes lambda: Y -> Q/Z and the root subsystems they cut out."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache, lru_cache
from math import gcd
from typing import Iterable, Sequence

from . import _linalg as la
from .rootdata import RootDatum
from .weyl import Twist, WeylElt, group_enumerate, identity, sigma_twist

__all__ = [
    "KummerClass", "SubSystem", "subsystem", "pullback", "is_wF_fixed", "is_twist_fixed",
    "ltilde", "reflection", "weyl_subgroup", "in_weyl_subgroup", "wprime", "wprime0",
    "wprime_decompose", "torus_fixed_order", "descent_to_subsystem", "pullback_classes",
]


@dataclass(frozen=True)
class KummerClass:
    """Values of lambda on the standard basis of Y, reduced into [0, 1)."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(Fraction(v) % 1 for v in self.values)
        object.__setattr__(self, "values", vals)
        # classes key many caches; Fraction hashing is slow
        object.__setattr__(self, "_hash", hash(vals))

    def __hash__(self):
        return self._hash

    @classmethod
    def parse(cls, items: Iterable) -> KummerClass:
        """Accept Fractions, ints or strings like ``"1/2"``."""
        return cls(tuple(Fraction(str(x).strip()) for x in items))

    @classmethod
    def zero(cls, m: int) -> KummerClass:
        return cls((Fraction(0),) * m)

    def __call__(self, y: Sequence[int]) -> Fraction:
        return sum((v * c for v, c in zip(self.values, y)), Fraction(0)) % 1

    def __neg__(self) -> KummerClass:
        return KummerClass(tuple(-v for v in self.values))

    def dual(self) -> KummerClass:
        return -self

    @property
    def order(self) -> int:
        out = 1
        for v in self.values:
            out = out * v.denominator // gcd(out, v.denominator)
        return out

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def check(self, d: RootDatum) -> KummerClass:
        if len(self.values) != d.rank_torus:
            raise ValueError(f"lambda has {len(self.values)} values, datum has rank {d.rank_torus}")
        for v in self.values:
            if v.denominator % d.p == 0:
                raise ValueError(f"denominator of {v} is divisible by p={d.p}")
        return self

    def to_json(self) -> list[str]:
        return [f"{v.numerator}/{v.denominator}" for v in self.values]


@dataclass(frozen=True)
class SubSystem:
    roots: frozenset[int]
    positive: frozenset[int]
    simple: tuple[int, ...]
    reflections: tuple[WeylElt, ...]

    @property
    def coroots(self) -> frozenset[int]:
        # coroots share the root indexing
        return self.roots

    def is_full(self, d: RootDatum) -> bool:
        return len(self.roots) == len(d.roots)


def reflection(d: RootDatum, k: int) -> WeylElt:
    """The reflection in root k, acting on Y by y -> y - <alpha, y> alpha^vee."""
    a, c = d.roots[k], d.coroots[k]
    m = d.rank_torus
    mat = tuple(tuple(int(r == s) - c[r] * a[s] for s in range(m)) for r in range(m))
    return WeylElt(d, mat)


@cache
def subsystem(d: RootDatum, L: KummerClass) -> SubSystem:
    roots = frozenset(k for k, c in enumerate(d.coroots) if L(c) == 0)
    pos = frozenset(k for k in roots if d.is_positive(k))
    vecs = {d.roots[k] for k in pos}
    simple = []
    for k in sorted(pos):
        r = d.roots[k]
        if not any(tuple(a - b for a, b in zip(r, d.roots[j])) in vecs for j in pos if j != k):
            simple.append(k)
    return SubSystem(roots, pos, tuple(simple), tuple(reflection(d, k) for k in simple))


def pullback(d: RootDatum, w: WeylElt | Twist, L: KummerClass) -> KummerClass:
    """lambda o w on Y."""
    cols = la.transpose(w.matrix)
    return KummerClass(tuple(L(col) for col in cols))


@lru_cache(maxsize=1 << 15)
def is_twist_fixed(d: RootDatum, tw: WeylElt | Twist, L: KummerClass) -> bool:
    """q * lambda(tw(y)) == lambda(y) for every basis vector y."""
    cols = la.transpose(tw.matrix)
    return all((d.q * L(col)) % 1 == v for col, v in zip(cols, L.values))


def is_wF_fixed(d: RootDatum, w: WeylElt, L: KummerClass) -> bool:
    """Whether (wF)^* L ~ L, with F acting on Y as q * sigma."""
    return is_twist_fixed(d, w * sigma_twist(d), L)


def ltilde(d: RootDatum, L: KummerClass, w: WeylElt) -> int:
    sub = subsystem(d, L)
    return sum(1 for k in sub.positive if not d.is_positive(w.act_root(k)))


@cache
def weyl_subgroup(d: RootDatum, L: KummerClass) -> frozenset[WeylElt]:
    """W_L, generated by the simple reflections of R_L."""
    gens = subsystem(d, L).reflections
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


def descent_to_subsystem(d: RootDatum, L: KummerClass, w: WeylElt) -> tuple[WeylElt, WeylElt]:
    """Write w = A * f with A in W_L and f(R+_L) = R+_L; needs w(R_L) = R_L."""
    sub = subsystem(d, L)
    if {w.act_root(k) for k in sub.roots} != set(sub.roots):
        raise ValueError(f"{w!r} does not stabilise R_L")
    A = identity(d)
    v = w
    while True:
        image = {v.act_root(k) for k in sub.positive}
        bad = [k for k in sub.simple if d.negate(k) in image]
        if not bad:
            return A, v
        s = reflection(d, bad[0])
        v = s * v
        A = A * s


def in_weyl_subgroup(d: RootDatum, L: KummerClass, w: WeylElt) -> bool:
    """Membership in W_L, decided two ways that must agree."""
    by_search = w in weyl_subgroup(d, L)
    sub = subsystem(d, L)
    if {w.act_root(k) for k in sub.roots} != set(sub.roots):
        by_descent = False
    else:
        by_descent = descent_to_subsystem(d, L, w)[1].is_identity()
    if by_search != by_descent:
        raise AssertionError(f"W_L membership disagrees for {w!r}")
    return by_search


@cache
def pullback_classes(d: RootDatum, L: KummerClass) -> tuple[KummerClass, ...]:
    """lambda o w for every w, in enumeration order."""
    return tuple(pullback(d, w, L) for w in group_enumerate(d))


@cache
def wprime(d: RootDatum, L: KummerClass) -> tuple[WeylElt, ...]:
    """W'_L = {w : lambda o w = lambda}."""
    return tuple(w for w, M in zip(group_enumerate(d), pullback_classes(d, L)) if M == L)


@cache
def wprime0(d: RootDatum, L: KummerClass) -> tuple[WeylElt, ...]:
    """Elements of W'_L that preserve R+_L."""
    pos = subsystem(d, L).positive
    return tuple(w for w in wprime(d, L) if {w.act_root(k) for k in pos} == set(pos))


def wprime_decompose(d: RootDatum, L: KummerClass, w: WeylElt):
    """(in W'_L, A, f) with w = A f, A in W_L, f in W'^0_L; A, f are None outside W'_L."""
    if pullback(d, w, L) != L:
        return False, None, None
    A, f = descent_to_subsystem(d, L, w)
    return True, A, f


def torus_fixed_order(d: RootDatum, w: WeylElt | Twist, twist: Twist | None = None) -> int:
    """|T^{F'}| for F' = w F, as |det(q M - 1)| with M the Y-matrix of w sigma."""
    tw = w * (sigma_twist(d) if twist is None else twist)
    m = d.rank_torus
    mat = tuple(tuple(d.q * tw.matrix[i][j] - int(i == j) for j in range(m)) for i in range(m))
    return abs(la.det(mat))
