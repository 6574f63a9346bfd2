"""Index sets of chains (a_0, ..., a_rho) in W and the bijection onto the W_L side.

A chain first walks right along the second sequence (a_j = a_{j-1} or
a_{j-1} t_j), then left along the first (a = a or s_i a), and must close up
with a_rho = c a_0 c^-1. Each step is one of three kinds:

* ``free``: stay or move;
* ``forced``: move;
* ``cond``: move if that increases length, otherwise free.

The W_L side reuses the same enumerator with reflections of W_L as
letters, so both sides of the bijection go through one code path. A
separate transfer-matrix count gives an independent cardinality.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cache, cached_property, lru_cache
from typing import Iterable, NamedTuple, Optional, Sequence

from .kummer import (
    KummerClass, is_twist_fixed, pullback, pullback_classes, subsystem, weyl_subgroup, wprime0, wprime_decompose,
)
from .rootdata import RootDatum
from .seqdecomp import SeqDecomposition, compute_iss, decompose_sequence, seq_product
from .weyl import (
    Twist, WeylElt, group_enumerate, left_descents, longest_element, parabolic_subgroup,
    right_descents, sigma_twist, simple_reflection,
)

__all__ = [
    "GroupTable", "group_table", "ChainShape", "IntertwinerProblem", "IntertwinerIndex",
    "StabilityError", "ConsistencyError", "intertwiner_problem", "enumerate_A", "count_A",
    "enumerate_chains", "count_chains", "chain_halves", "lhs_shape", "rhs_shape", "enumerate_rhs", "f_set",
    "conj_SS", "psi_forward", "psi_inverse", "n_aa", "hom_dim_table", "frakA_check",
    "FrakAResult", "VARIANTS",
]

VARIANTS = ("strict", "general", "graded", "parabolic")
FREE, FORCED, COND = "free", "forced", "cond"


class StabilityError(ValueError):
    """A sequence times the twist does not fix the relevant class."""


class ConsistencyError(AssertionError):
    """Two routes that must agree did not."""


class GroupTable:
    """W with elements numbered in enumeration order and a full multiplication table."""

    def __init__(self, d: RootDatum):
        self.d = d
        self.elts = tuple(group_enumerate(d))
        self.index = {w: k for k, w in enumerate(self.elts)}
        idx = self.index
        self.mul = tuple(tuple(idx[u * v] for v in self.elts) for u in self.elts)
        e = idx[self.elts[0]]
        self.inv = tuple(row.index(e) for row in self.mul)
        self.length = tuple(w.length for w in self.elts)
        self.simple = tuple(idx[simple_reflection(d, i)] for i in range(d.n))
        self._conj: dict = {}

    def __len__(self):
        return len(self.elts)

    def conj_map(self, tw: Twist) -> tuple[int, ...]:
        """k -> index of tw w_k tw^-1."""
        if tw.matrix not in self._conj:
            self._conj[tw.matrix] = tuple(self.index[tw.conj(w)] for w in self.elts)
        return self._conj[tw.matrix]


@cache
def group_table(d: RootDatum) -> GroupTable:
    return GroupTable(d)


@dataclass(frozen=True)
class ChainShape:
    """Letters, step kinds, allowed starts and closing map for one index set."""

    table: GroupTable = field(repr=False)
    right: tuple[int, ...]
    right_kind: tuple[str, ...]
    left: tuple[int, ...]
    left_kind: tuple[str, ...]
    starts: tuple[int, ...]
    closing: tuple[int, ...] = field(repr=False)

    @property
    def rho(self) -> int:
        return len(self.right) + len(self.left)


def _step_options(kind: str, cur: int, moved: int, length) -> tuple[int, ...]:
    if kind == FORCED:
        return (moved,)
    if kind == COND and length[moved] > length[cur]:
        return (moved,)
    return (cur, moved)


def enumerate_chains(shape: ChainShape) -> list[tuple[int, ...]]:
    """Depth-first enumeration; chains come out grouped by a_0 in start order."""
    t = shape.table
    mul, length = t.mul, t.length
    nr = len(shape.right)
    out: list[tuple[int, ...]] = []

    def walk(chain: list[int], pos: int, target: int):
        cur = chain[-1]
        if pos == shape.rho:
            if cur == target:
                out.append(tuple(chain))
            return
        if pos < nr:
            moved = mul[cur][shape.right[pos]]
            kind = shape.right_kind[pos]
        else:
            moved = mul[shape.left[pos - nr]][cur]
            kind = shape.left_kind[pos - nr]
        for nxt in _step_options(kind, cur, moved, length):
            chain.append(nxt)
            walk(chain, pos + 1, target)
            chain.pop()

    for a0 in shape.starts:
        walk([a0], 0, shape.closing[a0])
    return out


def count_chains(shape: ChainShape) -> int:
    """Cardinality by pushing multiplicity vectors through the steps.

    The right-hand steps are pushed from each start and the left-hand steps
    from each intermediate element; both halves are cached separately and
    contracted against the closing map.
    """
    heads, tails = chain_halves(shape)
    total = 0
    for a0, dist in zip(shape.starts, heads):
        end = shape.closing[a0]
        total += sum(mult * tails[m].get(end, 0) for m, mult in dist.items())
    return total


def chain_halves(shape: ChainShape) -> tuple[tuple[dict[int, int], ...], tuple[dict[int, int], ...]]:
    """(per start, multiplicities after the right steps; per element, after the left steps)."""
    t = shape.table
    return (_push_from_starts(t, shape.right, shape.right_kind, shape.starts, True),
            _transfer(t, shape.left, shape.left_kind))


def _push(t: GroupTable, letters, kinds, dist: dict[int, int], on_right: bool) -> dict[int, int]:
    mul, length = t.mul, t.length
    for letter, kind in zip(letters, kinds):
        new: dict[int, int] = {}
        for cur, mult in dist.items():
            moved = mul[cur][letter] if on_right else mul[letter][cur]
            if kind == FORCED:
                opts = (moved,)
            elif kind == COND and length[moved] > length[cur]:
                opts = (moved,)
            else:
                opts = (cur, moved)
            for o in opts:
                new[o] = new.get(o, 0) + mult
        dist = new
    return dist


@lru_cache(maxsize=1 << 14)
def _push_from_starts(t, letters, kinds, starts, on_right) -> tuple[dict[int, int], ...]:
    return tuple(_push(t, letters, kinds, {a0: 1}, on_right) for a0 in starts)


@lru_cache(maxsize=1 << 14)
def _transfer(t, letters, kinds) -> tuple[dict[int, int], ...]:
    return tuple(_push(t, letters, kinds, {m: 1}, False) for m in range(len(t)))


def _check_seq(ss: Sequence) -> tuple[int, ...]:
    if any(s is None for s in ss):
        raise ValueError("sequences here must not contain the neutral letter")
    return tuple(int(s) for s in ss)


@dataclass(frozen=True)
class IntertwinerProblem:
    d: RootDatum = field(repr=False)
    L: KummerClass
    ss: tuple[int, ...]
    tss: tuple[int, ...]
    c: Twist
    Ltilde: KummerClass

    @property
    def r(self) -> int:
        return len(self.ss)

    @property
    def y(self) -> int:
        return len(self.tss)

    @property
    def rho(self) -> int:
        return self.r + self.y

    @cached_property
    def iss(self) -> tuple[int, ...]:
        return compute_iss(self.d, self.L, self.ss)

    @cached_property
    def itss(self) -> tuple[int, ...]:
        """Index set of the second sequence with respect to Ltilde (the general setting)."""
        return compute_iss(self.d, self.Ltilde, self.tss)

    @cached_property
    def itss_strict(self) -> tuple[int, ...]:
        """Index set of the second sequence with respect to L (the strict setting)."""
        return compute_iss(self.d, self.L, self.tss)

    @cached_property
    def dec(self) -> SeqDecomposition:
        return decompose_sequence(self.d, self.L, self.ss)

    @cached_property
    def tdec(self) -> SeqDecomposition:
        return decompose_sequence(self.d, self.L, self.tss)

    @cached_property
    def table(self) -> GroupTable:
        return group_table(self.d)

    @cached_property
    def wl_indices(self) -> frozenset[int]:
        return frozenset(self.idx(a) for a in weyl_subgroup(self.d, self.L))

    def idx(self, w: WeylElt) -> int:
        return self.table.index[w]

    def elt(self, k: int) -> WeylElt:
        return self.table.elts[k]


def intertwiner_problem(d: RootDatum, L: KummerClass, ss: Sequence, tss: Sequence,
                        c: Twist | None = None, Ltilde: KummerClass | None = None) -> IntertwinerProblem:
    L.check(d)
    Lt = -L if Ltilde is None else Ltilde.check(d)
    return IntertwinerProblem(d, L, _check_seq(ss), _check_seq(tss),
                              sigma_twist(d) if c is None else c, Lt)


@dataclass(frozen=True)
class IntertwinerIndex:
    a: tuple[WeylElt, ...]
    problem: IntertwinerProblem = field(compare=False, repr=False)


def _require_stable(p: IntertwinerProblem, strict: bool) -> None:
    d = p.d
    if not is_twist_fixed(d, seq_product(d, p.ss) * p.c, p.L):
        raise StabilityError("first sequence times the twist does not fix L")
    other = p.L if strict else p.Ltilde
    if not is_twist_fixed(d, seq_product(d, p.tss) * p.c, other):
        raise StabilityError("second sequence times the twist does not fix its class")


def lhs_shape(p: IntertwinerProblem, variant: str = "strict", w: WeylElt | None = None,
              J: Iterable[int] | None = None, kinds: str | None = None) -> ChainShape:
    """Shape of the ambient index set; ``kinds`` overrides the non-index step kind."""
    return _lhs_shape(p, variant, w, None if J is None else frozenset(J), kinds)


@lru_cache(maxsize=4096)
def _lhs_shape(p: IntertwinerProblem, variant: str, w: WeylElt | None,
               J: frozenset[int] | None, kinds: str | None) -> ChainShape:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    strict = variant == "strict"
    _require_stable(p, strict)
    t = p.table
    d = p.d
    if strict:
        itss, off = set(p.itss_strict), kinds or FORCED
    else:
        itss, off = set(p.itss), kinds or COND
    iss = set(p.iss)
    right = tuple(t.simple[s] for s in p.tss)
    left = tuple(t.simple[s] for s in p.ss)
    rk = tuple(FREE if j in itss else off for j in range(p.y))
    lk = tuple(FREE if i in iss else off for i in range(p.r))
    if strict:
        starts = _fixing(d, p.L, p.L)
    elif variant == "graded":
        if w is None:
            raise ValueError("graded variant needs w")
        starts = _fixing(d, p.L, pullback(d, w, p.L))
    elif variant == "parabolic":
        if J is None:
            raise ValueError("parabolic variant needs J")
        sub = parabolic_subgroup(d, frozenset(J))
        starts = [k for k, a in enumerate(t.elts) if a in sub]
    else:
        starts = list(range(len(t)))
    return ChainShape(t, right, rk, left, lk, tuple(starts), t.conj_map(p.c))


@lru_cache(maxsize=4096)
def _fixing(d: RootDatum, L: KummerClass, target: KummerClass) -> tuple[int, ...]:
    """Indices k with lambda o w_k = target."""
    return tuple(k for k, M in enumerate(pullback_classes(d, L)) if M == target)


def _simple(d: RootDatum, s: int) -> WeylElt:
    return simple_reflection(d, s)


def _non_index_steps_forced(p: IntertwinerProblem, chain: Sequence[int]) -> bool:
    t = p.table
    mul = t.mul
    right = [p.idx(_simple(p.d, s)) for s in p.tss]
    left = [p.idx(_simple(p.d, s)) for s in p.ss]
    for j in range(p.y):
        if j not in p.itss and chain[j + 1] != mul[chain[j]][right[j]]:
            return False
    for i in range(p.r):
        if i not in p.iss and chain[p.y + i + 1] != mul[left[i]][chain[p.y + i]]:
            return False
    return True


def _lhs_chains(p: IntertwinerProblem, variant: str, w=None, J=None) -> list[tuple[int, ...]]:
    if variant != "graded":
        return enumerate_chains(lhs_shape(p, variant, w=w, J=J))
    cond = [ch for ch in enumerate_chains(lhs_shape(p, "graded", w=w)) if _non_index_steps_forced(p, ch)]
    forced = enumerate_chains(lhs_shape(p, "graded", w=w, kinds=FORCED))
    if sorted(cond) != sorted(forced):
        raise ConsistencyError("conditional clauses disagree with the forced-step condition")
    return forced


def enumerate_A(p: IntertwinerProblem, variant: str = "strict", w: WeylElt | None = None,
                J: Iterable[int] | None = None) -> list[IntertwinerIndex]:
    chains = sorted(_lhs_chains(p, variant, w=w, J=J))
    elts = p.table.elts
    return [IntertwinerIndex(tuple(elts[k] for k in ch), p) for ch in chains]


def count_A(p: IntertwinerProblem, variant: str = "strict", w: WeylElt | None = None,
            J: Iterable[int] | None = None) -> int:
    """|A| by the transfer-matrix route (graded counts use forced steps directly)."""
    if variant == "graded":
        return count_chains(lhs_shape(p, "graded", w=w, kinds=FORCED))
    return count_chains(lhs_shape(p, variant, w=w, J=J))


def f_set(p: IntertwinerProblem, omega: WeylElt | None = None,
          tomega: WeylElt | None = None) -> list[WeylElt]:
    """{f in W'^0_L : f^-1 (omega c) f = tomega c}."""
    if omega is None and tomega is None:
        return list(_default_fset(p))
    return _scan_fset(p, p.dec.omega if omega is None else omega,
                      p.tdec.omega if tomega is None else tomega)


def _default_fset(p: IntertwinerProblem) -> tuple[WeylElt, ...]:
    return tuple(_scan_fset(p, p.dec.omega, p.tdec.omega))


def _scan_fset(p: IntertwinerProblem, omega: WeylElt, tomega: WeylElt) -> list[WeylElt]:
    return list(_fset_cached(p.d, p.L, p.c, omega, tomega))


@lru_cache(maxsize=4096)
def _fset_cached(d: RootDatum, L: KummerClass, c: Twist, omega: WeylElt,
                 tomega: WeylElt) -> tuple[WeylElt, ...]:
    oc, toc = omega * c, tomega * c
    out = []
    for f in wprime0(d, L):
        lhs = f.inverse() * oc * f
        by_matrix = lhs.matrix == toc.matrix
        by_roots = lhs.perm == toc.perm
        if by_matrix != by_roots:
            raise ConsistencyError("twist comparison on Y and on R disagree")
        if by_matrix:
            out.append(f)
    return tuple(out)


def conj_SS(p: IntertwinerProblem, f: WeylElt, tSS: Sequence[WeylElt]) -> list[WeylElt]:
    return list(_conj_SS(p.d, p.L, f, tuple(tSS)))


@lru_cache(maxsize=1 << 14)
def _conj_SS(d: RootDatum, L: KummerClass, f: WeylElt, tSS: tuple[WeylElt, ...]) -> tuple[WeylElt, ...]:
    refl = set(subsystem(d, L).reflections)
    finv = f.inverse()
    out = []
    for e, S in enumerate(tSS):
        v = f * S * finv
        if v not in refl:
            raise ConsistencyError(f"f S~_{e + 1} f^-1 is not a simple reflection of W_L")
        out.append(v)
    return tuple(out)


def _omega_c(p: IntertwinerProblem) -> Twist:
    return p.dec.omega * p.c


@lru_cache(maxsize=4096)
def rhs_shape(p: IntertwinerProblem, f: WeylElt) -> ChainShape:
    """Shape of the W_L-side index set for the trivial class, sequences SS and f-conjugated SS~."""
    t = p.table
    right = tuple(p.idx(v) for v in conj_SS(p, f, p.tdec.SS))
    left = tuple(p.idx(S) for S in p.dec.SS)
    starts = _wl_starts(p.d, p.L)
    return ChainShape(t, right, (FREE,) * len(right), left, (FREE,) * len(left), starts,
                      t.conj_map(_omega_c(p)))


@lru_cache(maxsize=4096)
def _wl_starts(d: RootDatum, L: KummerClass) -> tuple[int, ...]:
    idx = group_table(d).index
    return tuple(sorted(idx[a] for a in weyl_subgroup(d, L)))


def enumerate_rhs(p: IntertwinerProblem, f: WeylElt) -> list[tuple[WeylElt, ...]]:
    elts = p.table.elts
    return [tuple(elts[k] for k in ch) for ch in sorted(enumerate_chains(rhs_shape(p, f)))]


def psi_forward(x: IntertwinerIndex) -> tuple[WeylElt, tuple[WeylElt, ...]]:
    """(f, (A_0, ..., A_{b + b~})) for a chain of the strict index set."""
    p = x.problem
    t = p.table
    mul, inv = t.mul, t.inv
    a = [p.idx(v) for v in x.a]
    if len(a) != p.rho + 1:
        raise ValueError("chain has the wrong length")
    y = p.y
    js = p.itss_strict
    is_ = p.iss
    hats = [mul[a[j + 1]][inv[a[j]]] for j in js]
    ay = a[y]
    for i in is_:
        hats.append(mul[mul[mul[ay][inv[a[y + i + 1]]]][a[y + i]]][inv[ay]])
    ok, A0, f = wprime_decompose(p.d, p.L, x.a[0])
    if not ok:
        raise ConsistencyError("a_0 does not fix L")
    fi = p.idx(f)
    base = mul[a[0]][inv[fi]]
    tb = len(js)
    A = [base]
    acc = base
    for e in range(tb):
        acc = mul[hats[e]][acc]
        A.append(acc)
    left = A[tb]
    pre = None
    for e in range(len(is_)):
        pre = hats[tb] if pre is None else mul[pre][hats[tb + e]]
        A.append(mul[pre][left])
    result = (f, tuple(t.elts[k] for k in A))
    _check_rhs(p, result)
    return result


def _check_rhs(p: IntertwinerProblem, result) -> None:
    f, A = result
    if f not in f_set(p):
        raise ConsistencyError("f is not in the set F")
    chain = tuple(p.idx(v) for v in A)
    shape = rhs_shape(p, f)
    if any(k not in p.wl_indices for k in chain):
        raise ConsistencyError("image leaves W_L")
    if not _chain_fits(shape, chain):
        raise ConsistencyError("image violates the W_L-side constraints")


def _chain_fits(shape: ChainShape, chain: Sequence[int]) -> bool:
    mul, length = shape.table.mul, shape.table.length
    nr = len(shape.right)
    if len(chain) != shape.rho + 1 or chain[0] not in shape.starts:
        return False
    for pos in range(shape.rho):
        cur = chain[pos]
        if pos < nr:
            moved, kind = mul[cur][shape.right[pos]], shape.right_kind[pos]
        else:
            moved, kind = mul[shape.left[pos - nr]][cur], shape.left_kind[pos - nr]
        if chain[pos + 1] not in _step_options(kind, cur, moved, length):
            return False
    return chain[-1] == shape.closing[chain[0]]


def psi_inverse(p: IntertwinerProblem, f: WeylElt, A: Sequence[WeylElt]) -> IntertwinerIndex:
    """Rebuild the ambient chain from f and a W_L-side chain."""
    t = p.table
    mul, inv = t.mul, t.inv
    if f not in f_set(p):
        raise ValueError("f is not in the set F")
    Ai = [p.idx(v) for v in A]
    if not _chain_fits(rhs_shape(p, f), Ai):
        raise ValueError("A is not in the W_L-side index set for f")
    js, is_ = p.itss_strict, p.iss
    tb, b = len(js), len(is_)
    fi = p.idx(f)
    a0 = mul[Ai[0]][fi]
    hats = [mul[Ai[e + 1]][inv[Ai[e]]] for e in range(tb)]
    prev = t.index[t.elts[0]]
    for e in range(b):
        pe = mul[Ai[tb + e + 1]][inv[Ai[tb]]]
        hats.append(mul[inv[prev]][pe])
        prev = pe
    right = [p.idx(_simple(p.d, s)) for s in p.tss]
    left = [p.idx(_simple(p.d, s)) for s in p.ss]
    chain = [a0]
    jpos = {j: e for e, j in enumerate(js)}
    for u in range(p.y):
        cur = chain[-1]
        chain.append(mul[hats[jpos[u]]][cur] if u in jpos else mul[cur][right[u]])
    ay = chain[p.y]
    ipos = {i: e for e, i in enumerate(is_)}
    for u in range(p.r):
        cur = chain[-1]
        if u in ipos:
            chain.append(mul[mul[mul[cur][inv[ay]]][hats[tb + ipos[u]]]][ay])
        else:
            chain.append(mul[left[u]][cur])
    shape = lhs_shape(p, "strict")
    if not _chain_fits(shape, chain):
        raise ConsistencyError("reconstructed chain violates the ambient constraints")
    return IntertwinerIndex(tuple(t.elts[k] for k in chain), p)


def n_aa(x: IntertwinerIndex) -> tuple[int, bool]:
    """(N_a, whether every non-index step moves)."""
    p = x.problem
    d = p.d
    a = x.a
    N = 0
    for h in range(p.y):
        moved = a[h] * _simple(d, p.tss[h])
        N += _counts(a[h], a[h + 1], moved)
    for h in range(p.r):
        cur = a[p.y + h]
        moved = _simple(d, p.ss[h]) * cur
        N += _counts(cur, a[p.y + h + 1], moved)
    chain = [p.idx(v) for v in a]
    return N, _non_index_steps_forced(p, chain)


def _counts(cur: WeylElt, nxt: WeylElt, moved: WeylElt) -> int:
    if nxt == cur:
        other = moved
    elif nxt == moved:
        other = cur
    else:
        raise ValueError("chain step is neither stay nor move")
    return int(nxt.length > other.length)


def hom_dim_table(p: IntertwinerProblem, w: WeylElt) -> dict[int, int]:
    """{n: number of graded indices with N_a = n}; empty when Ltilde is no W-translate of L^vee."""
    d = p.d
    dual = -p.L
    if not any(pullback(d, u, dual) == p.Ltilde for u in group_enumerate(d)):
        return {}
    if pullback(d, w, dual) != p.Ltilde:
        raise ValueError("Ltilde is not w^* of the dual class")
    counts = Counter(n_aa(x)[0] for x in enumerate_A(p, "graded", w=w))
    return dict(sorted(counts.items()))


class FrakAResult(NamedTuple):
    count_top: int
    n_L: int
    witness: Optional[WeylElt]


def frakA_check(d: RootDatum, L: KummerClass, ss: Sequence, tss: Sequence) -> FrakAResult:
    """Top-degree count against n_L, with the a_0 = w_0 witness and the descent-set route."""
    p = intertwiner_problem(d, L, ss, tss)
    orbit_hit = set()
    for s in p.ss:
        k = s
        while k not in orbit_hit:
            orbit_hit.add(k)
            k = d.sigma_perm[k]
    if orbit_hit != set(range(d.n)):
        raise ValueError("some simple reflection lies outside the sigma-orbits of the sequence")
    top = [x for x in enumerate_A(p, "strict") if n_aa(x)[0] == p.rho]
    n_L = int(subsystem(d, L).is_full(d))
    witness = top[0].a[0] if top else None
    if len(top) != n_L:
        raise ConsistencyError(f"top-degree count {len(top)} differs from n_L = {n_L}")
    if n_L:
        w0 = longest_element(d)
        if witness != w0 or any(v != w0 for v in top[0].a):
            raise ConsistencyError("top chain is not constant at the longest element")
        sig = sigma_twist(d)
        Ip, Ipp = set(p.ss), set(p.tss)
        prime = [a for a in group_enumerate(d)
                 if sig.conj(a) == a and Ip <= left_descents(a) and Ipp <= right_descents(a)]
        if prime != [w0]:
            raise ConsistencyError("descent-set description of the top chains disagrees")
    return FrakAResult(len(top), n_L, witness)
