"""Bundled property suites, one per module, producing ordered check reports."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterator

from . import _io
from .conjecture import HypothesisError, centre_hypothesis, omega_invariance, phi_check
from .intertwine import (
    count_A, enumerate_A, enumerate_rhs, f_set, intertwiner_problem, psi_forward, psi_inverse,
)
from .kummer import (
    KummerClass, is_wF_fixed, ltilde, pullback, subsystem, weyl_subgroup,
    wprime, wprime_decompose,
)
from .pieces import enumerate_tt, piece_dim, tt_from_z, validate_tt
from .rootdata import RootDatum, has_connected_centre, load_datum, validate_automorphism
from .seqdecomp import compute_iss, decompose_sequence, seq_product
from .weyl import (
    bruhat_interval, coset_minima, group_enumerate, identity, longest_element, reduced_words,
)

__all__ = ["CheckReport", "SuiteConfig", "suite_run", "lambda_panel", "DEFAULT_DATA", "SUITES"]

DEFAULT_DATA = ("a1-sc", "a1xa1-sc", "a2-sc", "a2-sc-twisted", "b2-sc", "g2", "a3-sc")
CONNECTED_DATA = ("a1-adj", "gl2", "a2-adj", "gl3", "b2-adj", "g2")


@dataclass
class CheckReport:
    suite: str
    instance: str
    status: str
    expected: Any = None
    actual: Any = None
    witness: Any = None
    runtime_ms: float = 0.0

    def to_json(self, timings: bool = False) -> dict:
        out = {"suite": self.suite, "instance": self.instance, "status": self.status,
               "expected": self.expected, "actual": self.actual}
        if self.status == "fail":
            out["witness"] = self.witness
        if timings:
            out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


@dataclass
class SuiteConfig:
    data: tuple[str, ...] = DEFAULT_DATA
    connected_data: tuple[str, ...] = CONNECTED_DATA
    denominators: tuple[int, ...] = (1, 2, 3)
    seq_len: int = 4
    pair_len: int = 2
    family_len: int = 3
    suites: tuple[str, ...] | None = None
    max_rank_for_panel: int = 3

    @classmethod
    def from_mapping(cls, m: dict) -> SuiteConfig:
        known = set(cls.__dataclass_fields__)
        bad = set(m) - known
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        kw = {k: tuple(v) if isinstance(v, list) else v for k, v in m.items()}
        return cls(**kw)


def lambda_panel(d: RootDatum, denominators=(1, 2, 3)) -> list[KummerClass]:
    """Classes with every value in (1/den)Z/Z, den in the list and coprime to p."""
    seen = set()
    for den in denominators:
        if den % d.p == 0:
            continue
        for v in itertools.product(range(den), repeat=d.rank_torus):
            seen.add(KummerClass(tuple(Fraction(x, den) for x in v)))
    return sorted(seen, key=lambda L: L.values)


def _lam(L: KummerClass) -> str:
    return ",".join(L.to_json())


# Each check yields (instance, expected, actual, witness).
Check = Iterator[tuple[str, Any, Any, Any]]


def _rootdata(d: RootDatum, cfg: SuiteConfig) -> Check:
    v = validate_automorphism(d)
    yield "automorphism", True, v["permutes_roots"] and v["permutes_coroots"] and v["preserves_positive"], v
    if d.connected_centre is not None:
        yield "connected centre", d.connected_centre, has_connected_centre(d), None


def _weyl(d: RootDatum, cfg: SuiteConfig) -> Check:
    W = group_enumerate(d)
    w0 = longest_element(d)
    yield "longest length", d.npos, w0.length, _io.word(w0)
    yield "bruhat interval of w0", len(W), len(bruhat_interval(w0)), None
    bad = [w for w in W if len(w.reduced_word) != w.length]
    yield "reduced word lengths", 0, len(bad), [_io.word(w) for w in bad[:1]]


def _word_lengths(d: RootDatum, L: KummerClass) -> dict:
    gens = subsystem(d, L).reflections
    dist = {identity(d): 0}
    frontier = [identity(d)]
    while frontier:
        nxt = []
        for w in frontier:
            for s in gens:
                v = w * s
                if v not in dist:
                    dist[v] = dist[w] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def _kummer(d: RootDatum, cfg: SuiteConfig) -> Check:
    W = group_enumerate(d)
    for L in lambda_panel(d, cfg.denominators):
        tag = f"lambda={_lam(L)}"
        dist = _word_lengths(d, L)
        bad = [w for w, k in dist.items() if ltilde(d, L, w) != k]
        yield f"{tag} ltilde is W_L length", 0, len(bad), [_io.word(w) for w in bad[:1]]
        base = subsystem(d, L).roots
        bad = []
        for w in W:
            moved = subsystem(d, pullback(d, w, L)).roots
            winv = w.inverse()
            if moved != frozenset(winv.act_root(k) for k in base):
                bad.append(w)
        yield f"{tag} subsystem equivariance", 0, len(bad), [_io.word(w) for w in bad[:1]]
        bad = []
        wl = weyl_subgroup(d, L)
        pos = set(subsystem(d, L).positive)
        keep = [g for g in W if {g.act_root(k) for k in pos} == pos]
        for w in wprime(d, L):
            ok, A, f = wprime_decompose(d, L, w)
            facts = [(a, g) for a in wl for g in keep if a * g == w]
            if not ok or A * f != w or facts != [(A, f)]:
                bad.append(w)
        yield f"{tag} W' factorisation", 0, len(bad), [_io.word(w) for w in bad[:1]]


def _pieces(d: RootDatum, cfg: SuiteConfig) -> Check:
    for k in range(d.n + 1):
        for J in itertools.combinations(range(d.n), k):
            types = enumerate_tt(d, J)
            left = coset_minima(d, J, ())[0]
            limits = [t.w_inf for t in types]
            ok = sorted(limits, key=lambda w: w.reduced_word) == sorted(left, key=lambda w: w.reduced_word)
            wit = None
            for t in types:
                validate_tt(d, t)
                if tt_from_z(d, J, t.w_inf) != t:
                    ok, wit = False, _io.word(t.w_inf)
            yield f"J={_io.subset(J)} bijection", len(left), len(types) if ok else -1, wit
    sig = d.sigma_root_perm
    bad = [t for t in enumerate_tt(d, ())
           if piece_dim(d, t) != sum(1 for k in range(d.npos) if not d.is_positive(t.w_inf.act_root(sig[k])))]
    yield "J=[] dimension", 0, len(bad), [_io.word(t.w_inf) for t in bad[:1]]


def _seqdecomp(d: RootDatum, cfg: SuiteConfig) -> Check:
    W = group_enumerate(d)
    for L in lambda_panel(d, cfg.denominators):
        tag = f"lambda={_lam(L)}"
        bad = []
        for w in W:
            for word in reduced_words(w):
                if len(compute_iss(d, L, word)) != ltilde(d, L, w.inverse()):
                    bad.append(word)
        yield f"{tag} index count on reduced words", 0, len(bad), [_io.seq(s) for s in bad[:1]]
        short = []
        for k in range(cfg.seq_len + 1):
            for ss in itertools.product(range(d.n), repeat=k):
                decompose_sequence(d, L, ss)
                if len(compute_iss(d, L, ss)) < ltilde(d, L, seq_product(d, ss).inverse()):
                    short.append(ss)
        yield f"{tag} decompositions up to length {cfg.seq_len}", 0, len(short), [_io.seq(s) for s in short[:1]]


def _stable_seqs(d: RootDatum, L: KummerClass, max_len: int) -> list[tuple[int, ...]]:
    return [ss for k in range(max_len + 1) for ss in itertools.product(range(d.n), repeat=k)
            if is_wF_fixed(d, seq_product(d, ss), L)]


def _intertwine(d: RootDatum, cfg: SuiteConfig) -> Check:
    if d.rank_torus > cfg.max_rank_for_panel or d.n > 2:
        return
    for L in lambda_panel(d, cfg.denominators):
        seqs = _stable_seqs(d, L, cfg.pair_len)
        bad = []
        total = 0
        for ss, tss in itertools.product(seqs, repeat=2):
            p = intertwiner_problem(d, L, ss, tss)
            lhs = enumerate_A(p)
            rhs = {f: enumerate_rhs(p, f) for f in f_set(p)}
            total += len(lhs)
            fine = len(lhs) == count_A(p) == sum(len(v) for v in rhs.values())
            for x in lhs:
                f, A = psi_forward(x)
                fine &= A in rhs[f] and psi_inverse(p, f, A) == x
            if not fine:
                bad.append([_io.seq(ss), _io.seq(tss)])
        yield f"lambda={_lam(L)} bijection up to length {cfg.pair_len}", 0, len(bad), bad[:1]


def _conjecture(d: RootDatum, cfg: SuiteConfig) -> Check:
    for L in lambda_panel(d, cfg.denominators):
        if not centre_hypothesis(d, L):
            continue
        tag = f"lambda={_lam(L)}"
        try:
            omega, fam = omega_invariance(d, L, cfg.family_len)
        except HypothesisError:
            continue
        bad = [[_io.seq(a), _io.seq(b)] for a, b in itertools.product(fam.members, repeat=2)
               if not phi_check(d, L, a, b, roundtrip=False).ok]
        yield f"{tag} omega and basis counts up to length {cfg.family_len}", 0, len(bad), bad[:1]


SUITES: dict[str, Callable[[RootDatum, SuiteConfig], Check]] = {
    "rootdata": _rootdata,
    "weyl": _weyl,
    "kummer": _kummer,
    "pieces": _pieces,
    "seqdecomp": _seqdecomp,
    "intertwine": _intertwine,
    "conjecture": _conjecture,
}


def suite_run(config: SuiteConfig | None = None) -> list[CheckReport]:
    cfg = config or SuiteConfig()
    names = cfg.suites or tuple(SUITES)
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}")
    reports: list[CheckReport] = []
    for name in names:
        data = cfg.connected_data if name == "conjecture" else cfg.data
        for dname in data:
            d = load_datum(dname)
            it = SUITES[name](d, cfg)
            while True:
                t0 = time.perf_counter()
                try:
                    inst, expected, actual, witness = next(it)
                except StopIteration:
                    break
                except Exception as exc:  # a crash is a failed check with the message as witness
                    reports.append(CheckReport(name, f"{d.name}", "fail", None, None,
                                               f"{type(exc).__name__}: {exc}"))
                    break
                ms = (time.perf_counter() - t0) * 1000
                status = "pass" if expected == actual else "fail"
                reports.append(CheckReport(name, f"{d.name} {inst}", status, _plain(expected),
                                           _plain(actual), _plain(witness), ms))
    return reports


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x
