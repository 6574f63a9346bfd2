"""Command-line entry point. Every command prints one canonical JSON document.

Exit status: 0 on success, 1 when a check fails or a precondition does not
hold, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import _io
from .conjecture import centre_hypothesis, omega_invariance, phi_check
from .intertwine import (
    VARIANTS, enumerate_A, f_set, frakA_check, hom_dim_table, intertwiner_problem, n_aa,
    psi_forward,
)
from .kummer import KummerClass, is_wF_fixed, subsystem, torus_fixed_order
from .pieces import enumerate_tt, piece_dim, tt_from_z
from .rootdata import DatumError, RootDatum, has_connected_centre, load_datum, validate_automorphism
from .seqdecomp import decompose_sequence
from .suites import SuiteConfig, suite_run
from .weyl import coset_minima, from_word, group_enumerate, longest_element


class UsageError(Exception):
    pass


# ---- argument parsing helpers ----

def _tokens(text: str) -> list[str]:
    text = text.strip()
    if text in ("", "e"):
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_word(d: RootDatum, text: str, neutral: bool = False) -> list[Optional[int]]:
    """'s1,s2' or '1,2'; 's' alone in rank one; 'e' or '' is the empty word."""
    out: list[Optional[int]] = []
    for tok in _tokens(text):
        if tok == "s" and d.n == 1:
            out.append(0)
            continue
        body = tok[1:] if tok.startswith("s") else tok
        if neutral and body in ("0", "e"):
            out.append(None)
            continue
        try:
            i = int(body)
        except ValueError:
            raise UsageError(f"bad letter {tok!r}") from None
        if not 1 <= i <= d.n:
            raise UsageError(f"letter {tok!r} out of range 1..{d.n}")
        out.append(i - 1)
    return out


def parse_subset(d: RootDatum, text: Optional[str]) -> frozenset[int]:
    if text is None:
        return frozenset()
    return frozenset(parse_word(d, text))


def parse_lambda(d: RootDatum, text: Optional[str]) -> KummerClass:
    if text is None:
        return KummerClass.zero(d.rank_torus)
    try:
        L = KummerClass.parse(t for t in text.split(",") if t.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad lambda {text!r}") from None
    try:
        return L.check(d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _datum(args) -> RootDatum:
    if not args.datum:
        raise UsageError("--datum is required")
    d = load_datum(args.datum)
    if getattr(args, "q", None):
        d = d.with_q(args.q)
    return d


# ---- commands ----

def cmd_datum_validate(args):
    d = _datum(args)
    v = validate_automorphism(d)
    computed = has_connected_centre(d)
    out = {
        "name": d.name, "rank_torus": d.rank_torus, "semisimple_rank": d.n,
        "num_roots": len(d.roots), "cartan": [list(r) for r in d.cartan],
        "sigma": [i + 1 for i in d.sigma_perm], "sigma_order": v["order"],
        "p": d.p, "q": d.q, "connected_centre": computed,
        "declared_connected_centre": d.connected_centre,
        "checks": {k: v[k] for k in ("permutes_roots", "permutes_coroots", "preserves_positive")},
    }
    ok = all(out["checks"].values()) and (d.connected_centre in (None, computed))
    return out, ok


def cmd_weyl_enum(args):
    d = _datum(args)
    W = group_enumerate(d)
    return {"order": len(W), "elements": [_io.word(w) for w in W]}, True


def cmd_weyl_longest(args):
    d = _datum(args)
    w0 = longest_element(d)
    return {"word": _io.word(w0), "length": w0.length}, True


def cmd_weyl_cosets(args):
    d = _datum(args)
    J, K = parse_subset(d, args.J), parse_subset(d, args.K)
    left, right, both = coset_minima(d, J, K)
    return {"J": _io.subset(J), "K": _io.subset(K), "left": [_io.word(w) for w in left],
            "right": [_io.word(w) for w in right], "double": [_io.word(w) for w in both]}, True


def _roots_json(d: RootDatum, ks) -> list[list[int]]:
    return [list(d.root_coeffs[k]) for k in sorted(ks)]


def cmd_kummer_subsystem(args):
    d = _datum(args)
    L = parse_lambda(d, args.lam)
    sub = subsystem(d, L)
    return {"lambda": L.to_json(), "roots": _roots_json(d, sub.roots),
            "positive": _roots_json(d, sub.positive), "simple": _roots_json(d, sub.simple),
            "reflections": [_io.word(s) for s in sub.reflections]}, True


def cmd_kummer_stable(args):
    d = _datum(args)
    L = parse_lambda(d, args.lam)
    w = from_word(d, parse_word(d, args.w or ""))
    return {"lambda": L.to_json(), "w": _io.word(w), "q": d.q, "stable": is_wF_fixed(d, w, L)}, True


def cmd_kummer_torus_order(args):
    d = _datum(args)
    w = from_word(d, parse_word(d, args.w or ""))
    return {"w": _io.word(w), "q": d.q, "order": torus_fixed_order(d, w)}, True


def _tt_json(d, t):
    return {"J": _io.subset(t.J),
            "chain": [{"J_n": _io.subset(Jn), "w_n": _io.word(wn)} for Jn, wn in t.chain],
            "J_inf": _io.subset(t.J_inf), "w_inf": _io.word(t.w_inf), "dim": piece_dim(d, t)}


def cmd_pieces_enum(args):
    d = _datum(args)
    J = parse_subset(d, args.J)
    return {"J": _io.subset(J), "types": [_tt_json(d, t) for t in enumerate_tt(d, J)]}, True


def cmd_pieces_from_z(args):
    d = _datum(args)
    J = parse_subset(d, args.J)
    z = from_word(d, parse_word(d, args.w or ""))
    return _tt_json(d, tt_from_z(d, J, z)), True


def cmd_pieces_dims(args):
    d = _datum(args)
    J = parse_subset(d, args.J)
    return {"J": _io.subset(J), "dims": [{"w_inf": _io.word(t.w_inf), "dim": piece_dim(d, t)}
                                         for t in enumerate_tt(d, J)]}, True


def _dec_json(dec):
    return {"iss": [i + 1 for i in dec.iss], "SS": [_io.word(S) for S in dec.SS],
            "omega": _io.word(dec.omega)}


def cmd_decomp_run(args):
    d = _datum(args)
    L = parse_lambda(d, args.lam)
    ss = parse_word(d, args.ss or "", neutral=True)
    out = _dec_json(decompose_sequence(d, L, ss))
    out["ss"] = _io.seq(ss)
    return out, True


def _problem(args):
    d = _datum(args)
    L = parse_lambda(d, args.lam)
    ss = parse_word(d, args.ss or "")
    tss = parse_word(d, args.tss or "")
    lt = parse_lambda(d, args.ltilde) if getattr(args, "ltilde", None) else None
    return d, L, intertwiner_problem(d, L, ss, tss, Ltilde=lt)


def cmd_intertwine_enum(args):
    d, L, p = _problem(args)
    w = from_word(d, parse_word(d, args.w)) if args.w is not None else None
    J = parse_subset(d, args.J) if args.J is not None else None
    variant = args.variant
    if variant == "graded" and w is None:
        raise UsageError("--variant graded needs --w")
    if variant == "parabolic" and J is None:
        raise UsageError("--variant parabolic needs --J")
    xs = enumerate_A(p, variant, w=w, J=J)
    out = {"variant": variant, "count": len(xs),
           "indices": [[_io.word(a) for a in x.a] for x in xs]}
    if variant == "strict":
        out["fset"] = [_io.word(f) for f in f_set(p)]
    return out, True


def cmd_intertwine_table(args):
    d, L, p = _problem(args)
    w = from_word(d, parse_word(d, args.w or ""))
    table = hom_dim_table(p, w)
    return {"w": _io.word(w), "table": {str(n): c for n, c in table.items()},
            "total": sum(table.values())}, True


def cmd_intertwine_psi(args):
    d, L, p = _problem(args)
    rows = []
    for x in enumerate_A(p, "strict"):
        f, A = psi_forward(x)
        rows.append({"a": [_io.word(a) for a in x.a], "f": _io.word(f),
                     "A": [_io.word(v) for v in A], "N": n_aa(x)[0]})
    return {"fset": [_io.word(f) for f in f_set(p)], "map": rows}, True


def cmd_intertwine_frakA(args):
    d = _datum(args)
    L = parse_lambda(d, args.lam)
    res = frakA_check(d, L, parse_word(d, args.ss or ""), parse_word(d, args.tss or ""))
    return {"count_top": res.count_top, "n_L": res.n_L,
            "witness": None if res.witness is None else _io.word(res.witness)}, True


def _phi_json(r):
    return {"ss": _io.seq(r.ss), "tss": _io.seq(r.tss), "omega": _io.word(r.omega),
            "F_set": [_io.word(f) for f in r.F_set], "lhs_card": r.lhs_card,
            "rhs_card": r.rhs_card, "roundtrip_ok": r.roundtrip_ok}


def cmd_conjecture_check(args):
    d = _datum(args)
    L = parse_lambda(d, args.lam)
    hyp = centre_hypothesis(d, L)
    out = {"lambda": L.to_json(), "centre_hypothesis": hyp,
           "connected_centre": has_connected_centre(d)}
    if not hyp:
        return out, False
    if args.ss is not None:
        pairs = [(parse_word(d, args.ss), parse_word(d, args.tss or args.ss))]
    else:
        omega, fam = omega_invariance(d, L, args.max_len)
        out["omega"] = _io.word(omega)
        out["family_size"] = len(fam.members)
        pairs = [(a, b) for a in fam.members for b in fam.members]
    reports = [phi_check(d, L, a, b, roundtrip=not args.counts_only) for a, b in pairs]
    out["reports"] = [_phi_json(r) for r in reports]
    return out, all(r.ok for r in reports)


def cmd_suite_run(args):
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    if args.datum:
        cfg["data"] = [args.datum]
        cfg.setdefault("connected_data", [args.datum])
    if args.suite:
        cfg["suites"] = args.suite.split(",")
    if args.max_len is not None:
        cfg["pair_len"] = cfg["family_len"] = args.max_len
    try:
        config = SuiteConfig.from_mapping(cfg)
        for name in config.data + config.connected_data:
            load_datum(name)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    reports = suite_run(config)
    failed = [r for r in reports if r.status != "pass"]
    out = {"reports": [r.to_json(args.timings) for r in reports],
           "summary": {"total": len(reports), "passed": len(reports) - len(failed),
                       "failed": len(failed)}}
    return out, not failed


# ---- parser ----

def _common(p, lam=False, J=False, w=False, seqs=False):
    p.add_argument("--datum", required=True, help="datum JSON file or bundled name")
    p.add_argument("--q", type=int, help="override q (a power of a prime)")
    p.add_argument("--out", help="write JSON here instead of standard output")
    if lam:
        p.add_argument("--lambda", dest="lam", help="values on the Y basis, e.g. 1/2,0")
    if J:
        p.add_argument("--J", help="subset of simple indices, e.g. 1,3")
    if w:
        p.add_argument("--w", help="word, e.g. 1,2 or s1,s2")
    if seqs:
        p.add_argument("--ss", help="first sequence, e.g. 1,2,1")
        p.add_argument("--tss", help="second sequence")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flagcomb", description=__doc__.splitlines()[0])
    top = ap.add_subparsers(dest="group", required=True)

    def group(name):
        g = top.add_parser(name)
        return g.add_subparsers(dest="cmd", required=True)

    g = group("datum")
    p = g.add_parser("validate"); _common(p); p.set_defaults(func=cmd_datum_validate)

    g = group("weyl")
    p = g.add_parser("enum"); _common(p); p.set_defaults(func=cmd_weyl_enum)
    p = g.add_parser("longest"); _common(p); p.set_defaults(func=cmd_weyl_longest)
    p = g.add_parser("cosets"); _common(p, J=True)
    p.add_argument("--K", help="right subset"); p.set_defaults(func=cmd_weyl_cosets)

    g = group("kummer")
    p = g.add_parser("subsystem"); _common(p, lam=True); p.set_defaults(func=cmd_kummer_subsystem)
    p = g.add_parser("stable"); _common(p, lam=True, w=True); p.set_defaults(func=cmd_kummer_stable)
    p = g.add_parser("torus-order"); _common(p, w=True); p.set_defaults(func=cmd_kummer_torus_order)

    g = group("pieces")
    p = g.add_parser("enum"); _common(p, J=True); p.set_defaults(func=cmd_pieces_enum)
    p = g.add_parser("from-z"); _common(p, J=True, w=True); p.set_defaults(func=cmd_pieces_from_z)
    p = g.add_parser("dims"); _common(p, J=True); p.set_defaults(func=cmd_pieces_dims)

    g = group("decomp")
    p = g.add_parser("run"); _common(p, lam=True); p.add_argument("--ss", help="sequence; 0 is the neutral letter")
    p.set_defaults(func=cmd_decomp_run)

    g = group("intertwine")
    p = g.add_parser("enum"); _common(p, lam=True, J=True, w=True, seqs=True)
    p.add_argument("--variant", choices=VARIANTS, default="strict")
    p.add_argument("--ltilde", help="class for the second sequence (default: dual of lambda)")
    p.set_defaults(func=cmd_intertwine_enum)
    p = g.add_parser("table"); _common(p, lam=True, w=True, seqs=True)
    p.add_argument("--ltilde", help="class for the second sequence (default: dual of lambda)")
    p.set_defaults(func=cmd_intertwine_table)
    p = g.add_parser("psi"); _common(p, lam=True, seqs=True); p.set_defaults(func=cmd_intertwine_psi)
    p = g.add_parser("frakA"); _common(p, lam=True, seqs=True); p.set_defaults(func=cmd_intertwine_frakA)

    g = group("conjecture")
    p = g.add_parser("check"); _common(p, lam=True, seqs=True)
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--counts-only", action="store_true", help="skip the explicit round trip")
    p.set_defaults(func=cmd_conjecture_check)

    g = group("suite")
    p = g.add_parser("run")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--datum", help="restrict to one datum")
    p.add_argument("--suite", help="comma list of suites")
    p.add_argument("--max-len", type=int)
    p.add_argument("--timings", action="store_true", help="include per-check runtimes")
    p.add_argument("--out")
    p.set_defaults(func=cmd_suite_run)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out, ok = args.func(args)
    except (UsageError, DatumError) as exc:
        print(f"flagcomb: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, AssertionError, RuntimeError) as exc:
        print(f"flagcomb: check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = _io.dumps(out)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
