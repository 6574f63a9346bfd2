"""Based root data with a diagram automorphism and a prime power.

Both lattices X and Y are Z^m with the dot product as pairing. Roots live in
X-coordinates, coroots in Y-coordinates. Simple indices are 0-based here;
the JSON layer converts to and from 1-based indices.

>>> d = build_root_datum({"name": "A1", "rank_torus": 1, "simple_roots": [[2]],
...                       "simple_coroots": [[1]], "sigma_perm": [1], "p": 2, "q": 2})
>>> d.roots
((2,), (-2,))
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import sympy

from . import _linalg as la
from ._linalg import Mat, Vec

__all__ = [
    "DatumError", "RootDatum", "build_root_datum", "validate_automorphism",
    "load_datum", "bundled_datum_names", "has_connected_centre",
]

# reflection closure stops here; enough for every finite type of rank <= 8
MAX_ROOTS = 512


class DatumError(ValueError):
    """Raised when a root-datum description is malformed or inconsistent."""


@dataclass(frozen=True, eq=False)
class RootDatum:
    name: str
    rank_torus: int
    simple_roots: tuple[Vec, ...]
    simple_coroots: tuple[Vec, ...]
    cartan: Mat
    # positive roots first (by height), then their negatives in the same order
    roots: tuple[Vec, ...]
    coroots: tuple[Vec, ...]
    # coefficients of each root in the simple roots
    root_coeffs: tuple[Vec, ...]
    sigma_perm: tuple[int, ...]
    sigma_x: Mat
    sigma_y: Mat
    p: int
    q: int
    connected_centre: bool | None = None
    spec: Mapping[str, Any] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.simple_roots)

    @property
    def npos(self) -> int:
        return len(self.roots) // 2

    @cached_property
    def _key(self):
        return (self.name, self.simple_roots, self.simple_coroots, self.sigma_x, self.p, self.q)

    def __eq__(self, other):
        return isinstance(other, RootDatum) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @cached_property
    def root_index(self) -> dict[Vec, int]:
        return {r: k for k, r in enumerate(self.roots)}

    @cached_property
    def coroot_index(self) -> dict[Vec, int]:
        return {c: k for k, c in enumerate(self.coroots)}

    @cached_property
    def simple_root_index(self) -> tuple[int, ...]:
        return tuple(self.root_index[a] for a in self.simple_roots)

    def is_positive(self, k: int) -> bool:
        return k < self.npos

    def negate(self, k: int) -> int:
        return k + self.npos if k < self.npos else k - self.npos

    @cached_property
    def sigma_root_perm(self) -> tuple[int, ...]:
        """Root indices permuted by sigma acting on X (raises if not a permutation)."""
        return tuple(self.root_index[la.matvec(self.sigma_x, r)] for r in self.roots)

    def sigma_subset(self, J) -> frozenset[int]:
        return frozenset(self.sigma_perm[i] for i in J)

    @cached_property
    def sigma_y_inv(self) -> Mat:
        return la.integer_inverse(self.sigma_y)

    def with_q(self, q: int, p: int | None = None) -> RootDatum:
        """Same datum over a different prime power."""
        if p is None:
            p = next(k for k in range(2, q + 1) if q % k == 0) if q > 1 else self.p
        _check_prime_power(p, q)
        spec = dict(self.spec, p=p, q=q)
        return dataclasses.replace(self, p=p, q=q, spec=spec)


def _check_prime_power(p: int, q: int) -> None:
    if not sympy.isprime(p):
        raise DatumError(f"p={p} is not prime")
    if q < p:
        raise DatumError(f"q={q} is not a positive power of p={p}")
    x = q
    while x % p == 0:
        x //= p
    if x != 1:
        raise DatumError(f"q={q} is not a positive power of p={p}")


def _int_vectors(raw, m: int, what: str) -> tuple[Vec, ...]:
    try:
        vecs = tuple(tuple(int(x) for x in v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise DatumError(f"{what}: expected lists of integers") from exc
    for v in vecs:
        if len(v) != m:
            raise DatumError(f"{what}: vector {list(v)} does not have rank_torus={m} entries")
    return vecs


def _close_roots(alphas, coalphas, cartan):
    """Reflection closure, tracked through simple-root coefficients."""
    n = len(alphas)
    m = len(alphas[0]) if alphas else 0
    start = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    # coroot coefficients in the simple coroots, closed in parallel
    seen: dict[Vec, Vec] = {c: c for c in start}
    frontier = list(start)
    while frontier:
        nxt = []
        for c in frontier:
            cc = seen[c]
            for i in range(n):
                # <alpha, a_i^vee> for alpha = sum c_j alpha_j
                pair = sum(c[j] * cartan[i][j] for j in range(n))
                # <alpha_i, beta^vee> for beta^vee = sum cc_j a_j^vee
                copair = sum(cc[j] * cartan[j][i] for j in range(n))
                new = tuple(c[j] - (pair if j == i else 0) for j in range(n))
                newc = tuple(cc[j] - (copair if j == i else 0) for j in range(n))
                if new in seen:
                    if seen[new] != newc:
                        raise DatumError("roots and coroots do not close up consistently")
                    continue
                seen[new] = newc
                nxt.append(new)
                if len(seen) > MAX_ROOTS:
                    raise DatumError("reflection closure does not terminate: not of finite type")
        frontier = nxt
    pos = []
    for c, cc in seen.items():
        if all(x >= 0 for x in c):
            pos.append((sum(c), c, cc))
        elif not all(x <= 0 for x in c):
            raise DatumError(f"root with mixed-sign coefficients {list(c)}: non-crystallographic pairing")
    pos.sort()
    coeffs = [c for _, c, _ in pos]
    cocoeffs = [cc for _, _, cc in pos]
    coeffs += [tuple(-x for x in c) for c in coeffs]
    cocoeffs += [tuple(-x for x in c) for c in cocoeffs]

    def combine(cf, basis):
        return tuple(sum(cf[j] * basis[j][k] for j in range(n)) for k in range(m))

    roots = tuple(combine(c, alphas) for c in coeffs)
    coroots = tuple(combine(c, coalphas) for c in cocoeffs)
    return roots, coroots, tuple(coeffs)


def _default_sigma_matrix(alphas, coalphas, perm, m) -> Mat:
    """Permute the simple roots and fix the annihilator of the coroots."""
    if list(perm) == list(range(len(perm))):
        return la.identity(m)
    centre = la.null_space(coalphas, m)
    basis = [tuple(Fraction(x) for x in a) for a in alphas] + centre
    image = [tuple(Fraction(x) for x in alphas[perm[i]]) for i in range(len(alphas))] + centre
    # columns are the basis vectors
    binv = la.rational_inverse(tuple(tuple(v[k] for v in basis) for k in range(m)))
    img = tuple(tuple(v[k] for v in image) for k in range(m))
    mat = [[sum(img[r][t] * binv[t][c] for t in range(m)) for c in range(m)] for r in range(m)]
    if any(Fraction(x).denominator != 1 for row in mat for x in row):
        raise DatumError("default sigma_matrix is not integral; supply sigma_matrix explicitly")
    return tuple(tuple(int(x) for x in row) for row in mat)


def build_root_datum(spec: Mapping[str, Any]) -> RootDatum:
    """Build and fully validate a root datum from its JSON-style description."""
    try:
        name = str(spec.get("name", "unnamed"))
        m = int(spec["rank_torus"])
        raw_roots = spec["simple_roots"]
        raw_coroots = spec["simple_coroots"]
        p = int(spec["p"])
        q = int(spec["q"])
    except KeyError as exc:
        raise DatumError(f"missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise DatumError(f"malformed datum description: {exc}") from exc
    if m <= 0:
        raise DatumError("rank_torus must be positive")
    alphas = _int_vectors(raw_roots, m, "simple_roots")
    coalphas = _int_vectors(raw_coroots, m, "simple_coroots")
    n = len(alphas)
    if len(coalphas) != n:
        raise DatumError("simple_roots and simple_coroots have different lengths")
    _check_prime_power(p, q)

    cartan = tuple(tuple(la.dot(alphas[j], coalphas[i]) for j in range(n)) for i in range(n))
    for i in range(n):
        if cartan[i][i] != 2:
            raise DatumError(f"<alpha_{i+1}, coroot_{i+1}> = {cartan[i][i]}, expected 2")
        for j in range(n):
            if i != j and cartan[i][j] > 0:
                raise DatumError(f"cartan[{i+1}][{j+1}] = {cartan[i][j]} is positive")
            if (cartan[i][j] == 0) != (cartan[j][i] == 0):
                raise DatumError(f"cartan[{i+1}][{j+1}] and cartan[{j+1}][{i+1}] disagree on vanishing")
    if n and la.rank(alphas) != n:
        raise DatumError("simple roots are linearly dependent")
    if n and la.rank(coalphas) != n:
        raise DatumError("simple coroots are linearly dependent")

    roots, coroots, coeffs = _close_roots(alphas, coalphas, cartan) if n else ((), (), ())

    raw_perm = spec.get("sigma_perm", list(range(1, n + 1)))
    try:
        perm = tuple(int(x) - 1 for x in raw_perm)
    except (TypeError, ValueError) as exc:
        raise DatumError("sigma_perm must be a list of 1-based indices") from exc
    if sorted(perm) != list(range(n)):
        raise DatumError(f"sigma_perm {list(raw_perm)} is not a permutation of 1..{n}")
    for i in range(n):
        for j in range(n):
            if cartan[perm[i]][perm[j]] != cartan[i][j]:
                raise DatumError(f"sigma_perm is not a diagram symmetry (breaks cartan[{i+1}][{j+1}])")

    if spec.get("sigma_matrix") is not None:
        sx = _int_vectors(spec["sigma_matrix"], m, "sigma_matrix")
        if len(sx) != m:
            raise DatumError("sigma_matrix must be m x m")
    else:
        sx = _default_sigma_matrix(alphas, coalphas, perm, m)
    try:
        sy = la.transpose(la.integer_inverse(sx))
    except (ValueError, ZeroDivisionError) as exc:
        raise DatumError("sigma_matrix is not invertible over the integers") from exc

    cc = spec.get("connected_centre")
    d = RootDatum(
        name=name, rank_torus=m, simple_roots=alphas, simple_coroots=coalphas,
        cartan=cartan, roots=roots, coroots=coroots, root_coeffs=coeffs,
        sigma_perm=perm, sigma_x=sx, sigma_y=sy, p=p, q=q,
        connected_centre=None if cc is None else bool(cc), spec=dict(spec),
    )
    validate_automorphism(d)
    if cc is not None and has_connected_centre(d) != bool(cc):
        raise DatumError(
            f"connected_centre={bool(cc)} but X/ZR is "
            f"{'torsion-free' if has_connected_centre(d) else 'not torsion-free'}"
        )
    return d


def _matrix_order(mat: Mat, cap: int = 64) -> int:
    ident = la.identity(len(mat))
    cur = mat
    for k in range(1, cap + 1):
        if cur == ident:
            return k
        cur = la.matmul(cur, mat)
    raise DatumError("sigma does not have finite order")


def validate_automorphism(d: RootDatum) -> dict[str, Any]:
    """Check that sigma is a diagram automorphism of the datum; return a report."""
    for i, a in enumerate(d.simple_roots):
        img = la.matvec(d.sigma_x, a)
        if img != d.simple_roots[d.sigma_perm[i]]:
            raise DatumError(f"sigma maps simple root alpha_{i+1}={list(a)} to {list(img)}, "
                             f"not alpha_{d.sigma_perm[i]+1}")
    for i, c in enumerate(d.simple_coroots):
        img = la.matvec(d.sigma_y, c)
        if img != d.simple_coroots[d.sigma_perm[i]]:
            raise DatumError(f"sigma maps simple coroot {i+1}={list(c)} to {list(img)}")
    for k, r in enumerate(d.roots):
        img = la.matvec(d.sigma_x, r)
        if img not in d.root_index:
            raise DatumError(f"sigma maps root {list(r)} outside R")
        if d.is_positive(k) and not d.is_positive(d.root_index[img]):
            raise DatumError(f"sigma maps positive root {list(r)} to negative root {list(img)}")
        cimg = la.matvec(d.sigma_y, d.coroots[k])
        if d.coroot_index.get(cimg) != d.root_index[img]:
            raise DatumError(f"sigma does not act compatibly on the coroot of {list(r)}")
    order = _matrix_order(d.sigma_x)
    return {
        "order": order,
        "permutes_roots": True,
        "permutes_coroots": True,
        "preserves_positive": True,
        "perm": [i + 1 for i in d.sigma_perm],
    }


def has_connected_centre(d: RootDatum) -> bool:
    """True iff X / ZR is torsion-free."""
    return all(f == 1 for f in la.invariant_factors(d.simple_roots))


def bundled_datum_names() -> list[str]:
    folder = resources.files("flagcomb") / "data"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_datum(source: str | Path) -> RootDatum:
    """Load a datum from a JSON file path or a bundled name such as ``a2-sc``."""
    path = Path(source)
    stem = str(source)[:-5] if str(source).endswith(".json") else str(source)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif stem in bundled_datum_names():
        text = (resources.files("flagcomb") / "data" / f"{stem}.json").read_text(encoding="utf-8")
    else:
        raise DatumError(f"no datum file or bundled datum named {str(source)!r}")
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatumError(f"cannot parse datum JSON in {str(source)}: {exc}") from exc
    if not isinstance(spec, dict):
        raise DatumError("datum JSON must be an object")
    return build_root_datum(spec)
