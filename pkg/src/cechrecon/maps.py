"""Simplicial maps, contiguity, and finite checks of the Čech diagram statements.

The report-producing checks work on filtration values: ``sigma`` lies in
``C_Y(S, r)`` iff ``min_y max_{x in sigma} d(x, y) < r``, so a statement like
"Pi_alpha is simplicial" becomes a comparison of two value arrays for every
sampled radius. :func:`is_simplicial` and :func:`are_contiguous` do the same
job on explicit complexes and are used to cross-check.
"""
from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import gf
from .complex import (
    SimplicialComplex,
    cech_complex,
    filtered_cech,
    set_value,
)
from .errors import (
    EpsilonTooSmall,
    InsufficientDimCap,
    NotASubset,
    SourceTargetMismatch,
    VertexMapNotTotal,
)
from .homology import _boundary_column, betti, induced_rank_oracle, persistence
from .metric import SubsetView, VertexMap, directed_hausdorff, projection_map

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SimplicialMap:
    """Vertex map between two complexes; simpliciality is checked, not assumed."""

    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: Mapping[int, int]

    def __post_init__(self):
        vm = self.vertex_map
        if isinstance(vm, VertexMap):
            vm = vm.assignment
        object.__setattr__(self, "vertex_map", dict(vm))

    def image(self, simplex: Iterable[int]) -> tuple[int, ...]:
        return tuple(sorted({self.vertex_map[v] for v in simplex}))

    def _check_total(self) -> None:
        missing = [v for v in self.source.vertices if v not in self.vertex_map]
        if missing:
            raise VertexMapNotTotal(f"vertex map undefined on {missing}")

    def first_violation(self):
        """First source simplex (in (dim, lex) order) whose image is not in the target."""
        self._check_total()
        for s in self.source:
            if self.image(s) not in self.target:
                return s
        return None


def inclusion(source: SimplicialComplex, target: SimplicialComplex) -> SimplicialMap:
    return SimplicialMap(source, target, {v: v for v in source.vertices})


def compose(g: SimplicialMap, f: SimplicialMap) -> SimplicialMap:
    """``g o f``; the intermediate complexes are not required to match exactly."""
    # vertices whose image falls outside g's domain stay unmapped and fail the totality check
    vm = {v: g.vertex_map[w] for v, w in f.vertex_map.items() if w in g.vertex_map}
    return SimplicialMap(f.source, g.target, vm)


def is_simplicial(f: SimplicialMap) -> bool:
    return f.first_violation() is None


def contiguity_violation(f: SimplicialMap, g: SimplicialMap):
    """First simplex ``s`` with ``f(s) ∪ g(s)`` not in the target, else None."""
    if f.source != g.source or f.target != g.target:
        raise SourceTargetMismatch("contiguity needs maps with the same source and target")
    f._check_total()
    g._check_total()
    for s in f.source:
        union = tuple(sorted(set(f.image(s)) | set(g.image(s))))
        if len(union) - 1 > f.target.dim_cap:
            raise InsufficientDimCap(
                f"image union {union} exceeds the target's dim_cap {f.target.dim_cap}"
            )
        if union not in f.target:
            return s
    return None


def are_contiguous(f: SimplicialMap, g: SimplicialMap) -> bool:
    """True iff ``f(s) ∪ g(s)`` is a target simplex for every source simplex ``s``."""
    return contiguity_violation(f, g) is None


def _chain_image(f: SimplicialMap, simplex, index: dict, p: int):
    """Image of an oriented simplex under the chain map of ``f`` (0 if degenerate)."""
    img = [f.vertex_map[v] for v in simplex]
    if len(set(img)) < len(img):
        return gf.zero(p)
    # sign of the sorting permutation
    inversions = sum(1 for a, b in itertools.combinations(img, 2) if a > b)
    return gf.unit(index[tuple(sorted(img))], p) if not inversions % 2 else gf.from_entries(
        [(index[tuple(sorted(img))], -1)], p
    )


def _induced_on_cycles(f: SimplicialMap, k: int, p: int):
    if f.target.dim_cap < k + 1 or f.source.dim_cap < k + 1:
        raise InsufficientDimCap(f"H_{k} needs complexes enumerated to dimension {k + 1}")
    src_low = {s: i for i, s in enumerate(f.source.by_dim(k - 1))} if k > 0 else {}
    src_k = f.source.by_dim(k)
    d_k = [_boundary_column(s, src_low, p) if k > 0 else gf.zero(p) for s in src_k]
    Z = gf.nullspace(d_k, p)
    tgt_k = {s: i for i, s in enumerate(f.target.by_dim(k))}
    B = [_boundary_column(s, tgt_k, p) for s in f.target.by_dim(k + 1)]
    col_images = [_chain_image(f, s, tgt_k, p) for s in src_k]
    images = []
    for z in Z:
        acc = gf.zero(p)
        for i in gf.support(z, p):
            acc = gf.axpy(acc, col_images[i], gf.coeff(z, i, p), p)
        images.append(acc)
    return images, B


def induced_map_rank(f: SimplicialMap, k: int, p: int = 2) -> int:
    """Rank of ``f_*: H_k(source) -> H_k(target)`` over GF(p)."""
    images, B = _induced_on_cycles(f, k, p)
    return gf.rank(images + B, p) - gf.rank(B, p)


def induced_maps_agree(f: SimplicialMap, g: SimplicialMap, k: int, p: int = 2) -> bool:
    """True iff ``f_* == g_*`` on ``H_k``: every ``(f - g)(z)`` is a boundary."""
    fi, B = _induced_on_cycles(f, k, p)
    gi, _ = _induced_on_cycles(g, k, p)
    basis = gf.EchelonBasis(p)
    for b in B:
        basis.insert(b)
    return all(basis.contains(gf.axpy(a, b, -1, p)) for a, b in zip(fi, gi))


# -- reports ------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    alpha: float | None = None
    counterexample: tuple | None = None
    detail: str | None = None

    def to_json_obj(self) -> dict:
        out = {"name": self.name, "pass": bool(self.passed)}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.counterexample is not None:
            out["counterexample"] = list(self.counterexample)
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class DiagramReport:
    """Outcome of one diagram check; failed checks carry a counterexample."""

    diagram: str
    alphas: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name, passed, alpha=None, counterexample=None, detail=None) -> Check:
        c = Check(name, bool(passed), alpha, None if counterexample is None else tuple(counterexample), detail)
        self.checks.append(c)
        return c

    def to_json_obj(self) -> dict:
        return {
            "diagram": self.diagram,
            "alpha": self.alphas,
            "checks": [c.to_json_obj() for c in self.checks],
            "warnings": self.warnings,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(), **kw)


# -- inclusion diagram ------------------------------------------------------------------


def _require_subset(a: SubsetView, b: SubsetView, what: str) -> None:
    if not a.issubset(b):
        raise NotASubset(f"{what}: {a!r} is not contained in {b!r}")


def check_inclusion_diagram(
    A: SubsetView, X: SubsetView, M: SubsetView, alpha: float, dim_cap: int = 2
) -> DiagramReport:
    """All nine complexes over A ⊆ X ⊆ M and the twelve inclusions between them."""
    _require_subset(A, X, "A ⊆ X")
    _require_subset(X, M, "X ⊆ M")
    sets = {"A": A, "X": X, "M": M}
    C = {
        (w, v): cech_complex(sets[v], sets[w], alpha, dim_cap)
        for w, v in [("A", "A"), ("X", "A"), ("M", "A"), ("M", "X"), ("M", "M"),
                     ("X", "X"), ("A", "X"), ("A", "M"), ("X", "M")]
    }
    arrows = [
        (("A", "A"), ("X", "A")), (("A", "A"), ("A", "X")),
        (("X", "A"), ("M", "A")), (("X", "A"), ("X", "X")),
        (("M", "A"), ("M", "X")), (("M", "X"), ("M", "M")),
        (("X", "X"), ("M", "X")), (("X", "X"), ("X", "M")),
        (("A", "X"), ("X", "X")), (("A", "X"), ("A", "M")),
        (("A", "M"), ("X", "M")), (("X", "M"), ("M", "M")),
    ]
    report = DiagramReport("inclusion-diagram", [alpha])
    for src, dst in arrows:
        extra = C[src].simplices - C[dst].simplices
        witness = min(extra, key=lambda s: (len(s), s)) if extra else None
        report.add(f"C_{src[0]}({src[1]}) -> C_{dst[0]}({dst[1]})", not extra, alpha, witness)
    report.add("commutes", True, alpha, detail="every arrow is an inclusion of vertex sets")
    return report


# -- Dowker duality ------------------------------------------------------------------------


def check_dowker_duality(
    X: SubsetView,
    Y: SubsetView,
    alpha: float,
    k_max: int = 2,
    p: int = 2,
    betas: Sequence[float] | None = None,
) -> DiagramReport:
    """Betti numbers of ``C_Y(X, alpha)`` and ``C_X(Y, alpha)`` agree for k <= k_max,
    and so do the ranks of the maps induced from every radius ``beta <= alpha``."""
    if len(X) == 0 or len(Y) == 0:
        raise ValueError("X and Y must be nonempty")
    cap = k_max + 1
    left = cech_complex(X, Y, alpha, cap)
    right = cech_complex(Y, X, alpha, cap)
    report = DiagramReport("dowker", [alpha])
    for k in range(k_max + 1):
        bl, br = betti(left, k, p), betti(right, k, p)
        report.add(f"betti_{k}", bl == br, alpha, None if bl == br else (k, bl, br),
                   detail=f"{bl} vs {br}")
    F1, F2 = filtered_cech(X, Y, cap), filtered_cech(Y, X, cap)
    if betas is None:
        betas = sorted({v for v in F1.values + F2.values if 0 < v <= alpha})
    for beta in betas:
        for k in range(k_max + 1):
            r1 = induced_rank_oracle(F1, k, beta, alpha, p)
            r2 = induced_rank_oracle(F2, k, beta, alpha, p)
            report.add(f"rank_{k}(beta={beta!r})", r1 == r2, alpha,
                       None if r1 == r2 else (k, beta, r1, r2))
    return report


def _rank_matrix(barcode, k: int, grid: np.ndarray) -> np.ndarray:
    bars = barcode.in_dim(k)
    births = np.array([b.birth for b in bars])
    deaths = np.array([b.death for b in bars])
    born = (births[None, :] < grid[:, None]).astype(np.int64)
    alive = (deaths[None, :] >= grid[:, None]).astype(np.int64)
    return born @ alive.T  # [i, j] = rank from grid[i] to grid[j]


def dowker_sweep(X: SubsetView, Y: SubsetView, k_max: int = 2, p: int = 2) -> DiagramReport:
    """Dowker check at every critical radius of either filtration.

    Both sides are reduced independently; Betti numbers at every critical
    value, midpoint, and beyond the last value are compared, as are the ranks
    ``beta -> alpha`` for every pair of critical radii.
    """
    cap = k_max + 1
    F1, F2 = filtered_cech(X, Y, cap), filtered_cech(Y, X, cap)
    B1, B2 = persistence(F1, p, k_max), persistence(F2, p, k_max)
    crit = sorted({v for v in F1.values + F2.values if v > 0})
    top = max(F1.values + F2.values, default=0.0)
    grid = sorted(set(crit) | {(a + b) / 2 for a, b in zip(crit, crit[1:])} | {2 * top + 1.0})
    report = DiagramReport("dowker-sweep", grid)
    for k in range(k_max + 1):
        bad = next(((a, B1.alive(k, a), B2.alive(k, a)) for a in grid if B1.alive(k, a) != B2.alive(k, a)), None)
        report.add(f"betti_{k}", bad is None, None if bad is None else bad[0],
                   None if bad is None else (k, *bad))
        g = np.array(crit + [2 * top + 1.0])
        R1, R2 = _rank_matrix(B1, k, g), _rank_matrix(B2, k, g)
        mism = np.argwhere(np.triu(R1 != R2))
        if len(mism):
            i, j = mism[0]
            report.add(f"rank_{k}", False, float(g[j]), (k, float(g[i]), int(R1[i, j]), int(R2[i, j])))
        else:
            report.add(f"rank_{k}", True)
    return report


# -- interleavings ---------------------------------------------------------------------------


class _Values:
    """Filtration values ``min_{w in W} max_{v in s} d(v, w)`` of arbitrary vertex sets."""

    def __init__(self, witnesses: SubsetView):
        self.dist = witnesses.parent.dist
        self.w = list(witnesses.indices)

    def __call__(self, vertices) -> float:
        return set_value(self.dist, vertices, self.w)

    def many(self, sets) -> np.ndarray:
        return np.array([self(s) for s in sets])


def _hypothesis(report: DiagramReport, X, A, eps: float, strict: bool) -> float:
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    d = directed_hausdorff(X, A)
    if eps < d:
        if strict:
            raise EpsilonTooSmall(f"epsilon={eps!r} is below d_H(X, A)={d!r}")
        far = X.indices[int(np.argmax(X.distances_to(A).min(axis=1)))]
        report.add("epsilon > d_H(X, A)", False, counterexample=(far,),
                   detail=f"epsilon={eps!r}, d_H={d!r}; point {far} is farthest from A")
    elif eps == d:
        msg = f"epsilon equals d_H(X, A)={d!r}; accepted because a finite sample is compact"
        log.warning(msg)
        report.warnings.append(msg)
        report.add("epsilon >= d_H(X, A)", True, detail=f"d_H={d!r}")
    else:
        report.add("epsilon > d_H(X, A)", True, detail=f"d_H={d!r}")
    return d


def _first_failure(antecedent: np.ndarray, consequent: np.ndarray):
    bad = antecedent & ~consequent
    return int(np.argmax(bad)) if bad.any() else None


def _default_alphas(values: Iterable[float], shifts: Sequence[float]) -> list[float]:
    crit = set()
    for v in values:
        for s in shifts:
            if v - s > 0:
                crit.add(v - s)
    crit = sorted(crit)
    top = max(crit, default=0.0)
    mids = {(a + b) / 2 for a, b in zip(crit, crit[1:])}
    return sorted(set(crit) | mids | {top + 1.0})


def check_interleaving(
    X: SubsetView,
    A: SubsetView,
    Y: SubsetView,
    eps: float,
    alphas: Sequence[float] | None = None,
    dim_cap: int = 2,
    *,
    strict: bool = True,
) -> DiagramReport:
    """Simplicial certificates for the (0, eps)-interleavings between
    ``C_Y(A)`` / ``C_Y(X)`` (via inclusion and projection) and between
    ``C_A(Y)`` / ``C_X(Y)`` (via identity on Y), at every radius in ``alphas``.

    With ``strict=False`` an ``eps`` below ``d_H(X, A)`` is reported as a failed
    hypothesis instead of raising, and the remaining checks still run.
    """
    _require_subset(A, X, "A ⊆ X")
    if len(Y) == 0:
        raise ValueError("Y must be nonempty")
    report = DiagramReport("interleaving")
    _hypothesis(report, X, A, eps, strict)
    Pi = projection_map(X, A).assignment
    onY = _Values(Y)

    FX = filtered_cech(X, Y, dim_cap)  # C_Y(X)
    FA = filtered_cech(A, Y, dim_cap)  # C_Y(A)
    GX = filtered_cech(Y, X, dim_cap)  # C_X(Y)
    GA = filtered_cech(Y, A, dim_cap)  # C_A(Y)

    sX = FX.simplices
    vX = np.array(FX.values)
    imgX = [tuple(sorted({Pi[v] for v in s})) for s in sX]
    v_img = onY.many(imgX)
    v_union = onY.many(set(s) | set(i) for s, i in zip(sX, imgX))
    v_inX = np.array([FX.value(s) for s in FA.simplices])
    vA = np.array(FA.values)
    vA_union = onY.many(set(s) | {Pi[v] for v in s} for s in FA.simplices)
    gX = np.array(GX.values)
    gX_inA = np.array([GA.value(s) for s in GX.simplices])
    gA = np.array(GA.values)
    gA_inX = np.array([GX.value(s) for s in GA.simplices])

    if alphas is None:
        alphas = _default_alphas(FX.values + FA.values + GX.values + GA.values, (0.0, eps))
    alphas = sorted(alphas)
    report.alphas = list(alphas)

    for a in alphas:
        i = _first_failure(vA < a, v_inX < a)
        report.add("iota simplicial", i is None, a, None if i is None else FA.simplices[i])
        i = _first_failure(vX < a, v_img < a + eps)
        report.add("Pi simplicial", i is None, a, None if i is None else sX[i])
        i = _first_failure(vX < a, v_union < a + eps)
        report.add("incl ~ iota o Pi (contiguous)", i is None, a, None if i is None else sX[i])
        i = _first_failure(vA < a, vA_union < a + eps)
        report.add("incl ~ Pi o iota (contiguous)", i is None, a, None if i is None else FA.simplices[i])
        i = _first_failure(gA < a, gA_inX < a)
        report.add("C_A(Y) ⊆ C_X(Y)", i is None, a, None if i is None else GA.simplices[i])
        i = _first_failure(gX < a, gX_inA < a + eps)
        report.add("C_X(Y) ⊆ C_A(Y, +eps)", i is None, a, None if i is None else GX.simplices[i])
    for b, a in zip(alphas, alphas[1:]):
        # Pi_a o incl and incl o Pi_b use the same vertex map Pi; both must land in C_Y(A, a+eps)
        i = _first_failure(vX < b, (v_img < b + eps) & (v_img < a + eps))
        report.add("naturality Pi", i is None, a, None if i is None else sX[i])
        i = _first_failure(vA < b, (v_inX < b) & (v_inX < a))
        report.add("naturality iota", i is None, a, None if i is None else FA.simplices[i])
    report.add("identity triangles commute", True, detail="all maps are the identity on Y")
    return report


def check_reverse_square(
    X: SubsetView,
    A: SubsetView,
    alpha: float | Sequence[float] | None,
    eps: float,
    dim_cap: int = 2,
    *,
    strict: bool = True,
) -> DiagramReport:
    """The pentagon relating ``C_X(X, alpha)`` to ``C_A(A, alpha + 2 eps)``.

    Maps: Pi: C_X(X,a) -> C_X(A,a+e); C_X(A,a+e) ⊆ C_A(A,a+2e);
    C_X(X,a) ⊆ C_A(X,a+e); Pi: C_A(X,a+e) -> C_A(A,a+2e);
    C_A(A,a+2e) ⊆ C_X(X,a+2e). Both routes to C_A(A,a+2e) must be contiguous,
    and each route continued into C_X(X,a+2e) must be contiguous to the
    inclusion of C_X(X,a).
    """
    _require_subset(A, X, "A ⊆ X")
    report = DiagramReport("reverse-square")
    _hypothesis(report, X, A, eps, strict)
    Pi = projection_map(X, A).assignment
    wX, wA = _Values(X), _Values(A)
    FXX = filtered_cech(X, X, dim_cap)
    FAX = filtered_cech(X, A, dim_cap)  # C_A(X)
    FXA = filtered_cech(A, X, dim_cap)  # C_X(A)
    FAA = filtered_cech(A, A, dim_cap)

    sX = FXX.simplices
    img = [tuple(sorted({Pi[v] for v in s})) for s in sX]
    x_val = np.array(FXX.values)  # value with witnesses X
    a_val = np.array([FAX.value(s) for s in sX])  # value with witnesses A
    img_x = wX.many(img)
    img_a = wA.many(img)
    union_x = wX.many(set(s) | set(i) for s, i in zip(sX, img))
    sA = FXA.simplices
    xa_val = np.array(FXA.values)
    aa_val = np.array([FAA.value(s) for s in sA])

    if alpha is None:
        vals = FXX.values + FAX.values + FXA.values + FAA.values
        alphas = _default_alphas(vals, (0.0, eps, 2 * eps))
    elif isinstance(alpha, (int, float)):
        alphas = [float(alpha)]
    else:
        alphas = sorted(alpha)
    report.alphas = list(alphas)

    def ce(seq, i):
        return None if i is None else seq[i]

    for a in alphas:
        a1, a2 = a + eps, a + 2 * eps
        i = _first_failure(x_val < a, img_x < a1)
        report.add("Pi: C_X(X) -> C_X(A, +eps)", i is None, a, ce(sX, i))
        i = _first_failure(xa_val < a1, aa_val < a2)
        report.add("C_X(A, +eps) ⊆ C_A(A, +2eps)", i is None, a, ce(sA, i))
        i = _first_failure(x_val < a, a_val < a1)
        report.add("C_X(X) ⊆ C_A(X, +eps)", i is None, a, ce(sX, i))
        i = _first_failure(a_val < a1, img_a < a2)
        report.add("Pi: C_A(X, +eps) -> C_A(A, +2eps)", i is None, a, ce(sX, i))
        i = _first_failure(aa_val < a2, xa_val < a2)
        report.add("C_A(A, +2eps) ⊆ C_X(X, +2eps)", i is None, a, ce(sA, i))
        # both routes carry the vertex map Pi, so their union is Pi(s)
        i = _first_failure(x_val < a, img_a < a2)
        report.add("routes to C_A(A, +2eps) contiguous", i is None, a, ce(sX, i))
        i = _first_failure(x_val < a, union_x < a2)
        report.add("route via C_X(A) ~ inclusion into C_X(X, +2eps)", i is None, a, ce(sX, i))
        report.add("route via C_A(X) ~ inclusion into C_X(X, +2eps)", i is None, a, ce(sX, i))
    return report


def projection_simplicial_map(
    X: SubsetView, A: SubsetView, Y: SubsetView, alpha: float, eps: float, dim_cap: int
) -> SimplicialMap:
    """``Pi_alpha: C_Y(X, alpha) -> C_Y(A, alpha + eps)`` as an explicit map."""
    return SimplicialMap(
        cech_complex(X, Y, alpha, dim_cap),
        cech_complex(A, Y, alpha + eps, dim_cap),
        projection_map(X, A),
    )
