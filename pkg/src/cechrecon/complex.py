"""Generalised Čech complexes, their filtrations, and ambient Čech via miniballs.

Simplices are sorted tuples of *parent* indices of the metric space, so
complexes built over different subsets of the same space compare directly.

Membership uses open balls: a simplex with filtration value ``v`` belongs to
the complex at radius ``alpha`` iff ``v < alpha``.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CapTooLargeForMemory,
    EmptyInput,
    EmptyWitnessSet,
    ParseError,
)
from .metric import EuclideanCloud, SubsetView

Simplex = tuple  # sorted tuple of vertex indices

DEFAULT_MAX_SIMPLICES = 5_000_000


def max_simplices_budget() -> int:
    raw = os.environ.get("CECH_MAX_SIMPLICES")
    return int(float(raw)) if raw else DEFAULT_MAX_SIMPLICES


def faces(simplex: Simplex) -> list[Simplex]:
    """Codimension-one faces, in the order of the omitted vertex."""
    return [simplex[:i] + simplex[i + 1 :] for i in range(len(simplex))] if len(simplex) > 1 else []


def all_faces(simplex: Simplex) -> Iterator[Simplex]:
    """Every nonempty face, the simplex itself included."""
    for r in range(1, len(simplex) + 1):
        yield from itertools.combinations(simplex, r)


def _sort_key(s: Simplex):
    return (len(s), s)


@dataclass(frozen=True)
class SimplicialComplex:
    """Finite abstract simplicial complex enumerated up to ``dim_cap``."""

    simplices: frozenset
    dim_cap: int

    def __post_init__(self):
        object.__setattr__(self, "simplices", frozenset(tuple(sorted(s)) for s in self.simplices))
        if any(len(s) - 1 > self.dim_cap for s in self.simplices):
            raise ValueError("simplex above dim_cap")

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable[int]], dim_cap: int) -> "SimplicialComplex":
        out = set()
        for s in maximal:
            s = tuple(sorted(set(s)))
            for r in range(1, min(len(s), dim_cap + 1) + 1):
                out.update(itertools.combinations(s, r))
        return cls(frozenset(out), dim_cap)

    def __contains__(self, s) -> bool:
        return tuple(s) in self.simplices

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(sorted(self.simplices, key=_sort_key))

    def __le__(self, other: "SimplicialComplex") -> bool:
        return self.simplices <= other.simplices

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(s[0] for s in self.simplices if len(s) == 1))

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def by_dim(self, k: int) -> list[Simplex]:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def is_closed(self) -> bool:
        return all(f in self.simplices for s in self.simplices for f in faces(s))


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """Simplices with filtration values, kept in (value, dim, lex) order."""

    simplices: tuple
    values: tuple
    dim_cap: int

    def __post_init__(self):
        if len(self.simplices) != len(self.values):
            raise ValueError("simplices and values differ in length")
        pairs = sorted(
            ((float(v), tuple(s)) for s, v in zip(self.simplices, self.values)),
            key=lambda t: (t[0], len(t[1]), t[1]),
        )
        object.__setattr__(self, "simplices", tuple(s for _, s in pairs))
        object.__setattr__(self, "values", tuple(v for v, _ in pairs))

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(zip(self.simplices, self.values))

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.simplices)}

    def value(self, simplex: Simplex) -> float:
        return self.values[self.index[tuple(simplex)]]

    def slice(self, alpha: float) -> SimplicialComplex:
        """The complex at radius ``alpha``: simplices with value < alpha."""
        return SimplicialComplex(
            frozenset(s for s, v in zip(self.simplices, self.values) if v < alpha), self.dim_cap
        )

    def critical_values(self) -> list[float]:
        return sorted(set(self.values))

    def validate(self) -> None:
        """Raise if a face is missing or has a larger value than its coface."""
        idx = self.index
        for i, s in enumerate(self.simplices):
            for f in faces(s):
                j = idx.get(f)
                if j is None:
                    raise ValueError(f"face {f} of {s} missing")
                if j > i or self.values[j] > self.values[i]:
                    raise ValueError(f"face {f} does not precede {s}")

    # -- text format: one simplex per line, ``dim v0 .. vk value`` ----------

    def to_text(self) -> str:
        lines = [f"# dim_cap {self.dim_cap}"]
        for s, v in zip(self.simplices, self.values):
            lines.append(" ".join([str(len(s) - 1), *map(str, s), repr(v)]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FilteredComplex":
        simplices, values, cap = [], [], None
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "dim_cap":
                    cap = int(parts[1])
                continue
            parts = line.split()
            try:
                k = int(parts[0])
                verts = tuple(int(x) for x in parts[1:-1])
                v = float(parts[-1])
            except (ValueError, IndexError):
                raise ParseError(f"line {lineno}: malformed simplex line {line!r}") from None
            if len(verts) != k + 1:
                raise ParseError(f"line {lineno}: dimension {k} but {len(verts)} vertices")
            simplices.append(verts)
            values.append(v)
        if cap is None:
            cap = max((len(s) - 1 for s in simplices), default=0)
        return cls(tuple(simplices), tuple(values), cap)


# -- witness (generalised) Čech complexes ---------------------------------------


def _check_budget(n: int, dim_cap: int, budget: int | None) -> None:
    budget = max_simplices_budget() if budget is None else budget
    total = sum(math.comb(n, k + 1) for k in range(dim_cap + 1))
    if total > budget:
        raise CapTooLargeForMemory(
            f"{total} candidate simplices on {n} points up to dimension {dim_cap} exceed the "
            f"budget of {budget} (set CECH_MAX_SIMPLICES to raise it)"
        )


def minmax_values(dist: np.ndarray, simplices: np.ndarray, witnesses: Sequence[int]) -> np.ndarray:
    """``min_y max_{x in s} dist[x, y]`` for every row ``s`` of ``simplices``."""
    simplices = np.asarray(simplices, dtype=np.intp)
    if simplices.size == 0:
        return np.zeros(len(simplices))
    dw = dist[:, list(witnesses)]
    m, k = simplices.shape
    out = np.empty(m)
    chunk = max(1, 4_000_000 // max(1, k * dw.shape[1]))
    for lo in range(0, m, chunk):
        block = dw[simplices[lo : lo + chunk]]  # (chunk, k, |Y|)
        out[lo : lo + chunk] = block.max(axis=1).min(axis=1)
    return out


def set_value(dist: np.ndarray, vertices: Iterable[int], witnesses: Sequence[int]) -> float:
    """Filtration value of an arbitrary vertex set (no dimension cap)."""
    v = sorted(set(vertices))
    return float(dist[np.ix_(v, list(witnesses))].max(axis=0).min())


def filtration_value(simplex: Iterable[int], X: SubsetView, Y: SubsetView) -> float:
    """Smallest radius whose open balls around ``simplex`` share a witness in Y.

    The simplex belongs to ``C_Y(X, alpha)`` iff the returned value is < alpha.
    """
    if len(Y) == 0:
        raise EmptyWitnessSet("witness set Y is empty")
    s = tuple(simplex)
    if not s:
        raise ValueError("empty simplex")
    missing = [v for v in s if v not in X]
    if missing:
        raise ValueError(f"vertices {missing} are not in X")
    if X.parent is not Y.parent:
        raise ValueError("X and Y belong to different metric spaces")
    return set_value(X.parent.dist, s, Y.indices)


def cech_complex(
    X: SubsetView, Y: SubsetView, alpha: float, dim_cap: int, *, max_simplices: int | None = None
) -> SimplicialComplex:
    """``C_Y(X, alpha)``: subsets of X whose open alpha-balls share a point of Y.

    Built level by level from witness sets (bitmasks over Y), independently of
    :func:`filtered_cech`.
    """
    if len(Y) == 0:
        raise EmptyWitnessSet("witness set Y is empty")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if dim_cap < 0:
        raise ValueError("dim_cap must be nonnegative")
    if X.parent is not Y.parent:
        raise ValueError("X and Y belong to different metric spaces")
    _check_budget(len(X), dim_cap, max_simplices)
    close = X.distances_to(Y) < alpha
    witness = {}
    for row, x in enumerate(X.indices):
        mask = 0
        for col in np.flatnonzero(close[row]):
            mask |= 1 << int(col)
        if mask:
            witness[(x,)] = mask
    out = set(witness)
    level = dict(witness)
    verts = sorted(v[0] for v in witness)
    for _ in range(dim_cap):
        nxt = {}
        for s, mask in level.items():
            for v in verts:
                if v <= s[-1]:
                    continue
                m = mask & witness[(v,)]
                if m:
                    nxt[s + (v,)] = m
        if not nxt:
            break
        out.update(nxt)
        level = nxt
    return SimplicialComplex(frozenset(out), dim_cap)


def filtered_cech(
    X: SubsetView, Y: SubsetView, dim_cap: int, *, max_simplices: int | None = None
) -> FilteredComplex:
    """Every simplex on X up to ``dim_cap`` with its witness min-max value."""
    if len(Y) == 0:
        raise EmptyWitnessSet("witness set Y is empty")
    if dim_cap < 0:
        raise ValueError("dim_cap must be nonnegative")
    if X.parent is not Y.parent:
        raise ValueError("X and Y belong to different metric spaces")
    _check_budget(len(X), dim_cap, max_simplices)
    dist = X.parent.dist
    simplices, values = [], []
    for k in range(min(dim_cap, len(X) - 1) + 1):
        combos = np.array(list(itertools.combinations(X.indices, k + 1)), dtype=np.intp)
        vals = minmax_values(dist, combos, Y.indices)
        simplices.extend(map(tuple, combos.tolist()))
        values.extend(vals.tolist())
    return FilteredComplex(tuple(simplices), tuple(values), dim_cap)


# -- minimal enclosing balls -----------------------------------------------------


def _circumball(boundary: list[np.ndarray]) -> tuple[np.ndarray, float]:
    """Smallest ball with every boundary point on its sphere (affine-hull centre)."""
    p0 = boundary[0]
    if len(boundary) == 1:
        return p0.copy(), 0.0
    v = np.array([b - p0 for b in boundary[1:]])
    gram = 2.0 * v @ v.T
    rhs = np.einsum("ij,ij->i", v, v)
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    c = p0 + lam @ v
    r = max(float(np.linalg.norm(b - c)) for b in boundary)
    return c, r


def _welzl(points: np.ndarray, n: int, boundary: list, dim: int, tol: float):
    if boundary:
        c, r = _circumball(boundary)
        start = 0
    else:
        c, r = points[0].copy(), 0.0
        start = 1
    if len(boundary) == dim + 1:
        return c, r
    for i in range(start, n):
        p = points[i]
        if np.linalg.norm(p - c) > r + tol:
            c, r = _welzl(points, i, boundary + [p], dim, tol)
    return c, r


def miniball(points) -> tuple[np.ndarray, float]:
    """Centre and radius of the smallest enclosing ball (Welzl's algorithm)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if len(pts) == 0:
        raise EmptyInput("no points")
    if len(pts) > 16:
        pts = pts[np.random.default_rng(0).permutation(len(pts))]
    scale = max(1.0, float(np.abs(pts).max()))
    c, _ = _welzl(pts, len(pts), [], pts.shape[1], 1e-13 * scale)
    r = float(np.sqrt(((pts - c) ** 2).sum(axis=1).max()))
    return c, r


def miniball_radius(points) -> float:
    """Radius of the smallest ball containing all ``points``."""
    return miniball(points)[1]


def filtered_ambient_cech(
    A: EuclideanCloud,
    dim_cap: int,
    *,
    indices: Sequence[int] | None = None,
    max_simplices: int | None = None,
) -> FilteredComplex:
    """Ambient Čech filtration: a simplex enters at its miniball radius."""
    if dim_cap < 0:
        raise ValueError("dim_cap must be nonnegative")
    idx = list(range(A.n)) if indices is None else sorted(indices)
    _check_budget(len(idx), dim_cap, max_simplices)
    coords = A.coords
    value: dict = {}
    for k in range(min(dim_cap, len(idx) - 1) + 1):
        for s in itertools.combinations(idx, k + 1):
            if k == 0:
                value[s] = 0.0
            elif k == 1:
                value[s] = float(np.linalg.norm(coords[s[0]] - coords[s[1]])) / 2.0
            else:
                # clamp rounding so that faces never enter after their cofaces
                r = miniball_radius(coords[list(s)])
                value[s] = max(r, max(value[f] for f in faces(s)))
    return FilteredComplex(tuple(value), tuple(value.values()), dim_cap)
