"""Finite metric spaces, subsets, directed Hausdorff distance and projections."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptySample, MetricError, NotASubset, ParseError

#: tolerance used only by validation checks (symmetry, diagonal, triangle inequality)
ETA = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Labelled points with a symmetric distance matrix.

    Zero distances between distinct points are allowed. The triangle
    inequality is only checked on request (``check_triangle=True`` or
    :meth:`satisfies_triangle_inequality`).
    """

    dist: np.ndarray
    labels: tuple = ()
    check_triangle: bool = False
    eta: float = ETA

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise MetricError(f"distance matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise MetricError("distance matrix contains non-finite entries")
        if np.any(d < 0):
            i, j = np.argwhere(d < 0)[0]
            raise MetricError(f"negative distance d[{i}][{j}] = {d[i, j]}")
        if np.any(np.abs(np.diag(d)) > self.eta):
            raise MetricError("nonzero diagonal entry")
        if np.any(np.abs(d - d.T) > self.eta):
            i, j = np.argwhere(np.abs(d - d.T) > self.eta)[0]
            raise MetricError(f"asymmetric distances d[{i}][{j}] != d[{j}][{i}]")
        # exact symmetry and zero diagonal after validation; a no-op on exact input
        d = (d + d.T) / 2.0
        np.fill_diagonal(d, 0.0)
        object.__setattr__(self, "dist", _readonly(d))
        n = d.shape[0]
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise MetricError(f"{len(labels)} labels for {n} points")
        object.__setattr__(self, "labels", labels)
        if self.check_triangle and not self.satisfies_triangle_inequality(self.eta):
            raise MetricError("triangle inequality violated")

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def satisfies_triangle_inequality(self, eta: float = ETA) -> bool:
        d = self.dist
        # d[i,k] <= d[i,j] + d[j,k] for all j, vectorised over (i, k)
        for j in range(self.n):
            if np.any(d > d[:, j : j + 1] + d[j : j + 1, :] + eta):
                return False
        return True

    def full(self) -> "SubsetView":
        return SubsetView(self, range(self.n))

    def subset(self, indices: Iterable[int]) -> "SubsetView":
        return SubsetView(self, indices)


class SubsetView:
    """Sorted, duplicate-free selection of points of a :class:`FiniteMetricSpace`.

    Indices always refer to the parent space, so views taken from the same
    parent can be compared and nested freely.
    """

    __slots__ = ("parent", "indices", "_index_set")

    def __init__(self, parent: FiniteMetricSpace | "SubsetView", indices: Iterable[int]):
        if isinstance(parent, SubsetView):
            # positions within a view resolve to parent indices
            idx = [parent.indices[int(i)] for i in indices]
            parent = parent.parent
        else:
            idx = [int(i) for i in indices]
        idx = sorted(idx)
        if any(a == b for a, b in zip(idx, idx[1:])):
            raise ValueError("duplicate indices in subset")
        if idx and (idx[0] < 0 or idx[-1] >= parent.n):
            raise IndexError(f"subset index out of range 0..{parent.n - 1}")
        self.parent = parent
        self.indices = tuple(idx)
        self._index_set = frozenset(idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return i in self._index_set

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubsetView)
            and other.parent is self.parent
            and other.indices == self.indices
        )

    def __hash__(self):
        return hash((id(self.parent), self.indices))

    def __repr__(self) -> str:
        return f"SubsetView({list(self.indices)})"

    def issubset(self, other: "SubsetView") -> bool:
        return self.parent is other.parent and self._index_set <= other._index_set

    def subset(self, positions: Iterable[int]) -> "SubsetView":
        """View of the points at the given positions *within this view*."""
        return SubsetView(self, positions)

    def restrict(self, parent_indices: Iterable[int]) -> "SubsetView":
        """View of the given parent indices, all of which must lie in this view."""
        idx = list(parent_indices)
        missing = [i for i in idx if i not in self._index_set]
        if missing:
            raise NotASubset(f"indices {missing} are not in {self!r}")
        return SubsetView(self.parent, idx)

    def difference(self, other: "SubsetView") -> "SubsetView":
        _same_parent(self, other)
        return SubsetView(self.parent, self._index_set - other._index_set)

    def distances_to(self, other: "SubsetView") -> np.ndarray:
        """Block ``dist[self, other]`` of the parent matrix."""
        _same_parent(self, other)
        return self.parent.dist[np.ix_(self.indices, other.indices)]


def _same_parent(a: SubsetView, b: SubsetView) -> None:
    if a.parent is not b.parent:
        raise ValueError("subsets belong to different metric spaces")


@dataclass(frozen=True, eq=False)
class EuclideanCloud:
    """Points in R^n, one row per point."""

    coords: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or (c.shape[0] > 0 and c.shape[1] == 0):
            raise ValueError(f"coordinates must be an (n, dim) array, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coordinate")
        object.__setattr__(self, "coords", _readonly(c))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.coords.shape[1]

    def pairwise(self) -> np.ndarray:
        # one coordinate at a time keeps memory at n^2 rather than n^2 * dim
        acc = np.zeros((self.n, self.n))
        for col in self.coords.T:
            acc += (col[:, None] - col[None, :]) ** 2
        return np.sqrt(acc)

    def metric(self) -> FiniteMetricSpace:
        return FiniteMetricSpace(self.pairwise(), labels=self.labels)


@dataclass(frozen=True)
class VertexMap:
    """Total map from the indices of ``source`` into the indices of ``target``."""

    source: SubsetView
    target: SubsetView
    assignment: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        a = {int(k): int(v) for k, v in dict(self.assignment).items()}
        if set(a) != set(self.source.indices):
            raise ValueError("vertex map must be defined on exactly the source indices")
        bad = [v for v in a.values() if v not in self.target]
        if bad:
            raise ValueError(f"images {bad} are not in the target")
        object.__setattr__(self, "assignment", MappingProxyType(a))

    def __call__(self, v: int) -> int:
        return self.assignment[v]

    def image(self, simplex: Iterable[int]) -> tuple[int, ...]:
        return tuple(sorted({self.assignment[v] for v in simplex}))

    @classmethod
    def inclusion(cls, source: SubsetView, target: SubsetView) -> "VertexMap":
        if not source.issubset(target):
            raise NotASubset(f"{source!r} is not contained in {target!r}")
        return cls(source, target, {i: i for i in source})


def directed_hausdorff(X: SubsetView, A: SubsetView) -> float:
    """``max_{x in X} min_{a in A} d(x, a)``; zero when X is contained in A.

    When ``X`` is a finite proxy of an infinite space the result is a lower
    bound for the true value.
    """
    if len(A) == 0:
        raise EmptySample("sample A is empty")
    if len(X) == 0:
        return 0.0
    return float(X.distances_to(A).min(axis=1).max())


def is_s_approximation(A: SubsetView, X: SubsetView, s: float) -> bool:
    """True iff every point of X lies within closed distance ``s`` of A."""
    if not A.issubset(X):
        raise NotASubset("A must be a subset of X")
    if not s > 0:
        raise ValueError("s must be positive")
    if len(X) == 0:
        return True
    if len(A) == 0:
        return False
    return bool(np.all(X.distances_to(A).min(axis=1) <= s))


def projection_map(X: SubsetView, A: SubsetView) -> VertexMap:
    """Nearest-point map X -> A, identity on A, ties to the smallest index."""
    if len(A) == 0:
        raise EmptySample("sample A is empty")
    if not A.issubset(X):
        raise NotASubset("A must be a subset of X")
    block = X.distances_to(A)
    # argmin returns the first minimum, i.e. the smallest parent index of A
    nearest = np.argmin(block, axis=1)
    assignment = {}
    for row, x in enumerate(X.indices):
        assignment[x] = x if x in A else A.indices[nearest[row]]
    return VertexMap(X, A, assignment)


# -- CSV ingestion -----------------------------------------------------------


def _rows(source) -> list[list[float]]:
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, newline="") as fh:
            text = fh.read()
    elif isinstance(source, (str, os.PathLike)):
        raise FileNotFoundError(source)
    else:
        text = source.read()
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or row[0].lstrip().startswith("#"):
            continue
        try:
            rows.append([float(x) for x in row])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return rows


def read_points_csv(source) -> EuclideanCloud:
    """One point per row, coordinates as columns."""
    rows = _rows(source)
    if not rows:
        raise ParseError("no points found")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"ragged row {i}: expected {width} columns, got {len(r)}")
    return EuclideanCloud(np.array(rows))


def read_distance_csv(source) -> FiniteMetricSpace:
    """Full n x n matrix, or lower-triangular rows of lengths 1, 2, ..., n."""
    rows = _rows(source)
    n = len(rows)
    if n == 0:
        raise ParseError("empty distance matrix")
    lengths = [len(r) for r in rows]
    if all(length == n for length in lengths):
        d = np.array(rows)
    elif lengths == list(range(1, n + 1)):
        d = np.zeros((n, n))
        for i, r in enumerate(rows):
            d[i, : i + 1] = r
        d = d + np.tril(d, -1).T
    else:
        raise ParseError(f"ragged distance matrix, row lengths {lengths}")
    return FiniteMetricSpace(d)


def read_index_list(source) -> list[int]:
    """Index list file: one nonnegative integer per line."""
    with open(source) as fh:
        out = []
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise ParseError(f"{source}:{lineno}: not an integer: {line!r}") from None
    return out


def write_points_csv(cloud: EuclideanCloud, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    for row in cloud.coords:
        w.writerow([repr(float(x)) for x in row])


def write_distance_csv(space: FiniteMetricSpace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    for row in space.dist:
        w.writerow([repr(float(x)) for x in row])
