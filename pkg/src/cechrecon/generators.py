"""Fixtures with known answers: two points, circle samples, random instances."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import QTooSmall
from .metric import EuclideanCloud, FiniteMetricSpace, SubsetView, directed_hausdorff

FACT_TOL = 1e-9
MAX_RANDOM_POINTS = 15
RANDOM_METHODS = ("euclidean-uniform-cube", "random-symmetric-matrix")


@dataclass(frozen=True, eq=False)
class Fixture:
    """A metric space with designated subsets and facts known in closed form.

    ``subsets`` maps names such as ``"A"``, ``"X"``, ``"M"`` to views of
    ``space``; ``facts`` holds the analytic values (``tau``, ``d_H``,
    ``betti`` of the underlying space, ...).
    """

    name: str
    space: FiniteMetricSpace
    subsets: dict
    facts: dict = field(default_factory=dict)
    cloud: EuclideanCloud | None = None

    def __getitem__(self, key: str) -> SubsetView:
        return self.subsets[key]


def two_point_space(eps: float = 1.0) -> Fixture:
    """X = {x1, x2} on the real line at distance ``eps``, sample A = {x1}."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    cloud = EuclideanCloud(np.array([[0.0], [eps]]), labels=("x1", "x2"))
    space = FiniteMetricSpace(np.array([[0.0, eps], [eps, 0.0]]), labels=("x1", "x2"))
    X = space.full()
    A = space.subset([0])
    facts = {"d_H": float(eps), "tau": eps / 2.0, "betti": [2, 0, 0]}
    if abs(directed_hausdorff(X, A) - facts["d_H"]) > FACT_TOL:
        raise AssertionError("two-point fixture inconsistent")
    return Fixture(f"two-point(eps={eps!r})", space, {"A": A, "X": X, "M": X}, facts, cloud)


def circle_angles(q: int) -> np.ndarray:
    """Angles of xi^1..xi^q (xi^i at 2*pi*i/q), stored at indices 0..q-1."""
    return 2.0 * math.pi * np.arange(1, q + 1) / q


def circle_sample(q: int) -> Fixture:
    """The q-th roots of unity on the unit circle.

    Distances come from the chord formula ``2 sin(j pi / q)`` with ``j`` the
    cyclic index gap, so symmetric configurations produce exact ties.
    """
    if q < 3:
        raise QTooSmall(f"need q >= 3, got {q}")
    theta = circle_angles(q)
    cloud = EuclideanCloud(np.column_stack([np.cos(theta), np.sin(theta)]),
                           labels=tuple(f"xi^{i}" for i in range(1, q + 1)))
    idx = np.arange(q)
    gap = np.abs(idx[:, None] - idx[None, :])
    gap = np.minimum(gap, q - gap)
    space = FiniteMetricSpace(2.0 * np.sin(gap * math.pi / q), labels=cloud.labels)
    if np.max(np.abs(space.dist - cloud.pairwise())) > FACT_TOL:
        raise AssertionError("chord formula disagrees with coordinates")
    A = space.full()
    facts = {"tau": 1.0, "d_H": 2.0 * math.sin(math.pi / (2 * q)), "betti": [1, 1, 0], "q": q}
    return Fixture(f"circle(q={q})", space, {"A": A}, facts, cloud)


def nested_circle_samples(q_small: int, q_large: int) -> Fixture:
    """A_{q_small} inside A_{q_large}; requires q_small to divide q_large."""
    if q_large % q_small:
        raise ValueError("q_small must divide q_large")
    big = circle_sample(q_large)
    step = q_large // q_small
    A = big.space.subset(range(step - 1, q_large, step))  # xi_large^(step*i) = xi_small^i
    X = big.space.full()
    facts = {"d_H": directed_hausdorff(X, A), "tau": 1.0}
    return Fixture(f"circle({q_small} in {q_large})", big.space, {"A": A, "X": X, "M": X}, facts, big.cloud)


def dense_circle_proxy(m: int, sample: EuclideanCloud | None = None) -> SubsetView:
    """``m`` equally spaced points of the unit circle as a finite stand-in for S^1.

    If ``sample`` is given its points are appended to the parent space at
    indices ``m, m+1, ...`` so that distances between proxy and sample can be
    taken. Directed Hausdorff distances computed from a proxy are lower bounds
    of the values for the full circle.
    """
    if m < 100:
        raise ValueError(f"proxy needs m >= 100 points, got {m}")
    theta = 2.0 * math.pi * np.arange(m) / m
    coords = np.column_stack([np.cos(theta), np.sin(theta)])
    if sample is not None:
        coords = np.vstack([coords, sample.coords])
    space = EuclideanCloud(coords).metric()
    return space.subset(range(m))


def proxy_sample_view(proxy: SubsetView) -> SubsetView:
    """The points appended after the proxy by :func:`dense_circle_proxy`."""
    return SubsetView(proxy.parent, range(len(proxy), proxy.parent.n))


def random_metric_instance(
    seed: int,
    n: int,
    method: str = "euclidean-uniform-cube",
    *,
    dim: int = 2,
    cap: int = MAX_RANDOM_POINTS,
) -> Fixture:
    """Reproducible random space on ``n`` points with random nested subsets.

    ``random-symmetric-matrix`` gives a symmetric, zero-diagonal matrix with
    no triangle inequality. Subsets: ``M`` (everything), ``X`` nonempty,
    ``A`` nonempty inside ``X``, and an independent nonempty ``Y``.
    """
    if method not in RANDOM_METHODS:
        raise ValueError(f"method must be one of {RANDOM_METHODS}")
    if not 1 <= n <= cap:
        raise ValueError(f"n must be in 1..{cap}")
    rng = np.random.default_rng(seed)
    cloud = None
    if method == "euclidean-uniform-cube":
        cloud = EuclideanCloud(rng.random((n, dim)))
        space = cloud.metric()
    else:
        upper = np.triu(rng.random((n, n)), 1)
        space = FiniteMetricSpace(upper + upper.T)
    X = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
    A = sorted(rng.choice(X, size=int(rng.integers(1, len(X) + 1)), replace=False).tolist())
    Y = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
    subsets = {"M": space.full(), "X": space.subset(X), "A": space.subset(A), "Y": space.subset(Y)}
    facts = {"seed": seed, "method": method, "d_H": directed_hausdorff(subsets["X"], subsets["A"])}
    return Fixture(f"random(seed={seed}, n={n}, method={method})", space, subsets, facts, cloud)
