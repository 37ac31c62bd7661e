"""Simplicial and persistent homology over GF(p).

Barcode convention (open balls): a bar ``(k, b, d)`` is alive at radius
``alpha`` iff ``b < alpha <= d``. A class born when a simplex of value ``b``
enters is present for every ``alpha > b``; a simplex of value ``d`` kills it
for every ``alpha > d``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from . import gf
from .complex import FilteredComplex, SimplicialComplex, faces
from .errors import InsufficientDimCap


def _boundary_column(simplex, row_index: dict, p: int):
    return gf.from_entries(
        ((row_index[f], -1 if i % 2 else 1) for i, f in enumerate(faces(simplex))), p
    )


@dataclass
class ChainComplexMatrices:
    """Boundary matrices ``d_k`` as column lists; rows index (k-1)-simplices."""

    bases: dict
    boundary: dict
    p: int = 2

    @classmethod
    def of(cls, simplices_by_dim: dict, p: int = 2) -> "ChainComplexMatrices":
        p = gf.check_prime(p)
        bases = {k: list(v) for k, v in simplices_by_dim.items()}
        boundary = {}
        for k, simplices in bases.items():
            if k == 0:
                boundary[0] = [gf.zero(p) for _ in simplices]
                continue
            if k - 1 not in bases:
                continue
            rows = {s: i for i, s in enumerate(bases.get(k - 1, []))}
            boundary[k] = [_boundary_column(s, rows, p) for s in simplices]
        return cls(bases, boundary, p)

    def is_chain_complex(self) -> bool:
        """``d_k o d_{k+1} == 0`` for every pair of consecutive degrees present."""
        return all(
            gf.matmul_is_zero(self.boundary[k], self.boundary[k + 1], self.p)
            for k in self.boundary
            if k >= 1 and k + 1 in self.boundary
        )


def chain_complex(K: SimplicialComplex, p: int = 2) -> ChainComplexMatrices:
    return ChainComplexMatrices.of({k: K.by_dim(k) for k in range(K.dim_cap + 1)}, p)


def betti(K: SimplicialComplex, k: int, p: int = 2) -> int:
    """``dim ker d_k - rank d_{k+1}`` over GF(p)."""
    if k < 0:
        raise ValueError("dimension must be nonnegative")
    if K.dim_cap < k + 1:
        raise InsufficientDimCap(f"betti_{k} needs simplices up to dimension {k + 1}, cap is {K.dim_cap}")
    cc = ChainComplexMatrices.of({j: K.by_dim(j) for j in (k - 1, k, k + 1) if j >= 0}, p)
    n_k = len(cc.bases[k])
    rank_k = gf.rank(cc.boundary[k], p) if k > 0 else 0
    return n_k - rank_k - gf.rank(cc.boundary[k + 1], p)


def betti_numbers(K: SimplicialComplex, k_max: int, p: int = 2) -> list[int]:
    return [betti(K, k, p) for k in range(k_max + 1)]


# -- barcodes ---------------------------------------------------------------------


class Bar(NamedTuple):
    dim: int
    birth: float
    death: float  # math.inf for essential classes

    def alive_at(self, alpha: float) -> bool:
        return self.birth < alpha <= self.death


@dataclass(frozen=True)
class Barcode:
    """Multiset of bars, sorted by (dim, birth, death).

    ``zero_length`` keeps the discarded birth == death pairs for debugging.
    """

    bars: tuple = ()
    p: int = 2
    zero_length: tuple = field(default=(), compare=False)

    def __post_init__(self):
        bars = tuple(sorted(Bar(int(k), float(b), float(d)) for k, b, d in self.bars))
        for bar in bars:
            if bar.birth > bar.death:
                raise ValueError(f"bar born after it dies: {bar}")
        object.__setattr__(self, "bars", tuple(b for b in bars if b.birth != b.death))
        object.__setattr__(
            self, "zero_length", tuple(self.zero_length) + tuple(b for b in bars if b.birth == b.death)
        )

    def __len__(self) -> int:
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def in_dim(self, k: int) -> list[Bar]:
        return [b for b in self.bars if b.dim == k]

    def alive(self, k: int, alpha: float) -> int:
        """Number of dimension-``k`` classes present in the complex at ``alpha``."""
        return sum(1 for b in self.bars if b.dim == k and b.birth < alpha <= b.death)

    def restricted(self, limit: float) -> "Barcode":
        """Bars born at or below ``limit``."""
        return Barcode(tuple(b for b in self.bars if b.birth <= limit), self.p)

    def to_json_obj(self) -> list[dict]:
        return [
            {"dim": b.dim, "birth": b.birth, "death": None if math.isinf(b.death) else b.death}
            for b in self.bars
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, data, p: int = 2) -> "Barcode":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            tuple(
                (d["dim"], d["birth"], math.inf if d["death"] is None else d["death"]) for d in data
            ),
            p,
        )


def persistence(F: FilteredComplex, p: int = 2, k_max: int | None = None) -> Barcode:
    """Barcode of ``F`` in dimensions ``0..k_max`` by column reduction with clearing."""
    p = gf.check_prime(p)
    if k_max is None:
        k_max = F.dim_cap - 1
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if F.dim_cap < k_max + 1:
        raise InsufficientDimCap(f"persistence up to H_{k_max} needs dim_cap >= {k_max + 1}, got {F.dim_cap}")
    index = F.index
    values = F.values
    dims = [len(s) - 1 for s in F.simplices]
    by_dim: dict[int, list[int]] = {}
    for j, d in enumerate(dims):
        if d <= k_max + 1:
            by_dim.setdefault(d, []).append(j)

    low_owner: dict[int, object] = {}  # pivot row -> reduced column
    killers: set[int] = set()
    cleared: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for d in range(k_max + 1, 0, -1):
        for j in by_dim.get(d, ()):
            if j in cleared:
                continue
            col = _boundary_column(F.simplices[j], index, p)
            while col:
                piv = gf.pivot(col, p)
                other = low_owner.get(piv)
                if other is None:
                    break
                col = gf.axpy(col, other, -gf.coeff(col, piv, p) * gf.inverse(gf.coeff(other, piv, p), p), p)
            if col:
                piv = gf.pivot(col, p)
                low_owner[piv] = col
                killers.add(j)
                cleared.add(piv)
                pairs.append((piv, j))

    bars = [(dims[i], values[i], values[j]) for i, j in pairs]
    paired_births = {i for i, _ in pairs}
    for d in range(k_max + 1):
        for i in by_dim.get(d, ()):
            if i not in killers and i not in paired_births:
                bars.append((d, values[i], math.inf))
    return Barcode(tuple(bars), p)


@dataclass(frozen=True)
class PersistentImageQuery:
    """Rank of ``H_k(K_beta) -> H_k(K_alpha)``; requires ``0 < beta <= alpha``."""

    k: int
    beta: float
    alpha: float

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if not (0 < self.beta <= self.alpha):
            raise ValueError(f"need 0 < beta <= alpha, got beta={self.beta}, alpha={self.alpha}")


def persistent_image_rank(barcode: Barcode, query: PersistentImageQuery) -> int:
    """Bars of dimension k alive on all of (beta, alpha]: birth < beta, death >= alpha."""
    return sum(
        1
        for b in barcode.bars
        if b.dim == query.k and b.birth < query.beta and b.death >= query.alpha
    )


# -- independent rank oracle ----------------------------------------------------------


class _Degree:
    """k-chains and (k+1)-boundaries of a filtration, in filtration order."""

    def __init__(self, F: FilteredComplex, k: int, p: int):
        if F.dim_cap < k + 1:
            raise InsufficientDimCap(f"H_{k} needs dim_cap >= {k + 1}, got {F.dim_cap}")
        self.p = p
        low, mid, high = [], [], []
        for s, v in F:
            d = len(s) - 1
            if d == k - 1:
                low.append(s)
            elif d == k:
                mid.append((s, v))
            elif d == k + 1:
                high.append((s, v))
        self.k_values = [v for _, v in mid]
        self.kp1_values = [v for _, v in high]
        low_index = {s: i for i, s in enumerate(low)}
        mid_index = {s: i for i, (s, _) in enumerate(mid)}
        self.d_k = (
            [_boundary_column(s, low_index, p) for s, _ in mid] if k > 0 else [gf.zero(p) for _ in mid]
        )
        self.d_kp1 = [_boundary_column(s, mid_index, p) for s, _ in high]

    def cycles(self, beta: float) -> list:
        m = sum(1 for v in self.k_values if v < beta)
        return gf.nullspace(self.d_k[:m], self.p)

    def boundaries(self, alpha: float) -> list:
        return [c for c, v in zip(self.d_kp1, self.kp1_values) if v < alpha]


def induced_rank_oracle(F: FilteredComplex, k: int, beta: float, alpha: float, p: int = 2) -> int:
    """Rank of ``H_k(slice(beta)) -> H_k(slice(alpha))`` by direct linear algebra.

    With Z the k-cycles at ``beta`` and B the k-boundaries at ``alpha`` the rank
    is ``dim Z - dim(Z ∩ B) = rank[Z|B] - rank B``.
    """
    if beta > alpha:
        raise ValueError("need beta <= alpha")
    p = gf.check_prime(p)
    deg = _Degree(F, k, p)
    Z = deg.cycles(beta)
    B = deg.boundaries(alpha)
    return gf.rank(Z + B, p) - gf.rank(B, p)


def induced_rank_table(F: FilteredComplex, k: int, grid: Sequence[float], p: int = 2) -> dict:
    """``induced_rank_oracle`` for every ``beta <= alpha`` drawn from ``grid``.

    Same linear algebra, organised incrementally: one cycle basis per ``beta``
    and one growing echelon basis of boundaries per sweep over ``alpha``.
    """
    p = gf.check_prime(p)
    deg = _Degree(F, k, p)
    grid = sorted(set(grid))
    order = sorted(range(len(deg.kp1_values)), key=lambda i: deg.kp1_values[i])

    rank_b = {}
    basis = gf.EchelonBasis(p)
    pos = 0
    for a in grid:
        while pos < len(order) and deg.kp1_values[order[pos]] < a:
            basis.insert(deg.d_kp1[order[pos]])
            pos += 1
        rank_b[a] = basis.rank

    out = {}
    for bi, beta in enumerate(grid):
        Z = deg.cycles(beta)
        basis = gf.EchelonBasis(p)
        for z in Z:
            basis.insert(z)
        pos = 0
        for a in grid[bi:]:
            while pos < len(order) and deg.kp1_values[order[pos]] < a:
                basis.insert(deg.d_kp1[order[pos]])
                pos += 1
            out[(beta, a)] = basis.rank - rank_b[a]
    return out


def query_grid(F: FilteredComplex) -> list[float]:
    """Positive critical values plus one radius beyond the last."""
    vals = [v for v in F.critical_values() if v > 0]
    top = max(F.values, default=0.0)
    return vals + [2 * top + 1.0]
