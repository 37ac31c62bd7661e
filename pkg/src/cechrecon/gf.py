"""Sparse linear algebra over GF(p).

Vectors use one of two representations depending on the field:

* ``p == 2``: a Python ``int`` used as a bitset (bit ``i`` = coordinate ``i``);
* ``p > 2``: a ``dict`` mapping coordinate to a nonzero residue.

Pivots are the *largest* nonzero coordinate, which matches the lowest-one
convention of boundary-matrix reduction.
"""
from __future__ import annotations

from typing import Iterable, Sequence


def check_prime(p: int) -> int:
    p = int(p)
    if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise ValueError(f"field characteristic must be prime, got {p}")
    return p


def zero(p: int):
    return 0 if p == 2 else {}


def unit(i: int, p: int):
    return 1 << i if p == 2 else {i: 1}


def from_entries(entries: Iterable[tuple[int, int]], p: int):
    """Build a vector from ``(index, coefficient)`` pairs, summing duplicates."""
    if p == 2:
        v = 0
        for i, c in entries:
            if c % 2:
                v ^= 1 << i
        return v
    v: dict[int, int] = {}
    for i, c in entries:
        c = (v.get(i, 0) + c) % p
        if c:
            v[i] = c
        else:
            v.pop(i, None)
    return v


def support(v, p: int) -> list[int]:
    if p == 2:
        out = []
        while v:
            low = v & -v
            out.append(low.bit_length() - 1)
            v ^= low
        return out
    return sorted(v)


def pivot(v, p: int) -> int:
    """Largest nonzero coordinate, or -1 for the zero vector."""
    if p == 2:
        return v.bit_length() - 1
    return max(v) if v else -1


def axpy(v, w, c: int, p: int):
    """Return ``v + c * w``."""
    if p == 2:
        return v ^ w if c % 2 else v
    c %= p
    if not c:
        return v
    out = dict(v)
    for i, wi in w.items():
        x = (out.get(i, 0) + c * wi) % p
        if x:
            out[i] = x
        else:
            del out[i]
    return out


def coeff(v, i: int, p: int) -> int:
    if p == 2:
        return (v >> i) & 1
    return v.get(i, 0)


def inverse(c: int, p: int) -> int:
    return pow(c % p, p - 2, p)


def scale(v, c: int, p: int):
    if p == 2:
        return v if c % 2 else 0
    c %= p
    return {i: (x * c) % p for i, x in v.items()} if c else {}


class EchelonBasis:
    """Incrementally maintained basis in echelon form (one vector per pivot)."""

    def __init__(self, p: int = 2):
        self.p = check_prime(p)
        self._rows: dict[int, object] = {}

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v):
        p, rows = self.p, self._rows
        if p == 2:
            while v:
                b = rows.get(v.bit_length() - 1)
                if b is None:
                    break
                v ^= b
            return v
        while v:
            piv = max(v)
            b = rows.get(piv)
            if b is None:
                break
            v = axpy(v, b, -v[piv], p)
        return v

    def insert(self, v) -> bool:
        """Add ``v`` to the span; return True iff it was independent."""
        v = self.reduce(v)
        if not v:
            return False
        piv = pivot(v, self.p)
        if self.p != 2:
            v = scale(v, inverse(v[piv], self.p), self.p)
        self._rows[piv] = v
        return True

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def copy(self) -> "EchelonBasis":
        other = EchelonBasis(self.p)
        other._rows = dict(self._rows)
        return other


def rank(columns: Sequence, p: int = 2) -> int:
    basis = EchelonBasis(p)
    for c in columns:
        basis.insert(c)
    return basis.rank


def nullspace(columns: Sequence, p: int = 2) -> list:
    """Basis of ``{x : sum_j x_j columns[j] = 0}``, in column-index coordinates.

    The ``j``-th returned vector (in order) only involves columns ``<= `` the
    column that completed it, so prefixes of ``columns`` have nested kernels.
    """
    p = check_prime(p)
    reduced: dict[int, tuple] = {}
    kernel = []
    for j, col in enumerate(columns):
        combo = unit(j, p)
        while col:
            piv = pivot(col, p)
            hit = reduced.get(piv)
            if hit is None:
                break
            b, bcombo = hit
            c = (-coeff(col, piv, p) * inverse(coeff(b, piv, p), p)) % p
            col = axpy(col, b, c, p)
            combo = axpy(combo, bcombo, c, p)
        if col:
            reduced[pivot(col, p)] = (col, combo)
        else:
            kernel.append(combo)
    return kernel


def to_dense(vectors: Sequence, length: int, p: int = 2):
    """Columns as a dense ``length x len(vectors)`` numpy array (test helper)."""
    import numpy as np

    out = np.zeros((length, len(vectors)), dtype=np.int64)
    for j, v in enumerate(vectors):
        for i in support(v, p):
            out[i, j] = coeff(v, i, p)
    return out


def matmul_is_zero(left: Sequence, right: Sequence, p: int = 2) -> bool:
    """Check ``L @ R == 0`` where both are given as column lists.

    Column ``j`` of the product is ``sum_i R[i, j] * L[:, i]``.
    """
    for col in right:
        acc = zero(p)
        for i in support(col, p):
            acc = axpy(acc, left[i], coeff(col, i, p), p)
        if acc:
            return False
    return True
