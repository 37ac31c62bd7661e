"""GF(p) vectors, echelon bases, rank and nullspace against a dense oracle."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cechrecon import gf


def dense_rank_mod_p(M: np.ndarray, p: int) -> int:
    """Row reduction on a dense integer matrix; deliberately naive."""
    M = np.array(M, dtype=np.int64) % p
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        r += 1
    return r


def columns_of(M: np.ndarray, p: int):
    return [gf.from_entries(((i, int(v)) for i, v in enumerate(col) if v), p) for col in M.T]


matrices = st.tuples(
    st.integers(1, 7), st.integers(1, 7), st.sampled_from([2, 3, 5]), st.integers(0, 2**31)
)


def random_matrix(rows, cols, p, seed, density=0.4):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, p, size=(rows, cols))
    return M * (rng.random((rows, cols)) < density)


def test_check_prime():
    assert gf.check_prime(7) == 7
    for bad in (0, 1, 4, 9):
        with pytest.raises(ValueError):
            gf.check_prime(bad)


def test_vector_basics_gf2():
    v = gf.from_entries([(0, 1), (3, 1), (3, 1)], 2)  # duplicates cancel
    assert v == 1
    assert gf.support(gf.from_entries([(1, 1), (4, 1)], 2), 2) == [1, 4]
    assert gf.pivot(0b1010, 2) == 3
    assert gf.axpy(0b110, 0b011, 1, 2) == 0b101


def test_vector_basics_gf3():
    v = gf.from_entries([(0, 1), (2, -1), (2, 4)], 3)  # -1 + 4 = 3 = 0 mod 3
    assert v == {0: 1}
    w = gf.from_entries([(0, 2), (5, 1)], 3)
    s = gf.axpy(v, w, 1, 3)
    assert s == {5: 1}
    assert gf.pivot(w, 3) == 5
    assert gf.inverse(2, 3) == 2
    assert gf.scale(w, 2, 3) == {0: 1, 5: 2}
    assert gf.coeff(w, 0, 3) == 2 and gf.coeff(w, 1, 3) == 0


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_rank_matches_dense_oracle(args):
    rows, cols, p, seed = args
    M = random_matrix(rows, cols, p, seed)
    assert gf.rank(columns_of(M, p), p) == dense_rank_mod_p(M, p)


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_nullspace_is_a_kernel_basis(args):
    rows, cols, p, seed = args
    M = random_matrix(rows, cols, p, seed)
    cols_ = columns_of(M, p)
    K = gf.nullspace(cols_, p)
    assert len(K) == cols - dense_rank_mod_p(M, p)
    dense_K = gf.to_dense(K, cols, p) if K else np.zeros((cols, 0), dtype=np.int64)
    assert not np.any((M @ dense_K) % p)
    assert gf.rank(K, p) == len(K)


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_nullspace_prefixes_are_nested(args):
    rows, cols, p, seed = args
    cols_ = columns_of(random_matrix(rows, cols, p, seed, density=0.6), p)
    full = gf.nullspace(cols_, p)
    for m in range(cols + 1):
        prefix = gf.nullspace(cols_[:m], p)
        assert prefix == [z for z in full if not z or gf.pivot(z, p) < m]


def test_echelon_basis_insert_and_contains():
    for p in (2, 3):
        b = gf.EchelonBasis(p)
        e0, e1 = gf.unit(0, p), gf.unit(1, p)
        assert b.insert(e0) and b.insert(gf.axpy(e0, e1, 1, p))
        assert not b.insert(e1)
        assert b.contains(e1) and not b.contains(gf.unit(2, p))
        c = b.copy()
        c.insert(gf.unit(2, p))
        assert b.rank == 2 and c.rank == 3
        assert not b.insert(gf.zero(p))


def test_matmul_is_zero():
    # boundary of a triangle composed with boundary of its edges
    d1 = [gf.from_entries([(0, -1), (1, 1)], 3), gf.from_entries([(0, -1), (2, 1)], 3),
          gf.from_entries([(1, -1), (2, 1)], 3)]
    d2 = [gf.from_entries([(0, 1), (1, -1), (2, 1)], 3)]
    assert gf.matmul_is_zero(d1, d2, 3)
    assert not gf.matmul_is_zero(d1, [gf.unit(0, 3)], 3)
