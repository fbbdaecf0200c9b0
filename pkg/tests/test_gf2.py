import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from theta_selmer import gf2
from theta_selmer.gf2 import (
    BitMatrix,
    BitVector,
    RaggedLayout,
    block_assemble,
    col_vec,
    diag,
    identity,
    kernel_basis,
    multiply,
    outer_product,
    rank,
    solve,
    transpose,
    zeros,
)


def random_matrix(rng, rows, cols):
    return BitMatrix(rows, cols, tuple(rng.randrange(1 << cols) for _ in range(rows)))


def naive_rank(m: BitMatrix) -> int:
    """Unpacked bit-by-bit elimination, the independent oracle."""
    a = [row[:] for row in m.to_lists()]
    rank_ = 0
    for col in range(m.ncols):
        piv = next((i for i in range(rank_, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rank_], a[piv] = a[piv], a[rank_]
        for i in range(len(a)):
            if i != rank_ and a[i][col]:
                a[i] = [(x + y) % 2 for x, y in zip(a[i], a[rank_])]
        rank_ += 1
    return rank_


def test_rank_examples():
    assert rank(identity(3)) == 3
    assert rank(zeros(2, 3)) == 0


def test_rank_vs_naive_oracle():
    rng = random.Random(7)
    for _ in range(60):
        m = random_matrix(rng, 20, 20)
        assert rank(m) == naive_rank(m)


def test_kernel_examples():
    assert kernel_basis(identity(4)) == []
    basis = kernel_basis(zeros(2, 3))
    assert len(basis) == 3
    rng = random.Random(1)
    for _ in range(40):
        m = random_matrix(rng, rng.randrange(1, 12), rng.randrange(1, 12))
        for v in kernel_basis(m):
            assert m.mul_vec(v).is_zero()


def test_rank_nullity_and_transpose():
    rng = random.Random(5)
    for _ in range(200):
        r = rng.randrange(0, 20)
        c = rng.randrange(0, 20)
        m = BitMatrix(r, c, tuple(rng.randrange(1 << c) if c else 0 for _ in range(r)))
        assert rank(m) + len(kernel_basis(m)) == c
        assert rank(m) == rank(transpose(m))


def test_alternating_matrix_even_rank():
    # M = N + N^T has zero diagonal and even rank over GF(2)
    rng = random.Random(11)
    for _ in range(100):
        t = rng.randrange(1, 14)
        n = random_matrix(rng, t, t)
        m = n + transpose(n)
        assert all(m.entry(i, i) == 0 for i in range(t))
        assert rank(m) % 2 == 0


def test_solve_examples():
    v = BitVector.from_bits([1, 0, 1])
    assert solve(identity(3), v) == v
    assert solve(zeros(2, 2), BitVector.from_bits([1, 0])) is None
    rng = random.Random(3)
    for _ in range(60):
        m = random_matrix(rng, 9, 7)
        u0 = BitVector(7, rng.randrange(1 << 7))
        v = m.mul_vec(u0)
        u = solve(m, v)
        assert u is not None
        assert m.mul_vec(u) == v


def test_block_assemble_scalars():
    m = block_assemble([[1, 0], [1, 1]])
    assert m.to_lists() == [[1, 0], [1, 1]]


def test_block_assemble_identity_blocks():
    m = block_assemble([[identity(2), zeros(2, 3)], [zeros(3, 2), identity(3)]])
    assert m == identity(5)


def test_block_assemble_ragged():
    with pytest.raises(RaggedLayout):
        block_assemble([[identity(2), zeros(3, 1)]])


def test_block_roundtrip():
    rng = random.Random(9)
    for _ in range(30):
        a = random_matrix(rng, 2, 3)
        b = random_matrix(rng, 2, 4)
        c = random_matrix(rng, 5, 3)
        d = random_matrix(rng, 5, 4)
        m = block_assemble([[a, b], [c, d]])
        assert m.nrows == 7 and m.ncols == 7
        for i in range(7):
            for j in range(7):
                src = (
                    a if i < 2 and j < 3 else
                    b if i < 2 else
                    c if j < 3 else d
                )
                ii = i if i < 2 else i - 2
                jj = j if j < 3 else j - 3
                assert m.entry(i, j) == src.entry(ii, jj)


def test_vector_ops():
    u = BitVector.from_bits([1, 0, 1])
    v = BitVector.from_bits([1, 1, 0])
    assert (u + v).entries() == [0, 1, 1]
    assert u.dot(v) == 1
    assert u.concat(v).entries() == [1, 0, 1, 1, 1, 0]
    assert u.concat(v).slice(3, 6) == v
    assert diag(u).to_lists() == [[1, 0, 0], [0, 0, 0], [0, 0, 1]]
    assert outer_product(u, v).to_lists() == [[1, 1, 0], [0, 0, 0], [1, 1, 0]]
    assert col_vec(u).to_lists() == [[1], [0], [1]]


def test_multiply_and_sums():
    rng = random.Random(17)
    for _ in range(25):
        a = random_matrix(rng, 4, 6)
        b = random_matrix(rng, 6, 5)
        ab = multiply(a, b)
        for i in range(4):
            for j in range(5):
                want = sum(a.entry(i, k) * b.entry(k, j) for k in range(6)) % 2
                assert ab.entry(i, j) == want
        assert gf2.row_sum(a) == a.vec_mul(gf2.ones_vec(4))
        assert gf2.col_sum(a) == a.mul_vec(gf2.ones_vec(6))


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 2**36 - 1))
def test_empty_shapes_are_legal(r, c, seed):
    rng = random.Random(seed)
    m = BitMatrix(r, c, tuple(rng.randrange(1 << c) if c else 0 for _ in range(r)))
    assert rank(m) <= min(r, c)
    assert rank(m) + len(kernel_basis(m)) == c
