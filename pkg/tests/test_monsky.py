import pytest

from theta_selmer import gf2, monsky
from theta_selmer.arith import factor_squarefree, is_squarefree, legendre_additive
from theta_selmer.gf2 import BitVector
from theta_selmer.monsky import (
    THETA_2PI3,
    THETA_PI3,
    UnsupportedPrime,
    build_blocks,
    build_monsky,
    decode_vector,
    encode_pair,
    predicted_parity,
    selmer_basis,
    selmer_rank,
    select_template,
    torsion_vectors,
)


def test_select_template_examples():
    assert select_template(factor_squarefree(41)) == "A1"
    assert select_template(factor_squarefree(5)) == "A2"
    assert select_template(factor_squarefree(-10)) == "B2"


def test_select_template_all_classes():
    cases = {
        7: "A3", 2: "B1", 33: "C1", 21: "C2", 15: "C3", 6: "D1",
        -11: "A4", -7: "A5", -5: "A6", -2: "B2", -51: "C4", -15: "C5",
        -33: "C6", -6: "D2",
    }
    for n, want in cases.items():
        assert select_template(factor_squarefree(n)) == want, n


def test_build_blocks_empty():
    blocks = build_blocks(factor_squarefree(1))
    assert blocks.a_matrix.nrows == 0
    assert all(v.n == 0 for v in blocks.r.values())


def test_build_blocks_65():
    blocks = build_blocks(factor_squarefree(65))
    a = blocks.a_matrix
    assert a.entry(0, 1) == legendre_additive(13, 5) == 1
    assert a.entry(1, 0) == legendre_additive(5, 13)
    assert a.entry(0, 0) == a.entry(0, 1)
    assert a.entry(1, 1) == a.entry(1, 0)


def test_block_identities_range():
    # A + A^T = D_{-1} + r_{-1}^T r_{-1}, c(A) = 0, r(A) = (1+[-1/nt]) r_{-1}
    for m in range(1, 500):
        if not is_squarefree(m):
            continue
        sf = factor_squarefree(m)
        if sf.t == 0:
            continue
        blocks = build_blocks(sf)
        a = blocks.a_matrix
        r1 = blocks.r_vec(-1)
        lhs = a + gf2.transpose(a)
        rhs = gf2.diag(r1) + gf2.outer_product(r1, r1)
        assert lhs == rhs, m
        assert gf2.col_sum(a).is_zero(), m  # A e = 0: column sums vanish
        eps = sum(legendre_additive(-1, p) for p in sf.odd_primes) % 2
        want = BitVector(sf.t, 0) if eps else r1
        assert gf2.row_sum(a) == want, m


def test_monsky_n1_corner():
    mm = build_monsky(1)
    assert mm.template == "A1"
    assert (mm.matrix.nrows, mm.matrix.ncols) == (6, 6)
    assert mm.matrix.to_lists() == [
        [1, 0, 0, 1, 0, 0],
        [0, 1, 0, 1, 0, 1],
        [0, 0, 0, 0, 1, 0],
        [1, 1, 1, 0, 0, 1],
        [1, 1, 0, 0, 0, 1],
        [0, 0, 1, 0, 0, 0],
    ]


def test_monsky_n5_hand_transcription():
    # A2 at t=1 with [-3/5]=1, [-1/5]=0, [2/5]=1, [3/5]=1
    mm = build_monsky(5)
    assert mm.template == "A2"
    assert (mm.matrix.nrows, mm.matrix.ncols) == (8, 8)
    assert mm.matrix.to_lists() == [
        [1, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 1, 0, 0],
        [1, 1, 0, 0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 1, 1, 0],
        [0, 1, 1, 0, 0, 0, 0, 0],
    ]


def test_monsky_n2_b_template_shape():
    # B templates have 5 scalar rows + 2t; at t=0 that is 5 x 6
    mm = build_monsky(2)
    assert mm.template == "B1"
    assert (mm.matrix.nrows, mm.matrix.ncols) == (5, 6)


def test_selmer_rank_examples():
    assert selmer_rank(1) == 2
    assert selmer_rank(5) == 2
    assert selmer_rank(6) % 2 == 1


def test_selmer_basis_n5():
    basis = selmer_basis(5)
    got = {(c.b1, c.b2) for c in basis}
    span = set()
    for i in range(1 << len(basis)):
        b1, b2 = 1, 1
        for j, c in enumerate(basis):
            if (i >> j) & 1:
                b1 = monsky.squarefree_part(b1 * c.b1)
                b2 = monsky.squarefree_part(b2 * c.b2)
        span.add((b1, b2))
    assert span == {(1, 1), (-3, -5), (5, 1), (-15, -5)}


def test_selmer_basis_n1_contains_torsion():
    span = set()
    basis = selmer_basis(1)
    for i in range(1 << len(basis)):
        b1, b2 = 1, 1
        for j, c in enumerate(basis):
            if (i >> j) & 1:
                b1 = monsky.squarefree_part(b1 * c.b1)
                b2 = monsky.squarefree_part(b2 * c.b2)
        span.add((b1, b2))
    assert (-3, -1) in span


def test_encode_decode_roundtrip_exhaustive():
    for n in (5, 35, -65):
        sf = factor_squarefree(n)
        dim = 2 * sf.t + 6
        for bits in range(1 << dim):
            v = BitVector(dim, bits)
            assert encode_pair(*_pair(decode_vector(v, sf)), sf) == v


def _pair(cls):
    return cls.b1, cls.b2


def test_encode_examples():
    sf = factor_squarefree(5)
    assert encode_pair(1, 1, sf).is_zero()
    v = encode_pair(-3, -5, sf)
    # (xi1 xi2 xi3 g1 g2 g3 y1 x1) = (1,0,0,1,0,1,1,0)
    assert v.entries() == [1, 0, 0, 1, 0, 1, 1, 0]
    with pytest.raises(UnsupportedPrime):
        encode_pair(7, 1, sf)


def test_torsion_in_kernel_sample():
    for m in range(1, 400):
        if not is_squarefree(m):
            continue
        for n in (m, -m):
            sf = factor_squarefree(n)
            mm = build_monsky(sf)
            for v in torsion_vectors(sf):
                assert mm.matrix.mul_vec(v).is_zero(), n


def test_predicted_parity_examples():
    assert predicted_parity(19, THETA_PI3) == "even"
    assert predicted_parity(11, THETA_2PI3) == "even"
    assert predicted_parity(21, THETA_PI3) == "odd"


def test_parity_against_rank_small():
    for m in range(1, 300):
        if not is_squarefree(m):
            continue
        for theta in (THETA_PI3, THETA_2PI3):
            s2 = selmer_rank(monsky.curve_argument(m, theta))
            want = predicted_parity(m, theta)
            assert ("even" if s2 % 2 == 0 else "odd") == want, (m, theta)


def test_s2_bounded_by_r4_for_eta1_classes():
    from theta_selmer import classgroup

    for m in range(7, 2000, 12):
        if m % 24 not in (7, 19) or not is_squarefree(m):
            continue
        sf = factor_squarefree(m)
        if sf.eta != 1:
            continue
        assert selmer_rank(sf) <= 2 + 2 * classgroup.r4(-m), m
