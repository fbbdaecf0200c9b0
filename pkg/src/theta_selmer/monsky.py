"""Monsky matrices for the tiling-number curves y^2 = x(x+3n)(x-n).

The matrix M_n acts on vectors

    v = (xi1, xi2, xi3, gamma1, gamma2, gamma3, y_1..y_t, x_1..x_t)

encoding pairs (b1, b2) with b1 = (-1)^gamma1 2^gamma2 3^gamma3 prod p_i^{x_i}
and b2 = (-1)^xi1 2^xi2 3^xi3 prod p_i^{y_i}; ker M_n is in bijection with
the 2-Selmer group, and s2 = 2t + 6 - rank(M_n).

There is one matrix template per (eta, residue class of ntilde); the
sixteen scalar blocks below are declarative tables, one entry string per
matrix row, so each transcription can be audited cell by cell.  Symbol
tokens: m1 = [-1/ntilde], q2 = [2/ntilde], m3 = [-3/ntilde].
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gf2
from .arith import (
    SquarefreeInteger,
    factor_squarefree,
    factorize,
    legendre_additive,
)
from .gf2 import BitMatrix, BitVector

THETA_PI3 = "pi3"
THETA_2PI3 = "2pi3"


class UnsupportedPrime(Exception):
    pass


# scalar rows: six entry tokens, then the y-block and x-block vector tokens.
# Vector tokens name r_d rows: "r-1", "r2", "r-3", or "0".
_TEMPLATE_SCALAR_ROWS = {
    "A1": [
        ("1 0 0 1 0 0", "0", "0"),
        ("0 1 0 1 0 1", "0", "r-1"),
        ("0 0 0 0 1 0", "0", "0"),
        ("1 1 1 0 0 1", "r-1", "r2"),
        ("1 1 0 0 0 1+m3", "r-3", "0"),
        ("0 0 1 0 0 0", "0", "0"),
    ],
    "A2": [
        ("1 0 0 1 0 0", "0", "0"),
        ("0 0 0 0 1 0", "0", "0"),
        ("0 1 0 0 0 0", "0", "0"),
        ("0 0 0 1 0 1", "0", "r-1"),
        ("1 1 0 0 0 1+m3", "r-3", "0"),
        ("0 0 1 0 0 0", "0", "0"),
    ],
    "A3": [
        ("1 0 0 1 0 0", "0", "0"),
        ("0 1 0 0 0 0", "0", "0"),
        ("0 0 0 0 1 0", "0", "0"),
        ("1 0 1 0 0 0", "r-1", "0"),
        ("1 1 0 0 0 1+m3", "r-3", "0"),
        ("0 0 1 0 0 0", "0", "0"),
    ],
    "B1": [
        ("1 0 0 1 0 0", "0", "0"),
        ("0 0 0 1 m1 1", "0", "r-1"),
        ("0 1 0 0 q2 1", "0", "r2"),
        ("1 1 0 0 0 m3", "r-3", "0"),
        ("0 0 1 0 0 0", "0", "0"),
    ],
    "C1": [
        ("1 0 0 1 0 0", "0", "0"),
        ("0 1 0 1 0 1", "0", "r-1"),
        ("0 0 0 0 1 0", "0", "0"),
        ("1 1 1 0 0 1", "r-1", "r2"),
        ("1 1 1+m3 0 0 0", "r-3", "0"),
        ("0 0 1+m3 1 1 m3", "0", "r-3"),
    ],
    "C2": [
        ("1 0 0 1 0 0", "0", "0"),
        ("0 0 0 0 1 0", "0", "0"),
        ("0 1 0 0 0 0", "0", "0"),
        ("0 0 0 1 0 1", "0", "r-1"),
        ("1 1 1+m3 0 0 0", "r-3", "0"),
        ("0 0 1+m3 1 1 m3", "0", "r-3"),
    ],
    "C3": [
        ("1 0 0 1 0 0", "0", "0"),
        ("0 1 0 0 0 0", "0", "0"),
        ("0 0 0 0 1 0", "0", "0"),
        ("1 0 1 0 0 0", "r-1", "0"),
        ("1 1 1+m3 0 0 0", "r-3", "0"),
        ("0 0 1+m3 1 1 m3", "0", "r-3"),
    ],
    "D1": [
        ("1 0 0 1 0 0", "0", "0"),
        ("0 0 0 1 1+m1 1", "0", "r-1"),
        ("0 1 0 0 1+q2 1", "0", "r2"),
        ("1 1 m3 0 0 0", "r-3", "0"),
        ("0 0 m3 1 1 1+m3", "0", "r-3"),
    ],
    "A4": [
        ("1 0 0 0 0 0", "0", "0"),
        ("0 0 0 0 1 0", "0", "0"),
        ("0 1 0 0 0 0", "0", "0"),
        ("0 0 0 1 0 1", "0", "r-1"),
        ("1 1 0 0 0 m3", "r-3", "0"),
        ("0 0 1 0 0 0", "0", "0"),
    ],
    "A5": [
        ("1 0 0 0 0 0", "0", "0"),
        ("0 1 0 1 0 1", "0", "r-1"),
        ("0 0 0 0 1 0", "0", "0"),
        ("1 1 1 0 0 1", "r-1", "r2"),
        ("1 1 0 0 0 m3", "r-3", "0"),
        ("0 0 1 0 0 0", "0", "0"),
    ],
    "A6": [
        ("1 0 0 0 0 0", "0", "0"),
        ("0 1 0 0 0 0", "0", "0"),
        ("0 0 0 0 1 0", "0", "0"),
        ("1 0 1 0 0 0", "r-1", "0"),
        ("1 1 0 0 0 m3", "r-3", "0"),
        ("0 0 1 0 0 0", "0", "0"),
    ],
    "B2": [
        ("1 0 0 0 0 0", "0", "0"),
        ("0 0 0 1 1+m1 1", "0", "r-1"),
        ("0 1 0 0 q2 1", "0", "r2"),
        ("1 1 0 0 0 1+m3", "r-3", "0"),
        ("0 0 1 0 0 0", "0", "0"),
    ],
    "C4": [
        ("1 0 0 0 0 0", "0", "0"),
        ("0 0 0 0 1 0", "0", "0"),
        ("0 1 0 0 0 0", "0", "0"),
        ("0 0 0 1 0 1", "0", "r-1"),
        ("1 1 m3 0 0 0", "r-3", "0"),
        ("0 0 m3 1 1 1+m3", "0", "r-3"),
    ],
    "C5": [
        ("1 0 0 0 0 0", "0", "0"),
        ("0 1 0 1 0 1", "0", "r-1"),
        ("0 0 0 0 1 0", "0", "0"),
        ("1 1 1 0 0 1", "r-1", "r2"),
        ("1 1 m3 0 0 0", "r-3", "0"),
        ("0 0 m3 1 1 1+m3", "0", "r-3"),
    ],
    "C6": [
        ("1 0 0 0 0 0", "0", "0"),
        ("0 1 0 0 0 0", "0", "0"),
        ("0 0 0 0 1 0", "0", "0"),
        ("1 0 1 0 0 0", "r-1", "0"),
        ("1 1 m3 0 0 0", "r-3", "0"),
        ("0 0 m3 1 1 1+m3", "0", "r-3"),
    ],
    "D2": [
        ("1 0 0 0 0 0", "0", "0"),
        ("0 0 0 1 m1 1", "0", "r-1"),
        ("0 1 0 0 1+q2 1", "0", "r2"),
        ("1 1 1+m3 0 0 0", "r-3", "0"),
        ("0 0 1+m3 1 1 m3", "0", "r-3"),
    ],
}

# both block rows are uniform across templates once eta is known:
#   x-equations: [ O O O | r-1^T r2^T r3^T | D_{-3} | A + D_eta  ]
#   y-equations: [ r-1^T r2^T r3^T | O O O | A + D_{-eta} | O    ]
# (D_1 = diag of [1/p_i] is zero, so eta = +-1 degenerates correctly).

TEMPLATES = tuple(_TEMPLATE_SCALAR_ROWS)


def select_template(n: SquarefreeInteger) -> str:
    """Template id from eta and the residue class of ntilde."""
    eta, nt = n.eta, n.ntilde
    if eta == 1:
        if nt % 8 == 1:
            return "A1"
        if nt % 8 == 5:
            return "A2"
        return "A3"
    if eta == 2:
        return "B1"
    if eta == 3:
        if nt % 8 == 3:
            return "C1"
        if nt % 8 == 7:
            return "C2"
        return "C3"
    if eta == 6:
        return "D1"
    if eta == -1:
        if nt % 8 == 3:
            return "A4"
        if nt % 8 == 7:
            return "A5"
        return "A6"
    if eta == -2:
        return "B2"
    if eta == -3:
        if nt % 8 == 1:
            return "C4"
        if nt % 8 == 5:
            return "C5"
        return "C6"
    return "D2"


# ---------------------------------------------------------------------------
# blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Blocks:
    """The t x t Redei-type block A and the symbol vectors r_d it needs."""

    n: SquarefreeInteger
    a_matrix: BitMatrix
    r: dict  # d -> BitVector of [d/p_i]

    def r_vec(self, d: int) -> BitVector:
        return self.r[d]

    def d_diag(self, d: int) -> BitMatrix:
        return gf2.diag(self.r[d])


def symbol_vector(n: SquarefreeInteger, d: int) -> BitVector:
    """r_d = ([d/p_1], ..., [d/p_t])."""
    return BitVector.from_bits(legendre_additive(d, p) for p in n.odd_primes)


def build_blocks(n: SquarefreeInteger) -> Blocks:
    """A with a_ij = [p_j/p_i] off-diagonal and row sums zero, plus the r_d."""
    ps = n.odd_primes
    t = len(ps)
    rows = []
    for i, p in enumerate(ps):
        bits = 0
        for j, q in enumerate(ps):
            if i != j and legendre_additive(q, p):
                bits |= 1 << j
        if bits.bit_count() & 1:
            bits |= 1 << i  # a_ii = sum of the off-diagonal row entries
        rows.append(bits)
    a = BitMatrix(t, t, tuple(rows))
    r = {d: symbol_vector(n, d) for d in (1, -1, 2, -2, 3, -3, 6, -6)}
    return Blocks(n, a, r)


def ntilde_symbol(n: SquarefreeInteger, d: int) -> int:
    """[d/ntilde] = sum of [d/p_i]; zero for ntilde = 1 by convention."""
    return sum(legendre_additive(d, p) for p in n.odd_primes) % 2


# ---------------------------------------------------------------------------
# full matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonskyMatrix:
    n: SquarefreeInteger
    template: str
    matrix: BitMatrix

    @property
    def t(self) -> int:
        return self.n.t

    def column_labels(self) -> list[str]:
        t = self.t
        return (
            ["xi1", "xi2", "xi3", "gamma1", "gamma2", "gamma3"]
            + [f"y{i+1}" for i in range(t)]
            + [f"x{i+1}" for i in range(t)]
        )


def _scalar_entry(token: str, syms: dict) -> int:
    val = 0
    for part in token.split("+"):
        val ^= syms[part] if part in syms else int(part)
    return val


def build_monsky(n: SquarefreeInteger | int) -> MonskyMatrix:
    """The full Monsky matrix of E_n, rows normalised to the printed order."""
    if isinstance(n, int):
        n = factor_squarefree(n)
    template = select_template(n)
    blocks = build_blocks(n)
    t = n.t
    syms = {
        "m1": ntilde_symbol(n, -1),
        "q2": ntilde_symbol(n, 2),
        "m3": ntilde_symbol(n, -3),
    }
    vecs = {
        "0": gf2.zeros_vec(t),
        "r-1": blocks.r_vec(-1),
        "r2": blocks.r_vec(2),
        "r-3": blocks.r_vec(-3),
    }
    rows = []
    for entry_str, y_tok, x_tok in _TEMPLATE_SCALAR_ROWS[template]:
        scalars = [_scalar_entry(tok, syms) for tok in entry_str.split()]
        bits = sum(b << j for j, b in enumerate(scalars))
        bits |= vecs[y_tok].bits << 6
        bits |= vecs[x_tok].bits << (6 + t)
        rows.append(bits)
    scalar_block = BitMatrix(len(rows), 2 * t + 6, tuple(rows))
    if t == 0:
        return MonskyMatrix(n, template, scalar_block)
    eta = n.eta
    zt = gf2.zeros(t, t)
    z1 = gf2.zeros(t, 1)
    a = blocks.a_matrix
    # D_1 = diag([1/p_i]) is zero, so these cover eta = +-1 as printed
    x_block_row = [
        z1, z1, z1,
        gf2.col_vec(blocks.r_vec(-1)),
        gf2.col_vec(blocks.r_vec(2)),
        gf2.col_vec(blocks.r_vec(3)),
        blocks.d_diag(-3),
        a + blocks.d_diag(eta),
    ]
    y_block_row = [
        gf2.col_vec(blocks.r_vec(-1)),
        gf2.col_vec(blocks.r_vec(2)),
        gf2.col_vec(blocks.r_vec(3)),
        z1, z1, z1,
        a + blocks.d_diag(-eta),
        zt,
    ]
    lower = gf2.block_assemble([x_block_row, y_block_row])
    full = BitMatrix(
        scalar_block.nrows + lower.nrows, 2 * t + 6, scalar_block.rows + lower.rows
    )
    return MonskyMatrix(n, template, full)


# ---------------------------------------------------------------------------
# (b1, b2) <-> vector encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoCoverClass:
    """A pair (b1, b2) of squarefree integers supported on {-1,2,3} u p_i."""

    b1: int
    b2: int

    def mul(self, other: "TwoCoverClass") -> "TwoCoverClass":
        return TwoCoverClass(
            squarefree_part(self.b1 * other.b1), squarefree_part(self.b2 * other.b2)
        )


def squarefree_part(m: int) -> int:
    out = -1 if m < 0 else 1
    for p, e in factorize(abs(m)):
        if e % 2:
            out *= p
    return out


def _encode_component(b: int, n: SquarefreeInteger) -> tuple[int, int, int, BitVector]:
    sign = 1 if b < 0 else 0
    m = abs(b)
    two = 0
    if m % 2 == 0:
        m //= 2
        two = 1
    three = 0
    if m % 3 == 0:
        m //= 3
        three = 1
    bits = 0
    for i, p in enumerate(n.odd_primes):
        if m % p == 0:
            m //= p
            bits |= 1 << i
    if m != 1:
        raise UnsupportedPrime(f"{b} has support outside -1,2,3,{n.odd_primes}")
    return sign, two, three, BitVector(n.t, bits)


def encode_pair(b1: int, b2: int, n: SquarefreeInteger) -> BitVector:
    """(b1, b2) -> (xi | gamma | y | x) in F2^{2t+6}."""
    g1, g2, g3, x = _encode_component(b1, n)
    s1, s2, s3, y = _encode_component(b2, n)
    head = BitVector.from_bits([s1, s2, s3, g1, g2, g3])
    return head.concat(y).concat(x)


def decode_vector(v: BitVector, n: SquarefreeInteger) -> TwoCoverClass:
    t = n.t
    if v.n != 2 * t + 6:
        raise gf2.DimensionMismatch
    s1, s2, s3, g1, g2, g3 = (v[i] for i in range(6))
    y = v.slice(6, 6 + t)
    x = v.slice(6 + t, 6 + 2 * t)
    b1 = (-1) ** g1 * 2**g2 * 3**g3
    b2 = (-1) ** s1 * 2**s2 * 3**s3
    for i, p in enumerate(n.odd_primes):
        if x[i]:
            b1 *= p
        if y[i]:
            b2 *= p
    return TwoCoverClass(b1, b2)


def torsion_classes(n: SquarefreeInteger) -> list[TwoCoverClass]:
    """Images of O, (0,0), (n,0), (-3n,0) under the descent map."""
    nv = n.value
    return [
        TwoCoverClass(1, 1),
        TwoCoverClass(-3, squarefree_part(-nv)),
        TwoCoverClass(squarefree_part(nv), 1),
        TwoCoverClass(squarefree_part(-3 * nv), squarefree_part(-nv)),
    ]


def torsion_vectors(n: SquarefreeInteger) -> list[BitVector]:
    return [encode_pair(c.b1, c.b2, n) for c in torsion_classes(n)]


# ---------------------------------------------------------------------------
# Selmer rank, kernel, parity
# ---------------------------------------------------------------------------


def selmer_rank(n: SquarefreeInteger | int | MonskyMatrix) -> int:
    """s2(E_n) = 2t + 6 - rank(M_n)."""
    m = n if isinstance(n, MonskyMatrix) else build_monsky(n)
    return 2 * m.t + 6 - gf2.rank(m.matrix)


def selmer_basis(n: SquarefreeInteger | int) -> list[TwoCoverClass]:
    """Kernel basis of M_n decoded to (b1, b2) pairs."""
    m = build_monsky(n)
    return [decode_vector(v, m.n) for v in gf2.kernel_basis(m.matrix)]


_EVEN_PI3 = {1, 2, 3, 5, 7, 9, 14, 15, 19}
_EVEN_2PI3 = {1, 2, 3, 6, 7, 11, 13, 14, 18}


def predicted_parity(m: int, theta: str) -> str:
    """Parity of s2(E_{m,theta}) from the residue of m mod 24."""
    if m <= 0:
        raise ValueError("parity table takes the positive tiling number")
    table = _EVEN_PI3 if theta == THETA_PI3 else _EVEN_2PI3
    return "even" if m % 24 in table else "odd"


def curve_argument(m: int, theta: str) -> int:
    """E_{m,pi/3} = E_m and E_{m,2pi/3} = E_{-m}; map (m, theta) to signed n."""
    if theta == THETA_PI3:
        return m
    if theta == THETA_2PI3:
        return -m
    raise ValueError(f"unknown theta {theta!r}")
