"""Brute-force 2-descent oracle for E_n: y^2 = x(x-n)(x+3n).

A candidate class Lambda = (b1, b2) gives the genus-one curve in P^3

    H1:  b2 u2^2 - b1 b2 u3^2 = (e2 - e1) t^2
    H2:  b1 u1^2 - b1 b2 u3^2 = e2 t^2          (e1 = n, e2 = -3n)
    H3:  b1 u1^2 - b2 u2^2   = e1 t^2

and Lambda lies in Sel_2(E_n) iff the curve has points over R and every
Q_p.  Only H1 and H2 are independent; both involve (t, u3) and a single
extra square, so a point over Q_p exists iff some (t : u3) in P^1(Q_p)
makes the two binary forms

    F1 = b2 (e2 - e1) t^2 + b1 b2^2 u3^2     (= (b2 u2)^2 on the curve)
    F2 = b1 e2 t^2       + b1^2 b2 u3^2      (= (b1 u1)^2 on the curve)

simultaneously squares (or zero) in Q_p.  That one-dimensional search is
decided rigorously: a residue class either determines the square classes
of both forms, or it is refined, and classes clinging to a p-adic root
of a form are settled by computing the root itself.  Any residual
ambiguity raises Undecided loudly instead of guessing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import (
    OO,
    SquarefreeInteger,
    factor_squarefree,
    split_valuation,
    sqrt_mod_prime_power,
)
from .gf2 import BitVector
from .monsky import TwoCoverClass, decode_vector, encode_pair, torsion_classes


class TooLarge(Exception):
    pass


class Undecided(Exception):
    def __init__(self, place, depth):
        self.place = place
        self.depth = depth
        super().__init__(f"local solvability undecided at place {place} (depth {depth})")


class UnsupportedPrime(Exception):
    pass


# ---------------------------------------------------------------------------
# curve data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadricIntersection:
    n: SquarefreeInteger
    lam: TwoCoverClass
    # quadric coefficients (coef_t, coef_a, coef_b) for  coef_t t^2 + ... = 0
    h1: tuple[int, int, int]  # variables (t, u2, u3)
    h2: tuple[int, int, int]  # variables (t, u1, u3)
    h3: tuple[int, int, int]  # variables (t, u1, u2)
    # binary test forms in (t, u3)
    f1: tuple[int, int]
    f2: tuple[int, int]


def _clear_content(coeffs: tuple[int, int, int]) -> tuple[int, int, int]:
    import math

    g = math.gcd(math.gcd(abs(coeffs[0]), abs(coeffs[1])), abs(coeffs[2]))
    return tuple(c // g for c in coeffs)  # type: ignore[return-value]


def curve_for(n: SquarefreeInteger | int, lam: TwoCoverClass) -> QuadricIntersection:
    """Integral model of C_Lambda with content 1 in each quadric."""
    if isinstance(n, int):
        n = factor_squarefree(n)
    encode_pair(lam.b1, lam.b2, n)  # raises UnsupportedPrime on bad support
    e1 = n.value
    e2 = -3 * n.value
    b1, b2 = lam.b1, lam.b2
    h1 = _clear_content((-(e2 - e1), b2, -b1 * b2))
    h2 = _clear_content((-e2, b1, -b1 * b2))
    h3 = _clear_content((-e1, b1, -b2))
    f1 = (b2 * (e2 - e1), b1 * b2 * b2)
    f2 = (b1 * e2, b1 * b1 * b2)
    return QuadricIntersection(n, lam, h1, h2, h3, f1, f2)


def place_set(n: SquarefreeInteger) -> list:
    """All places where solvability is not automatic: oo, 2, 3 and p | n."""
    return [OO, 2, 3, *n.odd_primes]


# ---------------------------------------------------------------------------
# exact square classes in Q_p
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _qr_table(p: int) -> bytes:
    tab = bytearray(p)
    for x in range(1, p):
        tab[x * x % p] = 1
    return bytes(tab)


def is_square_in_qp(x: int, place) -> bool:
    """Exact square test for a nonzero integer in R or Q_p (0 counts)."""
    if x == 0:
        return True
    if place == OO:
        return x > 0
    p = place
    v, u = split_valuation(x, p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return _qr_table(p)[u % p] == 1


# ---------------------------------------------------------------------------
# the one-variable chart search
# ---------------------------------------------------------------------------

_SQUARE, _NONSQUARE, _ZERO, _UNKNOWN = range(4)


def _status(c: int, d: int, tau0: int, k: int, p: int, margin: int) -> int:
    """Square class of c*tau^2 + d on the residue class tau0 + p^k Z_p,
    by the generic value bound alone (cheap fast path)."""
    w = c * tau0 * tau0 + d
    if w == 0:
        return _ZERO
    v, u = split_valuation(w, p)
    vc = split_valuation(c, p)[0]
    if tau0 == 0:
        bound = 2 * k + vc
    else:
        bound = min(k + split_valuation(2 * c * tau0, p)[0], 2 * k + vc)
    if v + margin > bound:
        return _UNKNOWN
    if v % 2:
        return _NONSQUARE
    if p == 2:
        return _SQUARE if u % 8 == 1 else _NONSQUARE
    return _SQUARE if _qr_table(p)[u % p] else _NONSQUARE


def _zp_roots(c: int, d: int, p: int, prec: int) -> list[int]:
    """Roots of c tau^2 + d in Z_p, as residues mod p^prec."""
    vd, ud = split_valuation(d, p)
    vc, uc = split_valuation(c, p)
    w = vd - vc
    if w < 0 or w % 2:
        return []
    pk = p**prec
    u = (-ud * pow(uc, -1, pk)) % pk
    if p == 2:
        if u % 8 != 1:
            return []
    elif not _qr_table(p)[u % p]:
        return []
    root = sqrt_mod_prime_power(u, p, prec)
    rho = (root * p ** (w // 2)) % pk
    return [rho, (-rho) % pk]


class _FormRoots:
    """Z_p roots of one binary form f = c tau^2 + d, qualified against the
    other form: for each root rho we record whether the other form is a
    square (or zero) at rho, and from which depth onward that verdict is
    stable on the ball rho + p^k Z_p."""

    def __init__(self, cs, ds, co, do, p, prec, place):
        self.p = p
        self.prec = prec
        self.cs = cs
        self.items: list[tuple[int, bool, int]] = []  # (rho, good, stable_at)
        pk = p**prec
        for rho in _zp_roots(cs, ds, p, prec):
            val = (co * rho * rho + do) % pk
            if val == 0:
                if cs * do == co * ds:  # proportional forms: common root
                    self.items.append((rho, True, 0))
                    continue
                raise Undecided(place, prec)
            v, u = split_valuation(val, p)
            margin = 3 if p == 2 else 1
            if v + margin > prec:
                raise Undecided(place, prec)
            if v % 2:
                good = False
            elif p == 2:
                good = u % 8 == 1
            else:
                good = bool(_qr_table(p)[u % p])
            self.items.append((rho, good, v + margin))

    def status_on(self, tau0: int, k: int, margin: int):
        """(kind, payload): ('root', (rho, good, stable_at)) if a root lies
        in the ball, ('class', SQUARE/NONSQUARE) if the factorised value
        class is constant there, or ('unknown', None)."""
        p = self.p
        pk = p**k
        for rho, good, stable in self.items:
            if (rho - tau0) % pk == 0:
                return "root", (rho, good, stable)
        if not self.items:
            return "unknown", None
        rho = self.items[0][0]
        e1, u1 = split_valuation(tau0 - rho, p)
        e2, u2 = split_valuation(tau0 + rho, p)
        if k - e1 < margin or k - e2 < margin or max(e1, e2) + margin > self.prec:
            return "unknown", None
        vcs, ucs = split_valuation(self.cs, p)
        v = vcs + e1 + e2
        if v % 2:
            return "class", _NONSQUARE
        uu = ucs * u1 * u2
        if p == 2:
            return "class", _SQUARE if uu % 8 == 1 else _NONSQUARE
        return "class", _SQUARE if _qr_table(p)[uu % p] else _NONSQUARE


def _chart_point(c1, d1, c2, d2, p: int, seed_k: int, place) -> int | None:
    """A tau with both forms square-or-zero in Z_p (tau in p^seed_k Z_p),
    or None.  Deterministic depth-first refinement; residue classes that
    the generic value bound cannot settle are decided through the p-adic
    roots of the forms."""
    margin = 3 if p == 2 else 1
    prec = split_valuation(4 * c1 * d1 * c2 * d2, p)[0] + 8 * margin + 40
    max_depth = prec - margin - 6
    roots1 = roots2 = None
    stack = [(0, seed_k)]
    while stack:
        tau0, k = stack.pop()
        s1 = _status(c1, d1, tau0, k, p, margin)
        if s1 == _NONSQUARE:
            continue
        s2 = _status(c2, d2, tau0, k, p, margin)
        if s2 == _NONSQUARE:
            continue
        if _ZERO in (s1, s2):
            w1 = c1 * tau0 * tau0 + d1
            w2 = c2 * tau0 * tau0 + d2
            if is_square_in_qp(w1, p) and is_square_in_qp(w2, p):
                return tau0
        if s1 == _SQUARE and s2 == _SQUARE:
            return tau0
        # at least one form is unresolved on this ball: consult its roots
        if roots1 is None:
            roots1 = _FormRoots(c1, d1, c2, d2, p, prec, place)
            roots2 = _FormRoots(c2, d2, c1, d1, p, prec, place)
        refine = False
        resolved = []
        for s, rts in ((s1, roots1), (s2, roots2)):
            if s == _SQUARE:
                resolved.append(True)
                continue
            kind, payload = rts.status_on(tau0, k, margin)
            if kind == "class":
                if payload == _NONSQUARE:
                    resolved = None
                    break
                resolved.append(True)
            elif kind == "root":
                rho, good, stable = payload
                if k >= stable:
                    if good:
                        return rho
                    resolved = None  # Nonsquare in a whole neighbourhood
                    break
                refine = True
                resolved.append(False)
            else:
                refine = True
                resolved.append(False)
        if resolved is None:
            continue
        if all(resolved):
            return tau0
        assert refine
        if k >= max_depth:
            raise Undecided(place, k)
        step = p**k
        for j in range(p - 1, -1, -1):
            stack.append((tau0 + j * step, k + 1))
    return None


def _finite_witness(curve: QuadricIntersection, p: int):
    """(tau_t, tau_u3) integer pair with both F_i square-or-zero, or None."""
    c1, d1 = curve.f1
    c2, d2 = curve.f2
    tau = _chart_point(c1, d1, c2, d2, p, 0, p)
    if tau is not None:
        return (tau, 1)
    sigma = _chart_point(d1, c1, d2, c2, p, 1, p)
    if sigma is not None:
        return (1, sigma)
    return None


# ---------------------------------------------------------------------------
# the real place
# ---------------------------------------------------------------------------


def _half_line(c: int, d: int):
    """{x >= 0 : c x + d >= 0} as (lo, hi) Fractions, hi=None for +oo."""
    if c > 0:
        lo = Fraction(-d, c)
        return (max(Fraction(0), lo), None)
    if c < 0:
        hi = Fraction(-d, c)
        if hi < 0:
            return None
        return (Fraction(0), hi)
    return (Fraction(0), None) if d >= 0 else None


def real_interval(curve: QuadricIntersection):
    """The set {x = (t/u3)^2 : F1 >= 0 and F2 >= 0} as an interval or None.

    x = None endpoint means unbounded; the point u3 = 0 corresponds to
    x = +oo and is allowed exactly when the interval is unbounded.
    """
    i1 = _half_line(*curve.f1)
    i2 = _half_line(*curve.f2)
    if i1 is None or i2 is None:
        return None
    lo = max(i1[0], i2[0])
    his = [h for h in (i1[1], i2[1]) if h is not None]
    hi = min(his) if len(his) == 2 else (his[0] if his else None)
    if hi is not None and lo > hi:
        return None
    return (lo, hi)


# ---------------------------------------------------------------------------
# public oracle operations
# ---------------------------------------------------------------------------


def locally_solvable(curve: QuadricIntersection, place) -> bool:
    """True iff C_Lambda has a point over the completion at the place."""
    if place == OO:
        return real_interval(curve) is not None
    return _finite_witness(curve, place) is not None


def everywhere_locally_solvable(curve: QuadricIntersection) -> bool:
    for place in place_set(curve.n):
        if not locally_solvable(curve, place):
            return False
    return True


def selmer_group_oracle(n: SquarefreeInteger | int, check_closure: bool = True):
    """All of Sel_2(E_n) by enumerating every candidate (b1, b2).

    Returns (members, vectors): the everywhere-locally-solvable classes
    and their encodings.  Enumeration is 2^(2t+6) curves, so t <= 4.
    """
    if isinstance(n, int):
        n = factor_squarefree(n)
    t = n.t
    if t > 4:
        raise TooLarge(f"oracle enumeration needs t <= 4, got t={t}")
    dim = 2 * t + 6
    members: list[TwoCoverClass] = []
    vectors: list[BitVector] = []
    for bits in range(1 << dim):
        v = BitVector(dim, bits)
        lam = decode_vector(v, n)
        if everywhere_locally_solvable(curve_for(n, lam)):
            members.append(lam)
            vectors.append(v)
    if check_closure:
        got = {v.bits for v in vectors}
        for a in got:
            for b in got:
                if a ^ b not in got:
                    raise AssertionError(
                        f"oracle set not closed under the group law at n={n.value}"
                    )
        for tv in torsion_classes(n):
            if encode_pair(tv.b1, tv.b2, n).bits not in got:
                raise AssertionError(f"torsion class {tv} missing at n={n.value}")
    return members, vectors


def oracle_selmer_dimension(n: SquarefreeInteger | int) -> int:
    members, _ = selmer_group_oracle(n)
    size = len(members)
    assert size & (size - 1) == 0
    return size.bit_length() - 1


# ---------------------------------------------------------------------------
# local points (used by the Cassels pairing)
# ---------------------------------------------------------------------------


def padic_sqrt(a: int, p: int, prec: int) -> int:
    """x with x^2 = a mod p^(v(a)+prec), for a an exact square in Z_p."""
    if a == 0:
        return 0
    v, u = split_valuation(a, p)
    if v % 2 or not is_square_in_qp(a, p):
        raise ValueError(f"{a} is not a square in Q_{p}")
    pk = p**prec
    root = sqrt_mod_prime_power(u % pk, p, prec)
    return root * p ** (v // 2)


def find_local_point(
    curve: QuadricIntersection, p: int, prec: int, rng: random.Random | None = None
):
    """A point of C_Lambda(Q_p) scaled by b1 b2 to integer coordinates.

    Returns ((T, U1, U2, U3), valid_prec): the coordinates of an actual
    point, exact mod p^valid_prec with valid_prec >= prec.  Sampling is
    randomised when rng is given, deterministic otherwise.
    """
    c1, d1 = curve.f1
    c2, d2 = curve.f2
    b1, b2 = curve.lam.b1, curve.lam.b2
    bb = b1 * b2
    pk = p**prec
    sgn1 = 1 if rng is None else rng.choice((1, -1))
    sgn2 = 1 if rng is None else rng.choice((1, -1))

    def assemble(tt: int, uu3: int):
        w1 = c1 * tt * tt + d1 * uu3 * uu3
        w2 = c2 * tt * tt + d2 * uu3 * uu3
        if not (is_square_in_qp(w1, p) and is_square_in_qp(w2, p)):
            return None
        u2s = padic_sqrt(w1, p, prec + 4)
        u1s = padic_sqrt(w2, p, prec + 4)
        # b2*u2 = sqrt(F1), b1*u1 = sqrt(F2); scale everything by b1*b2
        return (
            bb * tt % pk,
            b2 * u1s * sgn2 % pk,
            b1 * u2s * sgn1 % pk,
            bb * uu3 % pk,
        )

    candidates: list[tuple[int, int]] = []
    span = max(p * 8, 64)
    if rng is None:
        candidates.extend((tau, 1) for tau in range(span))
        candidates.extend((1, p * sigma) for sigma in range(span // p + 2))
    else:
        for _ in range(500):
            if rng.random() < 0.5:
                candidates.append((rng.randrange(span), 1))
            else:
                candidates.append((1, p * rng.randrange(span // p + 2)))
    for tt, uu3 in candidates:
        pt = assemble(tt, uu3)
        if pt is not None:
            return pt, prec
    # Sampling failed: the good locus clings to a root of one form, where
    # the exact point has u1 or u2 equal to 0.  Recompute the roots to a
    # generous precision and assemble there.
    root_prec = prec + 12
    rpk = p**root_prec
    cases = [
        (c1, d1, c2, d2, False, 1),  # roots of F1 in the t-chart
        (c2, d2, c1, d1, False, 2),  # roots of F2 in the t-chart
        (d1, c1, d2, c2, True, 1),
        (d2, c2, d1, c1, True, 2),
    ]
    for cs, ds, co, do, swapped, _which in cases:
        for rho in _zp_roots(cs, ds, p, root_prec):
            val = (co * rho * rho + do) % rpk
            if not is_square_in_qp(val, p):
                continue
            tt, uu3 = (1, rho) if swapped else (rho, 1)
            w1 = (c1 * tt * tt + d1 * uu3 * uu3) % rpk
            w2 = (c2 * tt * tt + d2 * uu3 * uu3) % rpk
            u2s = padic_sqrt(w1, p, prec + 4) if w1 and is_square_in_qp(w1, p) else 0
            u1s = padic_sqrt(w2, p, prec + 4) if w2 and is_square_in_qp(w2, p) else 0
            pt = (bb * tt % pk, b2 * u1s * sgn2 % pk, b1 * u2s * sgn1 % pk, bb * uu3 % pk)
            return pt, prec
    raise ValueError(f"no {p}-adic point found on {curve.lam}")


def find_real_point(curve: QuadricIntersection, rng: random.Random | None = None):
    """A real point, as exact data (t, u3, R1, R2, s1, s2) with
    b2*u2 = s1*sqrt(R1) and b1*u1 = s2*sqrt(R2) for rationals R_i >= 0."""
    iv = real_interval(curve)
    if iv is None:
        raise ValueError("curve has no real point")
    lo, hi = iv
    if hi is not None and lo == hi:
        raise ValueError("degenerate real locus")  # impossible: forms not proportional
    if hi is None:
        x_target = lo + 1
    else:
        frac = Fraction(1, 2) if rng is None else Fraction(rng.randrange(1, 16), 16)
        x_target = lo + (hi - lo) * frac
    t, u3 = _rational_with_square_between(lo, hi, x_target)
    c1, d1 = curve.f1
    c2, d2 = curve.f2
    r1 = Fraction(c1) * t * t + Fraction(d1) * u3 * u3
    r2 = Fraction(c2) * t * t + Fraction(d2) * u3 * u3
    assert r1 >= 0 and r2 >= 0
    s1 = 1 if rng is None else rng.choice((1, -1))
    s2 = 1 if rng is None else rng.choice((1, -1))
    s3 = 1 if rng is None else rng.choice((1, -1))
    return (s3 * t, u3, r1, r2, s1, s2)


def _rational_with_square_between(lo, hi, x_target: Fraction):
    """(t, u3) rational with lo <= (t/u3)^2 <= hi, near x_target."""
    bits = 16
    while bits <= 4096:
        approx = _isqrt_fraction(x_target, bits)
        x = approx * approx
        if x >= lo and (hi is None or x <= hi):
            return (approx, Fraction(1))
        bits *= 2
    raise ValueError("could not hit the real interval with a rational square")


def _isqrt_fraction(x: Fraction, bits: int) -> Fraction:
    import math

    scale = 1 << bits
    num = x.numerator * scale * scale
    den = x.denominator
    return Fraction(math.isqrt(num // den), scale)
