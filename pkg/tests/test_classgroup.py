import pytest

from theta_selmer import classgroup, gf2
from theta_selmer.arith import factor_squarefree, hilbert_additive, is_squarefree
from theta_selmer.classgroup import (
    PositiveDiscriminant,
    RankMismatch,
    field_data,
    forms_class_group,
    is_fundamental,
    r2,
    r4,
    redei_matrix,
    reduce_form,
    reduced_forms,
    splitting_divisor,
)


def test_field_data():
    fd = field_data(-5)
    assert fd.discriminant == -20
    assert fd.ramified_primes == (2, 5)
    fd = field_data(-7)
    assert fd.discriminant == -7
    assert fd.ramified_primes == (7,)


def test_redei_matrix_minus5():
    m = redei_matrix(-5)
    want = [
        [hilbert_additive(2, -5, 2), hilbert_additive(5, -5, 2)],
        [hilbert_additive(2, -5, 5), hilbert_additive(5, -5, 5)],
    ]
    assert m.to_lists() == want
    assert m.to_lists() == [[1, 0], [1, 0]]


def test_redei_matrix_minus1():
    m = redei_matrix(-1)
    assert (m.nrows, m.ncols) == (1, 1)


def test_r4_examples():
    assert r4(-5) == 0  # Cl(-20) = Z/2
    assert r4(-14) == 1  # Cl(-56) = Z/4
    assert r4(-7) == 0  # class number 1


def test_forms_groups():
    g = forms_class_group(-20)
    assert g.invariant_factors == (2,) and g.r4 == 0
    g = forms_class_group(-56)
    assert g.invariant_factors == (4,) and g.r4 == 1 and g.r8 == 0
    g = forms_class_group(-3)
    assert g.invariant_factors == () and g.order == 1
    assert forms_class_group(-23).invariant_factors == (3,)
    assert forms_class_group(-84).invariant_factors == (2, 2)


def test_forms_group_structure_consistency():
    import math

    for D in range(-3, -800, -1):
        if not is_fundamental(D):
            continue
        g = forms_class_group(D)
        assert math.prod(g.invariant_factors) == g.order
        for a, b in zip(g.invariant_factors, g.invariant_factors[1:]):
            assert b % a == 0
        two_part = sum(1 for f in g.invariant_factors if f % 2 == 0)
        assert two_part == g.r2


def test_forms_positive_disc_rejected():
    with pytest.raises(PositiveDiscriminant):
        reduced_forms(40)


def test_reduce_form_canonical():
    a, b, c = reduce_form(3, 10, 9)
    assert b * b - 4 * a * c == 10 * 10 - 4 * 27
    assert -a < b <= a <= c


def test_redei_vs_forms_oracle():
    for D in range(-3, -4000, -1):
        if not is_fundamental(D):
            continue
        d = D if D % 4 == 1 else D // 4
        g = forms_class_group(D)
        assert r2(d) == g.r2, D
        assert r4(d) == g.r4, D


def test_splitting_divisor():
    # n = 259 = 7*37, r4(-259) = 1
    sf = factor_squarefree(259)
    assert r4(-259) == 1
    d_star, x1 = splitting_divisor(sf)
    assert d_star in (7, 37) and 259 % d_star == 0
    from theta_selmer import monsky

    a = monsky.build_blocks(sf).a_matrix
    assert a.mul_vec(x1).is_zero()
    assert a.mul_vec(gf2.ones_vec(sf.t)).is_zero()


def test_splitting_divisor_class_is_a_square():
    # the ambiguous form of d* must lie in 2 Cl (that is the theorem's d)
    from theta_selmer.classgroup import compose

    for n in (259, 355, 667, 763):
        sf = factor_squarefree(n)
        d_star, _ = splitting_divisor(sf)
        c = (d_star + n // d_star) // 4
        amb = reduce_form(d_star, d_star, c)
        forms = reduced_forms(-n)
        squares = {compose(f, f) for f in forms}
        assert amb in squares, n


def test_splitting_divisor_rank_mismatch():
    with pytest.raises(RankMismatch):
        splitting_divisor(factor_squarefree(7))  # r4(-7) = 0


def test_r8_trivial_case():
    # r_c = 0 makes A u = 0 solvable, so r8 = 1
    sf = factor_squarefree(259)
    d_star, _ = splitting_divisor(sf)
    assert classgroup.r8_decision(sf, d_star, 1) == 1  # [1/p] = 0 for all p


def test_r8_matches_forms_oracle():
    from theta_selmer import cassels

    import math

    hits = 0
    for n in range(19, 2200, 24):
        if not is_squarefree(n):
            continue
        sf = factor_squarefree(n)
        if sf.eta != 1 or r4(-n) != 1:
            continue
        d_star, _ = splitting_divisor(sf)
        sol = cassels.solve_ternary("4c2=da2+(n/d)b2", (d_star, n))
        if math.gcd(sol.c, n) != 1:
            continue
        r_c_dot_e = sum(
            classgroup.legendre_additive(sol.c, p) for p in sf.odd_primes
        ) % 2
        assert r_c_dot_e == 0, n  # r_c e^T = [c/n] = 0
        assert classgroup.r8_decision(sf, d_star, sol.c) == forms_class_group(-n).r8, n
        hits += 1
    assert hits >= 5


def test_fundamental_discriminants():
    assert is_fundamental(-20) and is_fundamental(-7) and is_fundamental(-56)
    assert not is_fundamental(-9) and not is_fundamental(-25)
    assert is_fundamental(5) and is_fundamental(8) and not is_fundamental(4)
