"""Series combinatorics, inequality certificates, and composite derivatives.

Polynomial oracles here are independent of the code under test: plain
coefficient-list compose/differentiate/evaluate in exact rationals.
"""

import random
from fractions import Fraction

import pytest

from carleman.comb import (
    TruncatedPowerSeries,
    alpha_b_coefficients,
    alpha_diag_derivative,
    b_coefficient_bound_check,
    composite_derivative,
    composition_sum_oracle,
    lemma1_check,
    lemma2_check,
    log_power_coefficients,
    root_series_coefficients,
    stirling_factorial_bounds_check,
    stirling_ineq_check,
    stirling_sweep,
    taylor_remainder_reconstruct,
)
from carleman.scalar import ScalarConfig, factorial

F = Fraction
EXACT = ScalarConfig(mode="exact")


# -- polynomial oracle helpers ---------------------------------------------------


def poly_eval(coeffs, x):
    acc = F(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_diff(coeffs):
    return [c * i for i, c in enumerate(coeffs)][1:] or [F(0)]


def poly_compose(outer, inner):
    acc = [F(0)]
    for c in reversed(outer):
        # acc = acc * inner + c
        prod = [F(0)] * (len(acc) + len(inner) - 1)
        for i, a in enumerate(acc):
            for j, b in enumerate(inner):
                prod[i + j] += a * b
        prod[0] += c
        acc = prod
    return acc


def poly_jet(coeffs, x, order):
    out = []
    cur = list(coeffs)
    for _ in range(order + 1):
        out.append(poly_eval(cur, x))
        cur = poly_diff(cur)
    return out


def poly_substitute_power(coeffs, p):
    out = [F(0)] * ((len(coeffs) - 1) * p + 1)
    for j, c in enumerate(coeffs):
        out[j * p] = c
    return out


# -- truncated power series -------------------------------------------------------


def test_series_window_invariant():
    s = TruncatedPowerSeries.from_coeffs([1, 2, 3], 1, 3)
    assert s.coeff(0) == 0 and s.coeff(2) == 2
    with pytest.raises(ValueError):
        s.coeff(4)
    with pytest.raises(ValueError):
        TruncatedPowerSeries.from_coeffs([1, 2], 1, 3)
    z = TruncatedPowerSeries.zero(5)
    assert z.is_zero() and z.coeff(3) == 0


def test_series_mul_truncates_consistently():
    a = TruncatedPowerSeries.from_coeffs([1, 1, 1, 1], 0, 3)  # 1+x+x^2+x^3
    sq = a * a
    assert [sq.coeff(n) for n in range(4)] == [1, 2, 3, 4]
    assert sq.order == 3


def test_log_power_coefficient_examples():
    c1 = log_power_coefficients(1, 8)
    assert all(c1.coeff(n) == F(1, n) for n in range(1, 9))
    c2 = log_power_coefficients(2, 4)
    assert c2.coeff(2) == 1
    assert c2.coeff(3) == 1
    assert c2.coeff(4) == F(11, 12)


def test_composition_oracle_examples_and_guard():
    assert composition_sum_oracle(1, 7) == F(1, 7)
    assert composition_sum_oracle(2, 3) == 1  # (1,2), (2,1)
    for n in (1, 4, 9):
        assert composition_sum_oracle(n, n) == 1
    with pytest.raises(ValueError):
        composition_sum_oracle(2, 26)
    with pytest.raises(ValueError):
        composition_sum_oracle(5, 3)


def test_convolution_matches_enumeration():
    for k in range(1, 7):
        series = log_power_coefficients(k, 14)
        for n in range(k, 15):
            assert series.coeff(n) == composition_sum_oracle(k, n), (k, n)


def test_series_power_additivity():
    for k1, k2 in ((1, 2), (2, 3), (3, 4)):
        lhs = log_power_coefficients(k1 + k2, 12)
        rhs = log_power_coefficients(k1, 12) * log_power_coefficients(k2, 12)
        assert all(lhs.coeff(n) == rhs.coeff(n) for n in range(1, 13))


def test_lemma1_small_sweep_and_stability():
    assert lemma1_check(6, 12).ok
    assert lemma1_check(6, 12, ScalarConfig(bits=512)).ok
    # the k=1, n=1 instance: 1 <= 2e
    one = log_power_coefficients(1, 1).coeff(1)
    assert one == 1 and lemma1_check(1, 1).ok


def test_root_series_values_and_product_formula():
    for p in (2, 3, 5):
        a = root_series_coefficients(p, 24)
        assert a.coeff(1) == F(1, p)
        # magnitude oracle: |a_i| = ((p-1)(2p-1)...((i-1)p-1)) / (i! p^i)
        prod = 1
        for i in range(1, 25):
            if i > 1:
                prod *= (i - 1) * p - 1
            assert abs(a.coeff(i)) == F(prod, factorial(i) * p ** i), (p, i)
            assert abs(a.coeff(i)) <= F(1, i)
            # signs alternate starting positive
            assert a.coeff(i) == (-1) ** (i - 1) * abs(a.coeff(i))
    assert abs(root_series_coefficients(2, 2).coeff(2)) == F(1, 8)


def test_root_series_inverts_power():
    # (1 + sum a_i u^i)**p == 1 + u up to truncation
    for p in (2, 3, 4):
        order = 12
        a = root_series_coefficients(p, order)
        one_plus = TruncatedPowerSeries.from_coeffs(
            [F(1)] + [a.coeff(i) for i in range(1, order + 1)], 0, order
        )
        powed = one_plus.pow_int(p)
        assert powed.coeff(0) == 1 and powed.coeff(1) == 1
        assert all(powed.coeff(i) == 0 for i in range(2, order + 1))


def test_alpha_b_examples():
    a = root_series_coefficients(2, 10)
    b1 = alpha_b_coefficients(2, 1, 10)
    assert all(b1.coeff(j) == a.coeff(j) for j in range(1, 11))
    assert alpha_b_coefficients(2, 2, 4).coeff(2) == F(1, 8)
    # valuation: k-fold products vanish below k
    assert alpha_b_coefficients(2, 4, 10).coeff(3) == 0


def test_b_bound_sweep():
    for p in (2, 3):
        assert b_coefficient_bound_check(p, 8, 30).ok


def test_alpha_diag_derivative_examples():
    assert alpha_diag_derivative(2, 1, 1, 1, EXACT).fraction() == F(1, 2)
    # scaling: value at x equals value at 1 times x**(-(pn-k)/p), checked at
    # an x whose root is exact
    from carleman.scalar import exact_nth_root

    for (p, k, n, x) in ((2, 1, 2, F(1, 4)), (2, 2, 3, F(4)), (3, 1, 2, F(1, 8))):
        at_x = alpha_diag_derivative(p, k, n, x, EXACT).fraction()
        at_1 = alpha_diag_derivative(p, k, n, 1, EXACT).fraction()
        m = p * n - k
        xr = exact_nth_root(F(x), p)
        assert at_x == at_1 * xr ** (-m)
    # degenerate n < k is zero
    assert alpha_diag_derivative(2, 5, 2, F(1, 3), EXACT).fraction() == 0


def test_lemma2_quick_sweep():
    assert lemma2_check((2, 3), 10, (F(1, 4), F(1, 2), 1, 2)).ok


def test_stirling_single_and_sweep():
    assert stirling_ineq_check(2, 1, 0).ok  # 1/2 <= e^2
    assert stirling_ineq_check(2, 1, 1).ok  # 1 <= e^2
    with pytest.raises(ValueError):
        stirling_ineq_check(2, 1, 2)
    assert stirling_sweep((2, 3), 20).ok


def test_stirling_factorial_two_sided():
    assert stirling_factorial_bounds_check(40).ok


# -- composite derivative ----------------------------------------------------------


def test_composite_identity_inner():
    # g = x: inner jet (x, 1, 0, 0, ...)
    x = F(1, 3)
    f = [F(2), F(-1), F(5), F(7)]  # cubic
    for n in (1, 2, 3):
        outer = poly_jet(f, x, n)
        inner = [x, F(1)] + [F(0)] * (n - 1)
        got = composite_derivative(outer, inner, n).fraction()
        assert got == poly_jet(f, x, n)[n]


def test_composite_chain_rule_order_one():
    x = F(2, 5)
    f = [F(1), F(3), F(-2)]
    g = [F(0), F(2), F(1), F(4)]
    gx = poly_eval(g, x)
    outer = poly_jet(f, gx, 1)
    inner = poly_jet(g, x, 1)
    got = composite_derivative(outer, inner, 1).fraction()
    assert got == poly_eval(poly_diff(f), gx) * poly_eval(poly_diff(g), x)


def test_composite_cubics_match_symbolic_expansion():
    rng = random.Random(3)
    for _ in range(20):
        f = [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(4)]
        g = [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(4)]
        x = F(1, 2)
        comp = poly_compose(f, g)
        gx = poly_eval(g, x)
        for n in (1, 2, 3, 4, 5):
            outer = poly_jet(f, gx, n)
            inner = poly_jet(g, x, n)
            got = composite_derivative(outer, inner, n).fraction()
            assert got == poly_jet(comp, x, n)[n], (f, g, n)


def test_composite_jet_too_short():
    with pytest.raises(ValueError):
        composite_derivative([F(1), F(2)], [F(0), F(1)], 2)


# -- remainder identity --------------------------------------------------------------


def test_reconstruct_zero_for_low_degree():
    # f of degree < n has vanishing n-th derivative
    f = [F(3), F(1), F(2)]  # degree 2
    p, xi, n = 2, F(1, 2), 4
    Fpoly = poly_substitute_power(f, p)
    F_jet = poly_jet(Fpoly, xi, n)
    f_jet0 = poly_jet(f, F(0), n - 1)
    got = taylor_remainder_reconstruct(f_jet0, F_jet, p, xi).fraction()
    assert got == 0


def test_reconstruct_monomial_gives_factorial():
    for n in (2, 3, 5):
        f = [F(0)] * n + [F(1)]  # x**n
        xi = F(1, 2)  # x = 1/4
        Fpoly = poly_substitute_power(f, 2)
        F_jet = poly_jet(Fpoly, xi, n)
        f_jet0 = poly_jet(f, F(0), n - 1)
        got = taylor_remainder_reconstruct(f_jet0, F_jet, 2, xi, x=F(1, 4)).fraction()
        assert got == factorial(n)


def test_reconstruct_random_polynomials():
    rng = random.Random(11)
    for _ in range(40):
        deg = rng.randint(1, 8)
        f = [F(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(deg + 1)]
        p = rng.choice((2, 3))
        n = rng.randint(1, 8)
        xi = F(rng.randint(1, 15), 16)
        Fpoly = poly_substitute_power(f, p)
        F_jet = poly_jet(Fpoly, xi, n)
        f_jet0 = poly_jet(f, F(0), n - 1)
        got = taylor_remainder_reconstruct(f_jet0, F_jet, p, xi).fraction()
        want = poly_jet(f, xi ** p, n)[n]
        assert got == want, (f, p, n, xi)


def test_reconstruct_inconsistent_x_rejected():
    f = [F(1), F(1)]
    F_jet = poly_jet(poly_substitute_power(f, 2), F(1, 2), 2)
    with pytest.raises(ValueError):
        taylor_remainder_reconstruct([F(1)], F_jet, 2, F(1, 2), x=F(1, 3))


def test_composite_reproduces_power_substitution_jets():
    # inner jet of x -> x**p reproduces derivatives of F(t) = f(t**p)
    rng = random.Random(5)
    for _ in range(10):
        deg = rng.randint(1, 5)
        f = [F(rng.randint(-9, 9)) for _ in range(deg + 1)]
        p = rng.choice((2, 3))
        t = F(2, 3)
        inner_poly = [F(0)] * p + [F(1)]  # t**p
        Fpoly = poly_substitute_power(f, p)
        for n in (1, 2, 3, 4):
            outer = poly_jet(f, t ** p, n)
            inner = poly_jet(inner_poly, t, n)
            got = composite_derivative(outer, inner, n).fraction()
            assert got == poly_jet(Fpoly, t, n)[n]
