"""Exact series combinatorics and certified inequality sweeps.

Everything here is exact-rational at the core: coefficients of powers of
the series sum x**i / i (convolution, cross-checked against brute-force
composition enumeration), the generalized binomial coefficients of
(1+u)**(1/p) and their k-fold products b_j, diagonal derivatives of
alpha_k(X, x) = (X**(1/p) - x**(1/p))**k / k!, and a jet-based formula for
derivatives of composite functions.

Inequalities with a transcendental side (powers of 2e, of e, square roots
of 2 pi n) are certified one-sidedly: an exact left side is compared with
a rational lower bound of the right side, so Holds is sound; apparent
failures are re-checked against an upper bound before being reported, and
anything still unresolved escalates precision up to the configured cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

from .scalar import (
    DEFAULT_CONFIG,
    Interval,
    RationalLike,
    Scalar,
    ScalarConfig,
    _as_fraction,
    exact_nth_root,
    factorial,
    iv_e,
    iv_pi,
    iv_pow,
    iv_sqrt,
    make_scalar,
)
from .seqcore import Trend, Verdict, Witness

COMPOSITION_GUARD = 25


@dataclass(frozen=True)
class TruncatedPowerSeries:
    """Finite coefficient window [valuation, order] of a power series.

    The zero series is represented with valuation = order + 1 and no stored
    coefficients.  Arithmetic truncates consistently at the common order.
    """

    coeffs: Tuple[Fraction, ...]
    valuation: int
    order: int

    def __post_init__(self):
        if self.valuation < 0:
            raise ValueError("valuation must be nonnegative")
        expected = self.order - self.valuation + 1
        if len(self.coeffs) != max(expected, 0):
            raise ValueError(
                f"coefficient window has {len(self.coeffs)} entries, expected {expected}"
            )

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[RationalLike], valuation: int, order: int):
        return cls(tuple(_as_fraction(c) for c in coeffs), valuation, order)

    @classmethod
    def zero(cls, order: int) -> "TruncatedPowerSeries":
        return cls((), order + 1, order)

    def coeff(self, n: int) -> Fraction:
        if n > self.order:
            raise ValueError(f"coefficient {n} beyond truncation order {self.order}")
        if n < self.valuation:
            return Fraction(0)
        return self.coeffs[n - self.valuation]

    def is_zero(self) -> bool:
        return self.valuation > self.order

    def __add__(self, other: "TruncatedPowerSeries") -> "TruncatedPowerSeries":
        order = min(self.order, other.order)
        if self.is_zero() and other.is_zero():
            return TruncatedPowerSeries.zero(order)
        val = min(self.valuation, other.valuation, order + 1)
        coeffs = tuple(
            self.coeff(n) + other.coeff(n) for n in range(val, order + 1)
        )
        return TruncatedPowerSeries(coeffs, val, order)

    def __mul__(self, other: "TruncatedPowerSeries") -> "TruncatedPowerSeries":
        order = min(self.order, other.order)
        val = self.valuation + other.valuation
        if val > order:
            return TruncatedPowerSeries.zero(order)
        coeffs = []
        for n in range(val, order + 1):
            total = Fraction(0)
            lo = max(self.valuation, n - other.order)
            hi = min(self.order, n - other.valuation)
            for i in range(lo, hi + 1):
                total += self.coeffs[i - self.valuation] * other.coeff(n - i)
            coeffs.append(total)
        return TruncatedPowerSeries(tuple(coeffs), val, order)

    def pow_int(self, k: int) -> "TruncatedPowerSeries":
        if k < 1:
            raise ValueError("series power k must be >= 1")
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def scale(self, c: RationalLike) -> "TruncatedPowerSeries":
        q = _as_fraction(c)
        return TruncatedPowerSeries(
            tuple(q * v for v in self.coeffs), self.valuation, self.order
        )


def _log_series(order: int) -> TruncatedPowerSeries:
    return TruncatedPowerSeries.from_coeffs(
        (Fraction(1, i) for i in range(1, order + 1)), 1, order
    )


def log_power_coefficients(k: int, order: int) -> TruncatedPowerSeries:
    """Coefficients c_{k,n} of (sum_{i>=1} x**i / i) ** k up to the order."""
    if not 1 <= k <= order:
        raise ValueError("need 1 <= k <= order")
    return _log_series(order).pow_int(k)


def _compositions(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def composition_sum_oracle(k: int, n: int) -> Fraction:
    """Brute-force sum of 1/(i_1 * ... * i_k) over compositions of n into k
    positive parts.  Refuses n beyond the enumeration cost guard."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if n > COMPOSITION_GUARD:
        raise ValueError(
            f"composition enumeration refused for n={n} > {COMPOSITION_GUARD}"
        )
    total = Fraction(0)
    for parts in _compositions(n, k):
        prod = 1
        for part in parts:
            prod *= part
        total += Fraction(1, prod)
    return total


# -- certified sweeps ----------------------------------------------------------


def _two_e_powers(n_max: int, bits: int) -> Tuple[list, list]:
    """Lower and upper rational bounds of (2e)**n for n = 0..n_max."""
    e = iv_e(bits)
    lo2, hi2 = 2 * e.lo, 2 * e.hi
    lows, highs = [Fraction(1)], [Fraction(1)]
    for _ in range(n_max):
        lows.append(lows[-1] * lo2)
        highs.append(highs[-1] * hi2)
    return lows, highs


def lemma1_check(
    k_max: int, n_max: int, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Verdict:
    """Certified sweep of c_{k,n} <= (2e)**n * k! / n**k over the bounds."""
    window = (1, n_max)
    bits = cfg.bits
    for attempt in range(cfg.max_doublings + 1):
        lows, highs = _two_e_powers(n_max, bits)
        series = _log_series(n_max)
        power = series
        unresolved = None
        witness = None
        for k in range(1, k_max + 1):
            if k > 1:
                power = power * series
            kfact = factorial(k)
            for n in range(1, n_max + 1):
                c = power.coeff(n)
                rhs_lo = lows[n] * kfact / n ** k
                if c <= rhs_lo:
                    continue
                rhs_hi = highs[n] * kfact / n ** k
                if c > rhs_hi:
                    witness = Witness(n, (f"k={k}", f"c={c}", f"bound<{rhs_hi}"))
                    break
                unresolved = (k, n)
                break
            if witness or unresolved:
                break
        if witness:
            return Verdict.fails(window, witness)
        if unresolved is None:
            return Verdict.holds(window)
        bits *= 2
    k, n = unresolved
    return Verdict.inconclusive(
        window, Trend(note=f"pair k={k}, n={n} unresolved at the precision cap")
    )


def root_series_coefficients(p: int, order: int) -> TruncatedPowerSeries:
    """Signed coefficients a_i of (1+u)**(1/p) - 1 up to the order, from the
    generalized binomial recurrence."""
    if p < 2:
        raise ValueError("root exponent p must be >= 2")
    return _binomial_root_series(p, order)


def _binomial_root_series(p: int, order: int) -> TruncatedPowerSeries:
    coeffs = []
    c = Fraction(1)
    alpha = Fraction(1, p)
    for i in range(1, order + 1):
        c = c * (alpha - (i - 1)) / i
        coeffs.append(c)
    return TruncatedPowerSeries(tuple(coeffs), 1, order)


def alpha_b_coefficients(p: int, k: int, order: int) -> TruncatedPowerSeries:
    """Coefficients b_j of the k-fold product of the root series, scaled by
    1/k!; the j-th coefficient drives the diagonal derivatives of alpha_k."""
    if p < 2:
        raise ValueError("root exponent p must be >= 2")
    if k < 1:
        raise ValueError("factor count k must be >= 1")
    if k > order:
        return TruncatedPowerSeries.zero(order)
    return _binomial_root_series(p, order).pow_int(k).scale(Fraction(1, factorial(k)))


def b_coefficient_bound_check(
    p: int, k_max: int, n_max: int, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Verdict:
    """Certified |b_n| <= (2e)**n / n**k for 1 <= k <= k_max, n <= n_max."""
    window = (1, n_max)
    bits = cfg.bits
    for attempt in range(cfg.max_doublings + 1):
        lows, highs = _two_e_powers(n_max, bits)
        root = _binomial_root_series(p, n_max)
        power = root
        unresolved = None
        witness = None
        for k in range(1, k_max + 1):
            if k > 1:
                power = power * root
            inv_kfact = Fraction(1, factorial(k))
            for n in range(1, n_max + 1):
                b = abs(power.coeff(n) * inv_kfact)
                if b <= lows[n] / n ** k:
                    continue
                if b > highs[n] / n ** k:
                    witness = Witness(n, (f"k={k}", f"|b|={b}"))
                    break
                unresolved = (k, n)
                break
            if witness or unresolved:
                break
        if witness:
            return Verdict.fails(window, witness)
        if unresolved is None:
            return Verdict.holds(window)
        bits *= 2
    k, n = unresolved
    return Verdict.inconclusive(
        window, Trend(note=f"pair k={k}, n={n} unresolved at the precision cap")
    )


def _power_fraction_root(x: Fraction, p: int, exponent: int) -> Optional[Fraction]:
    """Exact value of x**(exponent/p) when the p-th root of x is rational."""
    xr = exact_nth_root(x, p)
    if xr is None:
        return None
    return xr ** exponent


def alpha_diag_derivative(
    p: int,
    k: int,
    n: int,
    x: RationalLike,
    cfg: ScalarConfig = DEFAULT_CONFIG,
) -> Scalar:
    """n-th diagonal derivative of alpha_k at (x, x):
    n! * b_n * x**(-(p n - k)/p), certified."""
    if p < 2:
        raise ValueError("root exponent p must be >= 2")
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    xq = _as_fraction(x)
    if xq <= 0:
        raise ValueError("x must be positive")
    b = alpha_b_coefficients(p, k, n).coeff(n)
    coef = factorial(n) * b
    m = p * n - k
    if coef == 0:
        return make_scalar(cfg, Fraction(0))
    if m % p == 0:
        return make_scalar(cfg, coef * xq ** (-(m // p)))
    exact_pow = _power_fraction_root(xq, p, -m)
    if exact_pow is not None:
        return make_scalar(cfg, coef * exact_pow)
    return make_scalar(
        cfg, None, lambda bits: iv_pow(Interval.point(xq), Fraction(-m, p), bits) * coef
    )


def _alpha_bound_pair(
    p: int, k: int, n: int, b_n: Fraction, x: Fraction, bits: int
) -> Tuple[Interval, Interval]:
    """Enclosures of |alpha_k^(n)(x,x)| and of (2e)**n * n**(n-k) * x**(-(pn-k)/p)."""
    m = p * n - k
    exact_pow = (
        Interval.point(x ** (-(m // p)))
        if m % p == 0
        else None
    )
    if exact_pow is None:
        er = _power_fraction_root(x, p, -m)
        exact_pow = Interval.point(er) if er is not None else None
    xpow = exact_pow if exact_pow is not None else iv_pow(
        Interval.point(x), Fraction(-m, p), bits
    )
    lhs = xpow * abs(factorial(n) * b_n)
    e = iv_e(bits)
    two_e_n = Interval(2 * e.lo, 2 * e.hi).pow_int(n)
    rhs = two_e_n * Fraction(n ** (n - k)) if n >= k else two_e_n / Fraction(n ** (k - n))
    rhs = rhs * xpow
    return lhs, rhs


def lemma2_check(
    p_set: Sequence[int],
    n_max: int,
    x_grid: Sequence[RationalLike],
    cfg: ScalarConfig = DEFAULT_CONFIG,
) -> Verdict:
    """Certified sweep of the diagonal-derivative bound
    |alpha_k^(n)(x,x)| <= (2e)**n * n**(n-k) * x**(-(pn-k)/p)
    over p in p_set, 1 <= k <= n <= n_max, x in x_grid."""
    window = (1, n_max)
    xs = [_as_fraction(x) for x in x_grid]
    if any(x <= 0 for x in xs):
        raise ValueError("grid points must be positive")
    for p in p_set:
        if p < 2:
            raise ValueError("root exponents must be >= 2")
        root = _binomial_root_series(p, n_max)
        power = root
        for k in range(1, n_max + 1):
            if k > 1:
                power = power * root
            inv_kfact = Fraction(1, factorial(k))
            for n in range(k, n_max + 1):
                b_n = power.coeff(n) * inv_kfact
                for x in xs:
                    bits = cfg.bits
                    verdict = None
                    for _ in range(cfg.max_doublings + 1):
                        lhs, rhs = _alpha_bound_pair(p, k, n, b_n, x, bits)
                        if lhs.hi <= rhs.lo:
                            verdict = True
                            break
                        if lhs.lo > rhs.hi:
                            return Verdict.fails(
                                window,
                                Witness(n, (f"p={p}", f"k={k}", f"x={x}")),
                            )
                        bits *= 2
                    if verdict is None:
                        return Verdict.inconclusive(
                            window,
                            Trend(
                                note=(
                                    f"p={p}, k={k}, n={n}, x={x} unresolved "
                                    "at the precision cap"
                                )
                            ),
                        )
    return Verdict.holds(window)


def stirling_ineq_check(
    p: int, n: int, k: int, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Verdict:
    """Certified 1/(p n - k)! <= e**(p n) / n**(p n - k) for 0 <= k < p n."""
    if p < 2 or n < 1:
        raise ValueError("need p >= 2 and n >= 1")
    if not 0 <= k < p * n:
        raise ValueError("need 0 <= k < p n")
    window = (n, n)
    m = p * n - k
    lhs = n ** m  # cleared form: n**m <= m! * e**(p n)
    fact = factorial(m)
    bits = cfg.bits
    for _ in range(cfg.max_doublings + 1):
        e = iv_e(bits)
        if lhs <= fact * e.lo ** (p * n):
            return Verdict.holds(window)
        if lhs > fact * e.hi ** (p * n):
            return Verdict.fails(window, Witness(n, (f"p={p}", f"k={k}")))
        bits *= 2
    return Verdict.inconclusive(
        window, Trend(note=f"p={p}, n={n}, k={k} unresolved at the precision cap")
    )


def stirling_sweep(
    p_set: Sequence[int], n_max: int, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Verdict:
    """Certified sweep of the reciprocal-factorial inequality over
    p in p_set, 1 <= n <= n_max, all 0 <= k < p n."""
    window = (1, n_max)
    bits = cfg.bits
    e = iv_e(bits)
    num, den = e.lo.numerator, e.lo.denominator
    for p in p_set:
        if p < 2:
            raise ValueError("root exponents must be >= 2")
        for n in range(1, n_max + 1):
            pn = p * n
            # integer comparison n**m * den**pn <= m! * num**pn
            num_pow = num ** pn
            den_pow = den ** pn
            fact = 1
            npow = 1
            for m in range(1, pn + 1):
                fact *= m
                npow *= n
                k = pn - m
                if npow * den_pow <= fact * num_pow:
                    continue
                single = stirling_ineq_check(p, n, k, cfg)
                if not single.ok:
                    return Verdict(
                        single.outcome, window, witness=single.witness, trend=single.trend
                    )
    return Verdict.holds(window)


def stirling_factorial_bounds_check(
    n_max: int, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Verdict:
    """Certified two-sided factorial estimate
    sqrt(2 pi n) (n/e)**n < n! < e sqrt(n) (n/e)**n for 2 <= n <= n_max.

    The sweep starts at n = 2: at n = 1 the upper estimate is the exact
    equality 1! = e * (1/e), so the strict form fails there.
    """
    if n_max < 2:
        raise ValueError("two-sided factorial sweep needs n_max >= 2")
    window = (2, n_max)
    bits = cfg.bits
    for _ in range(cfg.max_doublings + 1):
        e = iv_e(bits)
        pi = iv_pi(bits)
        ok = True
        for n in range(2, n_max + 1):
            fact = factorial(n)
            nn = Fraction(n ** n)
            lower_hi = iv_sqrt(pi * (2 * n), bits).hi * nn / e.lo ** n
            # upper side written as sqrt(n) n**n e**(1-n) to cancel one e
            upper_lo = iv_sqrt(Interval.point(n), bits).lo * nn / e.hi ** (n - 1)
            if not (lower_hi < fact < upper_lo):
                ok = False
                break
        if ok:
            return Verdict.holds(window)
        bits *= 2
    return Verdict.inconclusive(
        window, Trend(note=f"factorial bounds unresolved near n={n}")
    )


# -- composite derivatives and the remainder identity ---------------------------

Jet = Sequence[Union[Fraction, int, Interval]]


def _coerce_jet(jet: Jet, min_len: int, name: str):
    if len(jet) < min_len:
        raise ValueError(f"{name} too short: need at least {min_len} entries")
    return [v if isinstance(v, Interval) else _as_fraction(v) for v in jet]


def composite_derivative(outer_jet: Jet, inner_jet: Jet, n: int) -> Scalar:
    """n-th derivative of f(g(x)) from the jets of f at g(x) and of g at x.

    Uses the shifted-series form: the inner factor of order k is the n-th
    coefficient of (g(x+t) - g(x))**k, computed by truncated convolution.
    """
    if n < 1:
        raise ValueError("derivative order n must be >= 1")
    outer = _coerce_jet(outer_jet, n + 1, "outer jet")
    inner = _coerce_jet(inner_jet, n + 1, "inner jet")
    exact = all(isinstance(v, Fraction) for v in outer[: n + 1] + inner[: n + 1])
    h = [inner[j] / factorial(j) for j in range(1, n + 1)]
    # powers of the shifted inner series, truncated at order n
    power = list(h)
    total = Fraction(0) if exact else Interval.point(0)
    nfact = factorial(n)
    for k in range(1, n + 1):
        if k > 1:
            new = [Fraction(0)] * n  # index j-1 holds the t**j coefficient
            for i in range(k - 1, n):  # previous power has valuation k-1
                ci = power[i - 1]
                if isinstance(ci, Fraction) and ci == 0:
                    continue
                for j in range(1, n - i + 1):
                    new[i + j - 1] = new[i + j - 1] + ci * h[j - 1]
            power = new
        contrib = outer[k] * Fraction(nfact, factorial(k)) * power[n - 1]
        total = total + contrib
    if isinstance(total, Fraction):
        return Scalar.from_fraction(total)
    return Scalar.from_interval(total)


def taylor_remainder_reconstruct(
    f_jet_at_0: Jet,
    F_jet_at_xi: Jet,
    p: int,
    xi: RationalLike,
    x: Optional[RationalLike] = None,
) -> Scalar:
    """Reconstruct f^(n)(x) at x = xi**p from the derivative jet of
    F(t) = f(t**p) at xi and the first n derivatives of f at 0.

    n is the top order of the F jet.  Splitting F into the substituted Taylor
    polynomial P and remainder R, the n-th derivative of f at x equals
    sum_{k=1..n} R^(k)(xi) * alpha_k^(n)(x, x), which is exact rational
    arithmetic throughout since x**(1/p) = xi is rational.
    """
    if p < 1:
        raise ValueError("power p must be >= 1")
    n = len(F_jet_at_xi) - 1
    if n < 1:
        raise ValueError("F jet must carry derivatives up to order n >= 1")
    xiq = _as_fraction(xi)
    if xiq <= 0:
        raise ValueError("xi must be positive")
    if x is not None and _as_fraction(x) != xiq ** p:
        raise ValueError(f"inconsistent xi/x: expected x = xi**{p} = {xiq ** p}")
    f0 = _coerce_jet(f_jet_at_0, n, "f jet at 0")
    Fj = _coerce_jet(F_jet_at_xi, n + 1, "F jet at xi")

    # derivatives of P(t) = sum_{j<n} f^(j)(0) t**(p j) / j! at xi
    def P_deriv(k: int) -> Fraction:
        total = Fraction(0)
        for j in range(n):
            e = p * j
            if e < k:
                continue
            falling = 1
            for i in range(k):
                falling *= e - i
            total += f0[j] * falling * xiq ** (e - k) / factorial(j)
        return total

    root = _binomial_root_series(p, n) if p >= 2 else TruncatedPowerSeries(
        (Fraction(1),) + (Fraction(0),) * (n - 1), 1, n
    )
    power = root
    total = Fraction(0)
    nfact = factorial(n)
    for k in range(1, n + 1):
        if k > 1:
            power = power * root
        b_n = power.coeff(n) / factorial(k)
        alpha = nfact * b_n * xiq ** (-(p * n - k))
        R_k = Fj[k] - P_deriv(k)
        total += R_k * alpha
    return Scalar.from_fraction(total)
