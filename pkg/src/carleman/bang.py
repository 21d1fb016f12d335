"""Extremal oscillating series with certified truncation, the C_p family,
and class-norm estimation.

The central object is the series F built from a weight sequence with
log-convex derived values: term k is M'_k / (2 m_k)**k times an oscillator
in 2 m_k xi (cosine, or its p-fold analogue C_p).  Term-wise n-th
derivatives are M'_k (2 m_k)**(n-k) times a shifted oscillator, and for
k > K >= n log-convexity gives |term_k| <= 2**(n-k) M'_n, so truncating at
K leaves a geometric tail below M'_n * 2**(n-K+1).  That bound is the only
tail control available, which dictates two restrictions enforced here:

* the ratio sequence m_k must be certified nondecreasing on [0, K] at
  construction (with a family oracle recording whether log-convexity is
  known globally, as for the iterated-log families);
* the C_p oscillator is only evaluated at xi = 0.  Its derivative bound
  |C_p^(n)| <= e holds on [-1, 1] only, and for |xi| > 0 the arguments
  2 m_k xi eventually leave every bounded interval, so no certified tail
  exists away from the origin.  At xi = 0 the derivatives are exactly 0 or
  1 and the geometric bound applies unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .scalar import (
    DEFAULT_CONFIG,
    Interval,
    PrecisionError,
    RationalLike,
    Scalar,
    ScalarConfig,
    _SyncedCache,
    _as_fraction,
    factorial,
    iv_cos,
    iv_e,
    iv_sin,
    make_scalar,
)
from .seqcore import (
    SequenceError,
    Trend,
    Verdict,
    WeightSequence,
    Witness,
    _log_convex_global_oracle,
    compare_products,
)


def _ceil_log2_inverse(tau: Fraction) -> int:
    """Smallest integer o with 2**o >= 1/tau."""
    inv = 1 / tau
    o = max(0, (inv.numerator // inv.denominator).bit_length())
    while o > 0 and Fraction(2) ** (o - 1) >= inv:
        o -= 1
    while Fraction(2) ** o < inv:
        o += 1
    return o


# -- the C_p family --------------------------------------------------------------


def _cp_series_interval(p: int, n: int, x: Fraction, bits: int) -> Interval:
    """Enclosure of the n-th derivative of C_p at x in [-1, 1]: the series
    sum over j with j p >= n of x**(jp-n) / (jp-n)!, with a factorial tail
    majorant for the truncation."""
    target = Fraction(1, 2 ** (bits + 8))
    total = Fraction(0)
    j = -(-n // p)  # first index with jp - n >= 0
    while True:
        m = j * p - n
        total += x ** m / factorial(m) if m else Fraction(1)
        j += 1
        tail = Fraction(2, factorial(j * p - n))
        if tail <= target:
            break
    if x >= 0 or p % 2 == 0:
        return Interval(total, total + tail)
    return Interval(total - tail, total + tail)


def cp_eval(p: int, x: RationalLike, cfg: ScalarConfig = DEFAULT_CONFIG) -> Scalar:
    """C_p(x) = sum x**(jp) / (jp)!      (p=1: exp, p=2: cosh), certified."""
    return cp_derivative(p, 0, x, cfg)


def cp_derivative(
    p: int, n: int, x: RationalLike, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Scalar:
    """n-th derivative of C_p at x in [-1, 1], term-wise with certified tail."""
    if p < 1:
        raise ValueError("oscillator power p must be >= 1")
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    xq = _as_fraction(x)
    if not -1 <= xq <= 1:
        raise ValueError("C_p evaluation is supported on [-1, 1]")
    if xq == 0:
        return make_scalar(cfg, Fraction(1 if n % p == 0 else 0))
    return make_scalar(cfg, None, lambda bits: _cp_series_interval(p, n, xq, bits))


def cp_bound_check(
    p: int,
    n_max: int,
    grid: Sequence[RationalLike],
    cfg: ScalarConfig = DEFAULT_CONFIG,
) -> Verdict:
    """Certified |C_p^(n)(x)| <= e for n <= n_max over a grid in [-1, 1].

    For p = 1 the derivative is exp itself and the bound degenerates to the
    equality e**1 = e at x = 1; it is certified there by monotonicity of
    exp against the exact comparison x <= 1.
    """
    window = (0, n_max)
    xs = [_as_fraction(x) for x in grid]
    if any(not -1 <= x <= 1 for x in xs):
        raise ValueError("grid points must lie in [-1, 1]")
    if p == 1:
        if all(x <= 1 for x in xs):
            return Verdict.holds(
                window,
                scope="global",
                provenance="exp is monotone: e**x <= e exactly when x <= 1",
            )
        return Verdict.fails(window, Witness(0, ("x > 1 in grid",)))
    for n in range(n_max + 1):
        for x in xs:
            bits = cfg.bits
            decided = False
            for _ in range(cfg.max_doublings + 1):
                if x == 0:
                    decided = True
                    break
                enc = abs(_cp_series_interval(p, n, x, bits))
                e = iv_e(bits)
                if enc.hi <= e.lo:
                    decided = True
                    break
                if enc.lo > e.hi:
                    return Verdict.fails(window, Witness(n, (f"x={x}",)))
                bits *= 2
            if not decided:
                return Verdict.inconclusive(
                    window, Trend(note=f"n={n}, x={x} unresolved at the precision cap")
                )
    return Verdict.holds(window)


# -- Bang-type series -------------------------------------------------------------


@dataclass(frozen=True)
class GrowthEnvelope:
    """Derivative growth data: |f^(n)| <= C * R**n * n! * M_n, together with
    the norm radius r and interval used by the class norm."""

    C: Fraction
    R: Fraction
    r: Fraction
    interval: Tuple[Fraction, Fraction]

    def __post_init__(self):
        C = _as_fraction(self.C)
        R = _as_fraction(self.R)
        r = _as_fraction(self.r)
        lo, hi = self.interval
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "interval", (_as_fraction(lo), _as_fraction(hi)))
        if C <= 0 or R <= 0 or r <= 0:
            raise ValueError("envelope constants must be positive")
        if self.interval[0] > self.interval[1]:
            raise ValueError("envelope interval endpoints out of order")

    def bound(self, seq: WeightSequence, n: int, bits: int) -> Interval:
        scale = self.C * self.R ** n * factorial(n)
        return seq.enclosure(n, bits) * scale


class BangFunction:
    """Truncated extremal series over a weight sequence with log-convex
    derived values.

    ``max_order`` is the largest derivative order evaluations will request;
    the truncation index K is chosen so the relative tail 2**(n-K+1) stays
    below ``tail_target`` for every n <= max_order (or pass K explicitly).
    Construction certifies m_k nondecreasing on [0, K] and fails otherwise.
    """

    def __init__(
        self,
        seq: WeightSequence,
        p: int = 2,
        variant: Optional[str] = None,
        max_order: int = 12,
        tail_target: RationalLike = Fraction(1, 2 ** 64),
        K: Optional[int] = None,
        cfg: ScalarConfig = DEFAULT_CONFIG,
    ):
        if p < 1:
            raise SequenceError("oscillator power p must be >= 1")
        self.seq = seq
        self.p = p
        self.variant = variant if variant is not None else ("cos" if p == 2 else "cp")
        if self.variant not in ("cos", "cp"):
            raise SequenceError(f"unknown oscillator variant {self.variant!r}")
        if self.variant == "cos" and p != 2:
            raise SequenceError("the cosine oscillator is the p = 2 construction")
        tau = _as_fraction(tail_target)
        if not 0 < tau < 1:
            raise SequenceError("tail target must lie in (0, 1)")
        self.tail_target = tau
        if max_order < 0:
            raise SequenceError("max_order must be nonnegative")
        self.max_order = max_order
        self.K = K if K is not None else max_order + _ceil_log2_inverse(tau) + 1
        if self.K < max_order:
            raise SequenceError("truncation K must be at least max_order")
        self._cfg = cfg
        self._enc_cache = _SyncedCache()
        self._trig_cache = _SyncedCache()
        self._verify_ratio_monotone(cfg)
        oracle = _log_convex_global_oracle(seq)
        self.tail_scope = "global" if oracle is not None else "window"
        self.tail_provenance = oracle

    def _verify_ratio_monotone(self, cfg: ScalarConfig):
        seq = self.seq
        for k in range(self.K):
            sign = compare_products(
                [(seq, k + 1, 2)],
                [(seq, k, 1), (seq, k + 2, 1)],
                cfg,
                lhs_scale=k + 1,
                rhs_scale=k + 2,
            )
            if sign is None:
                raise PrecisionError(
                    f"ratio monotonicity at k={k} unresolved at the precision cap"
                )
            if sign > 0:
                raise SequenceError(
                    f"derived sequence is not log-convex: m_{k} > m_{k + 1}; "
                    "the truncation tail bound needs nondecreasing ratios"
                )

    # -- cached enclosures -------------------------------------------------------

    def _mprime(self, k: int, bits: int) -> Interval:
        return self._enc_cache.get_or_compute(
            ("mp", k, bits), lambda: self.seq.enclosure(k, bits) * factorial(k)
        )

    def _ratio(self, k: int, bits: int) -> Interval:
        def compute():
            iv = self.seq.enclosure(k + 1, bits) * (k + 1) / self.seq.enclosure(k, bits)
            if not iv.strictly_positive():
                raise PrecisionError(f"ratio m_{k} not certified positive at {bits} bits")
            return iv.outward(bits + 8)

        return self._enc_cache.get_or_compute(("m", k, bits), compute)

    def _trig(self, k: int, xi: Fraction, bits: int) -> Tuple[Interval, Interval]:
        def compute():
            arg = self._ratio(k, bits) * (2 * xi)
            return iv_cos(arg, bits), iv_sin(arg, bits)

        return self._trig_cache.get_or_compute((k, xi, bits), compute)

    def relative_tail(self, n: int) -> Fraction:
        """Certified relative tail margin 2**(n-K+1) at derivative order n."""
        return Fraction(2) ** (n - self.K + 1)

    def tail_certified(self, n: int) -> bool:
        return self.relative_tail(n) <= self.tail_target

    def describe(self) -> str:
        return (
            f"bang({self.seq.describe()}, p={self.p}, variant={self.variant}, K={self.K})"
        )


def _bang_coef(B: BangFunction, n: int, k: int, bits: int) -> Interval:
    """M'_k (2 m_k)**(n-k), compressed; independent of the evaluation point."""

    def compute():
        # compress after the power: (2 m_k)**(n-k) has k-scaled denominators
        powed = (B._ratio(k, bits) * 2).pow_int(n - k).outward(bits + 8)
        return (B._mprime(k, bits) * powed).outward(bits + 8)

    return B._enc_cache.get_or_compute(("coef", n, k, bits), compute)


def _bang_sum(B: BangFunction, n: int, xi: Fraction, bits: int) -> Interval:
    r = n % 4
    total = Interval.point(0)
    for k in range(B.K + 1):
        if B.variant == "cos":
            if xi == 0:
                osc = (1, 0, -1, 0)[r]
                if osc == 0:
                    continue
                term = _bang_coef(B, n, k, bits) * osc
            else:
                c, s = B._trig(k, xi, bits)
                osc = (c, -s, -c, s)[r]
                term = _bang_coef(B, n, k, bits) * osc
        else:
            if n % B.p != 0:
                continue
            term = _bang_coef(B, n, k, bits)
        total = total + term
    return total


def bang_derivative(
    B: BangFunction, n: int, xi: RationalLike, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Scalar:
    """Term-wise n-th derivative of the truncated series at xi, widened by
    the certified geometric tail M'_n * 2**(n-K+1).

    The cosine variant accepts xi in [-1, 1]; the C_p variant only xi = 0
    (no certified tail exists elsewhere; see the module docstring).
    """
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    if n > B.K:
        raise ValueError(f"derivative order {n} exceeds the truncation K={B.K}")
    xq = _as_fraction(xi)
    if B.variant == "cp":
        if xq != 0:
            raise ValueError(
                "the C_p variant is certified at xi = 0 only: its derivative "
                "bound holds on [-1, 1] while the oscillator arguments grow "
                "without bound"
            )
    elif not -1 <= xq <= 1:
        raise ValueError("evaluation is supported on [-1, 1]")

    def enclosure(bits: int) -> Interval:
        attempt = bits
        for _ in range(cfg.max_doublings + 1):
            try:
                total = _bang_sum(B, n, xq, attempt)
                tail = Fraction(2) ** (n - B.K + 1) * B._mprime(n, attempt).hi
                return total.widen(tail)
            except PrecisionError:
                attempt *= 2
        raise PrecisionError(f"term enclosures at order {n} stayed unresolved")

    return make_scalar(cfg, None, enclosure)


def bang_lower_bound_certify(
    B: BangFunction, n: int, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Verdict:
    """Certified |F^(pn)(0)| >= M'_{pn}.

    At xi = 0 every term of order pn has the same sign and the k = pn term
    is exactly M'_{pn}, so partial sums of the truncated series are valid
    lower bounds; the verdict is Holds once the remaining terms are
    certified nonnegative."""
    if n < 0:
        raise ValueError("order index must be nonnegative")
    q = B.p * n if B.variant == "cp" else 2 * n
    if q > B.K:
        raise ValueError(f"need truncation K >= {q}")
    window = (n, n)
    bits = cfg.bits
    for _ in range(cfg.max_doublings + 1):
        try:
            total = abs(_bang_sum(B, q, Fraction(0), bits))
            target = B._mprime(q, bits)
            if total.lo >= target.hi:
                return Verdict.holds(
                    window,
                    provenance=(
                        "same-sign terms at 0: the partial sum bounds |F| from "
                        "below and contains the k = pn term M'_{pn} itself"
                    ),
                )
        except PrecisionError:
            pass
        bits *= 2
    return Verdict.inconclusive(
        window, Trend(note=f"lower bound at order {q} unresolved at the precision cap")
    )


def induced_f_derivative(
    B: BangFunction, n: int, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Tuple[Scalar, Verdict]:
    """The germ derivative f^(n)(0) = n!/(pn)! * F^(pn)(0), with the
    certified comparison |f^(n)(0)| >= n! M'_{pn} / (pn)!."""
    q = B.p * n if B.variant == "cp" else 2 * n
    scale = Fraction(factorial(n), factorial(q))
    scalar = make_scalar(
        cfg,
        None,
        lambda bits: bang_derivative(
            B, q, 0, cfg.with_mode("interval").with_bits(bits)
        ).interval()
        * scale,
    )
    verdict = bang_lower_bound_certify(B, n, cfg)
    if verdict.ok:
        verdict = Verdict.holds(
            (n, n),
            provenance=(
                "scaling the certified |F^(pn)(0)| >= M'_{pn} by the positive "
                "factor n!/(pn)!"
            ),
        )
    return scalar, verdict


def theorem1_bound(
    seq: WeightSequence,
    A: RationalLike,
    p: int,
    n: int,
    cfg: ScalarConfig = DEFAULT_CONFIG,
) -> Scalar:
    """The power-substitution derivative estimate
    n * (2e)**n * (e A)**(p n) * M'_{p n} / n**((p-1) n), certified."""
    Aq = _as_fraction(A)
    if Aq <= 0:
        raise ValueError("growth constant A must be positive")
    if p < 2 or n < 1:
        raise ValueError("need p >= 2 and n >= 1")

    def enclosure(bits: int) -> Interval:
        e = iv_e(bits)
        two_e_n = Interval(2 * e.lo, 2 * e.hi).pow_int(n)
        eA_pn = (e * Aq).pow_int(p * n)
        mp = seq.enclosure(p * n, bits) * factorial(p * n)
        return two_e_n * eA_pn * mp * Fraction(n, n ** ((p - 1) * n))

    return make_scalar(cfg, None, enclosure)


def bang_envelope_check(
    B: BangFunction,
    n_max: int,
    grid: Sequence[RationalLike],
    cfg: ScalarConfig = DEFAULT_CONFIG,
) -> Verdict:
    """Certified |F^(n)(xi)| <= 2**(n+1) M'_n over the grid for n <= n_max
    (the derived envelope: every term is at most 2**(n-k) M'_n in size)."""
    window = (0, n_max)
    xs = [_as_fraction(x) for x in grid]
    env = GrowthEnvelope(Fraction(2), Fraction(2), Fraction(1), (Fraction(-1), Fraction(1)))
    for n in range(n_max + 1):
        for x in xs:
            bits = cfg.bits
            decided = False
            for _ in range(cfg.max_doublings + 1):
                enc = abs(
                    bang_derivative(B, n, x, cfg.with_mode("interval").with_bits(bits)).interval()
                )
                # 2**(n+1) M'_n == C R**n n! M_n with C = R = 2
                rhs = env.bound(B.seq, n, bits)
                if enc.hi <= rhs.lo:
                    decided = True
                    break
                if enc.lo > rhs.hi:
                    return Verdict.fails(window, Witness(n, (f"xi={x}",)))
                bits *= 2
            if not decided:
                return Verdict.inconclusive(
                    window, Trend(note=f"n={n}, xi={x} unresolved at the precision cap")
                )
    return Verdict.holds(window)


# -- differentiable models and the class norm --------------------------------------


class PolynomialModel:
    """Exact polynomial model around 0: coefficient list of f = sum c_j x**j."""

    def __init__(self, coeffs: Sequence[RationalLike]):
        self.coeffs = tuple(_as_fraction(c) for c in coeffs)

    def derivative_enclosure(self, n: int, x: Fraction, bits: int) -> Interval:
        total = Fraction(0)
        for j in range(n, len(self.coeffs)):
            total += self.coeffs[j] * Fraction(factorial(j), factorial(j - n)) * x ** (j - n)
        return Interval.point(total)

    def describe(self) -> str:
        return f"polynomial(degree={len(self.coeffs) - 1})"


class CpModel:
    """The C_p oscillator as a model; p = 1 is exp."""

    def __init__(self, p: int):
        if p < 1:
            raise ValueError("oscillator power p must be >= 1")
        self.p = p

    def derivative_enclosure(self, n: int, x: Fraction, bits: int) -> Interval:
        if x == 0:
            return Interval.point(1 if n % self.p == 0 else 0)
        return _cp_series_interval(self.p, n, x, bits)

    def describe(self) -> str:
        return f"cp({self.p})"


class BangModel:
    """A truncated extremal series as a model (cosine variant)."""

    def __init__(self, B: BangFunction):
        self.B = B

    def derivative_enclosure(self, n: int, x: Fraction, bits: int) -> Interval:
        cfg = ScalarConfig(mode="interval", bits=bits)
        return bang_derivative(self.B, n, x, cfg).interval()

    def describe(self) -> str:
        return self.B.describe()


class PowerCompositeModel:
    """h(x) = base(x**p): derivatives by the composite-derivative formula
    with the exact inner jet of x -> x**p."""

    def __init__(self, base, p: int):
        if p < 1:
            raise ValueError("substitution power p must be >= 1")
        self.base = base
        self.p = p

    def derivative_enclosure(self, n: int, x: Fraction, bits: int) -> Interval:
        from .comb import composite_derivative

        if n == 0:
            return self.base.derivative_enclosure(0, x ** self.p, bits)
        inner = [
            Fraction(factorial(self.p), factorial(self.p - j)) * x ** (self.p - j)
            if j <= self.p
            else Fraction(0)
            for j in range(n + 1)
        ]
        inner[0] = x ** self.p
        outer = [
            self.base.derivative_enclosure(k, x ** self.p, bits) for k in range(n + 1)
        ]
        return composite_derivative(outer, inner, n).interval()

    def describe(self) -> str:
        return f"{self.base.describe()} o x**{self.p}"


def class_norm(
    model,
    seq: WeightSequence,
    interval: Tuple[RationalLike, RationalLike],
    r: RationalLike,
    n_max: int,
    grid: Union[int, Sequence[RationalLike]],
    cfg: ScalarConfig = DEFAULT_CONFIG,
) -> Scalar:
    """Window-relative lower estimate of the class norm
    sup |f^(n)(x)| / (r**n n! M_n) over n <= n_max and x in the grid.

    The returned enclosure brackets the maximum over the finite sample; the
    true norm is a sup over all n and x, so this is a certified lower bound
    of it, never a finiteness proof.
    """
    lo, hi = _as_fraction(interval[0]), _as_fraction(interval[1])
    if lo > hi:
        raise ValueError("interval endpoints out of order")
    rq = _as_fraction(r)
    if rq <= 0:
        raise ValueError("norm radius r must be positive")
    if isinstance(grid, int):
        if grid < 2:
            raise ValueError("grid needs at least two points")
        xs = [lo + (hi - lo) * Fraction(i, grid - 1) for i in range(grid)]
    else:
        xs = [_as_fraction(x) for x in grid]
        if any(not lo <= x <= hi for x in xs):
            raise ValueError("grid points must lie in the interval")

    def sweep(bits: int) -> Interval:
        best: Optional[Interval] = None
        for n in range(n_max + 1):
            denom = seq.enclosure(n, bits) * (factorial(n) * rq ** n)
            for x in xs:
                d = abs(model.derivative_enclosure(n, x, bits))
                val = d / denom
                best = val if best is None else Interval(
                    max(best.lo, val.lo), max(best.hi, val.hi)
                )
        return best

    return make_scalar(cfg, None, sweep)
