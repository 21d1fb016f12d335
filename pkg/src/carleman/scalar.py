"""Certified scalar arithmetic.

Three representations cover every real quantity in the toolkit:

* exact rationals (``fractions.Fraction``), used whenever a value is exactly
  representable;
* intervals with exact rational endpoints: ring operations are computed
  exactly on the endpoints, and transcendental functions are enclosed via
  mpmath's directed-rounding interval context;
* adjustable-precision floats (mpmath ``mpf``), for exploratory output only.

Every Holds/Fails verdict in the package is derived from the first two
representations; floats never feed a certified comparison.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

import mpmath
from mpmath import libmp

RationalLike = Union[int, Fraction]

_GUARD_BITS = 16

MODE_EXACT = "exact"
MODE_FLOAT = "float"
MODE_INTERVAL = "interval"
_MODES = (MODE_EXACT, MODE_FLOAT, MODE_INTERVAL)


class RangeError(ArithmeticError):
    """Float-mode result outside the configured exponent range."""


class PrecisionError(ArithmeticError):
    """A certified decision stayed unresolved at the precision cap."""


class ExactUnavailableError(ArithmeticError):
    """Exact-rational mode was requested for a non-rational quantity."""


@lru_cache(maxsize=None)
def _iv_ctx(bits: int) -> "mpmath.ctx_iv.MPIntervalContext":
    ctx = mpmath.ctx_iv.MPIntervalContext()
    ctx.prec = bits + _GUARD_BITS
    return ctx


@lru_cache(maxsize=None)
def _mp_ctx(bits: int) -> "mpmath.ctx_mp.MPContext":
    ctx = mpmath.ctx_mp.MPContext()
    ctx.prec = bits
    return ctx


def _as_fraction(v: RationalLike) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"expected an exact rational, got {type(v).__name__}")


def _fraction_from_mpf_tuple(t) -> Fraction:
    sign, man, exp, _bc = t
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise RangeError("non-finite interval endpoint")
    man = int(man)
    value = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -value if sign else value


def _rounded_tuple(q: Fraction, bits: int, rnd: str):
    return libmp.from_rational(q.numerator, q.denominator, bits, rnd)


def int_nth_root_floor(x: int, n: int) -> int:
    """Floor of the n-th root of a nonnegative integer."""
    if x < 0 or n < 1:
        raise ValueError("int_nth_root_floor requires x >= 0, n >= 1")
    if n == 1 or x in (0, 1):
        return x
    r = 1 << -(-x.bit_length() // n)
    while True:
        nr = ((n - 1) * r + x // r ** (n - 1)) // n
        if nr >= r:
            return r
        r = nr


def exact_nth_root(q: Fraction, n: int) -> Optional[Fraction]:
    """The exact n-th root of a positive rational, or None if irrational."""
    if q <= 0:
        raise ValueError("exact_nth_root requires a positive rational")
    rn = int_nth_root_floor(q.numerator, n)
    rd = int_nth_root_floor(q.denominator, n)
    if rn ** n == q.numerator and rd ** n == q.denominator:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class Interval:
    """Closed interval with exact rational endpoints, lo <= hi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo = _as_fraction(self.lo)
        hi = _as_fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo > hi:
            raise ValueError(f"interval endpoints out of order: {lo} > {hi}")

    @classmethod
    def point(cls, v: RationalLike) -> "Interval":
        q = _as_fraction(v)
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, v: RationalLike) -> bool:
        q = _as_fraction(v)
        return self.lo <= q <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def strictly_negative(self) -> bool:
        return self.hi < 0

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(Fraction(0), max(-self.lo, self.hi))

    @property
    def abs_hi(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.point(other)

    def __add__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Interval":
        o = self._coerce(other)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        # sign-split cases avoid min/max comparisons on large operands
        if a >= 0:
            if c >= 0:
                return Interval(a * c, b * d)
            if d <= 0:
                return Interval(b * c, a * d)
            return Interval(b * c, b * d)
        if b <= 0:
            if c >= 0:
                return Interval(a * d, b * c)
            if d <= 0:
                return Interval(b * d, a * c)
            return Interval(a * d, a * c)
        if c >= 0:
            return Interval(a * d, b * d)
        if d <= 0:
            return Interval(b * c, a * c)
        return Interval(min(a * d, b * c), max(a * c, b * d))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("reciprocal of an interval containing zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other) -> "Interval":
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other) * self.reciprocal()

    def pow_int(self, e: int) -> "Interval":
        if e == 0:
            return Interval.point(1)
        if e < 0:
            return self.reciprocal().pow_int(-e)
        lo, hi = self.lo, self.hi
        if lo >= 0:
            return Interval(lo ** e, hi ** e)
        if hi <= 0:
            if e % 2 == 0:
                return Interval(hi ** e, lo ** e)
            return Interval(lo ** e, hi ** e)
        if e % 2 == 0:
            return Interval(Fraction(0), max(lo ** e, hi ** e))
        return Interval(lo ** e, hi ** e)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def widen(self, margin: RationalLike) -> "Interval":
        m = _as_fraction(margin)
        if m < 0:
            raise ValueError("widening margin must be nonnegative")
        return Interval(self.lo - m, self.hi + m)

    def outward(self, bits: int) -> "Interval":
        """Endpoints outward-rounded to dyadics with the given mantissa size."""
        lo = _fraction_from_mpf_tuple(_rounded_tuple(self.lo, bits, "f"))
        hi = _fraction_from_mpf_tuple(_rounded_tuple(self.hi, bits, "c"))
        return Interval(lo, hi)

    def __repr__(self) -> str:
        if self.is_point():
            return f"[{self.lo}]"
        return f"[{mpmath.nstr(mpmath.mpf(float(self.lo)), 12)}, {mpmath.nstr(mpmath.mpf(float(self.hi)), 12)}]"


def _to_iv(ctx, x: Interval):
    prec = ctx.prec
    tlo = _rounded_tuple(x.lo, prec, "f")
    thi = _rounded_tuple(x.hi, prec, "c")
    return ctx.make_mpf((tlo, thi))


def _from_iv(v) -> Interval:
    ta, tb = v._mpi_
    return Interval(_fraction_from_mpf_tuple(ta), _fraction_from_mpf_tuple(tb))


def _unary(fn_name: str):
    def op(x: Union[Interval, RationalLike], bits: int) -> Interval:
        iv = x if isinstance(x, Interval) else Interval.point(x)
        ctx = _iv_ctx(bits)
        try:
            return _from_iv(getattr(ctx, fn_name)(_to_iv(ctx, iv)))
        except (libmp.ComplexResult, RangeError) as exc:
            raise ValueError(f"{fn_name} outside the real domain: {iv}") from exc

    return op


iv_exp = _unary("exp")
iv_log = _unary("log")
iv_cos = _unary("cos")
iv_sin = _unary("sin")
iv_sqrt = _unary("sqrt")


def iv_e(bits: int) -> Interval:
    return _from_iv(_iv_ctx(bits).e)


def iv_pi(bits: int) -> Interval:
    return _from_iv(_iv_ctx(bits).pi)


def iv_pow(x: Union[Interval, RationalLike], exponent: RationalLike, bits: int) -> Interval:
    """Enclosure of x**exponent; rational exponents require x > 0."""
    iv = x if isinstance(x, Interval) else Interval.point(x)
    q = _as_fraction(exponent)
    if q.denominator == 1:
        return iv.pow_int(q.numerator)
    if iv.lo <= 0:
        raise ValueError("rational powers need a strictly positive base interval")
    return iv_exp(iv_log(iv, bits) * q, bits)


@dataclass(frozen=True)
class ScalarConfig:
    """Requested representation and working precision for an operation."""

    mode: str = MODE_INTERVAL
    bits: int = 256
    max_doublings: int = 6
    float_exp_cap: int = 1 << 20

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"unknown scalar mode {self.mode!r}")
        if self.bits < 8:
            raise ValueError("mantissa size must be at least 8 bits")
        if self.max_doublings < 0:
            raise ValueError("max_doublings must be nonnegative")

    def with_mode(self, mode: str) -> "ScalarConfig":
        return ScalarConfig(mode, self.bits, self.max_doublings, self.float_exp_cap)

    def with_bits(self, bits: int) -> "ScalarConfig":
        return ScalarConfig(self.mode, bits, self.max_doublings, self.float_exp_cap)


DEFAULT_CONFIG = ScalarConfig()
EXACT_CONFIG = ScalarConfig(mode=MODE_EXACT)


@dataclass(frozen=True)
class Scalar:
    """A number in one of the three representations.

    Exactly one payload is populated: ``exact`` for exact-rational mode,
    ``approx`` for float mode, or the ``lo``/``hi`` pair for interval mode.
    """

    mode: str
    exact: Optional[Fraction] = None
    approx: object = None
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"unknown scalar mode {self.mode!r}")
        if self.mode == MODE_INTERVAL and self.lo > self.hi:
            raise ValueError("interval scalar endpoints out of order")

    @classmethod
    def from_fraction(cls, q: RationalLike) -> "Scalar":
        return cls(MODE_EXACT, exact=_as_fraction(q))

    @classmethod
    def from_interval(cls, iv: Interval) -> "Scalar":
        return cls(MODE_INTERVAL, lo=iv.lo, hi=iv.hi)

    @classmethod
    def from_float(cls, v) -> "Scalar":
        return cls(MODE_FLOAT, approx=v)

    def interval(self) -> Interval:
        if self.mode == MODE_EXACT:
            return Interval.point(self.exact)
        if self.mode == MODE_INTERVAL:
            return Interval(self.lo, self.hi)
        raise ExactUnavailableError("a float scalar carries no certified enclosure")

    def fraction(self) -> Fraction:
        if self.mode == MODE_EXACT:
            return self.exact
        raise ExactUnavailableError(f"scalar in {self.mode} mode has no exact value")

    def __float__(self) -> float:
        if self.mode == MODE_EXACT:
            return float(self.exact)
        if self.mode == MODE_FLOAT:
            return float(self.approx)
        return float((self.lo + self.hi) / 2)

    def __repr__(self) -> str:
        if self.mode == MODE_EXACT:
            return f"Scalar({self.exact})"
        if self.mode == MODE_FLOAT:
            return f"Scalar(~{self.approx})"
        return f"Scalar[{float(Fraction(self.lo)):.12g}, {float(Fraction(self.hi)):.12g}]"


def _float_from_fraction(q: Fraction, cfg: ScalarConfig):
    t = _rounded_tuple(q, cfg.bits, "n")
    _sign, man, exp, bc = t
    if man != 0 and abs(exp + bc) > cfg.float_exp_cap:
        raise RangeError(
            "value exceeds the float-mode exponent range; "
            "use interval or exact mode (log-domain) instead"
        )
    return _mp_ctx(cfg.bits).make_mpf(t)


def make_scalar(
    cfg: ScalarConfig,
    exact: Optional[Fraction],
    enclosure: Optional[Callable[[int], Interval]] = None,
) -> Scalar:
    """Package a value in the requested mode.

    ``exact`` is the exact rational value when one exists; ``enclosure`` maps
    a bit count to a certified enclosure and is required when ``exact`` is
    None.
    """
    if cfg.mode == MODE_EXACT:
        if exact is None:
            raise ExactUnavailableError(
                "value is not exactly rational; request interval or float mode"
            )
        return Scalar.from_fraction(exact)
    if cfg.mode == MODE_INTERVAL:
        iv = Interval.point(exact) if exact is not None else enclosure(cfg.bits)
        return Scalar.from_interval(iv.outward(cfg.bits))
    if exact is not None:
        return Scalar.from_float(_float_from_fraction(exact, cfg))
    iv = enclosure(cfg.bits + _GUARD_BITS)
    return Scalar.from_float(_float_from_fraction(iv.midpoint, cfg))


EnclosureFn = Callable[[int], Interval]


def refine_sign(diff: EnclosureFn, cfg: ScalarConfig) -> Optional[int]:
    """Certified sign of a quantity given by enclosures, refining precision.

    Returns -1, 0 (only for an exact zero-width enclosure) or +1; None when
    the sign stays unresolved after ``max_doublings`` refinements.
    """
    bits = cfg.bits
    for _ in range(cfg.max_doublings + 1):
        d = diff(bits)
        if d.hi < 0:
            return -1
        if d.lo > 0:
            return 1
        if d.lo == d.hi == 0:
            return 0
        bits *= 2
    return None


def certified_le(lhs: EnclosureFn, rhs: EnclosureFn, cfg: ScalarConfig) -> Optional[bool]:
    """Certified `lhs <= rhs`; None when unresolved at the precision cap."""
    bits = cfg.bits
    for _ in range(cfg.max_doublings + 1):
        a = lhs(bits)
        b = rhs(bits)
        if a.hi <= b.lo:
            return True
        if a.lo > b.hi:
            return False
        bits *= 2
    return None


def certified_lt(lhs: EnclosureFn, rhs: EnclosureFn, cfg: ScalarConfig) -> Optional[bool]:
    """Certified strict `lhs < rhs`; None when unresolved."""
    bits = cfg.bits
    for _ in range(cfg.max_doublings + 1):
        a = lhs(bits)
        b = rhs(bits)
        if a.hi < b.lo:
            return True
        if a.lo >= b.hi:
            return False
        bits *= 2
    return None


class _SyncedCache:
    """A tiny thread-safe memo table (results must be deterministic)."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key, compute):
        with self._lock:
            if key in self._data:
                return self._data[key]
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)


def decimal_str(q: Fraction, digits: int, direction: str) -> str:
    """Decimal rendering with directed rounding ('down' or 'up'), exact in
    integer arithmetic so emitted reports are deterministic."""
    if direction not in ("down", "up"):
        raise ValueError("direction must be 'down' or 'up'")
    scale = 10 ** digits
    scaled = q * scale
    n, d = scaled.numerator, scaled.denominator
    if direction == "down":
        units = n // d
    else:
        units = -((-n) // d)
    sign = "-" if units < 0 else ""
    units = abs(units)
    whole, frac = divmod(units, scale)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{str(frac).zfill(digits)}"


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError("factorial of a negative integer")
    return math.factorial(n)
