"""Weight sequences and certified pointwise predicates.

A weight sequence is a strictly positive sequence M with M_0 = 1.  The
derived sequence is M'_n = n! * M_n and the ratio sequence is
m_k = M'_{k+1} / M'_k.  Built-in families:

* ``Analytic``       M_n = 1                        (the analytic class)
* ``Gevrey(s)``      M_n = (n!)**s
* ``IteratedLog(k)`` M_n = L(s+n)**(s+n) / L(s)**s  with L the k-fold log
                     and s a shift keeping L positive
* ``PowerSub(b, p)`` M_n = b_{p n}
* ``Custom``         finite table or generator rule (normalized to M_0 = 1)

Predicates return three-valued ``Verdict`` objects whose Holds/Fails
outcomes are certified: comparisons are exact whenever every operand has
an exact q**(1/d) representation, and otherwise use interval enclosures
with precision refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

from .scalar import (
    DEFAULT_CONFIG,
    Interval,
    RationalLike,
    Scalar,
    ScalarConfig,
    _SyncedCache,
    _as_fraction,
    factorial,
    iv_e,
    iv_exp,
    iv_log,
    make_scalar,
    refine_sign,
)

Window = Tuple[int, int]

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"

SCOPE_WINDOW = "window"
SCOPE_GLOBAL = "global"


class SequenceError(ValueError):
    """Invalid sequence construction or evaluation request."""


@dataclass(frozen=True)
class Witness:
    """Failure evidence: the first violating index and the values involved."""

    index: int
    values: Tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.values:
            return f"n={self.index}"
        return f"n={self.index}: " + ", ".join(self.values)


@dataclass(frozen=True)
class Trend:
    """Diagnostic data attached to an inconclusive verdict."""

    last: Tuple[Tuple[int, float], ...] = ()
    growth: Optional[float] = None
    note: Optional[str] = None

    def __str__(self) -> str:
        parts = []
        if self.last:
            parts.append("last " + ", ".join(f"({n}, {v:.6g})" for n, v in self.last))
        if self.growth is not None:
            parts.append(f"growth {self.growth:.6g}")
        if self.note:
            parts.append(self.note)
        return "; ".join(parts)


@dataclass(frozen=True)
class Verdict:
    """Three-valued certified outcome over an index window.

    A Holds with scope ``global`` was established by a family oracle; scope
    ``window`` covers only the checked range.  Fails always carries a witness
    reproducible by re-evaluation.
    """

    outcome: str
    window: Window
    scope: str = SCOPE_WINDOW
    witness: Optional[Witness] = None
    trend: Optional[Trend] = None
    provenance: Optional[str] = None

    @classmethod
    def holds(cls, window, scope=SCOPE_WINDOW, provenance=None) -> "Verdict":
        return cls(HOLDS, tuple(window), scope, provenance=provenance)

    @classmethod
    def fails(cls, window, witness: Witness, provenance=None) -> "Verdict":
        return cls(FAILS, tuple(window), SCOPE_WINDOW, witness=witness, provenance=provenance)

    @classmethod
    def inconclusive(cls, window, trend: Optional[Trend] = None, provenance=None) -> "Verdict":
        return cls(INCONCLUSIVE, tuple(window), SCOPE_WINDOW, trend=trend, provenance=provenance)

    @property
    def ok(self) -> bool:
        return self.outcome == HOLDS

    def __str__(self) -> str:
        bits = [f"{self.outcome} on [{self.window[0]}, {self.window[1]}]"]
        if self.outcome == HOLDS:
            bits.append(self.scope)
        if self.witness is not None:
            bits.append(f"witness {self.witness}")
        if self.trend is not None:
            bits.append(str(self.trend))
        if self.provenance:
            bits.append(self.provenance)
        return "; ".join(bits)


def _check_window(window: Window, min_start: int = 0) -> Window:
    a, b = window
    if a > b:
        raise SequenceError(f"empty window {window}")
    if a < min_start:
        raise SequenceError(f"window must start at n >= {min_start}, got {a}")
    return (a, b)


RootRep = Tuple[Fraction, int]  # value == q ** (1/d), q > 0, d >= 1


class WeightSequence:
    """Base class.  Subclasses implement ``_exact`` and, when values are not
    rational, ``_enclosure``; ``_root`` provides an exact q**(1/d) form when
    one exists (used for exact certified comparisons)."""

    def __init__(self):
        self._exact_cache = _SyncedCache()
        self._enclosure_cache = _SyncedCache()

    # -- representation hooks ------------------------------------------------

    def _exact(self, n: int) -> Optional[Fraction]:
        raise NotImplementedError

    def _root(self, n: int) -> Optional[RootRep]:
        q = self.exact(n)
        return (q, 1) if q is not None else None

    def _enclosure(self, n: int, bits: int) -> Interval:
        q = self.exact(n)
        if q is None:
            raise NotImplementedError(f"{type(self).__name__} has no enclosure rule")
        return Interval.point(q)

    # -- public accessors ----------------------------------------------------

    def exact(self, n: int) -> Optional[Fraction]:
        self._validate_index(n)
        return self._exact_cache.get_or_compute(n, lambda: self._exact(n))

    def as_root(self, n: int) -> Optional[RootRep]:
        self._validate_index(n)
        return self._root(n)

    def enclosure(self, n: int, bits: int) -> Interval:
        self._validate_index(n)
        return self._enclosure_cache.get_or_compute(
            (n, bits), lambda: self._enclosure(n, bits)
        )

    def _validate_index(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise SequenceError(f"sequence index must be a nonnegative integer, got {n!r}")

    def describe(self) -> str:
        return type(self).__name__

    def __repr__(self) -> str:
        return self.describe()


class Analytic(WeightSequence):
    """M_n = 1 for all n."""

    def _exact(self, n: int) -> Fraction:
        return Fraction(1)

    def describe(self) -> str:
        return "analytic"


class Gevrey(WeightSequence):
    """M_n = (n!)**s for a nonnegative rational s."""

    def __init__(self, s: RationalLike):
        super().__init__()
        self.s = _as_fraction(s)
        if self.s < 0:
            raise SequenceError("Gevrey exponent must be nonnegative")

    def _exact(self, n: int) -> Optional[Fraction]:
        if self.s.denominator == 1:
            return Fraction(factorial(n) ** self.s.numerator)
        from .scalar import exact_nth_root

        return exact_nth_root(
            Fraction(factorial(n) ** self.s.numerator), self.s.denominator
        )

    def _root(self, n: int) -> RootRep:
        return (Fraction(factorial(n) ** self.s.numerator), self.s.denominator)

    def _enclosure(self, n: int, bits: int) -> Interval:
        q, d = self._root(n)
        if d == 1:
            return Interval.point(q)
        from .scalar import iv_pow

        return iv_pow(q, Fraction(1, d), bits)

    def describe(self) -> str:
        return f"gevrey({self.s})"


def _log_chain(m: RationalLike, k: int, bits: int) -> Interval:
    x = Interval.point(m)
    for _ in range(k):
        x = iv_log(x, bits)
    return x


def _tetration_e(k: int, bits: int) -> Interval:
    """Enclosure of exp applied k-1 times to e (e, e**e, e**(e**e), ...)."""
    x = iv_e(bits)
    for _ in range(k - 1):
        x = iv_exp(x, bits)
    return x


def default_shift(k: int, cfg: ScalarConfig = DEFAULT_CONFIG) -> int:
    """Smallest integer exceeding the k-fold exponential tower of e,
    certified from interval enclosures."""
    if k < 1:
        raise SequenceError("iterated-log depth k must be >= 1")
    if k > 3:
        raise SequenceError(
            "the tower value for k > 3 has millions of digits; pass an explicit offset"
        )
    bits = cfg.bits
    for _ in range(cfg.max_doublings + 1):
        enc = _tetration_e(k, bits)
        m = math.floor(enc.lo)
        if enc.lo > m and enc.hi < m + 1:
            return m + 1
        bits *= 2
    raise SequenceError(f"could not certify the integer part of the k={k} tower")


class IteratedLog(WeightSequence):
    """M_n = L(s+n)**(s+n) / L(s)**s with L the k-fold logarithm.

    The shift s defaults to the smallest integer above the k-fold exponential
    tower of e, which makes the sequence log-convex from the start; smaller
    shifts are accepted as long as L stays positive.
    """

    def __init__(self, k: int, offset: Optional[int] = None, cfg: ScalarConfig = DEFAULT_CONFIG):
        super().__init__()
        if k < 1:
            raise SequenceError("iterated-log depth k must be >= 1")
        self.k = k
        if offset is None:
            self.shift = default_shift(k, cfg)
            self._default_shift = True
        else:
            if offset < 0:
                raise SequenceError("offset must be a nonnegative integer")
            self.shift = offset
            self._default_shift = False
        self._validate_shift(cfg)

    def _validate_shift(self, cfg: ScalarConfig):
        bits = cfg.bits
        for _ in range(cfg.max_doublings + 1):
            try:
                base = _log_chain(self.shift, self.k, bits)
            except ValueError as exc:
                raise SequenceError(
                    f"offset {self.shift} leaves the {self.k}-fold log undefined"
                ) from exc
            if base.lo > 0:
                return
            if base.hi <= 0:
                raise SequenceError(
                    f"offset {self.shift} makes the {self.k}-fold log nonpositive"
                )
            bits *= 2
        raise SequenceError(
            f"could not certify positivity of the {self.k}-fold log at offset {self.shift}"
        )

    def has_default_shift(self) -> bool:
        return self._default_shift

    def _exact(self, n: int) -> Optional[Fraction]:
        return Fraction(1) if n == 0 else None

    def _root(self, n: int) -> Optional[RootRep]:
        return (Fraction(1), 1) if n == 0 else None

    def _enclosure(self, n: int, bits: int) -> Interval:
        if n == 0:
            return Interval.point(1)
        s = self.shift
        num = _log_chain(s + n, self.k, bits).pow_int(s + n)
        den = _log_chain(s, self.k, bits).pow_int(s)
        # compress endpoints to dyadics: exact power quotients would otherwise
        # carry megabit numerators through downstream arithmetic
        return (num / den).outward(bits + 8)

    def describe(self) -> str:
        return f"iterlog({self.k}, offset={self.shift})"


class PowerSub(WeightSequence):
    """Power substitution: M_n = base_{p n}."""

    def __init__(self, base: WeightSequence, p: int):
        super().__init__()
        if not isinstance(p, int) or p < 1:
            raise SequenceError("power-substitution exponent p must be a positive integer")
        self.base = base
        self.p = p

    def _exact(self, n: int) -> Optional[Fraction]:
        return self.base.exact(self.p * n)

    def _root(self, n: int) -> Optional[RootRep]:
        return self.base.as_root(self.p * n)

    def _enclosure(self, n: int, bits: int) -> Interval:
        return self.base.enclosure(self.p * n, bits)

    def describe(self) -> str:
        return f"powersub({self.base.describe()}, {self.p})"


class Custom(WeightSequence):
    """Finite table or generator rule, normalized so that M_0 = 1."""

    def __init__(
        self,
        table: Optional[Sequence[RationalLike]] = None,
        rule: Optional[Callable[[int], RationalLike]] = None,
        name: str = "custom",
    ):
        super().__init__()
        if (table is None) == (rule is None):
            raise SequenceError("provide exactly one of table or rule")
        self.name = name
        self._rule = rule
        if table is not None:
            vals = tuple(_as_fraction(v) for v in table)
            if not vals:
                raise SequenceError("custom table must be nonempty")
            if any(v <= 0 for v in vals):
                raise SequenceError("custom sequence values must be strictly positive")
            self._table = tuple(v / vals[0] for v in vals)
        else:
            self._table = None
            v0 = _as_fraction(rule(0))
            if v0 <= 0:
                raise SequenceError("custom sequence values must be strictly positive")
            self._norm = v0

    @property
    def length(self) -> Optional[int]:
        return len(self._table) if self._table is not None else None

    def _exact(self, n: int) -> Fraction:
        if self._table is not None:
            if n >= len(self._table):
                raise SequenceError(
                    f"index {n} beyond the custom table (length {len(self._table)})"
                )
            return self._table[n]
        v = _as_fraction(self._rule(n))
        if v <= 0:
            raise SequenceError(f"custom rule produced a nonpositive value at n={n}")
        return v / self._norm

    def describe(self) -> str:
        return self.name


# -- certified product comparisons -------------------------------------------

Factor = Tuple[WeightSequence, int, int]  # (sequence, index, positive exponent)


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def compare_products(
    lhs: Sequence[Factor],
    rhs: Sequence[Factor],
    cfg: ScalarConfig = DEFAULT_CONFIG,
    lhs_scale: RationalLike = 1,
    rhs_scale: RationalLike = 1,
) -> Optional[int]:
    """Certified sign of lhs_scale*prod(lhs) - rhs_scale*prod(rhs).

    Factors are (sequence, index, exponent) triples with positive exponents;
    scales must be positive rationals.  Exact when every factor has a
    q**(1/d) representation, interval refinement otherwise; None when
    unresolved at the precision cap.
    """
    ls = _as_fraction(lhs_scale)
    rs = _as_fraction(rhs_scale)
    if ls <= 0 or rs <= 0:
        raise ValueError("comparison scales must be positive")
    roots_l = [seq.as_root(n) for seq, n, _ in lhs]
    roots_r = [seq.as_root(n) for seq, n, _ in rhs]
    if all(r is not None for r in roots_l + roots_r):
        den = _lcm([r[1] for r in roots_l + roots_r] or [1])
        left = ls ** den
        for (seq, n, e), (q, d) in zip(lhs, roots_l):
            left *= q ** (e * den // d)
        right = rs ** den
        for (seq, n, e), (q, d) in zip(rhs, roots_r):
            right *= q ** (e * den // d)
        return (left > right) - (left < right)

    def diff(bits: int) -> Interval:
        left = Interval.point(ls)
        for seq, n, e in lhs:
            left = left * seq.enclosure(n, bits).pow_int(e)
        right = Interval.point(rs)
        for seq, n, e in rhs:
            right = right * seq.enclosure(n, bits).pow_int(e)
        return left - right

    return refine_sign(diff, cfg)


# -- module operations ---------------------------------------------------------


def value(seq: WeightSequence, n: int, cfg: ScalarConfig = DEFAULT_CONFIG) -> Scalar:
    """M_n in the requested mode."""
    return make_scalar(cfg, seq.exact(n), lambda bits: seq.enclosure(n, bits))


def derived_value(seq: WeightSequence, n: int, cfg: ScalarConfig = DEFAULT_CONFIG) -> Scalar:
    """M'_n = n! * M_n in the requested mode."""
    f = factorial(n)
    q = seq.exact(n)
    exact = f * q if q is not None else None
    return make_scalar(cfg, exact, lambda bits: seq.enclosure(n, bits) * f)


def ratio(seq: WeightSequence, k: int, cfg: ScalarConfig = DEFAULT_CONFIG) -> Scalar:
    """m_k = M'_{k+1} / M'_k = (k+1) * M_{k+1} / M_k."""
    if k < 0:
        raise SequenceError("ratio index must be nonnegative")
    qa, qb = seq.exact(k + 1), seq.exact(k)
    exact = (k + 1) * qa / qb if qa is not None and qb is not None else None
    return make_scalar(
        cfg,
        exact,
        lambda bits: seq.enclosure(k + 1, bits) * (k + 1) / seq.enclosure(k, bits),
    )


def _increasing_global_oracle(seq: WeightSequence) -> Optional[str]:
    if isinstance(seq, Analytic):
        return "constant family"
    if isinstance(seq, Gevrey):
        return "factorial powers are nondecreasing"
    if isinstance(seq, IteratedLog):
        if seq.has_default_shift():
            return "iterated-log family rule: base above 1 with growing exponents"
        try:
            if seq.shift >= default_shift(seq.k):
                return "iterated-log family rule: base above 1 with growing exponents"
        except SequenceError:
            return None
        return None
    if isinstance(seq, PowerSub):
        inner = _increasing_global_oracle(seq.base)
        return None if inner is None else f"subsequence of an increasing family ({inner})"
    return None


def is_increasing(
    seq: WeightSequence, window: Window = (1, 64), cfg: ScalarConfig = DEFAULT_CONFIG
) -> Verdict:
    """Certified check that M_n <= M_{n+1} across the window."""
    a, b = _check_window(window)
    for n in range(a, b + 1):
        sign = compare_products([(seq, n, 1)], [(seq, n + 1, 1)], cfg)
        if sign is None:
            return Verdict.inconclusive(
                window,
                Trend(note=f"comparison at n={n} unresolved at the precision cap"),
            )
        if sign > 0:
            vals = (
                f"M_{n}={_display(seq, n, cfg)}",
                f"M_{n + 1}={_display(seq, n + 1, cfg)}",
            )
            return Verdict.fails(window, Witness(n, vals))
    oracle = _increasing_global_oracle(seq)
    if oracle is not None:
        return Verdict.holds(window, SCOPE_GLOBAL, provenance=oracle)
    return Verdict.holds(window)


def _log_convex_global_oracle(seq: WeightSequence) -> Optional[str]:
    if isinstance(seq, Analytic):
        return "constant family"
    if isinstance(seq, Gevrey):
        return "powers of the log-convex factorial sequence"
    if isinstance(seq, IteratedLog):
        if seq.has_default_shift():
            return "iterated-log family rule: log-convex from the tower shift"
        return None
    if isinstance(seq, PowerSub):
        inner = _log_convex_global_oracle(seq.base)
        return None if inner is None else f"affine reindexing of a log-convex family ({inner})"
    return None


def is_log_convex(
    seq: WeightSequence,
    window: Window = (1, 64),
    which: str = "base",
    cfg: ScalarConfig = DEFAULT_CONFIG,
) -> Verdict:
    """Certified check that M_n**2 <= M_{n-1} M_{n+1} (or the same for M')
    across a window starting at n >= 1."""
    if which not in ("base", "derived"):
        raise ValueError("which must be 'base' or 'derived'")
    a, b = _check_window(window, min_start=1)
    for n in range(a, b + 1):
        if which == "base":
            ls, rs = Fraction(1), Fraction(1)
        else:
            ls = Fraction(factorial(n)) ** 2
            rs = Fraction(factorial(n - 1)) * factorial(n + 1)
        sign = compare_products(
            [(seq, n, 2)], [(seq, n - 1, 1), (seq, n + 1, 1)], cfg, ls, rs
        )
        if sign is None:
            return Verdict.inconclusive(
                window,
                Trend(note=f"comparison at n={n} unresolved at the precision cap"),
            )
        if sign > 0:
            vals = tuple(
                f"M_{m}={_display(seq, m, cfg)}" for m in (n - 1, n, n + 1)
            )
            return Verdict.fails(window, Witness(n, vals))
    if which == "base":
        oracle = _log_convex_global_oracle(seq)
        if oracle is not None:
            return Verdict.holds(window, SCOPE_GLOBAL, provenance=oracle)
    return Verdict.holds(window)


def build_iterated_log(
    k: int, offset: Optional[int] = None, cfg: ScalarConfig = DEFAULT_CONFIG
) -> IteratedLog:
    """Iterated-log sequence with the certified default shift, or an explicit
    offset (rejected when it leaves the k-fold log nonpositive)."""
    return IteratedLog(k, offset, cfg)


def _display(seq: WeightSequence, n: int, cfg: ScalarConfig) -> str:
    q = seq.exact(n)
    if q is not None:
        return str(q)
    enc = seq.enclosure(n, cfg.bits)
    return f"~{float(enc.midpoint):.9g}"
