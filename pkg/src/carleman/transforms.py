"""Sequence-to-sequence transforms: power substitution and the greatest
log-convex minorant.

Power substitution sends M to n |-> M_{p n}; its derived form divides
M'_{p n} by n**((p-1) n).  Regularization returns, window-relative, the
largest log-convex sequence below the input: exponentials of the lower
convex hull of the points (n, log M_n).  Hull turn tests never touch logs
directly; the sign of a log-linear combination is decided by comparing
rational powers, exactly whenever every operand has a q**(1/d) form and by
interval refinement otherwise.  Collinear points are kept as vertices, so a
log-convex input is reproduced verbatim.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Tuple

from .scalar import (
    DEFAULT_CONFIG,
    Interval,
    PrecisionError,
    Scalar,
    ScalarConfig,
    exact_nth_root,
    factorial,
    iv_pow,
    make_scalar,
)
from .seqcore import (
    PowerSub,
    RootRep,
    SequenceError,
    WeightSequence,
    Window,
    compare_products,
)


def power_substitution(seq: WeightSequence, p: int) -> PowerSub:
    """The sequence n |-> M_{p n}; p = 0 is rejected."""
    return PowerSub(seq, p)


def derived_power_substitution(
    seq: WeightSequence, p: int, n: int, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Scalar:
    """M'_{p n} / n**((p-1) n), with the n = 0 value fixed to 1."""
    if not isinstance(p, int) or p < 1:
        raise SequenceError("power-substitution exponent p must be a positive integer")
    if n < 0:
        raise SequenceError("index must be nonnegative")
    if n == 0:
        return make_scalar(cfg, Fraction(1))
    scale = Fraction(factorial(p * n), n ** ((p - 1) * n))
    q = seq.exact(p * n)
    exact = scale * q if q is not None else None
    return make_scalar(cfg, exact, lambda bits: seq.enclosure(p * n, bits) * scale)


def _turn_sign(seq: WeightSequence, i: int, j: int, k: int, cfg: ScalarConfig) -> int:
    """Certified orientation of (i, log M_i), (j, log M_j), (k, log M_k).

    Positive when the middle point lies strictly below the chord (a convex
    corner of the lower hull), zero when collinear.
    """
    sign = compare_products(
        [(seq, i, k - j), (seq, k, j - i)],
        [(seq, j, k - i)],
        cfg,
    )
    if sign is None:
        raise PrecisionError(
            f"hull orientation of points {i}, {j}, {k} unresolved at the precision cap"
        )
    return sign


def _lower_log_hull(seq: WeightSequence, n_max: int, cfg: ScalarConfig) -> Tuple[int, ...]:
    """Monotone-chain lower hull vertex indices on [0, n_max], keeping
    collinear points."""
    stack: List[int] = []
    for k in range(n_max + 1):
        while len(stack) >= 2 and _turn_sign(seq, stack[-2], stack[-1], k, cfg) < 0:
            stack.pop()
        stack.append(k)
    return tuple(stack)


class Regularized(WeightSequence):
    """Greatest log-convex minorant of ``base`` on [0, n_max].

    Values at hull vertices equal the base values; between consecutive
    vertices a < b the value is the geometric interpolation
    (M_a**(b-n) * M_b**(n-a)) ** (1/(b-a)).  The transform is window-relative
    and refuses indices beyond n_max (the true minorant depends on the
    uncomputable tail).
    """

    def __init__(self, base: WeightSequence, n_max: int, vertices: Tuple[int, ...]):
        super().__init__()
        self.base = base
        self.n_max = n_max
        self.vertices = vertices
        self._vertex_set = frozenset(vertices)

    def _validate_index(self, n: int):
        super()._validate_index(n)
        if n > self.n_max:
            raise SequenceError(
                f"regularization is window-relative: index {n} beyond [0, {self.n_max}]"
            )

    def _bracket(self, n: int) -> Tuple[int, int]:
        a = max(v for v in self.vertices if v <= n)
        b = min(v for v in self.vertices if v >= n)
        return a, b

    def _exact(self, n: int) -> Optional[Fraction]:
        if n in self._vertex_set:
            return self.base.exact(n)
        rep = self._root(n)
        if rep is None:
            return None
        q, d = rep
        return q if d == 1 else exact_nth_root(q, d)

    def _root(self, n: int) -> Optional[RootRep]:
        if n in self._vertex_set:
            return self.base.as_root(n)
        a, b = self._bracket(n)
        ra, rb = self.base.as_root(a), self.base.as_root(b)
        if ra is None or rb is None:
            return None
        (qa, da), (qb, db) = ra, rb
        lcm = da * db // math.gcd(da, db)
        q = qa ** ((b - n) * lcm // da) * qb ** ((n - a) * lcm // db)
        return (q, lcm * (b - a))

    def _enclosure(self, n: int, bits: int) -> Interval:
        if n in self._vertex_set:
            return self.base.enclosure(n, bits)
        rep = self._root(n)
        if rep is not None:
            q, d = rep
            exact = exact_nth_root(q, d) if d > 1 else q
            if exact is not None:
                return Interval.point(exact)
            return iv_pow(q, Fraction(1, d), bits)
        a, b = self._bracket(n)
        prod = self.base.enclosure(a, bits).pow_int(b - n) * self.base.enclosure(
            b, bits
        ).pow_int(n - a)
        return iv_pow(prod, Fraction(1, b - a), bits)

    def describe(self) -> str:
        return f"regularized({self.base.describe()}, [0, {self.n_max}])"


def log_convex_regularization(
    seq: WeightSequence, window: Window, cfg: ScalarConfig = DEFAULT_CONFIG
) -> Regularized:
    """Greatest log-convex minorant of ``seq`` on window = (0, N), N >= 2.

    Raises PrecisionError when hull vertex membership cannot be resolved at
    the configured precision (possible only for non-rational sequences).
    """
    lo, hi = window
    if lo != 0:
        raise SequenceError("regularization window must start at 0")
    if hi < 2:
        raise SequenceError("regularization window must reach N >= 2")
    vertices = _lower_log_hull(seq, hi, cfg)
    return Regularized(seq, hi, vertices)
