"""Class-level criteria: quasianalyticity, derivation closure, inclusion.

Divergence of the Carleman sum is not finitely observable, so numeric
sweeps alone never decide quasianalyticity.  Global verdicts come from
family oracles (constant, factorial-power, iterated-log families and their
power substitutions); anything else is reported Inconclusive together with
trend diagnostics from the partial sums.  The n-th roots appearing in the
closure and inclusion estimates are computed through interval exp/log with
precision refinement.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Tuple

from .scalar import (
    DEFAULT_CONFIG,
    Interval,
    Scalar,
    ScalarConfig,
    iv_pow,
    make_scalar,
)
from .seqcore import (
    Analytic,
    Custom,
    Gevrey,
    IteratedLog,
    PowerSub,
    SequenceError,
    Trend,
    Verdict,
    WeightSequence,
    Window,
    _check_window,
    _increasing_global_oracle,
)

EstimateResult = Tuple[Scalar, Verdict]


def dc_partial_sum(seq: WeightSequence, N: int, cfg: ScalarConfig = DEFAULT_CONFIG) -> Scalar:
    """Partial Carleman sum: sum_{n=0}^{N} M_n / ((n+1) M_{n+1})."""
    if N < 0:
        raise SequenceError("partial-sum bound N must be nonnegative")

    def exact_total() -> Optional[Fraction]:
        total = Fraction(0)
        for n in range(N + 1):
            a, b = seq.exact(n), seq.exact(n + 1)
            if a is None or b is None:
                return None
            total += a / ((n + 1) * b)
        return total

    def enclosure(bits: int) -> Interval:
        total = Interval.point(0)
        for n in range(N + 1):
            total = total + seq.enclosure(n, bits) / (seq.enclosure(n + 1, bits) * (n + 1))
        return total

    return make_scalar(cfg, exact_total(), enclosure)


def _flatten_power_sub(seq: WeightSequence) -> Tuple[WeightSequence, int]:
    p = 1
    while isinstance(seq, PowerSub):
        p *= seq.p
        seq = seq.base
    return seq, p


def _dc_trend(seq: WeightSequence, N: int, cfg: ScalarConfig) -> Trend:
    marks = sorted({max(1, N // 4), max(2, N // 2), N})
    points = []
    for m in marks:
        s = dc_partial_sum(seq, m, cfg.with_mode("interval"))
        points.append((m, float(s)))
    import math

    growth = None
    if len(points) >= 2 and points[-1][0] > points[-2][0]:
        ds = points[-1][1] - points[-2][1]
        dlog = math.log(points[-1][0]) - math.log(points[-2][0])
        growth = ds / dlog
    return Trend(last=tuple(points), growth=growth, note="partial-sum slope per log N")


def quasianalytic_verdict(
    seq: WeightSequence,
    cfg: ScalarConfig = DEFAULT_CONFIG,
    trend_window: int = 64,
) -> Verdict:
    """Global family-oracle verdict; Custom and regularized sequences get an
    Inconclusive with partial-sum trend data."""
    flat, total_p = _flatten_power_sub(seq)
    if isinstance(flat, Custom) and flat.length is not None:
        trend_window = min(trend_window, max(1, (flat.length - 2) // total_p))
    window = (0, trend_window)
    base, p = flat, total_p
    if isinstance(base, Analytic) or (isinstance(base, Gevrey) and base.s == 0):
        return Verdict.holds(
            window,
            scope="global",
            provenance="constant weights: the Carleman sum is the divergent harmonic series",
        )
    if isinstance(base, Gevrey):
        return Verdict(
            "fails",
            window,
            scope="global",
            provenance=(
                "factorial-power weights: Carleman terms decay like n**(-(s+1)), "
                "the sum converges; power substitution only enlarges the class"
            ),
        )
    if isinstance(base, IteratedLog):
        if p == 1:
            return Verdict.holds(
                window,
                scope="global",
                provenance="iterated-log weights: the Carleman sum diverges by condensation",
            )
        if base.k > 1:
            return Verdict.holds(
                window,
                scope="global",
                provenance=(
                    f"power-substituted iterated-log weights with depth k={base.k} > 1 "
                    "keep a divergent Carleman sum"
                ),
            )
        return Verdict(
            "fails",
            window,
            scope="global",
            provenance=(
                "power substitution of single-log weights concentrates growth: "
                "the Carleman sum converges"
            ),
        )
    return Verdict.inconclusive(
        window,
        trend=_dc_trend(seq, trend_window, cfg),
        provenance="no family oracle for this sequence; trend data only",
    )


def _root_of_ratio(
    num: WeightSequence, den: WeightSequence, n: int, root: int, bits: int
) -> Interval:
    """Enclosure of (num_n / den_n) ** (1/root)."""
    a, b = num.exact(n), den.exact(n)
    if a is not None and b is not None:
        return iv_pow(Interval.point(a / b), Fraction(1, root), bits)
    q = num.enclosure(n, bits) / den.enclosure(n, bits)
    return iv_pow(q, Fraction(1, root), bits)


class _ShiftedView(WeightSequence):
    """Index-shifted read-only view, for ratio roots (M_{n+1}/M_n)**(1/n)."""

    def __init__(self, base: WeightSequence, shift: int):
        super().__init__()
        self.base = base
        self.shift = shift

    def _exact(self, n):
        return self.base.exact(n + self.shift)

    def _root(self, n):
        return self.base.as_root(n + self.shift)

    def _enclosure(self, n, bits):
        return self.base.enclosure(n + self.shift, bits)


def _sweep_roots(
    num: WeightSequence, den: WeightSequence, window: Window, bits: int
) -> Tuple[Interval, int, list]:
    """Max over the window of (num_n/den_n)**(1/n); returns the enclosing
    interval of the max, the index attaining the largest lower bound, and the
    per-index values."""
    a, b = window
    best: Optional[Interval] = None
    best_n = a
    values = []
    for n in range(a, b + 1):
        r = _root_of_ratio(num, den, n, n, bits)
        values.append((n, r))
        if best is None:
            best, best_n = r, n
        else:
            if r.lo > best.lo:
                best_n = n
            best = Interval(max(best.lo, r.lo), max(best.hi, r.hi))
    return best, best_n, values


def _closure_global_oracle(seq: WeightSequence) -> Optional[str]:
    base, _p = _flatten_power_sub(seq)
    if isinstance(base, Analytic):
        return "constant weights: every ratio root equals 1"
    if isinstance(base, Gevrey):
        return "factorial-power weights: ratio roots (n+1)**(s/n) decrease to 1"
    if isinstance(base, IteratedLog):
        return "iterated-log weights: ratio roots tend to 1, so the family is derivation-closed"
    return None


def derivation_closure_estimate(
    seq: WeightSequence, window: Window = (1, 64), cfg: ScalarConfig = DEFAULT_CONFIG
) -> EstimateResult:
    """Window max of (M_{n+1}/M_n)**(1/n) plus a boundedness verdict."""
    a, b = _check_window(window, min_start=1)
    shifted = _ShiftedView(seq, 1)
    best, best_n, values = _sweep_roots(shifted, seq, (a, b), cfg.bits)
    exact = best.lo if best.is_point() else None
    scalar = make_scalar(
        cfg, exact, lambda bits: _sweep_roots(shifted, seq, (a, b), bits)[0]
    )
    oracle = _closure_global_oracle(seq)
    if oracle is not None:
        verdict = Verdict.holds(window, scope="global", provenance=oracle)
    else:
        tail = [(n, float(r.midpoint)) for n, r in values[-3:]]
        growth = tail[-1][1] / tail[-2][1] if len(tail) >= 2 and tail[-2][1] else None
        verdict = Verdict.inconclusive(
            window,
            trend=Trend(
                last=tuple(tail),
                growth=growth,
                note=f"window max ~{float(best.midpoint):.6g} at n={best_n}",
            ),
            provenance="boundedness of the sup is not finitely observable",
        )
    return scalar, verdict


def _inclusion_global_oracle(
    M: WeightSequence, N: WeightSequence
) -> Optional[str]:
    if M is N:
        return "identical sequences: every ratio root equals 1"
    if isinstance(M, Analytic) and _increasing_global_oracle(N) is not None:
        return "constant numerator over weights bounded below by 1"
    if isinstance(M, Gevrey) and isinstance(N, Gevrey) and M.s <= N.s:
        return "comparable factorial powers: ratio roots stay at most 1"
    if isinstance(M, Analytic) and isinstance(N, Analytic):
        return "identical sequences: every ratio root equals 1"
    return None


def inclusion_estimate(
    M: WeightSequence,
    N: WeightSequence,
    window: Window = (1, 64),
    cfg: ScalarConfig = DEFAULT_CONFIG,
) -> EstimateResult:
    """Window max of (M_n/N_n)**(1/n) plus a boundedness verdict."""
    a, b = _check_window(window, min_start=1)
    best, best_n, values = _sweep_roots(M, N, (a, b), cfg.bits)
    exact = best.lo if best.is_point() else None
    scalar = make_scalar(cfg, exact, lambda bits: _sweep_roots(M, N, (a, b), bits)[0])
    oracle = _inclusion_global_oracle(M, N)
    if oracle is not None:
        verdict = Verdict.holds(window, scope="global", provenance=oracle)
    else:
        tail = [(n, float(r.midpoint)) for n, r in values[-3:]]
        growth = tail[-1][1] / tail[-2][1] if len(tail) >= 2 and tail[-2][1] else None
        note = f"window max ~{float(best.midpoint):.6g} at n={best_n}"
        if len(values) >= 2 and all(
            values[i + 1][1].lo >= values[i][1].lo for i in range(len(values) - 1)
        ):
            note += "; monotone growth across the window"
        verdict = Verdict.inconclusive(
            window,
            trend=Trend(last=tuple(tail), growth=growth, note=note),
            provenance="boundedness of the sup is not finitely observable",
        )
    return scalar, verdict
