"""The certified verification suite: one check per quantitative claim the
toolkit implements, runnable as a batch with a deterministic report.

Each check returns a Verdict plus optional enclosure endpoints for the
report.  Sweep checks start their refinement ladder at a moderate mantissa
size and escalate on unresolved comparisons, so the configured precision is
an accuracy knob for reported enclosures, never a soundness knob.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from . import __version__
from .bang import (
    BangFunction,
    bang_derivative,
    bang_envelope_check,
    bang_lower_bound_certify,
    cp_bound_check,
    cp_derivative,
    induced_f_derivative,
)
from .comb import (
    b_coefficient_bound_check,
    composition_sum_oracle,
    lemma1_check,
    lemma2_check,
    log_power_coefficients,
    root_series_coefficients,
    stirling_factorial_bounds_check,
    stirling_sweep,
    taylor_remainder_reconstruct,
)
from .criteria import quasianalytic_verdict
from .scalar import Interval, ScalarConfig
from .seqcore import (
    Analytic,
    Custom,
    Gevrey,
    IteratedLog,
    PowerSub,
    SequenceError,
    Verdict,
    Witness,
    is_log_convex,
)
from .transforms import log_convex_regularization


@dataclass(frozen=True)
class RunConfig:
    """Verification run parameters.  Sweep bounds default to the pinned
    sizes of the acceptance checks; shrinking them runs a subset."""

    precision: int = 256
    window: Tuple[int, int] = (1, 64)
    k_max: int = 40
    n_max: int = 40
    p_set: Tuple[int, ...] = (2, 3, 5)
    x_grid: Tuple[Fraction, ...] = (
        Fraction(1, 4),
        Fraction(1, 2),
        Fraction(1),
        Fraction(2),
    )
    tail_target: Fraction = Fraction(1, 2 ** 64)
    format: str = "json"
    seed: int = 20250809
    digits: int = 30
    corollary_k_max: int = 6
    corollary_n_max: int = 18
    lemma2_n_max: int = 25
    stirling_n_max: int = 60
    bang_cos_n_max: int = 10
    bang_cp_n_max: int = 6
    bang_cp_p: int = 3
    envelope_n_max: int = 12
    envelope_grid: int = 101
    cp_p_max: int = 5
    cp_grid: int = 51
    remainder_cases: int = 200
    transform_cases: int = 1000
    transform_window: int = 32
    germ_n_max: int = 8
    bang_seq: str = "iterlog(2)"

    def __post_init__(self):
        if self.precision < 64:
            raise ValueError("precision must be at least 64 bits")
        if self.window[0] > self.window[1]:
            raise ValueError("window must be nonempty")
        if any(x <= 0 for x in self.x_grid):
            raise ValueError("x grid values must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    def scalar_config(self) -> ScalarConfig:
        return ScalarConfig(bits=self.precision)

    def sweep_config(self) -> ScalarConfig:
        # inequality sweeps refine upward from a moderate start; the final
        # comparisons are certified at whatever precision resolved them
        return ScalarConfig(bits=min(128, self.precision), max_doublings=8)


@dataclass
class CheckOutcome:
    verdict: Verdict
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    witness: str = ""


CheckFn = Callable[[RunConfig], CheckOutcome]
_REGISTRY: List[Tuple[str, str, CheckFn]] = []


def _check(check_id: str, anchor: str):
    def deco(fn: CheckFn) -> CheckFn:
        _REGISTRY.append((check_id, anchor, fn))
        return fn

    return deco


def _outcome(verdict: Verdict, enclosure: Optional[Interval] = None) -> CheckOutcome:
    out = CheckOutcome(verdict)
    if enclosure is not None:
        out.lower, out.upper = enclosure.lo, enclosure.hi
    if verdict.witness is not None:
        out.witness = str(verdict.witness)
    elif verdict.trend is not None:
        out.witness = str(verdict.trend)
    return out


# -- series and inequality checks ------------------------------------------------


@_check(
    "corollary-composition-equality",
    "sum over compositions of 1/(i1*...*ik) equals the series coefficient c[k,n]",
)
def _corollary(config: RunConfig) -> CheckOutcome:
    kmax, nmax = config.corollary_k_max, config.corollary_n_max
    for k in range(1, kmax + 1):
        series = log_power_coefficients(k, nmax)
        for n in range(k, nmax + 1):
            if series.coeff(n) != composition_sum_oracle(k, n):
                return _outcome(
                    Verdict.fails((1, nmax), Witness(n, (f"k={k}",)))
                )
    return _outcome(Verdict.holds((1, nmax)))


@_check("lemma1-coefficient-bound", "c[k,n] <= (2e)**n * k!/n**k")
def _lemma1(config: RunConfig) -> CheckOutcome:
    return _outcome(lemma1_check(config.k_max, config.n_max, config.sweep_config()))


@_check("a-coefficient-bound", "|a_i| <= 1/i for the (1+u)**(1/p) coefficients")
def _a_bound(config: RunConfig) -> CheckOutcome:
    nmax = config.n_max
    for p in config.p_set:
        series = root_series_coefficients(p, nmax)
        for i in range(1, nmax + 1):
            if abs(series.coeff(i)) > Fraction(1, i):
                return _outcome(Verdict.fails((1, nmax), Witness(i, (f"p={p}",))))
    return _outcome(Verdict.holds((1, nmax)))


@_check("b-coefficient-bound", "|b_n| <= (2e)**n / n**k")
def _b_bound(config: RunConfig) -> CheckOutcome:
    for p in config.p_set:
        v = b_coefficient_bound_check(p, 10, 30, config.sweep_config())
        if not v.ok:
            return _outcome(v)
    return _outcome(Verdict.holds((1, 30)))


@_check(
    "lemma2-diagonal-derivative-bound",
    "|alpha_k^(n)(x,x)| <= (2e)**n * n**(n-k) * x**(-(pn-k)/p)",
)
def _lemma2(config: RunConfig) -> CheckOutcome:
    return _outcome(
        lemma2_check(
            config.p_set, config.lemma2_n_max, config.x_grid, config.sweep_config()
        )
    )


@_check("stirling-reciprocal-factorial", "1/(pn-k)! <= e**(pn) / n**(pn-k)")
def _stirling(config: RunConfig) -> CheckOutcome:
    return _outcome(
        stirling_sweep(config.p_set, config.stirling_n_max, config.sweep_config())
    )


@_check(
    "stirling-two-sided-factorial",
    "sqrt(2 pi n) (n/e)**n < n! < e sqrt(n) (n/e)**n for n >= 2",
)
def _stirling_two_sided(config: RunConfig) -> CheckOutcome:
    return _outcome(
        stirling_factorial_bounds_check(config.stirling_n_max, config.sweep_config())
    )


# -- extremal-series checks --------------------------------------------------------


def _build_bang(config: RunConfig, p: int, max_order: int) -> BangFunction:
    from .cli import parse_sequence_spec

    seq = parse_sequence_spec(config.bang_seq)
    return BangFunction(
        seq,
        p=p,
        max_order=max_order,
        tail_target=config.tail_target,
        cfg=config.sweep_config(),
    )


@_check("bang-cos-lower-bound", "|F^(2n)(0)| >= M'_2n for the cosine series")
def _bang_cos_lower(config: RunConfig) -> CheckOutcome:
    nmax = config.bang_cos_n_max
    try:
        B = _build_bang(config, 2, 2 * nmax)
    except (SequenceError, ValueError) as exc:
        return _outcome(
            Verdict.fails((0, nmax), Witness(0, (f"construction gate: {exc}",)))
        )
    cfg = config.sweep_config()
    for n in range(nmax + 1):
        v = bang_lower_bound_certify(B, n, cfg)
        if not v.ok:
            return _outcome(v)
    top = abs(bang_derivative(B, 2 * nmax, 0, cfg).interval())
    return _outcome(Verdict.holds((0, nmax)), top)


@_check("bang-cp-lower-bound", "|F^(pn)(0)| >= M'_pn for the C_p series")
def _bang_cp_lower(config: RunConfig) -> CheckOutcome:
    p, nmax = config.bang_cp_p, config.bang_cp_n_max
    try:
        B = _build_bang(config, p, p * nmax)
    except (SequenceError, ValueError) as exc:
        return _outcome(
            Verdict.fails((0, nmax), Witness(0, (f"construction gate: {exc}",)))
        )
    cfg = config.sweep_config()
    for n in range(nmax + 1):
        v = bang_lower_bound_certify(B, n, cfg)
        if not v.ok:
            return _outcome(v)
    top = abs(bang_derivative(B, p * nmax, 0, cfg).interval())
    return _outcome(Verdict.holds((0, nmax)), top)


@_check("bang-tail-certificate", "relative truncation tail 2**(n-K+1) <= target")
def _bang_tail(config: RunConfig) -> CheckOutcome:
    orders = (
        (2, 2 * config.bang_cos_n_max),
        (config.bang_cp_p, config.bang_cp_p * config.bang_cp_n_max),
    )
    worst = Fraction(0)
    for p, max_order in orders:
        B = _build_bang(config, p, max_order)
        for n in range(max_order + 1):
            margin = B.relative_tail(n)
            worst = max(worst, margin)
            if margin > config.tail_target:
                return _outcome(
                    Verdict.fails((0, max_order), Witness(n, (f"p={p}",)))
                )
    return _outcome(
        Verdict.holds((0, max(o for _, o in orders))), Interval.point(worst)
    )


@_check("bang-envelope", "|F^(n)(xi)| <= 2**(n+1) * M'_n on [-1, 1]")
def _bang_envelope(config: RunConfig) -> CheckOutcome:
    nmax = config.envelope_n_max
    B = _build_bang(config, 2, max(nmax, 2 * config.bang_cos_n_max))
    g = config.envelope_grid
    grid = [Fraction(-1) + Fraction(2 * i, g - 1) for i in range(g)]
    return _outcome(bang_envelope_check(B, nmax, grid, config.sweep_config()))


@_check("cp-derivative-bound", "|C_p^(n)(x)| <= e on [-1, 1] for n <= 4p")
def _cp_bound(config: RunConfig) -> CheckOutcome:
    g = config.cp_grid
    grid = [Fraction(-1) + Fraction(2 * i, g - 1) for i in range(g)]
    for p in range(1, config.cp_p_max + 1):
        v = cp_bound_check(p, 4 * p, grid, config.sweep_config())
        if not v.ok:
            return _outcome(v)
    return _outcome(Verdict.holds((0, 4 * config.cp_p_max)))


@_check("cp-periodicity", "C_p^(p) = C_p pointwise within combined enclosures")
def _cp_periodicity(config: RunConfig) -> CheckOutcome:
    cfg = config.sweep_config()
    width_cap = Fraction(1, 2 ** 64)
    g = config.cp_grid
    grid = [Fraction(-1) + Fraction(2 * i, g - 1) for i in range(g)]
    worst = Fraction(0)
    for p in range(1, config.cp_p_max + 1):
        for x in grid:
            a = cp_derivative(p, p, x, cfg).interval()
            b = cp_derivative(p, 0, x, cfg).interval()
            if not a.overlaps(b):
                return _outcome(
                    Verdict.fails((0, config.cp_p_max), Witness(p, (f"x={x}",)))
                )
            combined = a.width + b.width
            worst = max(worst, combined)
            if combined > width_cap:
                return _outcome(
                    Verdict.fails(
                        (0, config.cp_p_max),
                        Witness(p, (f"x={x}", f"width={float(combined):.3g}")),
                    )
                )
    return _outcome(Verdict.holds((0, config.cp_p_max)), Interval.point(worst))


# -- randomized identities ----------------------------------------------------------


def _poly_eval(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_diff(coeffs):
    return [c * i for i, c in enumerate(coeffs)][1:] or [Fraction(0)]


def _poly_jet(coeffs, x, order):
    out, cur = [], list(coeffs)
    for _ in range(order + 1):
        out.append(_poly_eval(cur, x))
        cur = _poly_diff(cur)
    return out


@_check(
    "remainder-reconstruction",
    "f^(n)(x) = sum_k R_n^(k)(xi) * alpha_k^(n)(x,x), exactly on polynomials",
)
def _remainder(config: RunConfig) -> CheckOutcome:
    rng = random.Random(config.seed)
    cases = config.remainder_cases
    for case in range(cases):
        deg = rng.randint(0, 8)
        f = [Fraction(rng.randint(-30, 30), rng.randint(1, 12)) for _ in range(deg + 1)]
        p = rng.choice((2, 3))
        n = rng.randint(1, 8)
        xi = Fraction(rng.randint(1, 31), 32)
        Fpoly = [Fraction(0)] * (deg * p + 1)
        for j, c in enumerate(f):
            Fpoly[j * p] = c
        F_jet = _poly_jet(Fpoly, xi, n)
        f_jet0 = _poly_jet(f, Fraction(0), n - 1)
        got = taylor_remainder_reconstruct(f_jet0, F_jet, p, xi).fraction()
        want = _poly_jet(f, xi ** p, n)[n]
        if got != want:
            return _outcome(
                Verdict.fails((1, cases), Witness(case, (f"p={p}", f"n={n}", f"xi={xi}")))
            )
    return _outcome(Verdict.holds((1, cases)))


@_check("family-quasianalytic-verdicts", "quasianalyticity by family oracle")
def _family_verdicts(config: RunConfig) -> CheckOutcome:
    cases = [
        (Analytic(), "holds"),
        (Gevrey(1), "fails"),
        (IteratedLog(1), "holds"),
        (IteratedLog(2), "holds"),
        (IteratedLog(3), "holds"),
        (PowerSub(IteratedLog(1), 2), "fails"),
        (PowerSub(IteratedLog(1), 3), "fails"),
        (PowerSub(IteratedLog(2), 2), "holds"),
        (PowerSub(IteratedLog(2), 5), "holds"),
        (PowerSub(IteratedLog(3), 2), "holds"),
    ]
    for i, (seq, expected) in enumerate(cases):
        got = quasianalytic_verdict(seq).outcome
        if got != expected:
            return _outcome(
                Verdict.fails(
                    (0, len(cases) - 1),
                    Witness(i, (seq.describe(), f"expected {expected}", f"got {got}")),
                )
            )
    return _outcome(Verdict.holds((0, len(cases) - 1)))


def _random_table(rng: random.Random, length: int) -> List[Fraction]:
    return [Fraction(1)] + [
        Fraction(rng.randint(1, 4096), rng.randint(1, 4096)) for _ in range(length)
    ]


@_check("powersub-identity", "power substitution with p = 1 is the identity")
def _powersub_identity(config: RunConfig) -> CheckOutcome:
    rng = random.Random(config.seed + 1)
    N = config.transform_window
    cases = max(1, config.transform_cases // 10)
    for case in range(cases):
        seq = Custom(table=_random_table(rng, N))
        ps = PowerSub(seq, 1)
        for n in range(N + 1):
            if ps.exact(n) != seq.exact(n):
                return _outcome(Verdict.fails((0, N), Witness(n, (f"case={case}",))))
    return _outcome(Verdict.holds((0, N)))


@_check("powersub-composition", "nested power substitutions compose: p then q is pq")
def _powersub_composition(config: RunConfig) -> CheckOutcome:
    rng = random.Random(config.seed + 2)
    N = config.transform_window
    cases = max(1, config.transform_cases // 10)
    for case in range(cases):
        seq = Custom(table=_random_table(rng, N))
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        nested = PowerSub(PowerSub(seq, p), q)
        direct = PowerSub(seq, p * q)
        for n in range(N // (p * q) + 1):
            if nested.exact(n) != direct.exact(n):
                return _outcome(
                    Verdict.fails((0, N), Witness(n, (f"case={case}", f"p={p}", f"q={q}")))
                )
    return _outcome(Verdict.holds((0, N)))


@_check(
    "regularization-laws",
    "greatest log-convex minorant: below the input, log-convex, idempotent",
)
def _regularization_laws(config: RunConfig) -> CheckOutcome:
    rng = random.Random(config.seed + 3)
    N = config.transform_window
    window = (0, N)
    for case in range(config.transform_cases):
        seq = Custom(table=_random_table(rng, N))
        reg = log_convex_regularization(seq, window)
        for n in range(N + 1):
            q, d = reg.as_root(n)
            if q > seq.exact(n) ** d:
                return _outcome(
                    Verdict.fails(window, Witness(n, (f"case={case}", "not a minorant")))
                )
        if not is_log_convex(reg, (1, N - 1)).ok:
            return _outcome(
                Verdict.fails(window, Witness(case, ("output not log-convex",)))
            )
        reg2 = log_convex_regularization(reg, window)
        for n in range(N + 1):
            qa, da = reg.as_root(n)
            qb, db = reg2.as_root(n)
            if qa ** db != qb ** da:
                return _outcome(
                    Verdict.fails(window, Witness(n, (f"case={case}", "not idempotent")))
                )
    return _outcome(Verdict.holds(window))


@_check("induced-germ-lower-bound", "|f^(n)(0)| >= n! * M'_pn / (pn)!")
def _germ_lower(config: RunConfig) -> CheckOutcome:
    cfg = config.sweep_config()
    worst: Optional[Interval] = None
    for p in (2, config.bang_cp_p):
        try:
            B = _build_bang(config, p, p * config.germ_n_max)
        except (SequenceError, ValueError) as exc:
            return _outcome(
                Verdict.fails(
                    (0, config.germ_n_max), Witness(0, (f"construction gate: {exc}",))
                )
            )
        for n in range(config.germ_n_max + 1):
            scalar, verdict = induced_f_derivative(B, n, cfg)
            if not verdict.ok:
                return _outcome(verdict)
            worst = abs(scalar.interval())
    return _outcome(Verdict.holds((0, config.germ_n_max)), worst)


# -- the suite ----------------------------------------------------------------------


@dataclass
class Record:
    id: str
    anchor: str
    verdict: str
    witness: str
    lower: str
    upper: str
    seconds: float


@dataclass
class Report:
    version: str
    config: dict
    records: List[Record]
    metadata: dict = field(default_factory=dict)

    def exit_code(self) -> int:
        if any(r.verdict == "fails" for r in self.records):
            return 1
        if any(r.verdict == "inconclusive" for r in self.records):
            return 2
        return 0


def config_to_dict(config: RunConfig) -> dict:
    out = {}
    for f in fields(config):
        v = getattr(config, f.name)
        if isinstance(v, Fraction):
            out[f.name] = f"{v.numerator}/{v.denominator}"
        elif isinstance(v, tuple):
            out[f.name] = ",".join(
                f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else str(x)
                for x in v
            )
        else:
            out[f.name] = v
    return out


def check_ids() -> List[str]:
    return [cid for cid, _, _ in _REGISTRY]


def _clamp_to_window(config: RunConfig) -> RunConfig:
    """Shrink every sweep bound to the configured window top, so small
    windows run a fast subset of the full suite."""
    top = config.window[1]
    clamped = {
        name: min(getattr(config, name), max(2, top))
        for name in (
            "k_max", "n_max", "corollary_k_max", "corollary_n_max",
            "lemma2_n_max", "stirling_n_max", "bang_cos_n_max",
            "bang_cp_n_max", "envelope_n_max", "transform_window", "germ_n_max",
        )
    }
    import dataclasses

    return dataclasses.replace(config, **clamped)


def run_checks(
    config: RunConfig, only: Optional[Sequence[str]] = None
) -> Report:
    from .scalar import decimal_str

    config = _clamp_to_window(config)
    records = []
    for cid, anchor, fn in _REGISTRY:
        if only is not None and cid not in only:
            continue
        start = time.perf_counter()
        out = fn(config)
        elapsed = time.perf_counter() - start
        lower = decimal_str(out.lower, config.digits, "down") if out.lower is not None else ""
        upper = decimal_str(out.upper, config.digits, "up") if out.upper is not None else ""
        records.append(
            Record(
                id=cid,
                anchor=anchor,
                verdict=out.verdict.outcome,
                witness=out.witness,
                lower=lower,
                upper=upper,
                seconds=round(elapsed, 6),
            )
        )
    records.sort(key=lambda r: r.id)
    return Report(
        version=__version__,
        config=config_to_dict(config),
        records=records,
        metadata={"created": time.strftime("%Y-%m-%dT%H:%M:%S"), "decimal_digits": config.digits},
    )


def run_verify_suite(config: RunConfig) -> Report:
    """Run every registered check and assemble the deterministic report."""
    return run_checks(config)
