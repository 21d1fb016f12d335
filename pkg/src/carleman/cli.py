"""Command-line driver: sequence inspection, transforms, criteria runs,
series combinatorics, extremal-series synthesis, and the full verification
suite with JSON/CSV report emission.

Exit codes: 0 when every emitted verdict holds, 1 on any failure, 2 on an
inconclusive verdict where a resolution was expected, 3 and up for usage
and configuration errors.

Report determinism: identical configuration and seed produce byte-identical
CSV output.  Wall-clock timings therefore live in the JSON records and the
metadata section only; the CSV keeps its `seconds` column empty.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .bang import (
    BangFunction,
    BangModel,
    CpModel,
    PolynomialModel,
    PowerCompositeModel,
    bang_derivative,
    bang_lower_bound_certify,
    class_norm,
    induced_f_derivative,
)
from .comb import (
    lemma1_check,
    lemma2_check,
    log_power_coefficients,
    stirling_sweep,
)
from .criteria import (
    dc_partial_sum,
    derivation_closure_estimate,
    inclusion_estimate,
    quasianalytic_verdict,
)
from .scalar import PrecisionError, Scalar, ScalarConfig, decimal_str
from .seqcore import (
    Analytic,
    Custom,
    Gevrey,
    IteratedLog,
    PowerSub,
    SequenceError,
    Verdict,
    WeightSequence,
    is_increasing,
    is_log_convex,
    value,
)
from .transforms import log_convex_regularization, power_substitution
from .verify import Record, Report, RunConfig, check_ids, run_checks, run_verify_suite

EXIT_FAILS = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3

ENV_PRECISION = "CARLEMAN_PRECISION"


class ConfigError(ValueError):
    """Invalid config file or sequence/model specification."""


# -- value parsing ------------------------------------------------------------------


def parse_fraction(text: str) -> Fraction:
    """Rationals as 'a', 'a/b', or the power form '2^-64'."""
    t = text.strip()
    try:
        if "^" in t:
            base, _, exp = t.partition("^")
            return Fraction(int(base)) ** int(exp)
        return Fraction(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse rational {text!r}") from exc


def _split_top_level(text: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ConfigError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ConfigError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_sequence_spec(spec: str) -> WeightSequence:
    """Sequence expressions: analytic, gevrey(s), iterlog(k[,offset]),
    powersub(<seq>,p), custom(v0,v1,...)."""
    s = spec.strip()
    if not s:
        raise ConfigError("empty sequence spec")
    if "(" not in s:
        if s == "analytic":
            return Analytic()
        raise ConfigError(f"unknown sequence family {s!r}")
    head, _, rest = s.partition("(")
    if not rest.endswith(")"):
        raise ConfigError(f"unbalanced parentheses in {spec!r}")
    args = _split_top_level(rest[:-1])
    try:
        if head == "gevrey":
            (sv,) = args
            return Gevrey(parse_fraction(sv))
        if head == "iterlog":
            if len(args) == 1:
                return IteratedLog(int(args[0]))
            k, offset = args
            return IteratedLog(int(k), int(offset))
        if head == "powersub":
            inner, p = args
            return PowerSub(parse_sequence_spec(inner), int(p))
        if head == "custom":
            return Custom(table=[parse_fraction(a) for a in args])
    except (ValueError, SequenceError) as exc:
        raise ConfigError(f"invalid sequence spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown sequence family {head!r}")


def parse_model_spec(spec: str, seq: WeightSequence, config: RunConfig):
    """Model expressions: poly(c0,...), cp(p), bang(p), compose(<model>,p)."""
    s = spec.strip()
    head, _, rest = s.partition("(")
    if not rest.endswith(")"):
        raise ConfigError(f"unbalanced parentheses in {spec!r}")
    args = _split_top_level(rest[:-1])
    try:
        if head == "poly":
            return PolynomialModel([parse_fraction(a) for a in args])
        if head == "cp":
            (p,) = args
            return CpModel(int(p))
        if head == "bang":
            (p,) = args
            B = BangFunction(
                seq, p=int(p), max_order=config.envelope_n_max,
                tail_target=config.tail_target,
            )
            return BangModel(B)
        if head == "compose":
            inner, p = args
            return PowerCompositeModel(parse_model_spec(inner, seq, config), int(p))
    except (ValueError, SequenceError) as exc:
        raise ConfigError(f"invalid model spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown model {head!r}")


def _parse_window(text: str) -> Tuple[int, int]:
    try:
        a, _, b = text.partition(":")
        return (int(a), int(b))
    except ValueError as exc:
        raise ConfigError(f"windows are written a:b, got {text!r}") from exc


# -- RunConfig loading ---------------------------------------------------------------

_INT_FIELDS = {
    "precision", "k_max", "n_max", "seed", "digits",
    "corollary_k_max", "corollary_n_max", "lemma2_n_max", "stirling_n_max",
    "bang_cos_n_max", "bang_cp_n_max", "bang_cp_p", "envelope_n_max",
    "envelope_grid", "cp_p_max", "cp_grid", "remainder_cases",
    "transform_cases", "transform_window", "germ_n_max",
}


def _parse_config_value(key: str, raw: str):
    if key in _INT_FIELDS:
        return int(raw)
    if key == "window":
        return _parse_window(raw)
    if key == "p_set":
        return tuple(int(v) for v in raw.split(","))
    if key == "x_grid":
        return tuple(parse_fraction(v) for v in raw.split(","))
    if key == "tail_target":
        return parse_fraction(raw)
    if key in ("format", "bang_seq"):
        return raw.strip()
    raise KeyError(key)


def load_config_file(path: str) -> dict:
    """Flat key = value text format; # starts a comment."""
    overrides = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {body!r}")
        key, _, raw = body.partition("=")
        key, raw = key.strip(), raw.strip()
        try:
            overrides[key] = _parse_config_value(key, raw)
        except KeyError:
            raise ConfigError(f"{path}:{lineno}: unknown config field {key!r}")
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}:{lineno}: field {key!r}: {exc}")
    return overrides


def build_run_config(args: argparse.Namespace) -> RunConfig:
    overrides = {}
    env_prec = os.environ.get(ENV_PRECISION)
    if env_prec is not None:
        try:
            overrides["precision"] = int(env_prec)
        except ValueError:
            raise ConfigError(f"{ENV_PRECISION} must be an integer, got {env_prec!r}")
    if getattr(args, "config", None):
        overrides.update(load_config_file(args.config))
    for flag in ("precision", "seed", "digits"):
        v = getattr(args, flag, None)
        if v is not None:
            overrides[flag] = v
    if getattr(args, "window", None):
        overrides["window"] = _parse_window(args.window)
    if getattr(args, "format", None):
        overrides["format"] = args.format
    try:
        return RunConfig(**overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


# -- report emission ------------------------------------------------------------------


def report_to_json_obj(report: Report) -> dict:
    return {
        "version": report.version,
        "config": report.config,
        "metadata": report.metadata,
        "records": [dataclasses.asdict(r) for r in report.records],
    }


def report_from_json_obj(obj: dict) -> Report:
    return Report(
        version=obj["version"],
        config=obj["config"],
        records=[Record(**r) for r in obj["records"]],
        metadata=obj.get("metadata", {}),
    )


def report_to_csv_text(report: Report) -> str:
    """Deterministic CSV: the seconds column is left empty (timings live in
    the JSON metadata; see the module docstring)."""
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
    writer.writerow(["id", "anchor", "verdict", "witness", "lower", "upper", "seconds"])
    for r in report.records:
        writer.writerow([r.id, r.anchor, r.verdict, r.witness, r.lower, r.upper, ""])
    return buf.getvalue()


def emit_report(report: Report, path: str, fmt: str) -> None:
    """Write the report as JSON or RFC-4180 CSV."""
    if fmt not in ("json", "csv"):
        raise ConfigError(f"unknown report format {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if fmt == "json":
                json.dump(report_to_json_obj(report), fh, indent=2)
                fh.write("\n")
            else:
                fh.write(report_to_csv_text(report))
    except OSError as exc:
        raise ConfigError(f"cannot write report to {path}: {exc}") from exc


def _scalar_cells(s: Scalar, digits: int) -> Tuple[str, str]:
    if s.mode == "exact":
        return (str(s.exact), str(s.exact))
    if s.mode == "interval":
        return (
            decimal_str(s.lo, digits, "down"),
            decimal_str(s.hi, digits, "up"),
        )
    return (str(s.approx), str(s.approx))


def _record(
    rid: str, anchor: str, verdict: Verdict, lower: str = "", upper: str = ""
) -> Record:
    witness = ""
    if verdict.witness is not None:
        witness = str(verdict.witness)
    elif verdict.trend is not None:
        witness = str(verdict.trend)
    return Record(
        id=rid, anchor=anchor, verdict=verdict.outcome, witness=witness,
        lower=lower, upper=upper, seconds=0.0,
    )


def _finish(
    report: Report,
    args: argparse.Namespace,
    config: RunConfig,
    expectations: Optional[dict] = None,
) -> int:
    for r in report.records:
        line = f"{r.verdict.upper():14s} {r.id}"
        if r.lower or r.upper:
            line += f"  [{r.lower}, {r.upper}]"
        if r.witness:
            line += f"  ({r.witness})"
        print(line)
    if getattr(args, "emit", None):
        emit_report(report, args.emit, config.format)
        print(f"report written to {args.emit} ({config.format})")
    if any(r.verdict == "fails" for r in report.records):
        return EXIT_FAILS
    for r in report.records:
        if r.verdict == "inconclusive" and (expectations or {}).get(r.id, True):
            return EXIT_INCONCLUSIVE
    return 0


def _mini_report(config: RunConfig, records: List[Record]) -> Report:
    import time

    from . import __version__
    from .verify import config_to_dict

    return Report(
        version=__version__,
        config=config_to_dict(config),
        records=sorted(records, key=lambda r: r.id),
        metadata={"created": time.strftime("%Y-%m-%dT%H:%M:%S"), "decimal_digits": config.digits},
    )


# -- subcommand handlers ---------------------------------------------------------------


def _cmd_seq_show(args, config: RunConfig) -> int:
    seq = parse_sequence_spec(args.seq)
    cfg = ScalarConfig(mode=args.mode, bits=config.precision)
    a, b = _parse_window(args.range)
    print(f"# {seq.describe()}  (mode={args.mode}, bits={config.precision})")
    for n in range(a, b + 1):
        s = value(seq, n, cfg)
        lo, hi = _scalar_cells(s, config.digits)
        print(f"{n}\t{lo}" + ("" if lo == hi else f"\t{hi}"))
    return 0


def _cmd_seq_test(args, config: RunConfig) -> int:
    seq = parse_sequence_spec(args.seq)
    cfg = ScalarConfig(bits=config.precision)
    window = _parse_window(args.window) if args.window else config.window
    records = [
        _record("seq-increasing", "M_n <= M_{n+1}", is_increasing(seq, window, cfg)),
        _record(
            "seq-log-convex-base",
            "M_n**2 <= M_{n-1} M_{n+1}",
            is_log_convex(seq, (max(1, window[0]), window[1]), "base", cfg),
        ),
        _record(
            "seq-log-convex-derived",
            "M'_n**2 <= M'_{n-1} M'_{n+1}",
            is_log_convex(seq, (max(1, window[0]), window[1]), "derived", cfg),
        ),
        _record("seq-quasianalytic", "Carleman-sum family oracle", quasianalytic_verdict(seq)),
    ]
    expectations = {"seq-quasianalytic": isinstance(seq, (Analytic, Gevrey, IteratedLog, PowerSub))}
    return _finish(_mini_report(config, records), args, config, expectations)


def _cmd_transform_powersub(args, config: RunConfig) -> int:
    seq = parse_sequence_spec(args.seq)
    ps = power_substitution(seq, args.p)
    cfg = ScalarConfig(mode="interval", bits=config.precision)
    a, b = _parse_window(args.range)
    print(f"# {ps.describe()}")
    for n in range(a, b + 1):
        s = value(ps, n, cfg)
        lo, hi = _scalar_cells(s, config.digits)
        print(f"{n}\t{lo}\t{hi}")
    return 0


def _cmd_transform_regularize(args, config: RunConfig) -> int:
    seq = parse_sequence_spec(args.seq)
    cfg = ScalarConfig(bits=config.precision)
    try:
        reg = log_convex_regularization(seq, (0, args.N), cfg)
    except PrecisionError as exc:
        print(f"INCONCLUSIVE   regularization: {exc}")
        return EXIT_INCONCLUSIVE
    print(f"# {reg.describe()}; hull vertices: {list(reg.vertices)}")
    ival = ScalarConfig(mode="interval", bits=config.precision)
    for n in range(args.N + 1):
        s = value(reg, n, ival)
        lo, hi = _scalar_cells(s, config.digits)
        tag = "*" if n in reg.vertices else " "
        print(f"{n}{tag}\t{lo}\t{hi}")
    return 0


def _cmd_criteria_dc(args, config: RunConfig) -> int:
    seq = parse_sequence_spec(args.seq)
    cfg = ScalarConfig(mode="interval", bits=config.precision)
    if args.curve:
        rows = []
        for N in range(args.N + 1):
            s = dc_partial_sum(seq, N, cfg)
            lo, hi = _scalar_cells(s, config.digits)
            rows.append((N, lo, hi))
        if args.emit:
            with open(args.emit, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["N", "lower", "upper"])
                w.writerows(rows)
            print(f"partial-sum curve written to {args.emit}")
        else:
            for N, lo, hi in rows:
                print(f"{N}\t{lo}\t{hi}")
        return 0
    s = dc_partial_sum(seq, args.N, cfg)
    lo, hi = _scalar_cells(s, config.digits)
    print(f"partial Carleman sum up to N={args.N}: [{lo}, {hi}]")
    return 0


def _cmd_criteria_closure(args, config: RunConfig) -> int:
    seq = parse_sequence_spec(args.seq)
    cfg = ScalarConfig(mode="interval", bits=config.precision)
    window = _parse_window(args.window) if args.window else config.window
    est, verdict = derivation_closure_estimate(seq, window, cfg)
    lo, hi = _scalar_cells(est, config.digits)
    records = [_record("criteria-derivation-closure", "sup (M_{n+1}/M_n)**(1/n) bounded", verdict, lo, hi)]
    expectations = {"criteria-derivation-closure": not isinstance(seq, Custom)}
    return _finish(_mini_report(config, records), args, config, expectations)


def _cmd_criteria_inclusion(args, config: RunConfig) -> int:
    M = parse_sequence_spec(args.seq)
    N = parse_sequence_spec(args.other)
    cfg = ScalarConfig(mode="interval", bits=config.precision)
    window = _parse_window(args.window) if args.window else config.window
    est, verdict = inclusion_estimate(M, N, window, cfg)
    lo, hi = _scalar_cells(est, config.digits)
    records = [_record("criteria-inclusion", "sup (M_n/N_n)**(1/n) bounded", verdict, lo, hi)]
    return _finish(_mini_report(config, records), args, config, {"criteria-inclusion": False})


def _cmd_comb_coefficients(args, config: RunConfig) -> int:
    series = log_power_coefficients(args.k, args.N)
    print(f"# c[k={args.k}, n] for n = {args.k}..{args.N}")
    for n in range(args.k, args.N + 1):
        print(f"{n}\t{series.coeff(n)}")
    return 0


def _cmd_comb_lemmas(args, config: RunConfig) -> int:
    cfg = config.sweep_config()
    records = []
    which = args.which
    if which in ("lemma1", "all"):
        records.append(
            _record("comb-lemma1", "c[k,n] <= (2e)**n k!/n**k", lemma1_check(config.k_max, config.n_max, cfg))
        )
    if which in ("lemma2", "all"):
        records.append(
            _record(
                "comb-lemma2",
                "|alpha_k^(n)(x,x)| <= (2e)**n n**(n-k) x**(-(pn-k)/p)",
                lemma2_check(config.p_set, config.lemma2_n_max, config.x_grid, cfg),
            )
        )
    if which in ("stirling", "all"):
        records.append(
            _record(
                "comb-stirling",
                "1/(pn-k)! <= e**(pn)/n**(pn-k)",
                stirling_sweep(config.p_set, config.stirling_n_max, cfg),
            )
        )
    return _finish(_mini_report(config, records), args, config)


def _bang_from_args(args, config: RunConfig) -> BangFunction:
    seq = parse_sequence_spec(args.seq)
    return BangFunction(
        seq, p=args.p, max_order=args.max_order, tail_target=config.tail_target,
        cfg=ScalarConfig(bits=config.precision),
    )


def _cmd_bang_build(args, config: RunConfig) -> int:
    try:
        B = _bang_from_args(args, config)
    except (SequenceError, PrecisionError) as exc:
        print(f"FAILS          bang-build  (construction gate: {exc})")
        return EXIT_FAILS
    print(f"HOLDS          bang-build  {B.describe()}")
    print(
        f"               truncation K={B.K}, relative tail at top order "
        f"{float(B.relative_tail(B.max_order)):.3g} <= {float(B.tail_target):.3g}, "
        f"tail scope {B.tail_scope}"
    )
    return 0


def _cmd_bang_eval(args, config: RunConfig) -> int:
    B = _bang_from_args(args, config)
    cfg = ScalarConfig(mode="interval", bits=config.precision)
    s = bang_derivative(B, args.order, parse_fraction(args.xi), cfg)
    lo, hi = _scalar_cells(s, config.digits)
    print(f"F^({args.order})({args.xi}) in [{lo}, {hi}]")
    return 0


def _cmd_bang_bounds(args, config: RunConfig) -> int:
    try:
        B = _bang_from_args(args, config)
    except (SequenceError, PrecisionError) as exc:
        records = [
            Record(
                id="bang-lower-bound", anchor="|F^(pn)(0)| >= M'_pn",
                verdict="fails", witness=f"construction gate: {exc}",
                lower="", upper="", seconds=0.0,
            )
        ]
        return _finish(_mini_report(config, records), args, config)
    cfg = ScalarConfig(bits=config.precision)
    records = []
    for n in range(args.n + 1):
        v = bang_lower_bound_certify(B, n, cfg)
        records.append(_record(f"bang-lower-bound-{n:02d}", "|F^(pn)(0)| >= M'_pn", v))
        _, germ = induced_f_derivative(B, n, cfg)
        records.append(
            _record(f"bang-germ-bound-{n:02d}", "|f^(n)(0)| >= n! M'_pn/(pn)!", germ)
        )
    return _finish(_mini_report(config, records), args, config)


def _cmd_bang_norm(args, config: RunConfig) -> int:
    seq = parse_sequence_spec(args.seq)
    model = parse_model_spec(args.model, seq, config)
    lo, hi = _parse_window(args.interval) if ":" in args.interval else (-1, 1)
    cfg = ScalarConfig(mode="interval", bits=config.precision)
    s = class_norm(
        model, seq, (Fraction(lo), Fraction(hi)), parse_fraction(args.r),
        args.n_max, args.grid, cfg,
    )
    cl, ch = _scalar_cells(s, config.digits)
    print(
        f"class norm of {model.describe()} over n <= {args.n_max}, "
        f"{args.grid}-point grid of [{lo}, {hi}], r={args.r}: [{cl}, {ch}] "
        "(window-relative lower estimate of the sup)"
    )
    return 0


def _cmd_verify(args, config: RunConfig) -> int:
    only = args.only.split(",") if args.only else None
    if only:
        known = set(check_ids())
        for cid in only:
            if cid not in known:
                raise ConfigError(f"unknown check id {cid!r}; known: {sorted(known)}")
    report = run_checks(config, only)
    return _finish(report, args, config)


# -- parser wiring -----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--precision", type=int, help="mantissa bits (default 256)")
    p.add_argument("--seed", type=int, help="seed for randomized checks")
    p.add_argument("--digits", type=int, help="decimal digits for emitted endpoints")
    p.add_argument("--window", help="index window a:b")
    p.add_argument("--emit", help="write the report to this path")
    p.add_argument("--format", choices=("json", "csv"), help="report format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="carleman", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    seq = sub.add_parser("seq", help="inspect and test weight sequences")
    seq_sub = seq.add_subparsers(dest="action", required=True, parser_class=_Parser)
    show = seq_sub.add_parser("show", help="print sequence values")
    show.add_argument("--seq", required=True)
    show.add_argument("--range", default="0:16", help="index range a:b")
    show.add_argument("--mode", choices=("exact", "float", "interval"), default="interval")
    _add_common(show)
    show.set_defaults(handler=_cmd_seq_show)
    test = seq_sub.add_parser("test", help="certified predicates and family verdicts")
    test.add_argument("--seq", required=True)
    _add_common(test)
    test.set_defaults(handler=_cmd_seq_test)

    tr = sub.add_parser("transform", help="power substitution and regularization")
    tr_sub = tr.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ps = tr_sub.add_parser("powersub", help="values of the substituted sequence")
    ps.add_argument("--seq", required=True)
    ps.add_argument("--p", type=int, required=True)
    ps.add_argument("--range", default="0:16")
    _add_common(ps)
    ps.set_defaults(handler=_cmd_transform_powersub)
    rg = tr_sub.add_parser("regularize", help="greatest log-convex minorant on [0, N]")
    rg.add_argument("--seq", required=True)
    rg.add_argument("--N", type=int, required=True)
    _add_common(rg)
    rg.set_defaults(handler=_cmd_transform_regularize)

    cr = sub.add_parser("criteria", help="quasianalyticity, closure, inclusion")
    cr_sub = cr.add_subparsers(dest="action", required=True, parser_class=_Parser)
    dc = cr_sub.add_parser("dc", help="partial Carleman sums")
    dc.add_argument("--seq", required=True)
    dc.add_argument("--N", type=int, default=64)
    dc.add_argument("--curve", action="store_true", help="emit the whole curve as CSV")
    _add_common(dc)
    dc.set_defaults(handler=_cmd_criteria_dc)
    cl = cr_sub.add_parser("closure", help="derivation-closure estimate")
    cl.add_argument("--seq", required=True)
    _add_common(cl)
    cl.set_defaults(handler=_cmd_criteria_closure)
    inc = cr_sub.add_parser("inclusion", help="class-inclusion estimate")
    inc.add_argument("--seq", required=True)
    inc.add_argument("--other", required=True)
    _add_common(inc)
    inc.set_defaults(handler=_cmd_criteria_inclusion)

    cb = sub.add_parser("comb", help="series coefficients and inequality sweeps")
    cb_sub = cb.add_subparsers(dest="action", required=True, parser_class=_Parser)
    co = cb_sub.add_parser("coefficients", help="series coefficients c[k, n]")
    co.add_argument("--k", type=int, required=True)
    co.add_argument("--N", type=int, required=True)
    _add_common(co)
    co.set_defaults(handler=_cmd_comb_coefficients)
    lm = cb_sub.add_parser("lemmas", help="certified inequality sweeps")
    lm.add_argument("--which", choices=("lemma1", "lemma2", "stirling", "all"), default="all")
    _add_common(lm)
    lm.set_defaults(handler=_cmd_comb_lemmas)

    bg = sub.add_parser("bang", help="extremal oscillating series")
    bg_sub = bg.add_subparsers(dest="action", required=True, parser_class=_Parser)
    bb = bg_sub.add_parser("build", help="construct and gate-check the series")
    bb.add_argument("--seq", default="iterlog(2)")
    bb.add_argument("--p", type=int, default=2)
    bb.add_argument("--max-order", type=int, default=12, dest="max_order")
    _add_common(bb)
    bb.set_defaults(handler=_cmd_bang_build)
    be = bg_sub.add_parser("eval", help="certified derivative enclosure")
    be.add_argument("--seq", default="iterlog(2)")
    be.add_argument("--p", type=int, default=2)
    be.add_argument("--order", type=int, required=True)
    be.add_argument("--xi", default="0")
    be.add_argument("--max-order", type=int, default=None, dest="max_order")
    _add_common(be)
    be.set_defaults(handler=_cmd_bang_eval)
    bo = bg_sub.add_parser("bounds", help="derivative lower-bound certificates")
    bo.add_argument("--seq", default="iterlog(2)")
    bo.add_argument("--p", type=int, default=2)
    bo.add_argument("--n", type=int, default=6, help="certify orders 0..n")
    bo.add_argument("--max-order", type=int, default=None, dest="max_order")
    _add_common(bo)
    bo.set_defaults(handler=_cmd_bang_bounds)
    bn = bg_sub.add_parser("norm", help="window-relative class norm")
    bn.add_argument("--model", required=True)
    bn.add_argument("--seq", default="analytic")
    bn.add_argument("--r", default="1")
    bn.add_argument("--interval", default="-1:1")
    bn.add_argument("--n-max", type=int, default=8, dest="n_max")
    bn.add_argument("--grid", type=int, default=21)
    _add_common(bn)
    bn.set_defaults(handler=_cmd_bang_norm)

    vf = sub.add_parser("verify", help="run the full certified check suite")
    vf.add_argument("--only", help="comma-separated subset of check ids")
    _add_common(vf)
    vf.set_defaults(handler=_cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_run_config(args)
        if getattr(args, "max_order", None) is None and hasattr(args, "max_order"):
            if getattr(args, "order", None) is not None:
                args.max_order = args.order
            elif getattr(args, "n", None) is not None:
                args.max_order = max(args.p, 2) * args.n
            elif args.max_order is None:
                args.max_order = 12
        return args.handler(args, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SequenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
