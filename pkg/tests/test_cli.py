"""CLI behavior: spec parsing, config loading, report emission, exit codes."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from carleman.cli import (
    ConfigError,
    build_run_config,
    emit_report,
    load_config_file,
    main,
    parse_fraction,
    parse_sequence_spec,
    report_from_json_obj,
    report_to_csv_text,
    report_to_json_obj,
)
from carleman.seqcore import Analytic, Custom, Gevrey, IteratedLog, PowerSub
from carleman.verify import Record, Report, RunConfig, run_checks

F = Fraction


def test_parse_fraction_forms():
    assert parse_fraction("3") == 3
    assert parse_fraction("1/4") == F(1, 4)
    assert parse_fraction("2^-64") == F(1, 2 ** 64)
    with pytest.raises(ConfigError):
        parse_fraction("abc")


def test_parse_sequence_specs():
    assert isinstance(parse_sequence_spec("analytic"), Analytic)
    g = parse_sequence_spec("gevrey(3/2)")
    assert isinstance(g, Gevrey) and g.s == F(3, 2)
    il = parse_sequence_spec("iterlog(2,3)")
    assert isinstance(il, IteratedLog) and il.k == 2 and il.shift == 3
    ps = parse_sequence_spec("powersub(iterlog(1),2)")
    assert isinstance(ps, PowerSub) and ps.p == 2 and isinstance(ps.base, IteratedLog)
    cu = parse_sequence_spec("custom(1,2,4,8)")
    assert isinstance(cu, Custom) and cu.exact(3) == 8
    with pytest.raises(ConfigError):
        parse_sequence_spec("mystery(1)")
    with pytest.raises(ConfigError):
        parse_sequence_spec("gevrey(1")


def test_config_file_round_trip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment\n"
        "precision = 128\n"
        "window = 1:8\n"
        "p_set = 2,3\n"
        "x_grid = 1/4,1\n"
        "tail_target = 2^-32\n"
        "seed = 42\n"
        "format = csv\n"
    )
    overrides = load_config_file(str(cfg))
    assert overrides["precision"] == 128
    assert overrides["window"] == (1, 8)
    assert overrides["p_set"] == (2, 3)
    assert overrides["x_grid"] == (F(1, 4), F(1))
    assert overrides["tail_target"] == F(1, 2 ** 32)
    assert overrides["format"] == "csv"


def test_config_file_errors_carry_line_numbers(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("precision = 128\nwidgets = 3\n")
    with pytest.raises(ConfigError, match="bad.cfg:2"):
        load_config_file(str(cfg))
    cfg.write_text("precision twelve\n")
    with pytest.raises(ConfigError, match="bad.cfg:1"):
        load_config_file(str(cfg))


def test_env_precision_override(monkeypatch):
    import argparse

    monkeypatch.setenv("CARLEMAN_PRECISION", "192")
    ns = argparse.Namespace(config=None, precision=None, seed=None, digits=None,
                            window=None, format=None)
    assert build_run_config(ns).precision == 192
    # explicit flag wins over the environment
    ns.precision = 320
    assert build_run_config(ns).precision == 320


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(precision=32)
    with pytest.raises(ValueError):
        RunConfig(window=(5, 1))
    with pytest.raises(ValueError):
        RunConfig(format="xml")


def _tiny_config(**kw):
    defaults = dict(
        window=(1, 3), remainder_cases=5, transform_cases=5,
        envelope_grid=5, cp_grid=5, cp_p_max=2,
    )
    defaults.update(kw)
    return RunConfig(**defaults)


def test_report_json_round_trip(tmp_path):
    report = run_checks(_tiny_config(), only=["corollary-composition-equality", "powersub-identity"])
    path = tmp_path / "report.json"
    emit_report(report, str(path), "json")
    parsed = report_from_json_obj(json.loads(path.read_text()))
    assert parsed == report


def test_report_csv_deterministic_and_rfc4180(tmp_path):
    cfg = _tiny_config()
    r1 = run_checks(cfg, only=["powersub-identity", "remainder-reconstruction"])
    r2 = run_checks(cfg, only=["powersub-identity", "remainder-reconstruction"])
    t1, t2 = report_to_csv_text(r1), report_to_csv_text(r2)
    assert t1 == t2  # byte-identical: timings are excluded from the CSV
    header = t1.splitlines()[0]
    assert header == "id,anchor,verdict,witness,lower,upper,seconds"
    # a quoted field: anchors contain commas
    report = Report(version="x", config={}, records=[
        Record(id="a", anchor='with,comma "q"', verdict="holds", witness="",
               lower="", upper="", seconds=0.0)
    ])
    text = report_to_csv_text(report)
    assert '"with,comma ""q"""' in text


def test_empty_report_is_header_only():
    report = Report(version="x", config={}, records=[])
    assert report_to_csv_text(report).splitlines() == [
        "id,anchor,verdict,witness,lower,upper,seconds"
    ]


def test_records_sorted_by_id():
    report = run_checks(
        _tiny_config(),
        only=["powersub-identity", "a-coefficient-bound", "corollary-composition-equality"],
    )
    ids = [r.id for r in report.records]
    assert ids == sorted(ids)


def test_exit_codes():
    report = run_checks(_tiny_config(), only=["a-coefficient-bound"])
    assert report.exit_code() == 0
    failing = Report(version="x", config={}, records=[
        Record(id="z", anchor="", verdict="fails", witness="", lower="", upper="", seconds=0.0)
    ])
    assert failing.exit_code() == 1
    undecided = Report(version="x", config={}, records=[
        Record(id="z", anchor="", verdict="inconclusive", witness="", lower="", upper="", seconds=0.0)
    ])
    assert undecided.exit_code() == 2


def test_main_seq_show_exact(capsys):
    rc = main(["seq", "show", "--seq", "gevrey(1)", "--range", "0:4", "--mode", "exact"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "24" in out


def test_main_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["seq", "show"])  # missing --seq
    assert exc.value.code == 3


def test_main_bad_spec_exit_code(capsys):
    rc = main(["seq", "show", "--seq", "nope(1)"])
    assert rc == 3


def test_main_verify_subset_and_emit(tmp_path, capsys):
    out = tmp_path / "r.csv"
    rc = main([
        "verify", "--only", "powersub-identity", "--window", "1:3",
        "--emit", str(out), "--format", "csv",
    ])
    assert rc == 0
    text = out.read_text()
    assert text.startswith("id,anchor,verdict")
    assert "powersub-identity,holds" in text.replace(", ", ",").replace(
        "power substitution with p = 1 is the identity,", ""
    ) or "holds" in text


def test_main_verify_unknown_check(capsys):
    rc = main(["verify", "--only", "no-such-check"])
    assert rc == 3


def test_main_bang_gate_failure_record(capsys):
    rc = main([
        "bang", "build", "--seq", "custom(1,50,51,52,53,54,55,56,57,58,59,60)",
        "--p", "2", "--max-order", "2",
    ])
    out = capsys.readouterr().out
    assert rc == 1
    assert "construction gate" in out


def test_main_criteria_inclusion_inconclusive_is_expected(capsys):
    rc = main([
        "criteria", "inclusion", "--seq", "gevrey(1)", "--other", "analytic",
        "--window", "1:8",
    ])
    out = capsys.readouterr().out
    assert rc == 0  # inconclusive, but no oracle was expected here
    assert "INCONCLUSIVE" in out


def test_cli_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "carleman.cli", "seq", "show", "--seq", "analytic",
         "--range", "0:2", "--mode", "exact"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert "1" in proc.stdout
