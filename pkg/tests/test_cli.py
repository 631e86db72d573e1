import csv
import json
import math
from pathlib import Path

import pytest

from greedypaths.cli import fmt, load_config, main, parse_float


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_fmt_round_trip():
    for x in (0.1, -1.5e-300, 2.0, 12345.678901234567):
        assert float(fmt(x)) == x
    assert fmt(math.inf) == "inf"
    assert parse_float("inf") == math.inf


def test_solve_constant(tmp_path, capsys):
    code, out = run_cli(
        capsys, "solve", "--dist", "constant:2", "--d", "2", "--n", "7",
        "--seed", "1", "--out", str(tmp_path),
    )
    assert code == 0
    assert "value=14" in out
    assert (tmp_path / "results" / "solve.csv").exists()


def test_solve_rerun_identical_and_noop(tmp_path, capsys):
    args = ("solve", "--dist", "gaussian:0,1", "--d", "2", "--n", "8",
            "--seed", "3", "--out", str(tmp_path))
    code1, out1 = run_cli(capsys, *args)
    csv_bytes = (tmp_path / "results" / "solve.csv").read_bytes()
    code2, out2 = run_cli(capsys, *args)
    assert out1 == out2
    assert (tmp_path / "results" / "solve.csv").read_bytes() == csv_bytes


def test_solve_nonnegative_law_truncation_inactive(tmp_path, capsys):
    _, out_m = run_cli(
        capsys, "solve", "--dist", "bernoulli:0.5", "--d", "2", "--n", "8",
        "--seed", "7", "--m", "0", "--out", str(tmp_path / "a"),
    )
    _, out_raw = run_cli(
        capsys, "solve", "--dist", "bernoulli:0.5", "--d", "2", "--n", "8",
        "--seed", "7", "--out", str(tmp_path / "b"),
    )
    assert out_m.splitlines()[0] == out_raw.splitlines()[0]
    assert out_m.splitlines()[1] == out_raw.splitlines()[1]


def test_estimate_schema_and_row_count(tmp_path, capsys):
    code, out = run_cli(
        capsys, "estimate", "--dist", "two_point:1,10,0.3", "--d", "2",
        "--n-grid", "3,5,7", "--m-grid", "0,4", "--replicas", "20",
        "--seed", "5", "--out", str(tmp_path),
    )
    assert code == 0
    files = list((tmp_path / "results").glob("estimate_*.csv"))
    assert len(files) == 1
    with open(files[0]) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3 * 2
    assert list(rows[0]) == [
        "experiment_id", "d", "family", "params", "n", "m", "replicas",
        "mean", "stderr", "ci_low", "ci_high", "exact_fraction",
    ]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest["experiments"]) == 1


def test_estimate_resume_appends_and_noop(tmp_path, capsys):
    base = ("estimate", "--dist", "bernoulli:0.5", "--d", "2", "--n-grid", "3,5",
            "--m-grid", "inf", "--seed", "5", "--out", str(tmp_path))
    run_cli(capsys, *base, "--replicas", "30")
    f = next((tmp_path / "results").glob("estimate_*.csv"))
    with open(f) as fh:
        first = list(csv.DictReader(fh))
    run_cli(capsys, *base, "--replicas", "60")
    with open(f) as fh:
        second = list(csv.DictReader(fh))
    assert len(second) == 2 * len(first)  # appended, nothing rewritten
    by_cell = {}
    for r in second:
        key = (r["n"], r["m"])
        if key not in by_cell or int(r["replicas"]) > int(by_cell[key]["replicas"]):
            by_cell[key] = r
    for r in first:
        newest = by_cell[(r["n"], r["m"])]
        assert int(newest["replicas"]) == 60
        assert float(r["ci_low"]) <= float(newest["mean"]) <= float(r["ci_high"])
    # identical rerun: complete cells are a no-op
    before = f.read_bytes()
    run_cli(capsys, *base, "--replicas", "60")
    assert f.read_bytes() == before


def test_estimate_thread_count_byte_identity(tmp_path, capsys):
    for threads, sub in (("1", "s1"), ("4", "s4")):
        run_cli(
            capsys, "estimate", "--dist", "gaussian:0,1", "--d", "2",
            "--n-grid", "3,5", "--m-grid", "2,inf", "--replicas", "24",
            "--seed", "21", "--threads", threads, "--out", str(tmp_path / sub),
        )
    a = next((tmp_path / "s1" / "results").glob("*.csv")).read_bytes()
    b = next((tmp_path / "s4" / "results").glob("*.csv")).read_bytes()
    assert a == b
    assert (tmp_path / "s1" / "manifest.json").read_bytes() == (
        tmp_path / "s4" / "manifest.json"
    ).read_bytes()


def test_verify_stirling(tmp_path, capsys):
    code, out = run_cli(
        capsys, "verify", "--check", "stirling", "--nmax", "10",
        "--seed", "1", "--out", str(tmp_path),
    )
    assert code == 0
    assert out.startswith("PASS stirling_identity [exact]")
    report_file = next((tmp_path / "reports").glob("verify_*.json"))
    payload = json.loads(report_file.read_text())
    assert payload["all_passed"]
    assert payload["reports"][0]["mode"] == "exact"


def test_verify_alias_and_exact_check(tmp_path, capsys):
    code, out = run_cli(
        capsys, "verify", "--check", "key-lemma-exact", "--q", "1/2", "--n", "3",
        "--seed", "1", "--out", str(tmp_path),
    )
    assert code == 0
    assert "factorial_moment_bound_exact" in out


def test_verify_failing_check_exit_code(tmp_path, capsys):
    code, out = run_cli(
        capsys, "verify", "--check", "fourth-moment", "--dist", "pareto_tail:2,neg,1",
        "--m-overshoot", "2", "--replicas", "400", "--seed", "1", "--out", str(tmp_path),
    )
    assert code == 1
    assert out.startswith("FAIL")


def test_verify_unknown_check(tmp_path):
    with pytest.raises(SystemExit):
        main(["verify", "--check", "nonsense", "--seed", "1", "--out", str(tmp_path)])


def test_plot_empty_store_errors(tmp_path, capsys):
    code = main(["plot", "--out", str(tmp_path)])
    assert code == 2
    assert not (tmp_path / "plots").exists()


def test_plot_outputs(tmp_path, capsys):
    run_cli(
        capsys, "estimate", "--dist", "two_point:1,10,0.3", "--d", "2",
        "--n-grid", "3,4,5", "--m-grid", "0,2", "--replicas", "15",
        "--seed", "2", "--out", str(tmp_path),
    )
    code, out = run_cli(capsys, "plot", "--out", str(tmp_path))
    assert code == 0
    svgs = sorted((tmp_path / "plots").glob("*.svg"))
    csvs = sorted((tmp_path / "plots").glob("*.csv"))
    assert len(svgs) == 2 and len(csvs) == 2
    tidy = csvs[1].read_text().splitlines()
    assert tidy[0] == "experiment_id,m,n,mean,ci_low,ci_high"
    assert len(tidy) == 1 + 3 * 2


def test_config_file_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "# weights and grid\n"
        "dist = constant:2\n"
        "d = 2\n"
        "n = 5\n"
        "seed = 1\n"
    )
    code, out = run_cli(
        capsys, "solve", "--config", str(cfg), "--n", "7", "--out", str(tmp_path),
    )
    assert code == 0
    assert "value=14" in out  # --n 7 overrides n = 5 from the file


def test_config_file_diagnostics(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("dist constant:2\n")
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--config", str(bad), "--seed", "1"])
    assert "bad.cfg:1" in str(exc.value)


def test_seed_required(tmp_path):
    with pytest.raises(SystemExit):
        main(["solve", "--dist", "constant:2", "--n", "5", "--out", str(tmp_path)])
