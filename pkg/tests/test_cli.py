import csv
import io
import json

import pytest

from coupledosc.cli import main, parse_config, render_table
from coupledosc.errors import ConfigError


def run_cli(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_uncoupled(capsys):
    status, out, _ = run_cli(capsys, "spectrum", "--omega1", "1", "--omega2", "1", "--lambda", "0", "--levels", "3")
    assert status == 0
    rows = csv_rows(out)
    assert out.splitlines()[0] == "N,m,n1,n2,E"
    assert [(r["N"], r["m"], float(r["E"])) for r in rows] == [("0", "0", 1.0), ("1", "-1", 2.0), ("1", "1", 2.0)]


def test_spectrum_json_matches_csv(capsys):
    args = ["spectrum", "--omega1", "1.2", "--omega2", "0.8", "--lambda", "0.2", "--levels", "6"]
    _, text_csv, _ = run_cli(capsys, *args)
    _, text_json, _ = run_cli(capsys, *args, "--format", "json")
    from_csv = [float(r["E"]) for r in csv_rows(text_csv)]
    from_json = [r["E"] for r in json.loads(text_json)]
    assert from_csv == from_json


def test_output_is_deterministic(capsys):
    args = ["spectrum", "--omega1", "1.2", "--omega2", "0.8", "--lambda", "0.2", "--psi", "0.5"]
    first = run_cli(capsys, *args)[1]
    assert run_cli(capsys, *args)[1] == first


def test_sweep_inclusive_end(capsys):
    status, out, _ = run_cli(capsys, "sweep", "--omega1", "1", "--omega2", "1", "--lambda-range", "0:0.45:0.05")
    assert status == 0
    rows = csv_rows(out)
    assert len(rows) == 10
    assert float(rows[-1]["lambda"]) == pytest.approx(0.45)
    assert float(rows[-1]["omega_minus"]) == pytest.approx(0.1 ** 0.5, abs=1e-12)
    assert all(r["domain_ok"] == "true" for r in rows)


def test_sweep_marks_unstable_rows(capsys):
    _, out, _ = run_cli(capsys, "sweep", "--omega1", "1", "--omega2", "1", "--lambda-range", "0.4:0.6:0.1")
    rows = csv_rows(out)
    assert [r["domain_ok"] for r in rows] == ["true", "false", "false"]
    assert rows[1]["E_ground"] == ""


def test_sweep_json_uses_null(capsys):
    _, out, _ = run_cli(capsys, "sweep", "--omega1", "1", "--omega2", "1", "--lambda-range", "0.5:0.5:0.1",
                        "--format", "json")
    (row,) = json.loads(out)
    assert row["domain_ok"] is False
    assert row["E_ground"] is None


def test_trace_rows(capsys):
    status, out, _ = run_cli(capsys, "trace", "--omega1", "1", "--omega2", "1", "--lambda", "0.3", "--cutoff", "16")
    assert status == 0
    rows = csv_rows(out)
    assert [r["stage"] for r in rows] == ["0", "1", "2", "3"]
    assert float(rows[0]["offdiag_residual"]) > 0.01
    assert float(rows[3]["offdiag_residual"]) <= 1e-8


def test_eigenstate_rows(capsys):
    status, out, _ = run_cli(capsys, "eigenstate", "--omega1", "1", "--omega2", "1", "--lambda", "0",
                             "--N", "1", "--m", "1", "--cutoff", "8", "--grid", "2:3")
    assert status == 0
    rows = csv_rows(out)
    fock = [r for r in rows if r["section"] == "fock"]
    polar = [r for r in rows if r["section"] == "polar"]
    assert [(r["n_a"], r["n_b"], float(r["re"])) for r in fock] == [("1", "0", pytest.approx(1.0))]
    assert len(polar) == 9


@pytest.mark.parametrize("argv, field", [
    (["spectrum", "--omega1", "1", "--omega2", "1", "--lambda", "-0.1"], "lambda"),
    (["spectrum", "--omega1", "x", "--omega2", "1", "--lambda", "0.1"], "omega1"),
    (["spectrum", "--omega2", "1", "--lambda", "0.1"], "omega1"),
    (["spectrum", "--omega1", "1", "--omega2", "1", "--lambda", "0.1", "--cutoff", "0"], "cutoff"),
    (["eigenstate", "--omega1", "1", "--omega2", "1", "--lambda", "0.1", "--N", "2", "--m", "1"], "m"),
    (["eigenstate", "--omega1", "1", "--omega2", "1", "--lambda", "0.1", "--N", "9", "--m", "1"], "N"),
    (["verify", "--suite", "nope"], "suite"),
])
def test_config_errors_exit_2(capsys, argv, field):
    status, out, err = run_cli(capsys, *argv)
    assert status == 2
    assert field in err
    assert out == ""


def test_domain_error_exit_2(capsys):
    status, _, err = run_cli(capsys, "spectrum", "--omega1", "1", "--omega2", "1", "--lambda", "0.5")
    assert status == 2
    assert "domain error" in err


def test_unknown_command_exit_2(capsys):
    assert run_cli(capsys, "dance")[0] == 2


def test_config_file_and_flag_precedence(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"omega1": 1.5, "omega2": 1.0, "lambda": 0.2, "levels": 4}))
    command, cfg = parse_config(["spectrum", "--config", str(path), "--lambda", "0.1"])
    assert command == "spectrum"
    assert (cfg.omega1, cfg.omega2, cfg.lam, cfg.levels) == (1.5, 1.0, 0.1, 4)


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        parse_config(["spectrum", "--config", str(bad)])
    with pytest.raises(ConfigError):
        parse_config(["spectrum", "--config", str(tmp_path / "missing.json")])


def test_out_file(tmp_path, capsys):
    target = tmp_path / "levels.csv"
    status, out, _ = run_cli(capsys, "spectrum", "--omega1", "1", "--omega2", "1", "--lambda", "0.3",
                             "--levels", "2", "--out", str(target))
    assert status == 0 and out == ""
    assert target.read_text().startswith("N,m,n1,n2,E\n")


def test_empty_table_has_header():
    assert render_table([], ("a", "b"), "csv") == "a,b\n"
    assert render_table([], ("a", "b"), "json") == "[]\n"


@pytest.mark.parametrize("value", [0.1, 1 / 3, 2.0 ** 0.5, 1e-300, 123456789.123456789])
def test_float_round_trip(value):
    text = render_table([{"x": value}], ("x",), "csv")
    assert float(csv_rows(text)[0]["x"]) == value


def test_verify_single_suite(tmp_path, capsys):
    target = tmp_path / "verify.json"
    status, _, err = run_cli(capsys, "verify", "--suite", "algebra", "--out", str(target))
    assert status == 0
    records = json.loads(target.read_text())
    assert records and all(r["status"] == "pass" for r in records)
    assert set(records[0]) == {"suite", "assertion", "status", "measured", "bound"}
    assert "checks passed" in err
