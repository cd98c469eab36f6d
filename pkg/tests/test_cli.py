import csv
import io
import json
import subprocess
import sys

import pytest

from kelvin_index import cli


def run(args, env=None):
    return subprocess.run([sys.executable, "-m", "kelvin_index", *args], capture_output=True, text=True, env=env)


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_kernel_all_methods_agree(capsys):
    assert cli.main(["kernel", "--x", "1", "--tau", "0.5", "--method", "all"]) == 0
    table = rows(capsys.readouterr().out)
    assert table[0] == ["x", "tau", "method", "value", "err_estimate"]
    values = [float(r[3]) for r in table[1:]]
    assert len(values) == 3
    assert max(values) - min(values) <= 1e-6 * max(values)
    assert len(table[1][3].replace("0.", "").lstrip("0")) >= 15


def test_empty_tau_is_invalid(capsys):
    assert cli.main(["kernel", "--tau", ""]) == cli.EXIT_INVALID
    assert "empty" in capsys.readouterr().err


def test_kernel_output_is_repeatable(tmp_path, monkeypatch):
    outputs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("KELVIN_THREADS", threads)
        target = tmp_path / f"k{threads}.csv"
        assert cli.main(["kernel", "--x", "0.5,2", "--tau", "0:2:3", "--out", str(target)]) == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("KELVIN_THREADS", "zero")
    assert cli.main(["kernel", "--x", "1", "--tau", "1"]) == cli.EXIT_INVALID


def test_config_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"x": [1, 2], "tau": "0,1", "method": "definition"}))
    assert cli.main(["kernel", "--config", str(config), "--x", "3"]) == 0
    table = rows(capsys.readouterr().out)
    assert {r[0] for r in table[1:]} == {"3"}
    assert {r[2] for r in table[1:]} == {"definition"}
    config.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["kernel", "--config", str(config)]) == cli.EXIT_INVALID


def test_non_monotone_csv_reports_row(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("grid,value\n0.1,1\n0.3,2\n0.2,3\n")
    assert cli.main(["transform", "inverse-g", "--input", str(data)]) == cli.EXIT_INVALID
    assert "row 4" in capsys.readouterr().err


def test_bad_header(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("x,y\n0.1,1\n0.3,2\n")
    assert cli.main(["transform", "forward-f", "--input", str(data)]) == cli.EXIT_INVALID
    assert "row 1" in capsys.readouterr().err


def test_forward_g_then_inverse_g_from_csv(tmp_path, capsys):
    forward = tmp_path / "Gg.csv"
    assert cli.main(["transform", "forward-g", "--fixture", "bump", "--grid", "log:0.001:1000:120",
                     "--out", str(forward)]) == 0
    assert cli.main(["transform", "inverse-g", "--input", str(forward), "--grid", "0.5,1,1.5"]) == 0
    table = rows(capsys.readouterr().out)
    assert table[0] == ["grid", "value"]
    assert len(table) == 4


def test_inverse_f_pipeline_reports_round_trip(capsys):
    assert cli.main(["transform", "inverse-f", "--grid", "0.5,1"]) == 0
    captured = capsys.readouterr()
    assert rows(captured.out)[0] == ["grid", "value", "reference"]
    assert "round-trip" in captured.err


def test_tighter_tolerance_shrinks_error_estimates(capsys):
    estimates = []
    for rel in ("1e-6", "1e-12"):
        assert cli.main(["kernel", "--x", "2", "--tau", "1", "--method", "fourier_cosine", "--rel-tol", rel]) == 0
        estimates.append(float(rows(capsys.readouterr().out)[1][4]))
    assert estimates[1] <= estimates[0]


def test_bvp_commands(capsys):
    assert cli.main(["bvp", "residual", "--points", "1:0.785"]) == 0
    table = rows(capsys.readouterr().out)
    assert abs(float(table[1][2])) <= 1e-3
    assert cli.main(["bvp", "trace", "--r-grid", "0.5,1"]) == 0
    table = rows(capsys.readouterr().out)
    assert all(float(r[1]) == 0.0 for r in table[1:])
    assert all(float(r[2]) == pytest.approx(float(r[3]), rel=1e-6) for r in table[1:])
    assert cli.main(["bvp", "solve", "--r-grid", "1", "--theta-grid", "0,0.5"]) == 0
    assert len(rows(capsys.readouterr().out)) == 3
    assert cli.main(["bvp", "solve", "--beta", "7"]) == cli.EXIT_INVALID


def test_verify_suite_json_and_exit_codes():
    result = run(["verify", "quadrature"])
    assert result.returncode == 0
    report = json.loads(result.stdout)
    assert report["suite"] == "quadrature" and report["status"] == "pass"
    assert run(["verify", "nosuch"]).returncode == cli.EXIT_INVALID


def test_verify_kernel_lists_required_cases():
    report = json.loads(run(["verify", "kernel"]).stdout)
    ids = {c["id"] for c in report["cases"]}
    assert "ode.max_normalized_residual" in ids
    assert "representations.max_pairwise_deviation" in ids


def test_grid_syntax():
    assert list(cli.parse_grid("1:3:3")) == [1.0, 2.0, 3.0]
    assert cli.parse_grid("log:1:100:3")[1] == pytest.approx(10.0)
    with pytest.raises(Exception):
        cli.parse_grid("3,2")
