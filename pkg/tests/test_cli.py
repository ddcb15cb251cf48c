import csv
import io
import json
import subprocess
import sys

import pytest

from cmdensity import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def as_json(text):
    doc = json.loads(text)
    assert doc["schema"] == cli.SCHEMA
    return doc


def as_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_root_number_single(capsys):
    code, out, _ = run(capsys, "root-number", "--d", "5", "--k", "1")
    doc = as_json(out)
    assert code == 0 and doc["result"]["rows"][0]["w"] == -1
    assert doc["config"]["d"] == 5 and doc["config"]["k"] == 1


def test_root_number_oracle_table(capsys):
    code, out, _ = run(capsys, "root-number", "--d", "1", "--kmax", "16", "--oracle", "--format", "csv")
    rows = as_rows(out)
    assert code == 0 and len(rows) == 16
    assert all(r["agree"] == "True" and float(r["residual"]) <= 1e-9 for r in rows)


def test_avg_sign(capsys):
    code, out, _ = run(capsys, "avg-sign", "--d", "3", "--K", "10000")
    frac = as_json(out)["result"]["negative_fraction"]
    assert code == 0 and abs(frac["value"] - 0.25) <= 8e-4


def test_constants_interval_nesting(capsys):
    _, big, _ = run(capsys, "constants", "--d", "1", "--alpha", "8", "--J", "3", "--x", "1000000")
    _, small, _ = run(capsys, "constants", "--d", "1", "--alpha", "8", "--J", "3", "--x", "1000")
    b, s = as_json(big)["result"], as_json(small)["result"]
    assert b["c_total"][0]["value"] == pytest.approx(-2.9440, abs=1e-3)
    for lo, hi in zip(s["c_total"], b["c_total"]):
        assert lo["tail_bound"] > hi["tail_bound"]
        assert lo["value"] - lo["tail_bound"] <= hi["value"] <= lo["value"]


def test_constants_inert_d(capsys):
    _, out, _ = run(capsys, "constants", "--d", "21", "--alpha", "1", "--J", "1", "--x", "100000")
    res = as_json(out)["result"]
    assert res["c_inert_d"][0] != 0.0 and len(res["c_total"]) == 2


def test_density_csv_columns_and_determinism(capsys, tmp_path):
    args = ["density", "--d", "1", "--alpha", "8", "--K", "256,512", "--nu", "0.4",
            "--family", "polybump:4", "--J", "3"]
    code, out, _ = run(capsys, *args)
    rows = as_rows(out)
    assert code == 0 and [r["K"] for r in rows] == ["256", "512"]
    assert list(rows[0]) == ["K", "measured", "prediction_J0", "prediction_J1", "prediction_J2",
                             "prediction_J3", "residual", "split_term"]
    _, again, _ = run(capsys, *args, "--threads", "4")
    assert again == out
    path = tmp_path / "d.json"
    assert cli.main(args + ["--format", "json", "-o", str(path)]) == 0
    reports = json.loads(path.read_text())["result"]["reports"]
    assert reports[0]["K"] == 256
    # %.17g text round-trips to the exact doubles in the JSON document
    for row, rep in zip(rows, reports):
        assert float(row["measured"]) == rep["measured"]
        assert float(row["split_term"]) == rep["split_term"]
        assert float(row["prediction_J3"]) == pytest.approx(rep["prediction"], abs=1e-15)


def test_nonvanishing(capsys):
    _, out, _ = run(capsys, "nonvanishing", "--case", "all", "--nu", "0.5")
    rows = as_json(out)["result"]["rows"]
    assert [r["case"] for r in rows] == ["even", "odd_plus", "odd_minus"]
    assert rows[0]["lower_bound"] == pytest.approx(0.25)


@pytest.mark.parametrize("suite,extra", [("ap", ["--dmax", "15", "--pmax", "500"]), ("gamma", []),
                                         ("angles", ["--pmax", "5000", "--nmax", "20"]),
                                         ("polylog", []), ("bell", []), ("kernel", []),
                                         ("reciprocity", ["--pmax", "200"])])
def test_verify_suites_pass(capsys, suite, extra):
    code, out, _ = run(capsys, "verify", "--suite", suite, *extra)
    doc = as_json(out)
    assert code == 0 and doc["result"]["passed"]


def test_verify_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setitem(cli.SUITES, "bell", lambda args: cli._suite("bell", 1, [{"n": 0}]))
    code, out, _ = run(capsys, "verify", "--suite", "bell")
    assert code == cli.EXIT_SUITE and not as_json(out)["result"]["passed"]


@pytest.mark.parametrize("argv", [
    ["root-number", "--d", "4", "--k", "1"],
    ["root-number", "--d", "101", "--k", "1", "--oracle"],
    ["density", "--d", "1", "--alpha", "8", "--K", "64", "--nu", "1.5"],
    ["density", "--d", "1", "--alpha", "8", "--K", "64", "--family", "gauss"],
    ["constants", "--d", "1", "--alpha", "8", "--J", "20"],
    ["nonvanishing", "--nu", "1.0"],
    ["avg-sign", "--d", "3", "--K", "10", "--threads", "0"],
])
def test_config_errors_exit_3(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_CONFIG and err.startswith("error:")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmdensity", "root-number", "--d", "1", "--k", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["rows"][0]["w"] == 1
