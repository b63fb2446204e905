import csv
import io
import json
import subprocess
import sys

import pytest

from robinbounce.cli import main
from robinbounce.qbounce import scales_from, transition_frequency


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(out):
    return list(csv.DictReader(io.StringIO(out)))


def test_spectrum_table_one(capsys):
    code, out, _ = run(capsys, "spectrum", "--lambda", "0", "--n-max", "7")
    assert code == 0
    e = [float(r["energy_peV"]) for r in rows_of(out)]
    expected = [1.4066, 2.4592, 3.3211, 4.0827, 4.7790, 5.4278, 6.0400]
    assert e == pytest.approx(expected, abs=1e-4)


def test_spectrum_neumann_limit(capsys):
    code, out, _ = run(capsys, "spectrum", "--lambda", "1e9", "--n-max", "1")
    assert float(rows_of(out)[0]["zeta"]) == pytest.approx(-1.01879, abs=1e-5)
    code, out, _ = run(capsys, "spectrum", "--lambda", "inf", "--n-max", "1")
    assert float(rows_of(out)[0]["zeta"]) == pytest.approx(-1.01879, abs=1e-5)


def test_json_layout(capsys):
    code, out, _ = run(capsys, "spectrum", "--lambda", "0.11928", "--n-max", "2", "--format", "json")
    doc = json.loads(out)
    assert set(doc) == {"meta", "rows"}
    assert len(doc["meta"]["config_hash"]) == 64
    assert doc["rows"][0]["n"] == 1


def test_precision_flag(capsys):
    _, out, _ = run(capsys, "spectrum", "--lambda", "0", "--n-max", "1", "--precision", "4")
    assert rows_of(out)[0]["zeta"] == "-2.338"


def test_determinism(capsys):
    argv = ("sweep", "--observable", "energy", "--lambda-min", "0", "--lambda-max", "2",
            "--steps", "5", "--format", "json")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_sweep_transition(capsys):
    code, out, _ = run(capsys, "sweep", "--observable", "transition", "--n", "1", "--k", "6",
                       "--lambda-min", "0", "--lambda-max", "1", "--steps", "21")
    v = [float(r["value"]) for r in rows_of(out)]
    assert all(b >= a for a, b in zip(v, v[1:]))
    _, out, _ = run(capsys, "sweep", "--observable", "transition", "--n", "1", "--k", "2",
                    "--lambda-min", "0", "--lambda-max", "1", "--steps", "2")
    assert float(rows_of(out)[0]["value"]) == pytest.approx(254.54, abs=0.05)
    _, out, _ = run(capsys, "sweep", "--observable", "uncertainty", "--lambda-min", "0",
                    "--lambda-max", "1", "--steps", "2")
    assert float(rows_of(out)[0]["value"]) == 0.5


def test_fit_command(capsys):
    code, out, _ = run(capsys, "fit", "--nu", "972.842", "--sigma", "0.0456057",
                       "--transition", "1:6", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert code == 0
    assert 0.105 <= row["lambda_min"] <= 0.125
    assert row["chi2_min"] < 1e-6


def test_fit_at_dirichlet_prediction(capsys):
    nu = transition_frequency(scales_from(), 0.0, 1, 6)
    _, out, _ = run(capsys, "fit", "--nu", repr(nu), "--sigma", "0.0456057", "--format", "json")
    assert json.loads(out)["rows"][0]["lambda_min"] == pytest.approx(0.0, abs=1e-6)


def test_other_commands(capsys):
    for argv in (
        ("eigenfunction", "--lambda", "0.11928", "--points", "5"),
        ("elements", "--lambda", "0.11928", "--op", "p", "--n-max", "2"),
        ("elements", "--lambda", "-0.5", "--op", "x", "--q", "2", "--n-max", "2"),
        ("sumrule", "--kind", "Closure", "--lambda", "0.11928", "--m-max", "400"),
        ("uncertainty", "--lambda", "0.11928"),
        ("extract-g", "--nu", "972.842", "--sigma", "0.0456057"),
        ("penetration", "--lambda", "0.11928"),
        ("phase-map", "--theta-steps", "4", "--eps-steps", "2"),
    ):
        code, out, _ = run(capsys, *argv)
        assert code == 0, argv
        assert len(rows_of(out)) >= 1


def test_extract_g_value(capsys):
    _, out, _ = run(capsys, "extract-g", "--nu", "972.842", "--sigma", "0.0456057")
    assert float(rows_of(out)[0]["g"]) == pytest.approx(9.8125, abs=1.5e-3)


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["spectrum", "--lambda", "oops"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--observable", "energy", "--lambda-min", "0", "--lambda-max", "1", "--steps", "1"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 1


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mass": 1.67e-27, "colour": "red"}))
    code, _, err = run(capsys, "spectrum", "--lambda", "0", "--config", str(cfg))
    assert code == 1
    assert "colour" in err


def test_config_overrides_constants(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"g": 2 * 9.804925, "format": "json"}))
    _, out, _ = run(capsys, "spectrum", "--lambda", "0", "--n-max", "1", "--config", str(cfg))
    doc = json.loads(out)
    assert doc["meta"]["E0_peV"] == pytest.approx(0.6015779 * 2 ** (2 / 3), rel=1e-6)


def test_numerical_failure_exit_2(capsys):
    code, _, err = run(capsys, "fit", "--nu", "2000", "--sigma", "0.04")
    assert code == 2
    assert "50 sigma" in err


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify")
    doc = json.loads(out)
    assert code == 0
    assert doc["meta"]["all_passed"]
    trk = [r for r in doc["rows"] if r["check"].startswith("TRK")]
    assert trk and all(r["residual"] < 1e-3 for r in trk)


def test_verify_detects_tampered_root(capsys):
    code, out, _ = run(capsys, "verify", "--debug-perturb-root", "1e-6")
    doc = json.loads(out)
    assert code == 2
    failed = {r["check"] for r in doc["rows"] if not r["passed"]}
    assert "root residual n<=8" in failed


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "robinbounce", "spectrum", "--lambda", "0", "--n-max", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("n,zeta")
