import csv
import json
import subprocess
import sys

import pytest

from srb.cli import EXIT_CONFIG, SWEEP_COLUMNS, main

SMALL = """\
protocol: srb
lengths: [1, 4, 10]
sequences: 10
shots: 40
master_seed: 5
noise:
  per_clifford: {kind: tuned, r: 0.99, t: 0.98}
detector: {bright_mean: 9.0, dark_mean: 0.1, tomography_shots: 2000}
analysis: {bootstrap: 20}
"""


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL)
    return p


def test_version_entry_point():
    out = subprocess.run([sys.executable, "-m", "srb", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()


def test_bad_arguments_exit_2(capsys):
    assert main([]) == EXIT_CONFIG
    assert main(["sweep", "--kind", "nope", "--epsilons", "0.1"]) == EXIT_CONFIG


def test_invalid_config_reports_line(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("lengths: [1, 2]\nsequences: 3\nnoise:\n  per_phase_gate: {kind: laser}\n")
    assert main(["run", str(p), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "bad.yaml:4" in err


def test_zero_noise_exact_run(tmp_path, capsys):
    p = tmp_path / "z.yaml"
    p.write_text("mode: exact\nlengths: [1, 10, 100]\nsequences: 9\nweyl_sampling: balanced\n")
    out = tmp_path / "o"
    assert main(["run", str(p), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["derived"]["r"] == pytest.approx(1, abs=1e-9)
    assert report["derived"]["t"] == pytest.approx(1, abs=1e-9)
    assert report["provenance"]["group_checksum"]
    rows = list(csv.DictReader(open(out / "decay_curves.csv")))
    assert {r["analysis"] for r in rows} == {"standard", "leakage"}


def test_run_then_analyze_is_identical(config, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", str(config), "--out", str(out)]) == 0
    first = json.loads((out / "report.json").read_text())
    again = tmp_path / "re.json"
    assert main(["analyze", str(out / "dataset.csv"), "--response", str(out / "report.json"),
                 "--bootstrap", "20", "--out", str(again), "--plot", str(tmp_path / "c.csv")]) == 0
    second = json.loads(again.read_text())
    for key in ("standard", "leakage", "derived"):
        assert first[key] == second[key]
    assert (tmp_path / "c.csv").read_text() == (out / "decay_curves.csv").read_text()


def test_analyze_schema_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("protocol,length\nsrb,1\n")
    assert main(["analyze", str(bad)]) == 2
    assert "missing columns" in capsys.readouterr().err


def test_sweep(config, tmp_path, capsys):
    out = tmp_path / "sw"
    assert main(["sweep", str(config), "--kind", "intensity", "--epsilons", "0.0,0.05",
                 "--set", "noise.per_clifford=null", "--set", "analysis.bootstrap=5",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "sweep.csv")))
    assert tuple(rows[0]) == SWEEP_COLUMNS and len(rows) == 2
    assert float(rows[0]["r_zz_analytic"]) == 1.0
    assert float(rows[1]["r_zz_analytic"]) == pytest.approx(1 - 0.05**2)
    prov = json.loads((out / "sweep.provenance.json").read_text())
    assert prov["kind"] == "intensity"


def test_detector_calibrate(tmp_path, capsys):
    out = tmp_path / "det.json"
    assert main(["detector-calibrate", "--shots", "20000", "--seed", "1", "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    assert body["thresholds"] == [3, 14]
    assert body["max_abs_deviation"] < 0.02
    assert main(["detector-calibrate", "--bright", "0.1", "--dark", "1.0"]) == 2


def test_build_tables_from_cache(tmp_path, capsys):
    from srb.tables import packaged_cache_dir
    import shutil
    cache = tmp_path / "cache"
    shutil.copytree(packaged_cache_dir(), cache)
    assert main(["build-tables", "--cache-dir", str(cache)]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["rebuilt"] is False and body["recipes"] == 216
