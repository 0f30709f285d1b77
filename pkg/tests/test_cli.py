import json
import subprocess
import sys

import pytest

from urbanqd.cli import main


@pytest.fixture
def files(tmp_path):
    assert main(["synth-benchmark", "--out", str(tmp_path / "empty.geojson"), "--empty"]) == 0
    assert main(["synth-benchmark", "--out", str(tmp_path / "city.geojson")]) == 0
    return tmp_path


def test_evaluate_empty(files, capsys):
    assert main(["evaluate", str(files / "empty.geojson")]) == 0
    out = json.loads(capsys.readouterr().out)
    # 17 m/s everywhere: nothing comfortable, everything dangerous
    assert (out["fsi"], out["b_c"], out["b_d"]) == (0.0, 0.0, 160_000.0)


def test_evaluate_benchmark(files, capsys):
    assert main(["evaluate", str(files / "city.geojson")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["fsi"] == 0.75
    assert out["stats"]["building_count"] == 100


def test_run_zero_selections_then_merge_self(files, capsys):
    run_dir = files / "r0"
    assert main(["run", "--layout", str(files / "city.geojson"), "--selections", "0",
                 "--out-dir", str(run_dir)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["elites"] == 1 and out["evaluations"] == 1
    assert (run_dir / "runlog.csv").read_text().strip() == \
        "selection,inserted1,inserted2,coverage,max_fitness,qd_score,ms"
    assert main(["merge", str(run_dir), str(run_dir), "--out-dir", str(files / "m")]) == 0
    assert (files / "m" / "archive.csv").read_text() == (run_dir / "archive.csv").read_text()
    capsys.readouterr()
    assert main(["stats", str(files / "m")]) == 0
    assert json.loads(capsys.readouterr().out)["coverage"] == 1 / 400


def test_run_config_file_and_render(files):
    conf = files / "conf.json"
    conf.write_text(json.dumps({"selections": 2, "map": {"range_c": [0, 1],
                                                         "range_d": [0, 160000]}}))
    assert main(["run", "--layout", str(files / "city.geojson"), "--config", str(conf),
                 "--out-dir", str(files / "r")]) == 0
    saved = json.loads((files / "r" / "config.json").read_text())
    assert saved["selections"] == 2 and saved["map"]["range_d"] == [0, 160000]
    assert main(["render", "--archive", str(files / "r"), "--out", str(files / "m.svg")]) == 0
    assert main(["render", "--layout", str(files / "city.geojson"),
                 "--out", str(files / "c.svg")]) == 0
    assert (files / "c.svg").read_text().startswith("<svg")


def test_windrose_option(files, capsys):
    rose = files / "rose.csv"
    rose.write_text("direction,hours\nN,0\nE,0\nS,0\nW,10\n")
    assert main(["evaluate", str(files / "city.geojson"), "--windrose", str(rose)]) == 0
    assert json.loads(capsys.readouterr().out)["b_d"] > 0


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["run", "--layout", "x.geojson"]) == 1
    assert main(["render", "--out", "x.svg"]) == 1
    assert "urbanqd: error:" in capsys.readouterr().err


def test_runtime_errors_exit_2(files, capsys):
    assert main(["evaluate", str(files / "missing.geojson")]) == 2
    (files / "bad.geojson").write_text("{}")
    assert main(["evaluate", str(files / "bad.geojson")]) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert all(line.startswith("urbanqd: error:") for line in err)


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "urbanqd", "evaluate",
                           str(files / "empty.geojson")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["fsi"] == 0.0
