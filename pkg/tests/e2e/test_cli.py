"""Command-line runs: exit codes, report files and byte-identical reruns"""

import json

from main import EXIT_CONFIG, EXIT_OK, main


def test_heat_run_is_reproducible(tmp_path):
    out = tmp_path / "heat"
    argv = ["heat", "--env", "testing", "--out", str(out), "--stable-output", "--seed", "42"]

    assert main(argv) == EXIT_OK
    first = (out / "report.json").read_bytes()
    table = (out / "heat_heat_equality_defects.csv").read_bytes()

    assert main(argv) == EXIT_OK
    assert (out / "report.json").read_bytes() == first
    assert (out / "heat_heat_equality_defects.csv").read_bytes() == table

    report = json.loads(first)
    assert report["passed"]
    assert report["seed"] == 42
    assert report["failed_checks"] == []


def test_planar_sources_from_the_command_line(tmp_path):
    out = tmp_path / "planar"
    status = main(["heat", "--env", "testing", "--out", str(out), "--stable-output", "--sources", "(-1,0,1);(1,1,2)"])
    assert status == EXIT_OK
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["config"]["sources"] == [[-1.0, 0.0, 1.0], [1.0, 1.0, 2.0]]


def test_negative_time_step_is_a_config_error(tmp_path, capsys):
    assert main(["csf", "--env", "testing", "--out", str(tmp_path), "--dt", "-1"]) == EXIT_CONFIG
    assert "dt" in capsys.readouterr().err
    assert not (tmp_path / "report.json").exists()


def test_unknown_config_key_is_a_config_error(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"experiment": "heat", "mystery": True}))
    assert main(["heat", "--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_CONFIG
