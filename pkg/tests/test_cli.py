import csv
import io
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from susyosc.cli import RunConfig, build_config, build_parser, main, read_config_file
from susyosc.errors import ConfigError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.mark.parametrize("eps", ["-1.4444444444444444", "0.45"])
def test_potential_difference_is_two(capsys, eps):
    code, out, _ = run_cli(capsys, "potential", "--eps", eps, "--gamma", "4", "--grid-min", "-6", "--grid-max", "6",
                           "--grid-points", "601")
    assert code == 0
    header, data = parse_csv(out)
    assert header == ["x", "V1", "V2", "diff"]
    assert np.max(np.abs(data[:, 3] - 2)) < 1e-8


def test_potential_json_report(capsys, tmp_path):
    out_file = tmp_path / "pot.json"
    code, out, _ = run_cli(capsys, "potential", "--format", "json", "--out", str(out_file), "--grid-points", "201")
    assert code == 0
    assert json.loads(out)["sup_deviation"] < 1e-8
    doc = json.loads(out_file.read_text())
    assert doc["meta"]["command"] == "potential"
    assert doc["meta"]["parameters"]["gamma"] == 2.0
    assert "numpy" in doc["meta"]["versions"]
    assert doc["columns"] == ["x", "V1", "V2", "diff"]


@pytest.mark.parametrize("argv", [
    ["potential", "--gamma", "0", "--eps", "0"],
    ["potential", "--eps", "0.5"],
    ["potential", "--eps", "-0.5"],
    ["potential", "--grid-points", "50"],
    ["coherent", "--nu", "0"],
    ["potential", "--eps", "abc"],
    ["nonsense"],
])
def test_config_errors_exit_2(capsys, argv):
    code = None
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    err = capsys.readouterr().err
    assert code == 2
    body = json.loads(err.strip().splitlines()[-1])
    assert "error" in body and "message" in body


def test_numerical_failure_exit_3(capsys):
    # the first moment of the nu = -2 measure diverges
    code, _, err = run_cli(capsys, "measure", "--nu", "-2", "--no-identity")
    assert code == 3
    assert json.loads(err)["error"] == "DomainError"


def test_ladder_check_pass_and_corrupt(capsys):
    code, out, _ = run_cli(capsys, "ladder-check")
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["pass"] is True
    assert len(rep["kernel"]) == 4
    assert all(k["lower_residual"] < 1e-5 for k in rep["kernel"] if k["physical"])
    code, out, _ = run_cli(capsys, "ladder-check", "--corrupt")
    assert code == 1
    assert json.loads(out)["report"]["pass"] is False


def test_coherent_files(capsys, tmp_path):
    d = tmp_path / "co"
    code, out, _ = run_cli(capsys, "coherent", "--out", str(d), "--grid-points", "201", "--z-re", "100",
                           "--frames", "4", "--z-steps", "21")
    assert code == 0
    assert sorted(os.listdir(d)) == ["density.csv", "mean_energy.csv", "overlap.csv"]
    header, dens = parse_csv((d / "density.csv").read_text())
    assert header == ["x", "t", "rho"]
    for t in np.unique(dens[:, 1]):
        sel = dens[dens[:, 1] == t]
        assert abs(np.trapezoid(sel[:, 2], sel[:, 0]) - 1) < 1e-6
    header, me = parse_csv((d / "mean_energy.csv").read_text())
    assert header[:2] == ["|z|", "mean_energy"]
    assert np.all(np.diff(me[:, 1]) > 0)
    header, ov = parse_csv((d / "overlap.csv").read_text())
    assert header == ["re_z", "im_z", "overlap_mod"]
    assert ov[:, 2].max() == pytest.approx(1.0, abs=1e-12)
    assert json.loads(out)["files"]["density"].endswith("density.csv")


def test_wigner_command(capsys):
    code, out, _ = run_cli(capsys, "wigner", "--state", "ground", "--phase-points", "81", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["x", "p", "W"]
    assert doc["report"]["mass_error"] < 1e-4
    assert len(doc["rows"]) == 81 * 81


def test_mandel_command(capsys):
    code, out, _ = run_cli(capsys, "mandel", "--nu", "1", "--z-steps", "51")
    assert code == 0
    header, data = parse_csv(out)
    assert header == ["|z|", "Q"]
    assert data[0, 1] == 0.0
    assert np.all(data[data[:, 0] >= 1, 1] < 0)


def test_measure_command(capsys):
    code, out, _ = run_cli(capsys, "measure", "--nu", "1", "--no-identity", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["report"]["max_rel_error"] < 1e-4
    assert doc["report"]["f_min_sampled"] >= 0


def test_deterministic_output(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["potential", "--grid-points", "301", "--out", str(path)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    # a fresh interpreter reproduces the bytes too
    res = subprocess.run([sys.executable, "-m", "susyosc.cli", "potential", "--grid-points", "301"],
                         capture_output=True)
    assert res.stdout == a.read_bytes()


def test_csv_full_precision(capsys):
    _, out, _ = run_cli(capsys, "potential", "--grid-points", "101")
    x = out.splitlines()[2].split(",")[0]
    assert float(x) == np.linspace(-10, 10, 101)[1]


def test_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# figure parameters\neps = 0.45\ngamma=4\ngrid-points = 301\n")
    args = build_parser().parse_args(["potential", "--config", str(cfg_file), "--gamma", "3"])
    cfg = build_config(args)
    assert (cfg.eps, cfg.gamma, cfg.grid_points) == (0.45, 3.0, 301)
    assert read_config_file(cfg_file)["grid_points"] == "301"


@pytest.mark.parametrize("text", ["bogus = 1\n", "eps 0.1\n", "eps = x\n"])
def test_bad_config_file(tmp_path, text):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text(text)
    args = build_parser().parse_args(["potential", "--config", str(cfg_file)])
    with pytest.raises(ConfigError):
        build_config(args)


def test_missing_config_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "potential", "--config", str(tmp_path / "none.cfg"))
    assert code == 2


def test_grid_points_env(monkeypatch):
    monkeypatch.setenv("SUSYOSC_GRID_POINTS", "401")
    cfg = RunConfig().validate()
    assert cfg.grid_points == 401 and cfg.grid().size == 401


def test_console_script_env_override(tmp_path):
    env = dict(os.environ, SUSYOSC_GRID_POINTS="151")
    res = subprocess.run([sys.executable, "-m", "susyosc.cli", "potential"], capture_output=True, text=True, env=env)
    assert res.returncode == 0
    assert len(res.stdout.strip().splitlines()) == 152
    res = subprocess.run([sys.executable, "-m", "susyosc.cli", "potential", "--gamma", "-1"],
                         capture_output=True, text=True)
    assert res.returncode == 2
    assert json.loads(res.stderr)["error"] == "ConfigError"


def test_closed_stdout_pipe_exits_cleanly():
    proc = subprocess.Popen(
        [sys.executable, "-m", "susyosc.cli", "potential", "--format", "json"],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE,
    )
    proc.stdout.read(10)
    proc.stdout.close()
    err = proc.stderr.read().decode()
    assert proc.wait(timeout=120) == 0
    assert "Traceback" not in err
