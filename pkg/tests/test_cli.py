from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest

from vortexmass.cli import ConfigError, main, parse_config, run_scenario


def test_minimal_square_defaults():
    cfg = parse_config("scenario = fd\n")
    assert cfg.data == "square" and cfg.alpha == 0.5 and cfg.T == 1.0
    d = cfg.initial_data()
    assert d.mass == 1.0


def test_bad_alpha_message():
    with pytest.raises(ConfigError, match=r"alpha outside \(0,1\)"):
        parse_config("scenario = fd\nalpha = 1.5\n")


def test_all_errors_reported():
    text = "scenario = characteristics\nalpha = 1.5\nbogus = 3\ndata = steps\nedges = 0,1,2\nvalues = 1,2\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    errs = info.value.errors
    assert any("alpha outside" in e for e in errs)
    assert any("bogus" in e for e in errs)
    assert any("non-increasing" in e for e in errs)


def test_cfl_override_rejected_at_parse_time():
    with pytest.raises(ConfigError, match="CFL"):
        parse_config("scenario = fd\ndelta = 0.1\nh_rho = 0.001\nh_t = 0.01\n")
    parse_config("scenario = fd\ndelta = 0.1\nh_rho = 0.01\nh_t = 0.001\n")


def test_unused_key_rejected():
    with pytest.raises(ConfigError, match="not used"):
        parse_config("scenario = exact\ndelta = 0.1\n")


def test_comments_and_overrides():
    cfg = parse_config("# demo\nscenario = spurious\nalpha = 0.3  # mobility\n", {"T": "2"})
    assert cfg.alpha == 0.3 and cfg.T == 2.0


def read_csv(path):
    return np.loadtxt(path, delimiter=",", comments="#", skiprows=2)


def test_fd_scenario_outputs(tmp_path):
    cfg = parse_config("scenario = fd\ndelta = 0.1\ndeltas = 0.2,0.1,0.05\nn_out = 51\n")
    code = run_scenario(cfg, tmp_path)
    assert code == 0
    meta = (tmp_path / "metadata.txt").read_text()
    assert "result.measured_slope" in meta and "status = ok" in meta
    lines = (tmp_path / "data.csv").read_text().splitlines()
    assert lines[1] == "t,rho,m,u"
    data = read_csv(tmp_path / "data.csv")
    assert data.shape[1] == 4
    assert (tmp_path / "convergence.csv").exists()


def test_determinism(tmp_path):
    cfg = parse_config("scenario = viscous\nepsilon = 0.05\nT = 0.5\n")
    assert run_scenario(cfg, tmp_path / "a") == 0
    assert run_scenario(cfg, tmp_path / "b") == 0
    for name in ("data.csv", "metadata.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_spurious_emits_both(tmp_path):
    assert main(["spurious", "--out", str(tmp_path)]) == 0
    sp = read_csv(tmp_path / "data.csv")
    fan = read_csv(tmp_path / "fan.csv")
    assert sp.shape == fan.shape
    assert sp[-1, 2] == pytest.approx(1.0)  # the shock carries the full mass
    assert np.all(fan[:, 2] <= 1.0 + 1e-12)


@pytest.mark.parametrize(
    "scenario,extra",
    [
        ("exact", []),
        ("characteristics", ["--set", "data=triangle"]),
        ("shock-two-bumps", ["--set", "T=0.5"]),
        ("asymptotics", []),
    ],
)
def test_scenarios_run(tmp_path, scenario, extra):
    assert main([scenario, "--out", str(tmp_path), *extra]) == 0
    assert "status = ok" in (tmp_path / "metadata.txt").read_text()


def test_acceptance_failure_exit_code(tmp_path):
    # gap data over the full rescaled grid: the profile error cannot decay
    code = main(["asymptotics", "--out", str(tmp_path), "--set", "data=gap", "--set", "y_min=0"])
    assert code == 2
    assert "acceptance-failed" in (tmp_path / "metadata.txt").read_text()


def test_runtime_error_exit_code(tmp_path):
    code = main(["exact", "--out", str(tmp_path), "--set", "times=0"])
    assert code == 1
    assert "status = error" in (tmp_path / "metadata.txt").read_text()


def test_config_file_and_module_entry(tmp_path):
    conf = tmp_path / "run.cfg"
    conf.write_text("alpha = 0.5\ndata = square\nT = 0.5\n")
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "vortexmass", "characteristics", "--config", str(conf), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "data.csv").exists()


def test_bad_config_exit_code(tmp_path, capsys):
    assert main(["fd", "--out", str(tmp_path), "--set", "alpha=2"]) == 1
    assert "alpha outside" in capsys.readouterr().err
