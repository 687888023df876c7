import os

import numpy as np
import pytest

from chemostokes.cli import main

TINY = """\
grid.n = 8,8
control.end_time = 0.05
control.cadence = 0.01
"""


@pytest.fixture
def tiny_cfg(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY + f"output.dir = {tmp_path / 'out'}\n")
    return path


class TestRunCommand:
    def test_run_succeeds(self, tiny_cfg, tmp_path, capsys):
        assert main(["run", str(tiny_cfg)]) == 0
        out = tmp_path / "out"
        assert (out / "timeseries.csv").exists()
        assert (out / "summary.txt").exists()
        assert "run complete" in capsys.readouterr().out

    def test_validation_error_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text(TINY + "model.mu1 = 0\n")
        assert main(["run", str(bad)]) == 1
        assert "mu1 must be > 0" in capsys.readouterr().err

    def test_unknown_key_exit_1(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text(TINY + "xi0 = 1\n")
        assert main(["run", str(bad)]) == 1

    def test_missing_file_exit_1(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.cfg")]) == 1

    def test_aborted_run_exit_2_with_partial(self, tmp_path, capsys):
        cfg = tmp_path / "abort.cfg"
        cfg.write_text(TINY.replace("control.end_time = 0.05",
                                    "control.end_time = 5.0")
                       + "control.blowup_ceiling = 1.05\n"
                       + f"output.dir = {tmp_path / 'out'}\n")
        assert main(["run", str(cfg)]) == 2
        assert (tmp_path / "out" / "timeseries.csv").exists()
        assert "aborted" in capsys.readouterr().err

    def test_default_output_dir(self, tmp_path):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY)
        assert main(["run", str(cfg)]) == 0
        assert (tmp_path / "tiny_out" / "timeseries.csv").exists()


class TestCheckAndPlot:
    def test_check_rewrites_summary(self, tiny_cfg, tmp_path, capsys):
        main(["run", str(tiny_cfg)])
        out = tmp_path / "out"
        (out / "summary.txt").unlink()
        assert main(["check", str(out)]) == 0
        assert (out / "summary.txt").exists()
        text = capsys.readouterr().out
        assert "|c|_inf nonincreasing: True" in text

    def test_plot_writes_svgs(self, tiny_cfg, tmp_path):
        main(["run", str(tiny_cfg)])
        out = tmp_path / "out"
        assert main(["plot", str(out)]) == 0
        for name in ("deviations.svg", "signal_velocity.svg", "energy.svg"):
            assert (out / name).exists()
            assert (out / name).stat().st_size > 0

    def test_check_missing_dir_exit_1(self, tmp_path):
        assert main(["check", str(tmp_path / "missing")]) == 1


class TestSweepCommand:
    def test_sweep_runs_and_summarizes(self, tmp_path, capsys):
        cfg = tmp_path / "base.cfg"
        cfg.write_text(TINY)
        out = tmp_path / "sweep"
        assert main(["sweep", str(cfg), "--chi", "0.05,0.1", "--out", str(out)]) == 0
        assert (out / "sweep_summary.csv").exists()
        assert (out / "chi_0.05" / "timeseries.csv").exists()
        assert (out / "chi_0.1" / "timeseries.csv").exists()
        stdout = capsys.readouterr().out
        assert "chi/mu" in stdout

    def test_sweep_rejects_bad_lists(self, tmp_path, capsys):
        cfg = tmp_path / "base.cfg"
        cfg.write_text(TINY)
        assert main(["sweep", str(cfg), "--chi", "0.1,0.05",
                     "--out", str(tmp_path / "s1")]) == 1
        assert main(["sweep", str(cfg), "--chi", "",
                     "--out", str(tmp_path / "s2")]) == 1
