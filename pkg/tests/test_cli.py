import subprocess
import sys

import numpy as np

from pgq import read_csv
from pgq.cli import main


class TestArgumentHandling:
    def test_unknown_flag_prints_usage_and_exits_nonzero(self, capsys):
        rc = main(["baird-sampled", "--algo", "gq", "--out", "x.csv", "--frobnicate"])
        captured = capsys.readouterr()
        assert rc != 0
        assert "usage" in captured.err

    def test_unknown_subcommand_exits_one(self, capsys):
        assert main(["baird-resampled"]) == 1

    def test_missing_required_out_exits_one(self, capsys):
        assert main(["baird-sampled", "--algo", "gq"]) == 1

    def test_bad_algorithm_choice_exits_one(self, capsys):
        assert main(["baird-sampled", "--algo", "sarsa", "--out", "x.csv"]) == 1

    def test_semantic_config_error_exits_one(self, tmp_path, capsys):
        out = tmp_path / "x.csv"
        rc = main(["baird-sampled", "--algo", "gq", "--steps", "-3", "--out", str(out)])
        assert rc == 1
        assert "config error" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0


class TestExperimentCommands:
    def test_sampled_writes_parseable_csv(self, tmp_path, capsys):
        out = tmp_path / "gq.csv"
        rc = main(
            ["baird-sampled", "--algo", "gq", "--steps", "30", "--measure-every", "10",
             "--runs", "2", "--seed", "5", "--out", str(out)]
        )
        assert rc == 0
        series = read_csv(out)
        assert series.algorithm == "gq"
        assert [row.step for row in series.for_run(1)] == [0, 10, 20, 30]
        assert "wrote" in capsys.readouterr().out

    def test_trajectory_writes_parseable_csv(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        rc = main(
            ["baird-trajectory", "--algo", "pgq-alg1", "--steps", "30",
             "--runs", "2", "--out", str(out)]
        )
        assert rc == 0
        assert len(read_csv(out).run_indices()) == 2

    def test_byte_identical_reruns(self, tmp_path):
        args = ["baird-sampled", "--algo", "pgq-derived", "--steps", "40", "--seed", "11"]
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(first)]) == 0
        assert main(args + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_off_policy_flags_accepted(self, tmp_path):
        out = tmp_path / "off.csv"
        rc = main(
            ["baird-sampled", "--algo", "pgq-alg1", "--alpha", "0.005", "--beta", "0.01",
             "--tau-target", "0.4", "--tau-behavior", "0.7", "--steps", "30", "--out", str(out)]
        )
        assert rc == 0

    def test_universal_divergence_exits_two_with_csv_intact(self, tmp_path, capsys):
        # alpha 1e150 overruns the divergence guard on the first update.
        out = tmp_path / "blown.csv"
        rc = main(
            ["baird-sampled", "--algo", "qlearning", "--alpha", "1e150", "--steps", "20",
             "--runs", "2", "--out", str(out)]
        )
        assert rc == 2
        assert "diverged" in capsys.readouterr().err
        series = read_csv(out)
        for run in series.run_indices():
            rows = series.for_run(run)
            assert rows[-1].diverged
            assert all(np.isfinite(row.mspbe) for row in rows)


class TestGradCheckCommand:
    def test_reports_and_exits_zero(self, capsys):
        rc = main(["grad-check", "--draws", "2", "--seed", "3"])
        captured = capsys.readouterr()
        assert rc == 0
        assert "max relative error" in captured.out
        assert "[ok]" in captured.out

    def test_module_entry_point(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "pgq.cli", "grad-check", "--draws", "1"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert "max relative error" in result.stdout
