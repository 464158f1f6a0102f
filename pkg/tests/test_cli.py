"""
Tests for the CLI.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from planar_beltrami import cli
from planar_beltrami.cli import main

SRC = Path(__file__).resolve().parent.parent / "src"


@pytest.fixture
def write_config(tmp_path):
    """Write a run configuration and return its path."""

    def _write(data: dict, name: str = "run.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write


def corrupt_first_row(path: Path) -> None:
    """Add 1 to the B3 value of the first data row of a field CSV."""
    lines = path.read_text().splitlines()
    data_rows = [i for i, line in enumerate(lines) if not line.startswith("#")][1:]
    first = data_rows[0]
    values = lines[first].split(",")
    values[-1] = repr(float(values[-1]) + 1.0)
    lines[first] = ",".join(values)
    path.write_text("\n".join(lines) + "\n")


class TestCLI:
    """Test CLI commands."""

    def test_cli_help(self):
        """Should show help message."""
        result = subprocess.run(
            [sys.executable, "-m", "planar_beltrami.cli", "--help"],
            capture_output=True,
            text=True,
            env={**os.environ, "PYTHONPATH": str(SRC)},
        )
        assert result.returncode == 0
        assert "rot B + alpha(y) B = 0" in result.stdout
        assert "verify" in result.stdout

    def test_no_command(self, capsys):
        """Without a subcommand the help is printed and the exit code is 1."""
        assert main([]) == 1
        assert "planar-beltrami" in capsys.readouterr().out

    def test_example(self, tmp_path):
        """The closed-form comparison passes and writes both outputs."""
        assert main(["example", "--out", str(tmp_path)]) == 0
        document = json.loads((tmp_path / "example.json").read_text())
        assert document["meta"]["points"] == 200
        assert all(c["max_deviation"] < c["threshold"] for c in document["comparisons"])
        assert (tmp_path / "example.csv").exists()

    def test_basis_constant_alpha(self, tmp_path, write_config, constant_run_dict):
        """basis exports every element and checks the constant-alpha closed forms."""
        config = write_config(constant_run_dict)
        assert main(["basis", "--config", config, "--out", str(tmp_path / "out")]) == 0

        manifest = json.loads((tmp_path / "out" / "basis.json").read_text())
        assert len(manifest["elements"]) == 9
        assert manifest["sign"] == 1.0
        for element in manifest["elements"]:
            assert (tmp_path / "out" / element["csv"]).exists()

        check = json.loads((tmp_path / "out" / "closed_form_check.json").read_text())
        assert check["k"] == 2.0
        assert {"A", "f0", "r", "B3[0,u]", "B3[1,u]", "B3[1,v]"} <= set(check["deviations"])
        assert all(value < 1e-6 for value in check["deviations"].values())

    def test_verify(self, tmp_path, write_config, example_run_dict):
        """verify passes on the example and writes its report."""
        config = write_config(example_run_dict)
        assert main(["verify", "--config", config, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "verify.json").read_text())
        assert report["passed"] is True
        assert report["notes"]["top_element"] == "B3[3,v]"
        assert (tmp_path / "residuals.csv").exists()

    def test_verify_exported_fields(self, tmp_path, write_config, example_run_dict, capsys):
        """Exported fields re-check cleanly; a corrupted CSV names its element."""
        config = write_config(example_run_dict)
        out = str(tmp_path / "out")
        assert main(["basis", "--config", config, "--out", out]) == 0
        fields = str(tmp_path / "out" / "fields")
        assert main(["verify", "--config", config, "--out", out, "--fields", fields]) == 0

        corrupt_first_row(tmp_path / "out" / "fields" / "B3_1_u.csv")
        capsys.readouterr()
        assert main(["verify", "--config", config, "--out", out, "--fields", fields]) == 1
        stderr = capsys.readouterr().err
        assert "csv_match" in stderr
        assert "B3[1,u]" in stderr

    def test_bvp(self, tmp_path, write_config, example_run_dict):
        """bvp fits a preset trace and writes coefficients and interior samples."""
        config = write_config(example_run_dict)
        problem = write_config(
            {
                "curve": {"circle": {"r": 0.7, "count": 32}},
                "data": {"preset_trace": "exp_cos"},
                "n_max": 3,
            },
            name="problem.json",
        )
        args = ["bvp", "--config", config, "--problem", problem, "--out", str(tmp_path / "out")]
        assert main(args) == 0
        document = json.loads((tmp_path / "out" / "coefficients.json").read_text())
        assert len(document["coefficients"]) == 7
        assert document["diagnostics"]["n_terms"] == 7
        assert (tmp_path / "out" / "coefficients.csv").exists()
        assert (tmp_path / "out" / "interior.csv").exists()

    def test_outputs_are_reproducible(self, tmp_path, write_config, constant_run_dict):
        """Repeated runs on one config write byte-identical files."""
        config = write_config(constant_run_dict)
        out = tmp_path / "out"

        def snapshot() -> dict[str, bytes]:
            return {
                str(path.relative_to(out)): path.read_bytes()
                for path in sorted(out.rglob("*"))
                if path.is_file()
            }

        assert main(["basis", "--config", config, "--out", str(out)]) == 0
        first = snapshot()
        assert main(["basis", "--config", config, "--out", str(out)]) == 0
        assert snapshot() == first
        assert "fields/B3_2_v.csv" in first

    def test_verify_independent_of_output_directory(
        self, tmp_path, write_config, example_run_dict
    ):
        """verify writes the same bytes wherever its output goes."""
        config = write_config(example_run_dict)
        for name in ("a", "b"):
            assert main(["verify", "--config", config, "--out", str(tmp_path / name)]) == 0
        for file_name in ("verify.json", "residuals.csv"):
            first = (tmp_path / "a" / file_name).read_bytes()
            assert first == (tmp_path / "b" / file_name).read_bytes()


class TestCLIErrors:
    """Test exit codes for failures."""

    def test_missing_config(self, tmp_path, capsys):
        """A missing config file is a configuration error."""
        assert main(["basis", "--config", str(tmp_path / "missing.json")]) == 2
        assert "Configuration error" in capsys.readouterr().err

    def test_bad_expression(self, tmp_path, write_config, example_run_dict):
        """An alpha expression that does not parse is a configuration error."""
        example_run_dict["profile"]["alpha"] = {"expression": "1 + "}
        config = write_config(example_run_dict)
        assert main(["verify", "--config", config, "--out", str(tmp_path)]) == 2

    def test_grid_outside_window(self, tmp_path, write_config, constant_run_dict, capsys):
        """A probe grid reaching past the positivity window is rejected."""
        constant_run_dict["grid"] = {"x": [-0.4, 0.4, 5], "y": [0.0, 1.0, 5]}
        config = write_config(constant_run_dict)
        assert main(["basis", "--config", config, "--out", str(tmp_path)]) == 2
        assert "positivity window" in capsys.readouterr().err

    def test_negative_nmax(self, tmp_path):
        """--nmax must be nonnegative."""
        assert main(["verify", "--nmax", "-1", "--out", str(tmp_path)]) == 2

    def test_bvp_without_problem(self, tmp_path, write_config, example_run_dict):
        """bvp needs --problem."""
        config = write_config(example_run_dict)
        assert main(["bvp", "--config", config, "--out", str(tmp_path)]) == 2

    def test_ill_conditioned_bvp(self, tmp_path, write_config, example_run_dict, capsys):
        """Repeated collocation points without regularization are a numerical failure."""
        config = write_config(example_run_dict)
        problem = write_config(
            {"curve": {"points": [[0.1, 0.2]] * 40}, "data": [1.0] * 40, "n_max": 3},
            name="problem.json",
        )
        args = ["bvp", "--config", config, "--problem", problem, "--out", str(tmp_path / "out")]
        assert main(args) == 3
        assert "Numerical error" in capsys.readouterr().err

    def test_unexpected_error(self, tmp_path, monkeypatch, capsys):
        """Exceptions outside the package hierarchy exit 3, not the verification code."""

        def explode(args):
            raise RuntimeError("disk on fire")

        monkeypatch.setattr(cli, "cmd_basis", explode)
        assert cli.main(["basis", "--out", str(tmp_path)]) == 3
        assert "Unexpected error: disk on fire" in capsys.readouterr().err
