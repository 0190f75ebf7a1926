"""Tests for the CLI module."""

import json
from textwrap import dedent
from unittest.mock import patch

import pytest
import yaml
from click.testing import CliRunner

from matroid_center.cli import EXIT_CAP, EXIT_INFEASIBLE, EXIT_INPUT, main
from matroid_center.display import console
from matroid_center.models import db

LINE = dedent(
    """\
    name: line
    metric: {kind: euclidean}
    matroid:
      kind: partition
      capacities: {A: 1, B: 2}
    points:
      - {id: a, coords: [0], part: A, group: left}
      - {id: b, coords: [1], part: B, group: left}
      - {id: c, coords: [10], part: A, group: right}
      - {id: d, coords: [11], part: B, group: right}
      - {id: e, coords: [20], part: B}
    """
)


@pytest.fixture(autouse=True)
def wide_console():
    """Widen the Rich console so messages are not wrapped."""
    original = console._width
    console.width = 300
    yield
    console._width = original


@pytest.fixture
def runner():
    """Create a Click CLI runner."""
    return CliRunner()


@pytest.fixture
def instance_file(tmp_path):
    """Line instance with a partition matroid."""
    path = tmp_path / "line.yaml"
    path.write_text(LINE)
    return path


@pytest.fixture
def db_path(tmp_path):
    """Run history database in a temporary directory."""
    path = tmp_path / "runs.db"
    yield path
    db.close()


class TestMain:
    """Tests for the command group."""

    def test_help(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        assert "Small-space streaming algorithms" in result.output
        for command in ("run", "generate", "verify", "intersect", "history", "show"):
            assert command in result.output

    def test_version(self, runner):
        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert "version" in result.output.lower()


class TestRunCommand:
    """Tests for the run command."""

    def test_json_output(self, runner, instance_file):
        result = runner.invoke(
            main, ["run", str(instance_file), "-e", "0.5", "--verify", "-f", "json"]
        )
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["status"] == "solved"
        assert data["cost"] == 1.0
        assert data["ratio"] == 1.0
        assert "wall_clock" not in data

    def test_table_output(self, runner, instance_file):
        result = runner.invoke(main, ["run", str(instance_file), "-e", "0.5", "-v"])
        assert result.exit_code == 0
        assert "Solved" in result.output
        assert "Ladder guesses" in result.output
        assert "Guess Events" in result.output

    def test_markdown_output(self, runner, instance_file):
        result = runner.invoke(main, ["run", str(instance_file), "-e", "0.5", "-f", "markdown"])
        assert result.exit_code == 0
        assert "# Run report: line" in result.output

    def test_config_file_and_overrides(self, runner, instance_file, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text(yaml.safe_dump({"run": {"epsilon": 0.5, "guesses": "strapped"}}))
        result = runner.invoke(
            main, ["run", str(instance_file), "-c", str(config), "--timing", "-f", "json"]
        )
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["guesses"] == "strapped"
        assert data["epsilon"] == 0.5
        assert "wall_clock" in data

    def test_report_file(self, runner, instance_file, tmp_path):
        report = tmp_path / "report.md"
        result = runner.invoke(
            main, ["run", str(instance_file), "-e", "0.5", "--report", str(report)]
        )
        assert result.exit_code == 0
        assert report.read_text().startswith("# Run report: line")

    def test_infeasible_exit_code(self, runner, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text(LINE.replace("{A: 1, B: 2}", "{A: 0, B: 0}"))
        result = runner.invoke(main, ["run", str(path), "-f", "json"])
        assert result.exit_code == EXIT_INFEASIBLE
        assert '"status": "infeasible"' in result.output

    def test_invalid_input_exit_code(self, runner, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text(LINE.replace("part: A, group: left", "part: Q"))
        result = runner.invoke(main, ["run", str(path)])
        assert result.exit_code == EXIT_INPUT
        assert "Unknown part label 'Q'" in result.output

    def test_invalid_setting_exit_code(self, runner, instance_file):
        result = runner.invoke(main, ["run", str(instance_file), "--passes", "2", "-m", "knapsack"])
        assert result.exit_code == EXIT_INPUT
        assert "Two passes" in result.output

    def test_negative_budget_exit_code(self, runner, instance_file):
        result = runner.invoke(
            main, ["run", str(instance_file), "--mode", "knapsack", "--budget", "-1"]
        )
        assert result.exit_code == EXIT_INPUT
        assert "budget must be non-negative" in result.output

    def test_negative_budget_in_config_file(self, runner, instance_file, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text(yaml.safe_dump({"run": {"mode": "knapsack", "budget": -2}}))
        result = runner.invoke(main, ["run", str(instance_file), "-c", str(config)])
        assert result.exit_code == EXIT_INPUT
        assert "budget must be non-negative" in result.output

    def test_efficient_finisher_with_outliers_exit_code(self, runner, instance_file):
        result = runner.invoke(
            main,
            ["run", str(instance_file), "-m", "matroid-outlier", "--finisher", "efficient"],
        )
        assert result.exit_code == EXIT_INPUT
        assert "efficient finisher only applies" in result.output

    def test_missing_mode_section(self, runner, instance_file):
        result = runner.invoke(main, ["run", str(instance_file), "-m", "knapsack"])
        assert result.exit_code == EXIT_INPUT
        assert "knapsack section" in result.output

    def test_cap_exit_code(self, runner, instance_file):
        result = runner.invoke(
            main, ["run", str(instance_file), "--verify", "--exact-cap", "2"]
        )
        assert result.exit_code == EXIT_CAP
        assert "enumeration cap" in result.output

    def test_save(self, runner, instance_file, db_path):
        result = runner.invoke(
            main, ["--db", str(db_path), "run", str(instance_file), "-e", "0.5", "--save"]
        )
        assert result.exit_code == 0
        assert "Saved as run 1" in result.output

        result = runner.invoke(main, ["--db", str(db_path), "history"])
        assert result.exit_code == 0
        assert "Saved Runs (1 shown)" in result.output

        result = runner.invoke(main, ["--db", str(db_path), "show", "1", "-f", "json"])
        assert result.exit_code == 0
        assert json.loads(result.output)["instance"] == "line"

    def test_db_from_environment(self, runner, instance_file, db_path):
        result = runner.invoke(
            main,
            ["run", str(instance_file), "-e", "0.5", "--save"],
            env={"MATROID_CENTER_DB": str(db_path)},
        )
        assert result.exit_code == 0
        assert db_path.exists()


class TestGenerateCommands:
    """Tests for the generate commands."""

    def test_random(self, runner, tmp_path):
        output = tmp_path / "random.yaml"
        result = runner.invoke(
            main, ["generate", "random", "-n", "8", "--z", "1", "--seed", "2", "-o", str(output)]
        )
        assert result.exit_code == 0
        assert "Wrote 9 points" in result.output
        document = yaml.safe_load(output.read_text())
        assert document["outliers"] == {"z": 1}
        assert len(document["points"]) == 9

    def test_lowerbound_check(self, runner, tmp_path):
        output = tmp_path / "lb.yaml"
        result = runner.invoke(
            main,
            ["generate", "lowerbound", "--q", "2", "--bits", "0110", "--index", "2", "--check",
             "-o", str(output)],
        )
        assert result.exit_code == 0
        assert "bit 2 = 1" in result.output
        assert "Optimum matches the queried bit" in result.output

    def test_lowerbound_forced_bit(self, runner, tmp_path):
        output = tmp_path / "lb.yaml"
        result = runner.invoke(
            main,
            ["generate", "lowerbound", "--q", "2", "--index", "3", "--bit", "0", "-o", str(output)],
        )
        assert result.exit_code == 0
        assert "bit 3 = 0" in result.output
        assert yaml.safe_load(output.read_text())["name"] == "lowerbound-q2-i3-b0"

    def test_lowerbound_invalid_bits(self, runner, tmp_path):
        result = runner.invoke(
            main, ["generate", "lowerbound", "--q", "2", "--bits", "01", "-o", str(tmp_path / "x")]
        )
        assert result.exit_code == EXIT_INPUT
        assert "bits must be" in result.output

    @patch("matroid_center.cli.verify_dichotomy", return_value=False)
    def test_lowerbound_check_failure(self, mock_verify, runner, tmp_path):
        result = runner.invoke(
            main, ["generate", "lowerbound", "--check", "-o", str(tmp_path / "lb.yaml")]
        )
        assert result.exit_code == EXIT_INFEASIBLE
        assert "does not match" in result.output
        mock_verify.assert_called_once()


class TestVerifyCommand:
    """Tests for the verify command."""

    def test_optimum(self, runner, instance_file):
        result = runner.invoke(main, ["verify", str(instance_file)])
        assert result.exit_code == 0
        assert "Optimal cost: 1" in result.output

    def test_baseline(self, runner, instance_file):
        result = runner.invoke(
            main, ["verify", str(instance_file), "-m", "kcenter-doubling", "--k", "2", "--baseline"]
        )
        assert result.exit_code == 0
        assert "Optimal cost: 9" in result.output
        assert "Baseline gonzalez: 10 with a, e" in result.output

    def test_cap(self, runner, instance_file):
        result = runner.invoke(main, ["verify", str(instance_file), "--cap", "2"])
        assert result.exit_code == EXIT_CAP


class TestIntersectCommand:
    """Tests for the intersect command."""

    def test_groups(self, runner, instance_file):
        result = runner.invoke(main, ["intersect", str(instance_file)])
        assert result.exit_code == 0
        assert "Size: 2 (of 2 group(s))" in result.output

    def test_needs_groups(self, runner, tmp_path):
        path = tmp_path / "plain.yaml"
        path.write_text(LINE.replace(", group: left", "").replace(", group: right", ""))
        result = runner.invoke(main, ["intersect", str(path)])
        assert result.exit_code == EXIT_INPUT
        assert "No point has a 'group' field" in result.output


class TestHistoryCommands:
    """Tests for the history and show commands."""

    def test_empty_history(self, runner, db_path):
        result = runner.invoke(main, ["--db", str(db_path), "history"])
        assert result.exit_code == 0
        assert "No runs have been saved yet" in result.output

    def test_show_missing(self, runner, db_path):
        result = runner.invoke(main, ["--db", str(db_path), "show", "7"])
        assert result.exit_code == 0
        assert "No saved run with id 7" in result.output
