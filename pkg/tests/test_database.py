"""Tests for the database module."""

import math
from unittest.mock import patch

import pytest

from matroid_center.database import (
    get_default_db_path,
    init_database,
    list_runs,
    load_report,
    save_run,
)
from matroid_center.models import RunRecord, db
from matroid_center.report import Report


def make_report(**overrides) -> Report:
    values = {
        "instance": "line",
        "n": 5,
        "algorithm": "one-pass",
        "mode": "matroid",
        "finisher": "brute",
        "guesses": "ladder",
        "epsilon": 0.5,
        "z": None,
        "k": None,
        "budget": None,
        "rank": 3,
        "status": "solved",
        "tau": 1.25,
        "centers": ["b", "c", "e"],
        "center_ids": [1, 2, 4],
        "certified_cost": 1.0,
        "cost": 1.0,
        "ratio": 1.0,
    }
    values.update(overrides)
    return Report(**values)


@pytest.fixture
def database(tmp_path):
    """Fresh run history in a temporary directory."""
    db_path = tmp_path / "history" / "runs.db"
    init_database(db_path)
    yield db_path
    db.close()


class TestInitDatabase:
    """Tests for init_database and the default path."""

    def test_creates_parent_directory(self, database):
        assert database.exists()
        assert RunRecord.table_exists()

    def test_default_path(self, tmp_path):
        with patch("matroid_center.database.Path.home", return_value=tmp_path):
            assert get_default_db_path() == tmp_path / ".cache" / "matroid-center" / "runs.db"

    def test_uses_default_path(self, tmp_path):
        db_path = tmp_path / "default.db"
        with patch("matroid_center.database.get_default_db_path", return_value=db_path):
            init_database()
        assert db_path.exists()
        db.close()


class TestRunHistory:
    """Tests for save_run, list_runs and load_report."""

    def test_save_and_load(self, database):
        record = save_run(make_report(), "instances/line.yaml")
        assert record.instance_path == "instances/line.yaml"
        assert record.cost == 1.0

        report = load_report(record.id)
        assert report == make_report()

    def test_infinite_cost_is_not_a_column_value(self, database):
        record = save_run(make_report(status="infeasible", cost=None, ratio=None, exact_opt=math.inf))
        stored = RunRecord.get_by_id(record.id)
        assert stored.cost is None
        assert load_report(record.id).exact_opt == math.inf

    def test_list_newest_first(self, database):
        first = save_run(make_report(instance="one"))
        second = save_run(make_report(instance="two"))
        runs = list_runs()
        assert [run.id for run in runs] == [second.id, first.id]

    def test_list_limit_and_mode(self, database):
        save_run(make_report())
        save_run(make_report(mode="knapsack"))
        save_run(make_report(mode="knapsack"))
        assert len(list_runs(limit=2)) == 2
        assert {run.mode for run in list_runs(mode="knapsack")} == {"knapsack"}
        assert len(list_runs(mode="knapsack")) == 2

    def test_missing_run(self, database):
        assert load_report(99) is None
