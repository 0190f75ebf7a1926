"""Database connection and the run-history store."""

import json
import math
from pathlib import Path

from .models import RunRecord, db
from .report import Report


def init_database(db_path: Path | None = None) -> None:
    """
    Initialize the database connection and create tables if needed.

    Args:
        db_path: Path to SQLite database file. If None, uses default location.
    """
    if db_path is None:
        db_path = get_default_db_path()

    # Ensure directory exists
    db_path.parent.mkdir(parents=True, exist_ok=True)

    db.init(str(db_path))
    db.create_tables([RunRecord], safe=True)


def get_default_db_path() -> Path:
    """
    Get the default database path.

    Returns:
        Path to the database file in user's cache directory
    """
    return Path.home() / ".cache" / "matroid-center" / "runs.db"


def _finite(value) -> float | None:
    if value is None or isinstance(value, str):
        return None
    value = float(value)
    return None if math.isinf(value) else value


def save_run(report: Report, instance_path: Path | str | None = None) -> RunRecord:
    """Persist a report; returns the stored record."""
    return RunRecord.create(
        instance_name=report.instance,
        instance_path=None if instance_path is None else str(instance_path),
        mode=report.mode,
        algorithm=report.algorithm,
        guesses=report.guesses,
        epsilon=report.epsilon,
        n=report.n,
        status=report.status,
        cost=_finite(report.cost),
        ratio=_finite(report.ratio),
        report=report.to_json(),
    )


def list_runs(limit: int = 20, mode: str | None = None) -> list[RunRecord]:
    """Most recent runs first, optionally of one mode only."""
    query = RunRecord.select()
    if mode:
        query = query.where(RunRecord.mode == mode)
    return list(query.order_by(RunRecord.created_at.desc(), RunRecord.id.desc()).limit(limit))


def load_report(run_id: int) -> Report | None:
    """Report of a saved run, or None if there is no such run."""
    record = RunRecord.get_or_none(RunRecord.id == run_id)
    if record is None:
        return None
    return Report.from_dict(json.loads(record.report))
