"""Run reports and their serializations."""

import json
import math
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from jinja2 import Template

STATUS_SOLVED = "solved"
STATUS_INFEASIBLE = "infeasible"


def _json_number(value):
    """Plain float for JSON; infinities become the string 'inf'."""
    if value is None or isinstance(value, bool | int | str):
        return value
    if isinstance(value, Fraction):
        value = float(value)
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_json_safe(v) for v in value]
    return _json_number(value)


@dataclass
class Report:
    """Outcome of one run.

    Attributes:
        instance: Instance name, if the file declares one
        n: Number of stream points
        algorithm: "one-pass", "two-pass" or "doubling"
        mode: Problem variant
        finisher: Offline step, None for two-pass and doubling runs
        guesses: "ladder" or "strapped", None for doubling runs
        epsilon: Accuracy parameter
        z: Outliers dropped from the cost
        k: Center count for the k-center variants
        budget: Knapsack budget
        rank: Rank (largest feasible center set) the run worked with
        status: "solved" or "infeasible"
        tau: Guess of the winning instance
        centers: Labels of the chosen centers
        center_ids: Stream positions of the chosen centers
        certified_cost: Cost over the points the finisher checked
        cost: Cost over the whole stream
        exact_opt: Optimum from the exact oracle, with --verify
        exact_centers: Labels of an optimal center set
        ratio: cost / exact_opt when exact_opt is positive and finite
        peak_points_stored: Largest number of points one instance stored
        total_points_stored_peak: Largest total over all active instances
        storage_bound: Per-instance bound of the winning instance
        independence_calls: Matroid oracle calls during the run
        distance_calls: Distance oracle calls during the run
        trace: Guess lifecycle
        parameters: Derived constants of the guess orchestration
        wall_clock: Seconds, only with --timing
    """

    instance: str | None
    n: int
    algorithm: str
    mode: str
    finisher: str | None
    guesses: str | None
    epsilon: float
    z: int | None
    k: int | None
    budget: float | None
    rank: int
    status: str
    tau: float | None = None
    centers: list[str] = field(default_factory=list)
    center_ids: list[int] = field(default_factory=list)
    certified_cost: float | None = None
    cost: float | None = None
    exact_opt: float | None = None
    exact_centers: list[str] | None = None
    ratio: float | None = None
    peak_points_stored: int = 0
    total_points_stored_peak: int = 0
    storage_bound: int | None = None
    independence_calls: int = 0
    distance_calls: int = 0
    trace: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    wall_clock: float | None = None

    @property
    def solved(self) -> bool:
        return self.status == STATUS_SOLVED

    def to_dict(self) -> dict:
        data = _json_safe(asdict(self))
        if self.wall_clock is None:
            del data["wall_clock"]
        return data

    def to_json(self) -> str:
        """Deterministic JSON: sorted keys, two-space indent."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in data.items() if k in known}
        for key in ("tau", "certified_cost", "cost", "exact_opt", "ratio"):
            if values.get(key) in ("inf", "-inf"):
                values[key] = float(values[key])
        return cls(**values)


def render_markdown(report: Report) -> str:
    template_path = Path(__file__).parent / "report_template.md.j2"
    with open(template_path) as f:
        template = Template(f.read(), trim_blocks=True, lstrip_blocks=True)
    return template.render(report=report.to_dict())


def write_report(report: Report, path: Path | str, fmt: str = "json") -> None:
    """Write a report as JSON or Markdown."""
    text = render_markdown(report) if fmt == "markdown" else report.to_json() + "\n"
    Path(path).write_text(text)
