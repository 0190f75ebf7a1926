"""Instance files: parsing, emission and random generation.

An instance is one YAML document with the sections ``metric``, ``matroid``,
``knapsack``, ``outliers`` and ``points``. Points are listed in stream
order; a point's position is its element id. Example::

    metric:
      kind: euclidean
    matroid:
      kind: partition
      capacities: {red: 1, blue: 1}
    points:
      - {id: a, coords: [0, 0], part: red}
      - {id: b, coords: [3, 4], part: blue}
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .exceptions import InstanceParseError, MatroidCenterError
from .matroids import (
    ElementId,
    ExplicitMatroid,
    GraphicMatroid,
    LinearMatroid,
    Matroid,
    MatroidKind,
    PartitionMatroid,
    UniformMatroid,
)
from .metrics import EuclideanMetric, MatrixMetric, Metric, MetricKind
from .streaming import KnapsackConstraint, OutlierConfig

_LINE = "__line__"


class LineLoader(yaml.SafeLoader):
    """Safe loader that records the line of every mapping under ``__line__``."""

    def construct_mapping(self, node, deep=False):
        mapping = super().construct_mapping(node, deep=deep)
        mapping[_LINE] = node.start_mark.line + 1
        return mapping


def _strip_lines(value):
    if isinstance(value, dict):
        return {k: _strip_lines(v) for k, v in value.items() if k != _LINE}
    if isinstance(value, list):
        return [_strip_lines(v) for v in value]
    return value


@dataclass
class Instance:
    """A parsed instance with its oracles materialized.

    Attributes:
        document: Normalized file contents, the source of truth for emission
        labels: Point labels in stream order
        metric: Distance oracle
        matroid: Independence oracle, None for pure knapsack instances
        knapsack: Budget constraint, if any
        outliers: Outlier settings, if any
        groups: Optional group label per element (used by ``intersect``)
    """

    document: dict
    labels: list[str]
    metric: Metric
    matroid: Matroid | None = None
    knapsack: KnapsackConstraint | None = None
    outliers: OutlierConfig | None = None
    groups: dict[ElementId, str] = field(default_factory=dict)

    @property
    def name(self) -> str | None:
        return self.document.get("name")

    @property
    def stream(self) -> list[ElementId]:
        return list(range(len(self.labels)))

    def __len__(self) -> int:
        return len(self.labels)

    def label(self, e: ElementId) -> str:
        return self.labels[e]


def _line_of(record: dict, fallback: int | None = None) -> int | None:
    return record.get(_LINE, fallback) if isinstance(record, dict) else fallback


def _section(data: dict, key: str, required: bool = False) -> dict:
    section = data.get(key)
    if section is None:
        if required:
            raise InstanceParseError(f"Missing '{key}' section", _line_of(data))
        return {}
    if not isinstance(section, dict):
        raise InstanceParseError(f"Section '{key}' must be a mapping", _line_of(data))
    return section


def _build_metric(section: dict, points: list[dict]) -> Metric:
    try:
        kind = MetricKind(section.get("kind", "euclidean"))
    except ValueError:
        raise InstanceParseError(
            f"Unknown metric kind '{section.get('kind')}'", _line_of(section)
        ) from None

    if kind is MetricKind.EUCLIDEAN:
        coordinates = {}
        for i, point in enumerate(points):
            if "coords" not in point:
                raise InstanceParseError("Euclidean point needs 'coords'", _line_of(point))
            coordinates[i] = point["coords"]
        return EuclideanMetric(coordinates)

    matrix = section.get("matrix")
    if not isinstance(matrix, list):
        raise InstanceParseError("Matrix metric needs a 'matrix' list", _line_of(section))
    rows = {i: point.get("row", i) for i, point in enumerate(points)}
    return MatrixMetric(matrix, rows=rows, exact=bool(section.get("exact", False)))


def _build_matroid(section: dict, points: list[dict], index_of: dict[str, int]) -> Matroid | None:
    if not section:
        return None
    try:
        kind = MatroidKind(section.get("kind"))
    except ValueError:
        raise InstanceParseError(
            f"Unknown matroid kind '{section.get('kind')}'", _line_of(section)
        ) from None
    ground = range(len(points))

    if kind is MatroidKind.UNIFORM:
        return UniformMatroid(ground, int(section.get("k", 1)))

    if kind is MatroidKind.PARTITION:
        capacities = {str(p): int(c) for p, c in section.get("capacities", {}).items() if p != _LINE}
        part_of = {}
        for i, point in enumerate(points):
            part = str(point.get("part"))
            if part not in capacities:
                raise InstanceParseError(f"Unknown part label '{part}'", _line_of(point))
            part_of[i] = part
        return PartitionMatroid(part_of, capacities)

    if kind is MatroidKind.LINEAR:
        vectors = {}
        for i, point in enumerate(points):
            if "vector" not in point:
                raise InstanceParseError("Linear matroid point needs 'vector'", _line_of(point))
            vectors[i] = point["vector"]
        return LinearMatroid(vectors, section.get("modulus"))

    if kind is MatroidKind.GRAPHIC:
        edges = {}
        for i, point in enumerate(points):
            edge = point.get("edge")
            if not isinstance(edge, list) or len(edge) != 2:
                raise InstanceParseError("Graphic matroid point needs a 2-item 'edge'", _line_of(point))
            edges[i] = (str(edge[0]), str(edge[1]))
        return GraphicMatroid(edges)

    independent_sets = []
    for members in section.get("independent_sets", []):
        unknown = [str(m) for m in members if str(m) not in index_of]
        if unknown:
            raise InstanceParseError(
                f"Independent set names unknown point(s) {', '.join(unknown)}", _line_of(section)
            )
        independent_sets.append([index_of[str(m)] for m in members])
    return ExplicitMatroid(ground, independent_sets)


def _build_knapsack(section: dict, points: list[dict]) -> KnapsackConstraint | None:
    if not section:
        return None
    if "budget" not in section:
        raise InstanceParseError("Knapsack section needs 'budget'", _line_of(section))
    weights = {}
    for i, point in enumerate(points):
        if "weight" not in point:
            raise InstanceParseError("Knapsack point needs 'weight'", _line_of(point))
        weights[i] = float(point["weight"])
    return KnapsackConstraint(float(section["budget"]), weights)


def _build_outliers(section: dict) -> OutlierConfig:
    return OutlierConfig(int(section.get("z", 0)), section.get("k"))


def _built(builder, section: dict, *args):
    """Run a section builder, reporting plain value errors at the section's line."""
    try:
        return builder(section, *args)
    except MatroidCenterError:
        raise
    except (ValueError, TypeError) as e:
        raise InstanceParseError(str(e), _line_of(section)) from e


def build_instance(data: dict) -> Instance:
    """Materialize oracles from a loaded document.

    Raises:
        InstanceParseError: On missing or malformed fields
        MetricViolationError: If an explicit matrix is not a metric
        MatroidAxiomError: If an explicit family of independent sets is not a matroid
    """
    if not isinstance(data, dict):
        raise InstanceParseError("Instance must be a mapping")
    points = data.get("points")
    if not isinstance(points, list):
        raise InstanceParseError("Missing 'points' list", _line_of(data))

    labels: list[str] = []
    for i, point in enumerate(points):
        if not isinstance(point, dict):
            raise InstanceParseError(f"Point {i} must be a mapping", _line_of(data))
        label = str(point.get("id", i))
        if label in labels:
            raise InstanceParseError(f"Duplicate point id '{label}'", _line_of(point))
        labels.append(label)
    index_of = {label: i for i, label in enumerate(labels)}

    metric_section = _section(data, "metric")
    matroid_section = _section(data, "matroid")
    knapsack_section = _section(data, "knapsack")
    outlier_section = _section(data, "outliers")
    metric = _built(_build_metric, metric_section, points)
    matroid = _built(_build_matroid, matroid_section, points, index_of)
    knapsack = _built(_build_knapsack, knapsack_section, points)
    outliers = _built(_build_outliers, outlier_section) if outlier_section else None

    groups = {i: str(p["group"]) for i, p in enumerate(points) if "group" in p}
    return Instance(
        document=_strip_lines(data),
        labels=labels,
        metric=metric,
        matroid=matroid,
        knapsack=knapsack,
        outliers=outliers,
        groups=groups,
    )


def parse_instance_text(text: str) -> Instance:
    """Parse an instance from YAML text.

    Raises:
        InstanceParseError: With the line number of the offending record
    """
    try:
        data = yaml.load(text, Loader=LineLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise InstanceParseError(f"Invalid YAML: {e}", mark.line + 1 if mark else None) from e
    return build_instance(data)


def parse_instance(path: Path | str) -> Instance:
    """Load and validate an instance file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Instance file not found: {path}")
    return parse_instance_text(path.read_text())


def emit_instance(document: dict) -> str:
    """Serialize an instance document to YAML, keeping section order."""
    return yaml.safe_dump(document, sort_keys=False, default_flow_style=None)


def write_instance(document: dict, path: Path | str) -> None:
    Path(path).write_text(emit_instance(document))


def generate_random(
    n: int,
    clusters: int = 3,
    dim: int = 2,
    parts: int = 2,
    capacity: int = 1,
    spread: float = 1.0,
    box: float = 100.0,
    z: int = 0,
    k: int | None = None,
    budget: float | None = None,
    seed: int = 0,
) -> dict:
    """Seeded Euclidean instance with planted clusters.

    Points are drawn around ``clusters`` centers in a box and assigned to
    ``parts`` parts of a partition matroid in round-robin order. ``z`` extra
    far-away points are appended as outliers. With a ``budget`` every point
    gets an integer weight in [1, 10] and a knapsack section is added.

    Returns:
        Instance document ready for :func:`emit_instance` or :func:`build_instance`
    """
    if n < 1 or clusters < 1 or parts < 1:
        raise ValueError("n, clusters and parts must be positive")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0, box, size=(clusters, dim))
    assignment = rng.integers(0, clusters, size=n)
    coords = centers[assignment] + rng.normal(0, spread, size=(n, dim))
    if z:
        far = rng.uniform(3 * box, 4 * box, size=(z, dim))
        coords = np.vstack([coords, far])

    points = []
    for i, c in enumerate(coords):
        point = {"id": f"p{i}", "coords": [round(float(x), 6) for x in c], "part": f"P{i % parts}"}
        if budget is not None:
            point["weight"] = int(rng.integers(1, 11))
        points.append(point)

    document: dict = {
        "name": f"random-n{n}-c{clusters}-s{seed}",
        "metric": {"kind": "euclidean"},
        "matroid": {"kind": "partition", "capacities": {f"P{j}": capacity for j in range(parts)}},
    }
    if budget is not None:
        document["knapsack"] = {"budget": budget}
    if z or k is not None:
        outliers = {"z": z}
        if k is not None:
            outliers["k"] = k
        document["outliers"] = outliers
    document["points"] = points
    return document
