"""Metric oracles, balls and aspect ratio."""

import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations

import numpy as np

from .exceptions import DegenerateInstanceError, MetricViolationError, UnknownElementError
from .matroids import ElementId

# Distances are floats, or exact fractions for rational matrices
Distance = float | Fraction

INFINITY = math.inf


class MetricKind(str, Enum):
    """Shipped metric representations."""

    EUCLIDEAN = "euclidean"
    MATRIX = "matrix"


@dataclass(frozen=True)
class MetricStats:
    """Extreme pairwise distances of a point set.

    Attributes:
        min_positive_distance: Smallest non-zero pairwise distance
        max_distance: Largest pairwise distance
        aspect_ratio: max_distance / min_positive_distance (always >= 1)
    """

    min_positive_distance: Distance
    max_distance: Distance
    aspect_ratio: float


class Metric(ABC):
    """Pairwise-distance oracle over element ids.

    ``calls`` counts answered distance queries; bulk matrix extraction for
    the exact oracles is not counted.
    """

    kind: MetricKind

    def __init__(self, ground: Iterable[ElementId]):
        self.ground = frozenset(ground)
        self.calls = 0

    @abstractmethod
    def _dist(self, a: ElementId, b: ElementId) -> Distance:
        """Distance between two distinct, validated elements."""

    def _validate(self, *elements: ElementId) -> None:
        for e in elements:
            if e not in self.ground:
                raise UnknownElementError(e, f"{self.kind.value} metric")

    def dist(self, a: ElementId, b: ElementId) -> Distance:
        """Distance between two elements.

        Raises:
            UnknownElementError: If either element is outside the ground set
        """
        self._validate(a, b)
        self.calls += 1
        if a == b:
            return 0
        return self._dist(a, b)

    def dist_to_set(self, e: ElementId, others: Iterable[ElementId]) -> Distance:
        """Distance from ``e`` to its nearest member of ``others`` (inf if empty)."""
        return min((self.dist(e, x) for x in others), default=INFINITY)

    def ball(self, e: ElementId, radius: Distance, universe: Iterable[ElementId]) -> list[ElementId]:
        """Members of ``universe`` within the closed ball of ``radius`` around ``e``."""
        return [x for x in universe if self.dist(e, x) <= radius]

    def compute_stats(self, elements: Iterable[ElementId]) -> MetricStats:
        """Exact extreme distances over the given elements.

        Raises:
            DegenerateInstanceError: With fewer than two distinct points
        """
        elements = list(dict.fromkeys(elements))
        if len(elements) < 2:
            raise DegenerateInstanceError("Aspect ratio needs at least two elements")
        distances = [self.dist(a, b) for a, b in combinations(elements, 2)]
        positive = [d for d in distances if d > 0]
        if not positive:
            raise DegenerateInstanceError("All elements coincide, aspect ratio is undefined")
        smallest, largest = min(positive), max(positive)
        return MetricStats(smallest, largest, float(largest / smallest))

    @abstractmethod
    def matrix(self, elements: Sequence[ElementId]) -> np.ndarray:
        """Dense distance matrix of ``elements`` (rows and columns in that order)."""


class EuclideanMetric(Metric):
    """Euclidean distance between coordinate vectors."""

    kind = MetricKind.EUCLIDEAN

    def __init__(self, coordinates: Mapping[ElementId, Sequence[float]]):
        super().__init__(coordinates.keys())
        self.coordinates = {e: np.asarray(c, dtype=float) for e, c in coordinates.items()}
        dims = {c.shape for c in self.coordinates.values()}
        if len(dims) > 1:
            raise ValueError("Euclidean coordinates have mixed dimensions")

    def _dist(self, a: ElementId, b: ElementId) -> float:
        return float(np.linalg.norm(self.coordinates[a] - self.coordinates[b]))

    def matrix(self, elements: Sequence[ElementId]) -> np.ndarray:
        # Entry-wise through _dist so that ties agree exactly with dist()
        self._validate(*elements)
        n = len(elements)
        values = np.zeros((n, n))
        for i, j in combinations(range(n), 2):
            if elements[i] != elements[j]:
                values[i, j] = values[j, i] = self._dist(elements[i], elements[j])
        return values


class MatrixMetric(Metric):
    """Explicit symmetric distance matrix.

    Element ``e`` uses row ``rows[e]`` (identity mapping by default). With
    ``exact=True`` the entries are held as :class:`fractions.Fraction` so that
    ties at threshold radii are decided without rounding.
    """

    kind = MetricKind.MATRIX

    def __init__(
        self,
        matrix: Sequence[Sequence[float | int | str | Fraction]],
        rows: Mapping[ElementId, int] | None = None,
        exact: bool = False,
        validate: bool = True,
    ):
        n = len(matrix)
        for i, row in enumerate(matrix):
            if len(row) != n:
                raise MetricViolationError(
                    f"Distance matrix row {i} has {len(row)} entries, expected {n}", (i,)
                )
        convert = Fraction if exact else float
        self.exact = exact
        self.values = np.array(
            [[convert(x) for x in row] for row in matrix], dtype=object if exact else float
        ).reshape(n, n)
        self.rows = dict(rows) if rows is not None else {i: i for i in range(n)}
        if any(not 0 <= r < n for r in self.rows.values()):
            raise ValueError("Matrix row reference out of range")
        super().__init__(self.rows.keys())
        if validate:
            validate_matrix(self.values)

    def _dist(self, a: ElementId, b: ElementId) -> Distance:
        d = self.values[self.rows[a], self.rows[b]]
        return d if self.exact else float(d)

    def matrix(self, elements: Sequence[ElementId]) -> np.ndarray:
        self._validate(*elements)
        index = [self.rows[e] for e in elements]
        return self.values[np.ix_(index, index)]


def validate_matrix(values: np.ndarray) -> None:
    """Check the metric axioms on a square matrix.

    Raises:
        MetricViolationError: Naming the first offending pair or triple
    """
    n = values.shape[0]
    for i in range(n):
        for j in range(n):
            d = values[i, j]
            if d < 0:
                raise MetricViolationError(f"Negative distance at ({i}, {j})", (i, j))
            if d != values[j, i]:
                raise MetricViolationError(f"Matrix is not symmetric at ({i}, {j})", (i, j))
            if (d == 0) != (i == j):
                raise MetricViolationError(
                    f"Distance at ({i}, {j}) must be zero exactly on the diagonal", (i, j)
                )
    for k in range(n):
        detour = values[:, k][:, None] + values[k, :][None, :]
        violations = np.argwhere(values > detour)
        if len(violations):
            i, j = (int(x) for x in violations[0])
            raise MetricViolationError(
                f"Triangle inequality violated: d({i},{j}) > d({i},{k}) + d({k},{j})",
                (i, k, j),
            )
