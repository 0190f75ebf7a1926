"""Offline finishers and exact oracles.

The streaming instances hand their summaries to the functions below once the
stream has ended. ``exact_opt`` and ``gonzalez_k_center`` are used for
verification runs only.
"""

from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .exceptions import PreconditionError, ResourceCapError
from .intersection import IntersectionProblem, matroid_intersection
from .matroids import ElementId, Matroid, PartitionMatroid
from .metrics import INFINITY, Distance, Metric

# Answers whether a candidate center set satisfies the run's constraint
Feasibility = Callable[[Sequence[ElementId]], bool]

DEFAULT_BRUTE_CAP = 24
DEFAULT_EXACT_CAP = 64


@dataclass
class PromiseInput:
    """Input of the efficient finisher.

    The promise is that some independent subset of ``candidates`` covers
    every pivot within ``alpha``.

    Attributes:
        alpha: Cover radius of the promise
        pivots: Points to cover, in stream order
        candidates: Allowed centers, a superset of ``pivots``
        matroid: Independence oracle for the centers
    """

    alpha: Distance
    pivots: list[ElementId]
    candidates: list[ElementId]
    matroid: Matroid

    def __post_init__(self):
        missing = set(self.pivots) - set(self.candidates)
        if missing:
            raise PreconditionError(f"Pivots {sorted(missing)} are not among the candidates")


@dataclass(frozen=True)
class CoverageCheck:
    """All but ``outliers`` of ``targets`` must lie within ``radius`` of the centers."""

    targets: tuple[ElementId, ...]
    radius: Distance
    outliers: int = 0


@dataclass(frozen=True)
class OptimumResult:
    """Optimal cost of an instance and one center set attaining it."""

    cost: Distance
    centers: tuple[ElementId, ...]


def _scalar(value):
    return value.item() if isinstance(value, np.generic) else value


def cover_cost(
    metric: Metric,
    points: Iterable[ElementId],
    centers: Sequence[ElementId],
    outliers: int = 0,
) -> Distance:
    """Cost of serving ``points`` from ``centers`` with the farthest ``outliers`` ignored.

    Returns:
        0 when every point may be dropped, +inf for an empty center set
    """
    points = list(points)
    if len(points) <= outliers:
        return 0
    if not centers:
        return INFINITY
    distances = sorted(metric.dist_to_set(p, centers) for p in points)
    return distances[-(outliers + 1)]


def mark_pivots(alpha: Distance, pivots: Sequence[ElementId], metric: Metric) -> list[ElementId]:
    """Greedy 2*alpha-separated markers among ``pivots``.

    Pivots are scanned in order; each unmarked pivot becomes a marker and
    marks every pivot within 2*alpha of it.
    """
    # Any scan order yields 2*alpha-separated markers whose 2*alpha balls cover every pivot
    markers: list[ElementId] = []
    marked: set[ElementId] = set()
    for e in pivots:
        if e in marked:
            continue
        markers.append(e)
        marked.update(metric.ball(e, 2 * alpha, pivots))
    return markers


def efficient_matroid_center(problem: PromiseInput, metric: Metric) -> list[ElementId] | None:
    """Independent set covering every pivot within 3*alpha, or None.

    Each marker's ball of radius alpha becomes one part of a partition
    matroid with capacity 1. A candidate lying in several balls belongs to
    the earliest marker's part. The partition matroid is intersected with
    the input matroid restricted to the union of the balls; the run fails
    iff the intersection misses a part. Never fails when the promise holds.
    """
    markers = mark_pivots(problem.alpha, problem.pivots, metric)
    if not markers:
        return []
    part_of: dict[ElementId, ElementId] = {}
    candidates = sorted(set(problem.candidates))
    for c in markers:
        for x in metric.ball(c, problem.alpha, candidates):
            part_of.setdefault(x, c)
    partition = PartitionMatroid(part_of, {c: 1 for c in markers})
    chosen = matroid_intersection(
        IntersectionProblem(part_of, partition, problem.matroid.restrict(part_of))
    )
    if len(chosen) < len(markers):
        return None
    return chosen


def knapsack_3approx(
    alpha: Distance,
    pivots: Sequence[ElementId],
    candidates: Iterable[ElementId],
    weights: Mapping[ElementId, float],
    budget: float,
    metric: Metric,
) -> list[ElementId] | None:
    """Budget-feasible set covering every pivot within 3*alpha, or None.

    Uses the same markers as :func:`efficient_matroid_center` and picks the
    lightest candidate within alpha of each marker (lowest index on ties).
    Fails if a marker has no candidate nearby or the picks exceed the budget.
    """
    candidates = sorted(set(candidates))
    chosen: list[ElementId] = []
    for c in mark_pivots(alpha, pivots, metric):
        ball = metric.ball(c, alpha, candidates)
        if not ball:
            return None
        chosen.append(min(ball, key=lambda x: (weights[x], x)))
    if sum(weights[x] for x in chosen) > budget:
        return None
    return sorted(chosen)


def brute_independent_cover(
    candidates: Iterable[ElementId],
    feasible: Feasibility,
    checks: Sequence[CoverageCheck],
    metric: Metric,
    cap: int = DEFAULT_BRUTE_CAP,
) -> list[ElementId] | None:
    """First feasible subset of ``candidates`` passing every coverage check.

    Subsets are enumerated depth-first in index order, extending only
    feasible sets, so the empty set is tried first.

    Raises:
        ResourceCapError: If there are more than ``cap`` candidates
    """
    candidates = sorted(set(candidates))
    if len(candidates) > cap:
        raise ResourceCapError("Brute-force cover search", len(candidates), cap)
    targets = {t for check in checks for t in check.targets}
    table = {t: {c: metric.dist(t, c) for c in candidates} for t in targets}

    def covers(chosen: list[ElementId]) -> bool:
        for check in checks:
            missed = sum(
                1
                for t in check.targets
                if min((table[t][c] for c in chosen), default=INFINITY) > check.radius
            )
            if missed > check.outliers:
                return False
        return True

    def search(chosen: list[ElementId], start: int) -> list[ElementId] | None:
        if covers(chosen):
            return chosen
        for i in range(start, len(candidates)):
            extended = [*chosen, candidates[i]]
            if feasible(extended):
                found = search(extended, i + 1)
                if found is not None:
                    return found
        return None

    return search([], 0)


def exact_opt(
    points: Iterable[ElementId],
    metric: Metric,
    feasible: Feasibility,
    outliers: int = 0,
    cap: int = DEFAULT_EXACT_CAP,
) -> OptimumResult:
    """Optimal cost over all feasible center sets drawn from ``points``.

    The cost of a set drops the ``outliers`` largest point-to-set distances.
    Ties keep the set found first in depth-first index order.

    Raises:
        ResourceCapError: If there are more than ``cap`` points
    """
    points = list(dict.fromkeys(points))
    if len(points) > cap:
        raise ResourceCapError("Exact optimum", len(points), cap)
    if len(points) <= outliers:
        return OptimumResult(0, ())
    distances = metric.matrix(points)
    best = OptimumResult(INFINITY, ())

    def search(chosen: list[int], start: int) -> None:
        nonlocal best
        if chosen:
            nearest = np.sort(distances[:, chosen].min(axis=1))
            cost = _scalar(nearest[-(outliers + 1)])
            if cost < best.cost:
                best = OptimumResult(cost, tuple(points[i] for i in chosen))
        for i in range(start, len(points)):
            extended = [*chosen, i]
            if feasible([points[j] for j in extended]):
                search(extended, i + 1)

    search([], 0)
    return best


def offline_3approx_all_guesses(
    points: Iterable[ElementId], metric: Metric, matroid: Matroid
) -> list[ElementId] | None:
    """Run the efficient finisher with every pairwise distance as alpha.

    Guesses are tried in increasing order and the first success is
    returned; its cost is at most three times the optimum.
    """
    points = sorted(set(points))
    alphas = sorted({metric.dist(a, b) for a, b in combinations_with_replacement(points, 2)})
    for alpha in alphas:
        chosen = efficient_matroid_center(PromiseInput(alpha, points, points, matroid), metric)
        if chosen is not None:
            return chosen
    return None


def gonzalez_k_center(points: Sequence[ElementId], metric: Metric, k: int) -> list[ElementId]:
    """Farthest-point traversal, a 2-approximation for k-center.

    Starts at the first point and repeatedly adds the point farthest from
    the current centers (lowest index on ties).
    """
    points = list(points)
    if not points or k <= 0:
        return []
    centers = [points[0]]
    nearest = np.array([float(metric.dist(p, points[0])) for p in points])
    while len(centers) < k:
        farthest = int(np.argmax(nearest))
        if nearest[farthest] == 0:
            break
        centers.append(points[farthest])
        nearest = np.minimum(nearest, [float(metric.dist(p, points[farthest])) for p in points])
    return centers
