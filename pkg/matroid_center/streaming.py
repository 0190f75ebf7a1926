"""Per-guess streaming summaries.

Each instance below processes the stream for a single guess ``tau`` of the
optimum cost. It keeps a list of well-separated pivots, an independent set
(or a lightest representative) per pivot and, in the outlier modes, a set of
free points. An instance aborts once the stream proves its guess too small;
aborting is recorded in its state, never raised.
"""

from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

from .exceptions import PreconditionError
from .intersection import IntersectionProblem, matroid_intersection
from .matroids import ElementId, Matroid, PartitionMatroid
from .metrics import INFINITY, Distance, Metric
from .offline import (
    DEFAULT_BRUTE_CAP,
    CoverageCheck,
    PromiseInput,
    brute_independent_cover,
    cover_cost,
    efficient_matroid_center,
    knapsack_3approx,
)


class Mode(str, Enum):
    """Problem variants a run can solve."""

    MATROID = "matroid"
    KNAPSACK = "knapsack"
    KCENTER_OUTLIER = "kcenter-outlier"
    MATROID_OUTLIER = "matroid-outlier"
    KNAPSACK_OUTLIER = "knapsack-outlier"
    KCENTER_DOUBLING = "kcenter-doubling"

    @property
    def has_outliers(self) -> bool:
        return self in (Mode.KCENTER_OUTLIER, Mode.MATROID_OUTLIER, Mode.KNAPSACK_OUTLIER)

    @property
    def uses_knapsack(self) -> bool:
        return self in (Mode.KNAPSACK, Mode.KNAPSACK_OUTLIER)


class Finisher(str, Enum):
    """Offline step run on a summary once the stream has ended."""

    BRUTE = "brute"
    EFFICIENT = "efficient"


@dataclass
class PivotRecord:
    """A pivot with the points kept on its behalf.

    Attributes:
        pivot: The pivot element
        independent_set: I_c, an independent set (knapsack modes: at most one
            lightest representative)
        support: A_c, the pivot and up to z nearby points (outlier modes only)
    """

    pivot: ElementId
    independent_set: list[ElementId] = field(default_factory=list)
    support: list[ElementId] = field(default_factory=list)


@dataclass
class InstanceState:
    """Streaming state of one guess.

    Attributes:
        tau: The guess of the optimum cost
        mode: Problem variant
        rank: Upper bound r on the number of pivots
        pivots: Pivot records in creation order
        free: Free points in insertion order (outlier modes)
        aborted: Whether the guess was proven too small
        abort_element: Element being processed when the instance aborted
        abort_stored: Whether that element is part of the stored state
        processed: Number of stream elements processed
        points_stored_peak: Largest number of distinct stored points so far
        independence_calls: Independence queries issued by this instance
        distance_calls: Distance queries issued while streaming
    """

    tau: Distance
    mode: Mode
    rank: int
    pivots: list[PivotRecord] = field(default_factory=list)
    free: list[ElementId] = field(default_factory=list)
    aborted: bool = False
    abort_element: ElementId | None = None
    abort_stored: bool = False
    processed: int = 0
    points_stored_peak: int = 0
    independence_calls: int = 0
    distance_calls: int = 0

    @property
    def pivot_ids(self) -> list[ElementId]:
        return [record.pivot for record in self.pivots]

    def stored_points(self) -> set[ElementId]:
        """Distinct elements held by the summary."""
        stored = set(self.free)
        for record in self.pivots:
            stored.add(record.pivot)
            stored.update(record.independent_set)
            stored.update(record.support)
        return stored


@dataclass
class KnapsackConstraint:
    """Centers must have total weight at most ``budget``.

    Attributes:
        budget: The budget B
        weights: Non-negative weight per element
    """

    budget: float
    weights: dict[ElementId, float]

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError(f"Knapsack budget must be non-negative, got {self.budget}")
        negative = sorted(e for e, w in self.weights.items() if w < 0)
        if negative:
            raise ValueError(f"Negative knapsack weight for element(s) {negative}")

    def feasible(self, elements: Sequence[ElementId]) -> bool:
        return sum(self.weights[e] for e in set(elements)) <= self.budget

    def is_heavy(self, e: ElementId) -> bool:
        """Elements heavier than the budget can never be centers."""
        return self.weights[e] > self.budget

    def max_feasible_size(self) -> int:
        """Size r of a largest feasible set: the lightest elements first."""
        total, size = 0.0, 0
        for w in sorted(self.weights.values()):
            if total + w > self.budget:
                break
            total += w
            size += 1
        return size


@dataclass
class OutlierConfig:
    """Outlier budget z, plus k for the k-center variant."""

    z: int
    k: int | None = None

    def __post_init__(self):
        if self.z < 0:
            raise ValueError(f"Number of outliers must be non-negative, got {self.z}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")


@dataclass
class Solution:
    """Centers produced by a finisher.

    Attributes:
        centers: Chosen centers, sorted by index
        certified_cost: Cost over the points the finisher checked
        tau: Guess the solution came from
        mode: Problem variant
        finisher: Finisher used, None for two-pass and doubling runs
    """

    centers: list[ElementId]
    certified_cost: Distance
    tau: Distance
    mode: Mode
    finisher: Finisher | None = None


@dataclass
class TwoPassFailure:
    """Two-pass guess failed; ``certificate`` holds its well-separated pivots."""

    tau: Distance
    certificate: list[ElementId]


@dataclass
class ChildSeed:
    """Summary handed from an aborted guess to its child.

    Attributes:
        pivots: Old pivots C_o in creation order
        independent_sets: J_c for every old pivot
        free: Old free points F_o (outlier modes)
        tau: Guess of the instance that produced the seed
    """

    pivots: list[ElementId]
    independent_sets: dict[ElementId, list[ElementId]]
    free: list[ElementId] = field(default_factory=list)
    tau: Distance | None = None


class StreamingInstance(ABC):
    """Common machinery of the per-guess summaries.

    Subclasses implement ``_process`` for a single element and ``finish``.
    ``join_factor`` times tau is the radius within which a point is charged
    to an existing pivot.
    """

    mode: Mode
    join_factor = 2

    def __init__(self, tau: Distance, metric: Metric, rank: int):
        if tau <= 0:
            raise ValueError(f"Guess must be positive, got {tau}")
        self.metric = metric
        self.state = InstanceState(tau=tau, mode=self.mode, rank=rank)
        self.origin: ChildSeed | None = None
        self.live_start = 0

    @property
    def tau(self) -> Distance:
        return self.state.tau

    @property
    def aborted(self) -> bool:
        return self.state.aborted

    def _dist(self, a: ElementId, b: ElementId) -> Distance:
        self.state.distance_calls += 1
        return self.metric.dist(a, b)

    def _dist_to_pivots(self, e: ElementId) -> Distance:
        return min((self._dist(e, r.pivot) for r in self.state.pivots), default=INFINITY)

    def _earliest_pivot(self, e: ElementId, radius: Distance) -> PivotRecord | None:
        for record in self.state.pivots:
            if self._dist(e, record.pivot) <= radius:
                return record
        return None

    def _abort(self, e: ElementId, stored: bool = False) -> None:
        self.state.aborted = True
        self.state.abort_element = e
        self.state.abort_stored = stored

    def _record_storage(self) -> None:
        stored = len(self.state.stored_points())
        self.state.points_stored_peak = max(self.state.points_stored_peak, stored)

    def process(self, e: ElementId) -> None:
        """Process the next stream element.

        Raises:
            PreconditionError: If the instance has already aborted
        """
        if self.state.aborted:
            raise PreconditionError(f"Instance for guess {self.tau} has aborted")
        self.state.processed += 1
        self._process(e)
        self._record_storage()

    @abstractmethod
    def _process(self, e: ElementId) -> None:
        """Update the summary with one element."""

    @abstractmethod
    def _initial_set(self, e: ElementId) -> list[ElementId]:
        """Independent set of a newly created pivot."""

    @abstractmethod
    def _absorb(self, record: PivotRecord, e: ElementId) -> None:
        """Try to keep ``e`` on behalf of an existing pivot."""

    def _adopt(self, pivot: ElementId, kept: list[ElementId]) -> PivotRecord:
        return PivotRecord(pivot, list(kept))

    @property
    @abstractmethod
    def storage_bound(self) -> int:
        """Upper bound on the number of stored points."""

    def snapshot(self) -> ChildSeed:
        """Current pivots, independent sets and free points as a child seed."""
        return ChildSeed(
            pivots=self.state.pivot_ids,
            independent_sets={r.pivot: list(r.independent_set) for r in self.state.pivots},
            free=list(self.state.free),
            tau=self.tau,
        )

    def seed(self, seed: ChildSeed, live_start: int = 0) -> None:
        """Initialize a fresh instance from a parent's summary.

        Old pivots are scanned in order. One within the join radius of an
        existing pivot has its independent set folded into that pivot's,
        element by element; any other becomes a pivot keeping its set.
        Outlier modes then replay the old free points as stream elements.

        Raises:
            PreconditionError: If the instance has already seen elements
        """
        if self.state.processed or self.state.pivots or self.state.free:
            raise PreconditionError("Only a fresh instance can be seeded")
        self.origin = seed
        self.live_start = live_start
        radius = self.join_factor * self.tau
        for c_o in seed.pivots:
            kept = seed.independent_sets.get(c_o, [])
            record = self._earliest_pivot(c_o, radius)
            if record is None:
                self.state.pivots.append(self._adopt(c_o, kept))
                continue
            for e_o in kept:
                self._absorb(record, e_o)
        for e in seed.free:
            if self.state.aborted:
                break
            self._process(e)
        self._record_storage()

    @abstractmethod
    def finish(
        self,
        finisher: Finisher = Finisher.BRUTE,
        slack: float | None = None,
        brute_cap: int = DEFAULT_BRUTE_CAP,
    ) -> Solution | None:
        """Run the offline step on the summary; None means the guess aborted."""

    def _solution(
        self, centers: list[ElementId] | None, checks: list[CoverageCheck], finisher: Finisher
    ) -> Solution | None:
        if centers is None:
            self.state.aborted = True
            return None
        certified = max(
            (cover_cost(self.metric, c.targets, centers, c.outliers) for c in checks), default=0
        )
        return Solution(sorted(centers), certified, self.tau, self.mode, finisher)

    def summary(self) -> dict:
        """Counters and sizes for reporting."""
        return {
            "tau": self.tau,
            "aborted": self.state.aborted,
            "pivots": len(self.state.pivots),
            "free": len(self.state.free),
            "processed": self.state.processed,
            "points_stored_peak": self.state.points_stored_peak,
            "independence_calls": self.state.independence_calls,
            "distance_calls": self.state.distance_calls,
            "seeded": self.origin is not None,
        }

    def __repr__(self) -> str:
        status = "aborted" if self.aborted else "active"
        return f"{type(self).__name__}(tau={self.tau}, pivots={len(self.state.pivots)}, {status})"


class IndependentSetKeeper:
    """Keeps an independent set per pivot, extended greedily."""

    matroid: Matroid
    state: InstanceState

    def _independent(self, items: Sequence[ElementId]) -> bool:
        self.state.independence_calls += 1
        return self.matroid.is_independent(items)

    def _initial_set(self, e: ElementId) -> list[ElementId]:
        return [e] if self._independent([e]) else []

    def _absorb(self, record: PivotRecord, e: ElementId) -> None:
        if e not in record.independent_set and self._independent([*record.independent_set, e]):
            record.independent_set.append(e)


class RepresentativeKeeper:
    """Keeps the lightest affordable point per pivot (the earliest on ties)."""

    knapsack: KnapsackConstraint

    def _initial_set(self, e: ElementId) -> list[ElementId]:
        return [] if self.knapsack.is_heavy(e) else [e]

    def _absorb(self, record: PivotRecord, e: ElementId) -> None:
        if self.knapsack.is_heavy(e):
            return
        current = record.independent_set
        if not current or self.knapsack.weights[e] < self.knapsack.weights[current[0]]:
            record.independent_set = [e]


class PivotInstance(StreamingInstance):
    """One-pass summary without outliers.

    A point within 2*tau of a pivot is charged to the earliest such pivot;
    any other point becomes a pivot, unless there already are r pivots, in
    which case the r+1 pairwise far points certify that tau is too small.
    """

    default_slack = 5

    def _process(self, e: ElementId) -> None:
        record = self._earliest_pivot(e, self.join_factor * self.tau)
        if record is not None:
            self._absorb(record, e)
        elif len(self.state.pivots) == self.state.rank:
            self._abort(e)
        else:
            self.state.pivots.append(PivotRecord(e, self._initial_set(e)))

    def candidates(self) -> list[ElementId]:
        """Union of the kept sets, the search space of the finishers."""
        return sorted({x for r in self.state.pivots for x in r.independent_set})

    def _radius(self, slack: float | None) -> Distance:
        return (self.default_slack if slack is None else slack) * self.tau


class MatroidCenterInstance(IndependentSetKeeper, PivotInstance):
    """One guess of the one-pass matroid center summary.

    Stores at most r pivots with an independent set of size at most r each.
    """

    mode = Mode.MATROID

    def __init__(self, tau: Distance, metric: Metric, matroid: Matroid):
        super().__init__(tau, metric, matroid.rank_upper)
        self.matroid = matroid

    @property
    def storage_bound(self) -> int:
        r = self.state.rank
        return r * r + r

    def finish(
        self,
        finisher: Finisher = Finisher.BRUTE,
        slack: float | None = None,
        brute_cap: int = DEFAULT_BRUTE_CAP,
    ) -> Solution | None:
        """Pick an independent set covering the pivots.

        The brute finisher searches the kept sets for one covering every
        pivot within slack*tau; the efficient finisher covers them within
        3*slack*tau. The default slack is 5.
        """
        if self.state.aborted:
            return None
        radius = self._radius(slack)
        pivots = self.state.pivot_ids
        if finisher is Finisher.BRUTE:
            checks = [CoverageCheck(tuple(pivots), radius)]
            centers = brute_independent_cover(
                self.candidates(), self._independent, checks, self.metric, brute_cap
            )
        else:
            checks = [CoverageCheck(tuple(pivots), 3 * radius)]
            problem = PromiseInput(
                radius, pivots, sorted(set(self.candidates()) | set(pivots)), self.matroid
            )
            centers = efficient_matroid_center(problem, self.metric)
        return self._solution(centers, checks, finisher)


class KnapsackInstance(RepresentativeKeeper, PivotInstance):
    """One guess of the one-pass knapsack center summary.

    Each pivot keeps a single representative, the lightest point seen within
    2*tau of it. Points heavier than the budget are never kept. The pivot
    count is bounded by the size of a largest feasible set.
    """

    mode = Mode.KNAPSACK

    def __init__(self, tau: Distance, metric: Metric, knapsack: KnapsackConstraint):
        super().__init__(tau, metric, knapsack.max_feasible_size())
        self.knapsack = knapsack

    @property
    def storage_bound(self) -> int:
        return 2 * self.state.rank

    def finish(
        self,
        finisher: Finisher = Finisher.BRUTE,
        slack: float | None = None,
        brute_cap: int = DEFAULT_BRUTE_CAP,
    ) -> Solution | None:
        if self.state.aborted:
            return None
        radius = self._radius(slack)
        pivots = self.state.pivot_ids
        if finisher is Finisher.BRUTE:
            checks = [CoverageCheck(tuple(pivots), radius)]
            centers = brute_independent_cover(
                self.candidates(), self.knapsack.feasible, checks, self.metric, brute_cap
            )
        else:
            checks = [CoverageCheck(tuple(pivots), 3 * radius)]
            centers = knapsack_3approx(
                radius,
                pivots,
                self.candidates(),
                self.knapsack.weights,
                self.knapsack.budget,
                self.metric,
            )
        return self._solution(centers, checks, finisher)


class OutlierInstance(StreamingInstance):
    """One-pass summary with z outliers.

    A point within 4*tau of a pivot is charged to the earliest such pivot,
    any other point becomes free. Once there are (r-l+1)z+1 free points
    (l pivots so far), the first free point with z other free points within
    2*tau is promoted to a pivot; every free point within 4*tau of it is
    charged to it and the first z of them within 2*tau join its support.
    The guess aborts if no free point qualifies or a (r+1)-th pivot would
    be created.
    """

    join_factor = 4

    def __init__(self, tau: Distance, metric: Metric, rank: int, z: int):
        super().__init__(tau, metric, rank)
        self.z = z

    def _adopt(self, pivot: ElementId, kept: list[ElementId]) -> PivotRecord:
        return PivotRecord(pivot, list(kept), support=[pivot])

    def _process(self, e: ElementId) -> None:
        record = self._earliest_pivot(e, self.join_factor * self.tau)
        if record is not None:
            self._absorb(record, e)
            return
        self.state.free.append(e)
        self._promote(e)

    def _promote(self, e: ElementId) -> None:
        state = self.state
        threshold = (state.rank - len(state.pivots) + 1) * self.z + 1
        if len(state.free) < threshold:
            return
        for c in state.free:
            ball = [x for x in state.free if self._dist(c, x) <= 2 * self.tau]
            if len(ball) >= self.z + 1:
                break
        else:
            self._abort(e, stored=True)
            return
        if len(state.pivots) == state.rank:
            self._abort(e, stored=True)
            return

        record = PivotRecord(c, self._initial_set(c), support=[c])
        state.pivots.append(record)
        remaining = []
        for x in state.free:
            d = self._dist(c, x)
            if d > 4 * self.tau:
                remaining.append(x)
            elif x != c:
                self._absorb(record, x)
                if d <= 2 * self.tau and len(record.support) <= self.z:
                    record.support.append(x)
        state.free = remaining

    @property
    def storage_bound(self) -> int:
        r, z = self.state.rank, self.z
        return r * r + (r + 1) * z + 1 + (z + 1) * r

    def _outlier_checks(self, pivot_radius: Distance, free_radius: Distance):
        return [
            CoverageCheck(tuple(self.state.pivot_ids), pivot_radius),
            CoverageCheck(tuple(self.state.free), free_radius, self.z),
        ]


class KCenterOutlierInstance(OutlierInstance):
    """One guess of the one-pass k-center with z outliers summary.

    Pivots keep no independent sets. The finisher covers all but z free
    points within 2*tau using at most k-l extra centers.
    """

    mode = Mode.KCENTER_OUTLIER

    def __init__(self, tau: Distance, metric: Metric, outliers: OutlierConfig):
        if outliers.k is None:
            raise ValueError("k-center with outliers needs k")
        super().__init__(tau, metric, outliers.k, outliers.z)

    def _initial_set(self, e: ElementId) -> list[ElementId]:
        return [e]

    def _absorb(self, record: PivotRecord, e: ElementId) -> None:
        pass

    @property
    def storage_bound(self) -> int:
        k, z = self.state.rank, self.z
        return (k + 1) * z + 1 + (z + 1) * k

    def finish(
        self,
        finisher: Finisher = Finisher.BRUTE,
        slack: float | None = None,
        brute_cap: int = DEFAULT_BRUTE_CAP,
    ) -> Solution | None:
        if self.state.aborted:
            return None
        spare = self.state.rank - len(self.state.pivots)
        checks = [CoverageCheck(tuple(self.state.free), 2 * self.tau, self.z)]
        extra = brute_independent_cover(
            self.state.free, lambda chosen: len(chosen) <= spare, checks, self.metric, brute_cap
        )
        centers = None if extra is None else self.state.pivot_ids + extra
        return self._solution(centers, checks, Finisher.BRUTE)


class MatroidOutlierInstance(IndependentSetKeeper, OutlierInstance):
    """One guess of the one-pass matroid center with z outliers summary."""

    mode = Mode.MATROID_OUTLIER

    def __init__(self, tau: Distance, metric: Metric, matroid: Matroid, z: int):
        super().__init__(tau, metric, matroid.rank_upper, z)
        self.matroid = matroid

    def finish(
        self,
        finisher: Finisher = Finisher.BRUTE,
        slack: float | None = None,
        brute_cap: int = DEFAULT_BRUTE_CAP,
    ) -> Solution | None:
        """Brute-force search over the free points and the kept sets.

        Accepts an independent set within 11*tau of every pivot and within
        9*tau of all but z free points.
        """
        if self.state.aborted:
            return None
        candidates = set(self.state.free)
        candidates.update(x for r in self.state.pivots for x in r.independent_set)
        checks = self._outlier_checks(11 * self.tau, 9 * self.tau)
        centers = brute_independent_cover(
            candidates, self._independent, checks, self.metric, brute_cap
        )
        return self._solution(centers, checks, Finisher.BRUTE)


class KnapsackOutlierInstance(RepresentativeKeeper, OutlierInstance):
    """One guess of the one-pass knapsack center with z outliers summary."""

    mode = Mode.KNAPSACK_OUTLIER

    def __init__(self, tau: Distance, metric: Metric, knapsack: KnapsackConstraint, z: int):
        super().__init__(tau, metric, knapsack.max_feasible_size(), z)
        self.knapsack = knapsack

    @property
    def storage_bound(self) -> int:
        r, z = self.state.rank, self.z
        return r + (r + 1) * z + 1 + (z + 1) * r

    def finish(
        self,
        finisher: Finisher = Finisher.BRUTE,
        slack: float | None = None,
        brute_cap: int = DEFAULT_BRUTE_CAP,
    ) -> Solution | None:
        if self.state.aborted:
            return None
        candidates = set(self.state.free)
        candidates.update(x for r in self.state.pivots for x in r.independent_set)
        checks = self._outlier_checks(11 * self.tau, 9 * self.tau)
        centers = brute_independent_cover(
            candidates, self.knapsack.feasible, checks, self.metric, brute_cap
        )
        return self._solution(centers, checks, Finisher.BRUTE)


class TwoPassInstance(IndependentSetKeeper, StreamingInstance):
    """One guess of the two-pass matroid center algorithm.

    The first pass (``process``) makes a point a pivot iff it is at least
    2*tau from every pivot. The second pass gives each point within tau of a
    pivot to that pivot's independent set. The finisher intersects the
    partition matroid of those sets (capacity 1 each) with the input
    matroid; cost is at most 3*tau whenever it succeeds.
    """

    mode = Mode.MATROID

    def __init__(self, tau: Distance, metric: Metric, matroid: Matroid):
        super().__init__(tau, metric, matroid.rank_upper)
        self.matroid = matroid

    @classmethod
    def from_pivots(
        cls, tau: Distance, metric: Metric, matroid: Matroid, pivots: Sequence[ElementId]
    ) -> "TwoPassInstance":
        """Skip the first pass and start from already separated pivots."""
        instance = cls(tau, metric, matroid)
        instance.state.pivots = [PivotRecord(p, instance._initial_set(p)) for p in pivots]
        instance._record_storage()
        return instance

    def _process(self, e: ElementId) -> None:
        if self._dist_to_pivots(e) < 2 * self.tau:
            return
        if len(self.state.pivots) == self.state.rank:
            self._abort(e)
            return
        self.state.pivots.append(PivotRecord(e, self._initial_set(e)))

    first_pass = StreamingInstance.process

    def second_pass(self, e: ElementId) -> None:
        if self.state.aborted:
            return
        record = self._earliest_pivot(e, self.tau)
        if record is not None:
            self._absorb(record, e)
            self._record_storage()

    @property
    def storage_bound(self) -> int:
        r = self.state.rank
        return r * r + r

    def finish(
        self,
        finisher: Finisher = Finisher.BRUTE,
        slack: float | None = None,
        brute_cap: int = DEFAULT_BRUTE_CAP,
    ) -> Solution | TwoPassFailure:
        """Intersect the per-pivot partition with the matroid.

        The finisher arguments are ignored. Returns a failure carrying the
        pivots when some pivot cannot get its own center.
        """
        pivots = self.state.pivot_ids
        if self.state.aborted:
            return TwoPassFailure(self.tau, [*pivots, self.state.abort_element])
        part_of: dict[ElementId, ElementId] = {}
        for record in self.state.pivots:
            for x in record.independent_set:
                part_of.setdefault(x, record.pivot)
        partition = PartitionMatroid(part_of, {p: 1 for p in pivots})
        chosen = matroid_intersection(
            IntersectionProblem(part_of, partition, self.matroid.restrict(part_of))
        )
        if len(chosen) < len(pivots):
            return TwoPassFailure(self.tau, pivots)
        return Solution(chosen, cover_cost(self.metric, pivots, chosen), self.tau, self.mode)


def mc_two_pass(
    stream: Sequence[ElementId], tau: Distance, metric: Metric, matroid: Matroid
) -> Solution | TwoPassFailure:
    """Run the two-pass algorithm for one guess over a rewindable stream."""
    instance = TwoPassInstance(tau, metric, matroid)
    for e in stream:
        instance.first_pass(e)
        if instance.aborted:
            break
    for e in stream:
        instance.second_pass(e)
    return instance.finish()


class DoublingKCenter:
    """Doubling summary for k-center, an 8-approximation in one pass.

    Keeps at most k centers and a lower bound on the optimum. Centers are
    pairwise more than 4 times the bound apart and every point seen is
    within 8 times the bound of a center. A (k+1)-th center raises the bound
    and merges centers that became too close.
    """

    mode = Mode.KCENTER_DOUBLING

    def __init__(self, metric: Metric, k: int):
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        self.metric = metric
        self.k = k
        self.centers: list[ElementId] = []
        self.lower_bound: Distance = 0
        self.merges = 0
        self.processed = 0
        self.points_stored_peak = 0

    def process(self, e: ElementId) -> None:
        self.processed += 1
        if self.metric.dist_to_set(e, self.centers) <= 8 * self.lower_bound:
            return
        self.centers.append(e)
        self.points_stored_peak = max(self.points_stored_peak, len(self.centers))
        if len(self.centers) > self.k:
            self._merge()

    def _merge(self) -> None:
        closest = min(self.metric.dist(a, b) for a, b in combinations(self.centers, 2))
        self.lower_bound = max(2 * self.lower_bound, closest / 2)
        kept: list[ElementId] = []
        for c in self.centers:
            if all(self.metric.dist(c, x) > 4 * self.lower_bound for x in kept):
                kept.append(c)
        self.centers = kept
        self.merges += 1

    @property
    def storage_bound(self) -> int:
        return self.k + 1

    def finish(self) -> Solution:
        """The current centers; the certified cost is the radius bound 8 * lower bound."""
        return Solution(sorted(self.centers), 8 * self.lower_bound, self.lower_bound, self.mode)


InstanceFactory = Callable[[Distance], StreamingInstance]


def instance_factory(
    mode: Mode,
    metric: Metric,
    matroid: Matroid | None = None,
    knapsack: KnapsackConstraint | None = None,
    outliers: OutlierConfig | None = None,
) -> InstanceFactory:
    """Constructor of per-guess instances for ``mode``.

    Raises:
        ValueError: If the mode's constraint or outlier settings are missing
    """
    if mode.uses_knapsack and knapsack is None:
        raise ValueError(f"Mode {mode.value} needs a knapsack constraint")
    if mode in (Mode.MATROID, Mode.MATROID_OUTLIER) and matroid is None:
        raise ValueError(f"Mode {mode.value} needs a matroid")
    if mode.has_outliers and outliers is None:
        raise ValueError(f"Mode {mode.value} needs an outlier configuration")

    if mode is Mode.MATROID:
        return lambda tau: MatroidCenterInstance(tau, metric, matroid)
    if mode is Mode.KNAPSACK:
        return lambda tau: KnapsackInstance(tau, metric, knapsack)
    if mode is Mode.KCENTER_OUTLIER:
        return lambda tau: KCenterOutlierInstance(tau, metric, outliers)
    if mode is Mode.MATROID_OUTLIER:
        return lambda tau: MatroidOutlierInstance(tau, metric, matroid, outliers.z)
    if mode is Mode.KNAPSACK_OUTLIER:
        return lambda tau: KnapsackOutlierInstance(tau, metric, knapsack, outliers.z)
    raise ValueError(f"Mode {mode.value} has no per-guess instances")
