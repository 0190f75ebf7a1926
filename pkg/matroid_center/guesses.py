"""Guess orchestration.

The optimum cost is unknown, so every run feeds the stream to one instance
per guess. The ladder keeps a geometric sequence of guesses spanning the
whole aspect ratio. Stream-strapping keeps a short band of guesses and
replaces an instance whose guess proved too small by a child at a larger
guess, seeded with the parent's summary.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

from .matroids import ElementId, Matroid
from .metrics import Distance, Metric
from .offline import DEFAULT_BRUTE_CAP
from .streaming import (
    Finisher,
    InstanceFactory,
    MatroidCenterInstance,
    Mode,
    Solution,
    StreamingInstance,
    TwoPassFailure,
    TwoPassInstance,
)

# Guess spacing per mode: the ladder uses epsilon / divisor so the end-to-end
# factor is stated in the user's epsilon
EPSILON_DIVISORS = {
    Mode.MATROID: 17,
    Mode.KNAPSACK: 17,
    Mode.KCENTER_OUTLIER: 4,
    Mode.MATROID_OUTLIER: 50,
    Mode.KNAPSACK_OUTLIER: 50,
}
TWO_PASS_DIVISOR = 3

# Used when every stream point coincides: any positive guess covers them
DEGENERATE_GUESS = 1.0


class GuessMode(str, Enum):
    LADDER = "ladder"
    STRAPPED = "strapped"


@dataclass
class GuessConfig:
    """How guesses are generated and finished.

    Attributes:
        epsilon: Accuracy parameter in (0, 1]
        mode: Ladder or stream-strapping
        finisher: Offline step applied to surviving instances
        aspect_ratio: Overrides the aspect ratio used by the ladder
        base_distance: Overrides the ladder base or the strapped base R
        brute_cap: Candidate cap of the brute-force finisher
    """

    epsilon: float = 0.1
    mode: GuessMode = GuessMode.LADDER
    finisher: Finisher = Finisher.BRUTE
    aspect_ratio: float | None = None
    base_distance: Distance | None = None
    brute_cap: int = DEFAULT_BRUTE_CAP

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if self.aspect_ratio is not None and self.aspect_ratio < 1:
            raise ValueError(f"Aspect ratio must be at least 1, got {self.aspect_ratio}")


class EventKind(str, Enum):
    ABORTED = "aborted"
    REPLACED = "replaced"
    FINISHED = "finished"
    FAILED = "failed"


@dataclass(frozen=True)
class GuessEvent:
    """One lifecycle event; ``position`` is -1 once the stream has ended."""

    kind: EventKind
    tau: Distance
    position: int
    child_tau: Distance | None = None


@dataclass
class GuessTrace:
    """Lifecycle of all guesses in a run.

    Attributes:
        spawned: Number of instances created, children included
        events: Aborts, replacements and finisher outcomes in order
        active_high_water: Largest number of simultaneously active instances
        stored_high_water: Largest total of points stored by active instances
    """

    spawned: int = 0
    events: list[GuessEvent] = field(default_factory=list)
    active_high_water: int = 0
    stored_high_water: int = 0

    def record(
        self, kind: EventKind, tau: Distance, position: int, child_tau: Distance | None = None
    ) -> None:
        self.events.append(GuessEvent(kind, tau, position, child_tau))

    def count(self, kind: EventKind) -> int:
        return sum(1 for event in self.events if event.kind is kind)

    def observe(self, active: Sequence[StreamingInstance]) -> None:
        live = [inst for inst in active if not inst.aborted]
        self.active_high_water = max(self.active_high_water, len(live))
        stored = sum(len(inst.state.stored_points()) for inst in live)
        self.stored_high_water = max(self.stored_high_water, stored)

    def to_dict(self) -> dict:
        return {
            "spawned": self.spawned,
            "active_high_water": self.active_high_water,
            "stored_high_water": self.stored_high_water,
            "counts": {kind.value: self.count(kind) for kind in EventKind},
            "events": [
                {
                    "kind": event.kind.value,
                    "tau": float(event.tau),
                    "position": event.position,
                    "child_tau": None if event.child_tau is None else float(event.child_tau),
                }
                for event in self.events
            ],
        }


@dataclass
class GuessOutcome:
    """Result of a guess orchestration.

    Attributes:
        solution: Solution of the smallest successful guess, None if all failed
        trace: Guess lifecycle
        instances: Every instance created, in creation order
        parameters: Derived constants (epsilon', beta, base distance, ...)
    """

    solution: Solution | None
    trace: GuessTrace
    instances: list[StreamingInstance]
    parameters: dict

    @property
    def instance_peak(self) -> int:
        """Largest number of points any single instance stored."""
        return max((inst.state.points_stored_peak for inst in self.instances), default=0)

    def winner(self) -> StreamingInstance | None:
        if self.solution is None:
            return None
        for inst in self.instances:
            if inst.tau == self.solution.tau and not inst.aborted:
                return inst
        return None


def ladder_epsilon(mode: Mode, epsilon: float, passes: int = 1) -> float:
    """Ratio minus one between consecutive ladder guesses."""
    divisor = TWO_PASS_DIVISOR if passes == 2 else EPSILON_DIVISORS[mode]
    return epsilon / divisor


def ladder_guesses(base: Distance, aspect_ratio: float, epsilon_prime: float) -> list[float]:
    """Guesses base/aspect_ratio * (1+epsilon')^i up to the first one >= base*aspect_ratio."""
    tau = float(base) / aspect_ratio
    top = float(base) * aspect_ratio
    guesses = [tau]
    while tau < top:
        tau *= 1 + epsilon_prime
        guesses.append(tau)
    return guesses


def first_distinct_distance(stream: Sequence[ElementId], metric: Metric) -> Distance | None:
    """Distance between the first point and the first point different from it."""
    if not stream:
        return None
    for e in stream[1:]:
        d = metric.dist(stream[0], e)
        if d > 0:
            return d
    return None


def strap_alpha(mode: Mode, epsilon: float) -> float:
    """Width of the strapped guess band relative to its base."""
    return (4 if mode.has_outliers else 2) + epsilon


def strap_beta(alpha: float, epsilon: float) -> int:
    """Number of steps so that (1+epsilon)^beta >= alpha/epsilon."""
    return math.ceil(math.log(alpha / epsilon) / math.log1p(epsilon))


def strap_base(stream: Sequence[ElementId], metric: Metric, count: int) -> Distance | None:
    """Minimum positive distance among the first ``count`` points.

    Scans further when those points all coincide; None if every point does.
    """
    prefix = stream[:count]
    positive = [d for a, b in combinations(prefix, 2) if (d := metric.dist(a, b)) > 0]
    if positive:
        return min(positive)
    for e in stream[count:]:
        d = metric.dist(stream[0], e)
        if d > 0:
            return d
    return None


def _finish_in_order(
    instances: Sequence[StreamingInstance],
    trace: GuessTrace,
    finisher: Finisher,
    slack: float | None,
    brute_cap: int,
) -> Solution | None:
    for inst in sorted(instances, key=lambda i: i.tau):
        if inst.aborted:
            continue
        solution = inst.finish(finisher, slack, brute_cap)
        if solution is not None:
            trace.record(EventKind.FINISHED, inst.tau, -1)
            return solution
        trace.record(EventKind.FAILED, inst.tau, -1)
    return None


def run_ladder(
    stream: Sequence[ElementId],
    factory: InstanceFactory,
    metric: Metric,
    config: GuessConfig,
    mode: Mode,
    aspect_ratio: float = 1.0,
) -> GuessOutcome:
    """Feed the stream to one instance per ladder guess.

    Finishers run from the smallest surviving guess upward and the first
    success is returned.
    """
    epsilon_prime = ladder_epsilon(mode, config.epsilon)
    base = config.base_distance or first_distinct_distance(stream, metric)
    aspect_ratio = config.aspect_ratio or aspect_ratio
    guesses = (
        [DEGENERATE_GUESS] if base is None else ladder_guesses(base, aspect_ratio, epsilon_prime)
    )
    trace = GuessTrace(spawned=len(guesses))
    instances = [factory(tau) for tau in guesses]

    for position, e in enumerate(stream):
        for inst in instances:
            if inst.aborted:
                continue
            inst.process(e)
            if inst.aborted:
                trace.record(EventKind.ABORTED, inst.tau, position)
        trace.observe(instances)

    solution = _finish_in_order(instances, trace, config.finisher, None, config.brute_cap)
    parameters = {
        "epsilon_prime": epsilon_prime,
        "base_distance": None if base is None else float(base),
        "aspect_ratio": float(aspect_ratio),
        "guesses": len(guesses),
    }
    return GuessOutcome(solution, trace, instances, parameters)


def run_two_pass_ladder(
    stream: Sequence[ElementId],
    metric: Metric,
    matroid: Matroid,
    config: GuessConfig,
    aspect_ratio: float = 1.0,
) -> GuessOutcome:
    """Two-pass matroid center over the ladder; the smallest successful guess wins."""
    epsilon_prime = ladder_epsilon(Mode.MATROID, config.epsilon, passes=2)
    base = config.base_distance or first_distinct_distance(stream, metric)
    aspect_ratio = config.aspect_ratio or aspect_ratio
    guesses = (
        [DEGENERATE_GUESS] if base is None else ladder_guesses(base, aspect_ratio, epsilon_prime)
    )
    trace = GuessTrace(spawned=len(guesses))
    instances = [TwoPassInstance(tau, metric, matroid) for tau in guesses]

    for position, e in enumerate(stream):
        for inst in instances:
            if not inst.aborted:
                inst.first_pass(e)
                if inst.aborted:
                    trace.record(EventKind.ABORTED, inst.tau, position)
        trace.observe(instances)
    for e in stream:
        for inst in instances:
            inst.second_pass(e)
    trace.observe(instances)

    parameters = {
        "epsilon_prime": epsilon_prime,
        "base_distance": None if base is None else float(base),
        "aspect_ratio": float(aspect_ratio),
        "guesses": len(guesses),
    }
    return GuessOutcome(_finish_two_pass(instances, trace), trace, instances, parameters)


def _finish_two_pass(instances: Sequence[TwoPassInstance], trace: GuessTrace) -> Solution | None:
    for inst in instances:
        if inst.aborted:
            continue
        result = inst.finish()
        if isinstance(result, TwoPassFailure):
            trace.record(EventKind.FAILED, inst.tau, -1)
            continue
        trace.record(EventKind.FINISHED, inst.tau, -1)
        return result
    return None


class _StrappedRun:
    """Active band of strapped instances and their replacement by children."""

    def __init__(self, factory: InstanceFactory, epsilon: float, beta: int, base: Distance):
        self.factory = factory
        self.growth = (1 + epsilon) ** beta
        self.trace = GuessTrace()
        self.instances: list[StreamingInstance] = []
        self.active = [self._spawn(base * (1 + epsilon) ** i) for i in range(beta + 1)]

    def _spawn(self, tau: Distance) -> StreamingInstance:
        inst = self.factory(tau)
        self.trace.spawned += 1
        self.instances.append(inst)
        return inst

    def step(self, position: int, e: ElementId) -> None:
        # instances that aborted without keeping e still owe it to their child
        owing: set[StreamingInstance] = set()
        for inst in self.active:
            inst.process(e)
            if inst.aborted:
                self.trace.record(EventKind.ABORTED, inst.tau, position)
                if not inst.state.abort_stored:
                    owing.add(inst)

        while any(inst.aborted for inst in self.active):
            top = max(inst.tau for inst in self.active if inst.aborted)
            for index, parent in enumerate(self.active):
                if parent.tau > top:
                    continue
                owes = parent in owing
                child = self._spawn(parent.tau * self.growth)
                child.seed(parent.snapshot(), live_start=position if owes else position + 1)
                self.trace.record(EventKind.REPLACED, parent.tau, position, child.tau)
                if owes and not child.aborted:
                    child.process(e)
                    owes = child.aborted and not child.state.abort_stored
                if child.aborted:
                    self.trace.record(EventKind.ABORTED, child.tau, position)
                    if owes:
                        owing.add(child)
                self.active[index] = child
            self.active.sort(key=lambda inst: inst.tau)
        self.trace.observe(self.active)


def _strap(
    stream: Sequence[ElementId],
    factory: InstanceFactory,
    metric: Metric,
    config: GuessConfig,
    mode: Mode,
    rank: int,
    z: int = 0,
) -> tuple[_StrappedRun | None, dict]:
    alpha = strap_alpha(mode, config.epsilon)
    beta = strap_beta(alpha, config.epsilon)
    radius = config.base_distance or strap_base(stream, metric, rank + 1 + z)
    parameters = {
        "strap_alpha": alpha,
        "beta": beta,
        "base_distance": None if radius is None else float(radius),
    }
    if rank == 0 and stream:
        return None, parameters
    base = DEGENERATE_GUESS if radius is None else radius / 2
    run = _StrappedRun(factory, config.epsilon, beta, base)
    run.trace.observe(run.active)
    for position, e in enumerate(stream):
        run.step(position, e)
    return run, parameters


def run_strapped(
    stream: Sequence[ElementId],
    factory: InstanceFactory,
    metric: Metric,
    config: GuessConfig,
    mode: Mode,
    rank: int,
    z: int = 0,
) -> GuessOutcome:
    """Stream-strapping over a band of beta+1 guesses.

    The originals start at half the minimum positive distance among the
    first r+1 (r+1+z with outliers) points. When an instance aborts at guess
    tau, every active instance with guess at most tau is replaced, in
    increasing order, by a child at (1+epsilon)^beta times its guess seeded
    with its summary. The element that caused an abort is the child's first
    live point. Finishers run from the smallest active guess upward.
    """
    run, parameters = _strap(stream, factory, metric, config, mode, rank, z)
    if run is None:
        return GuessOutcome(None, GuessTrace(), [], parameters)
    slack = None if mode.has_outliers else 5 + 2 * config.epsilon
    solution = _finish_in_order(run.active, run.trace, config.finisher, slack, config.brute_cap)
    return GuessOutcome(solution, run.trace, run.instances, parameters)


def two_pass_strapped(
    stream: Sequence[ElementId], metric: Metric, matroid: Matroid, config: GuessConfig
) -> GuessOutcome:
    """Strapped first pass, then a two-pass finish for every active guess.

    The second pass grows fresh independent sets within tau of the pivots
    of each surviving instance and intersects them with the matroid.
    """
    run, parameters = _strap(
        stream,
        lambda tau: MatroidCenterInstance(tau, metric, matroid),
        metric,
        config,
        Mode.MATROID,
        matroid.rank_upper,
    )
    if run is None:
        return GuessOutcome(None, GuessTrace(), [], parameters)
    finishers = [
        TwoPassInstance.from_pivots(inst.tau, metric, matroid, inst.state.pivot_ids)
        for inst in run.active
    ]
    for e in stream:
        for inst in finishers:
            inst.second_pass(e)
    run.trace.observe(finishers)
    solution = _finish_two_pass(finishers, run.trace)
    return GuessOutcome(solution, run.trace, [*run.instances, *finishers], parameters)


def unrepresented_points(
    instance: StreamingInstance,
    stream: Sequence[ElementId],
    epsilon: float,
    metric: Metric,
    matroid: Matroid,
) -> list[ElementId]:
    """Points before an instance's live substream that lack a representative.

    A representative of e is an old pivot within epsilon*tau of e whose
    independent set spans e. Instances that were never seeded have no such
    points.
    """
    seed = instance.origin
    if seed is None:
        return []
    radius = epsilon * instance.tau
    return [
        e
        for e in stream[: instance.live_start]
        if not any(
            metric.dist(e, rho) <= radius and matroid.spans(seed.independent_sets[rho], e)
            for rho in seed.pivots
        )
    ]
