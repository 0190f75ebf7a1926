"""Run orchestration: one instance, one configuration, one report."""

import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .exceptions import DegenerateInstanceError, MatroidCenterError
from .guesses import (
    GuessConfig,
    GuessMode,
    GuessOutcome,
    GuessTrace,
    run_ladder,
    run_strapped,
    run_two_pass_ladder,
    two_pass_strapped,
)
from .instance import Instance
from .matroids import ElementId, Matroid, UniformMatroid
from .metrics import Metric
from .offline import (
    Feasibility,
    OptimumResult,
    cover_cost,
    exact_opt,
    gonzalez_k_center,
    offline_3approx_all_guesses,
)
from .report import STATUS_INFEASIBLE, STATUS_SOLVED, Report
from .streaming import (
    DoublingKCenter,
    KnapsackConstraint,
    Mode,
    OutlierConfig,
    instance_factory,
)

Progress = Callable[[str], None]


@dataclass
class Problem:
    """An instance's oracles resolved against a run configuration.

    Attributes:
        mode: Problem variant
        metric: Distance oracle
        matroid: Matroid of the centers; a uniform matroid of rank k for
            the k-center variants, None for knapsack modes
        knapsack: Budget constraint of the knapsack modes
        outliers: Outlier settings of the outlier modes
        rank: Largest feasible center set
    """

    mode: Mode
    metric: Metric
    matroid: Matroid | None
    knapsack: KnapsackConstraint | None
    outliers: OutlierConfig | None
    rank: int

    @property
    def z(self) -> int:
        return self.outliers.z if self.outliers else 0

    @property
    def feasible(self) -> Feasibility:
        if self.knapsack is not None:
            return self.knapsack.feasible
        if self.matroid is None:
            raise MatroidCenterError(f"Mode {self.mode.value} has no feasibility oracle")
        return self.matroid.is_independent


def resolve_problem(instance: Instance, config: RunConfig) -> Problem:
    """Combine instance sections and config overrides for the configured mode.

    Raises:
        MatroidCenterError: If a section the mode needs is missing
    """
    mode = config.mode
    z = config.z if config.z is not None else (instance.outliers.z if instance.outliers else 0)
    k = config.k if config.k is not None else (instance.outliers.k if instance.outliers else None)

    outliers = OutlierConfig(z, k) if mode.has_outliers else None
    if mode in (Mode.KCENTER_OUTLIER, Mode.KCENTER_DOUBLING):
        if k is None:
            raise MatroidCenterError(f"Mode {mode.value} needs k (--k or the outliers section)")
        matroid = UniformMatroid(instance.stream, k)
        return Problem(mode, instance.metric, matroid, None, outliers, k)

    if mode.uses_knapsack:
        if instance.knapsack is None:
            raise MatroidCenterError(f"Mode {mode.value} needs a knapsack section with weights")
        budget = config.budget if config.budget is not None else instance.knapsack.budget
        try:
            knapsack = KnapsackConstraint(budget, instance.knapsack.weights)
        except ValueError as e:
            raise MatroidCenterError(str(e)) from e
        rank = knapsack.max_feasible_size()
        return Problem(mode, instance.metric, None, knapsack, outliers, rank)

    if instance.matroid is None:
        raise MatroidCenterError(f"Mode {mode.value} needs a matroid section")
    matroid = instance.matroid
    return Problem(mode, instance.metric, matroid, None, outliers, matroid.rank_upper)


def stream_order(instance: Instance, config: RunConfig) -> list[ElementId]:
    """File order, or a seeded permutation of it with ``shuffle``."""
    stream = instance.stream
    if config.shuffle:
        order = np.random.default_rng(config.seed).permutation(len(stream))
        stream = [stream[int(i)] for i in order]
    return stream


def aspect_ratio(stream: Sequence[ElementId], metric: Metric) -> float:
    """Aspect ratio of the stream, 1 when it is degenerate."""
    try:
        return metric.compute_stats(stream).aspect_ratio
    except DegenerateInstanceError:
        return 1.0


@dataclass
class _Streamed:
    algorithm: str
    outcome: GuessOutcome
    storage_bound: int | None
    instance_peak: int


def _doubling(stream: Sequence[ElementId], problem: Problem) -> _Streamed:
    summary = DoublingKCenter(problem.metric, problem.rank)
    for e in stream:
        summary.process(e)
    trace = GuessTrace(spawned=1, active_high_water=1, stored_high_water=summary.points_stored_peak)
    parameters = {"merges": summary.merges, "lower_bound": float(summary.lower_bound)}
    outcome = GuessOutcome(summary.finish(), trace, [], parameters)
    return _Streamed("doubling", outcome, summary.storage_bound, summary.points_stored_peak)


def _dispatch(
    stream: Sequence[ElementId],
    problem: Problem,
    config: RunConfig,
    ratio: float,
    progress: Progress,
) -> _Streamed:
    if problem.mode is Mode.KCENTER_DOUBLING:
        progress(f"Doubling summary with k={problem.rank}")
        return _doubling(stream, problem)

    algorithm, outcome = _guess(stream, problem, config, ratio, progress)
    winner = outcome.winner()
    storage_bound = winner.storage_bound if winner is not None else None
    return _Streamed(algorithm, outcome, storage_bound, outcome.instance_peak)


def _guess(
    stream: Sequence[ElementId],
    problem: Problem,
    config: RunConfig,
    ratio: float,
    progress: Progress,
) -> tuple[str, GuessOutcome]:
    guess_config = GuessConfig(
        epsilon=config.epsilon,
        mode=config.guesses,
        finisher=config.finisher,
        aspect_ratio=ratio,
        brute_cap=config.brute_cap,
    )
    strapped = config.guesses is GuessMode.STRAPPED

    if config.passes == 2:
        if strapped:
            progress("Two-pass run, strapped first pass")
            outcome = two_pass_strapped(stream, problem.metric, problem.matroid, guess_config)
            return "two-pass", outcome
        progress(f"Two-pass run over a ladder for aspect ratio {ratio:.4g}")
        outcome = run_two_pass_ladder(stream, problem.metric, problem.matroid, guess_config)
        return "two-pass", outcome

    factory = instance_factory(
        problem.mode, problem.metric, problem.matroid, problem.knapsack, problem.outliers
    )
    if strapped:
        progress(f"Strapped guesses, rank {problem.rank}")
        return "one-pass", run_strapped(
            stream, factory, problem.metric, guess_config, problem.mode, problem.rank, problem.z
        )
    progress(f"Ladder guesses for aspect ratio {ratio:.4g}")
    return "one-pass", run_ladder(stream, factory, problem.metric, guess_config, problem.mode)


def exact_optimum(instance: Instance, config: RunConfig) -> OptimumResult:
    """Exact optimum of the instance under the configured mode.

    Raises:
        ResourceCapError: If the instance has more points than the exact cap
    """
    problem = resolve_problem(instance, config)
    return exact_opt(
        instance.stream, problem.metric, problem.feasible, problem.z, cap=config.exact_cap
    )


def baseline_centers(instance: Instance, config: RunConfig) -> tuple[str, list[ElementId] | None]:
    """Offline baseline: farthest-point traversal for k-center, the all-guess
    3-approximation for matroid center. Other modes have none."""
    problem = resolve_problem(instance, config)
    if problem.mode in (Mode.KCENTER_OUTLIER, Mode.KCENTER_DOUBLING):
        return "gonzalez", gonzalez_k_center(instance.stream, problem.metric, problem.rank)
    if problem.mode is Mode.MATROID:
        return "offline-3approx", offline_3approx_all_guesses(
            instance.stream, problem.metric, problem.matroid
        )
    return "none", None


def run(instance: Instance, config: RunConfig, progress: Progress | None = None) -> Report:
    """Stream the instance once (or twice) under ``config`` and report.

    Oracle counters are reset before the stream is read, so the reported
    calls cover the streaming run and its finishers only; the stream cost
    and the exact optimum are computed afterwards.

    Raises:
        MatroidCenterError: If the instance lacks a section the mode needs
        ResourceCapError: If a finisher or the exact oracle exceeds its cap
    """
    progress = progress or (lambda message: None)
    started = time.perf_counter()
    problem = resolve_problem(instance, config)
    stream = stream_order(instance, config)
    progress(f"{len(stream)} points, mode {problem.mode.value}, rank {problem.rank}")

    ladder = config.guesses is GuessMode.LADDER and problem.mode is not Mode.KCENTER_DOUBLING
    ratio = aspect_ratio(stream, problem.metric) if ladder else 1.0

    problem.metric.calls = 0
    if problem.matroid is not None:
        problem.matroid.calls = 0
    streamed = _dispatch(stream, problem, config, ratio, progress)
    distance_calls = problem.metric.calls
    independence_calls = problem.matroid.calls if problem.matroid is not None else 0
    outcome = streamed.outcome
    progress(f"{outcome.trace.spawned} instances spawned")

    solution = outcome.solution
    report = Report(
        instance=instance.name,
        n=len(stream),
        algorithm=streamed.algorithm,
        mode=problem.mode.value,
        finisher=solution.finisher.value if solution and solution.finisher else None,
        guesses=None if streamed.algorithm == "doubling" else config.guesses.value,
        epsilon=config.epsilon,
        z=problem.z if problem.mode.has_outliers else None,
        k=problem.rank if problem.mode in (Mode.KCENTER_OUTLIER, Mode.KCENTER_DOUBLING) else None,
        budget=problem.knapsack.budget if problem.knapsack else None,
        rank=problem.rank,
        status=STATUS_INFEASIBLE if solution is None else STATUS_SOLVED,
        peak_points_stored=streamed.instance_peak,
        total_points_stored_peak=outcome.trace.stored_high_water,
        storage_bound=streamed.storage_bound,
        independence_calls=independence_calls,
        distance_calls=distance_calls,
        trace=outcome.trace.to_dict(),
        parameters=outcome.parameters,
    )

    if solution is not None:
        report.tau = solution.tau
        report.centers = [instance.label(c) for c in solution.centers]
        report.center_ids = list(solution.centers)
        report.certified_cost = solution.certified_cost
        report.cost = cover_cost(problem.metric, stream, solution.centers, problem.z)

    if config.verify:
        progress("Computing the exact optimum")
        optimum = exact_opt(
            stream, problem.metric, problem.feasible, problem.z, cap=config.exact_cap
        )
        report.exact_opt = optimum.cost
        report.exact_centers = [instance.label(c) for c in optimum.centers]
        if report.cost is not None and 0 < optimum.cost < float("inf"):
            report.ratio = report.cost / optimum.cost

    if config.timing:
        report.wall_clock = time.perf_counter() - started
    return report
