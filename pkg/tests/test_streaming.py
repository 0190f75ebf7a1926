"""Tests for the streaming module."""

import numpy as np
import pytest

from matroid_center.exceptions import PreconditionError
from matroid_center.matroids import PartitionMatroid, UniformMatroid
from matroid_center.metrics import EuclideanMetric
from matroid_center.offline import cover_cost
from matroid_center.streaming import (
    DoublingKCenter,
    Finisher,
    KCenterOutlierInstance,
    KnapsackConstraint,
    KnapsackInstance,
    KnapsackOutlierInstance,
    MatroidCenterInstance,
    MatroidOutlierInstance,
    Mode,
    OutlierConfig,
    Solution,
    TwoPassFailure,
    TwoPassInstance,
    instance_factory,
    mc_two_pass,
)

STREAM = [0, 1, 2, 3, 4]
WEIGHTS = {0: 5, 1: 1, 2: 2, 3: 2, 4: 1}


@pytest.fixture
def metric():
    """Points on a line at 0, 1, 10, 11 and 20."""
    return EuclideanMetric({0: [0], 1: [1], 2: [10], 3: [11], 4: [20]})


@pytest.fixture
def outlier_metric():
    """Two pairs on a line and one far point at 100."""
    return EuclideanMetric({0: [0], 1: [1], 2: [10], 3: [11], 4: [100]})


@pytest.fixture
def matroid():
    return PartitionMatroid({0: "A", 1: "B", 2: "A", 3: "B", 4: "B"}, {"A": 1, "B": 2})


def feed(instance, stream=STREAM):
    for e in stream:
        instance.process(e)
    return instance


class TestMode:
    """Tests for the Mode enum."""

    def test_flags(self):
        assert Mode.MATROID_OUTLIER.has_outliers
        assert not Mode.KNAPSACK.has_outliers
        assert Mode.KNAPSACK_OUTLIER.uses_knapsack
        assert not Mode.KCENTER_DOUBLING.uses_knapsack


class TestKnapsackConstraint:
    """Tests for KnapsackConstraint."""

    def test_max_feasible_size(self):
        assert KnapsackConstraint(4, WEIGHTS).max_feasible_size() == 3
        assert KnapsackConstraint(0.5, WEIGHTS).max_feasible_size() == 0

    def test_feasible_and_heavy(self):
        knapsack = KnapsackConstraint(4, WEIGHTS)
        assert knapsack.feasible([1, 2, 4])
        assert not knapsack.feasible([0])
        assert knapsack.is_heavy(0)

    def test_validation(self):
        with pytest.raises(ValueError, match="budget"):
            KnapsackConstraint(-1, WEIGHTS)
        with pytest.raises(ValueError, match="Negative"):
            KnapsackConstraint(1, {0: -2})


class TestMatroidCenterInstance:
    """Tests for MatroidCenterInstance."""

    def test_pivots_and_independent_sets(self, metric, matroid):
        instance = feed(MatroidCenterInstance(1, metric, matroid))
        assert not instance.aborted
        assert instance.state.pivot_ids == [0, 2, 4]
        assert [r.independent_set for r in instance.state.pivots] == [[0, 1], [2, 3], [4]]
        assert instance.state.points_stored_peak == 5
        assert instance.storage_bound == 12

    def test_abort_on_rank_plus_one_far_points(self, metric, matroid):
        instance = feed(MatroidCenterInstance(0.25, metric, matroid), [0, 1, 2, 3])
        assert instance.aborted
        assert instance.state.abort_element == 3
        assert not instance.state.abort_stored
        with pytest.raises(PreconditionError):
            instance.process(4)

    def test_guess_must_be_positive(self, metric, matroid):
        with pytest.raises(ValueError):
            MatroidCenterInstance(0, metric, matroid)

    def test_brute_finisher(self, metric, matroid):
        solution = feed(MatroidCenterInstance(1, metric, matroid)).finish(Finisher.BRUTE)
        assert solution.centers == [0, 3, 4]
        assert solution.certified_cost == 1
        assert solution.tau == 1
        assert solution.finisher is Finisher.BRUTE

    def test_efficient_finisher(self, metric, matroid):
        solution = feed(MatroidCenterInstance(1, metric, matroid)).finish(Finisher.EFFICIENT)
        assert solution is not None
        assert matroid.is_independent(solution.centers)
        assert solution.certified_cost <= 15

    def test_aborted_instance_finishes_to_none(self, metric, matroid):
        instance = feed(MatroidCenterInstance(0.25, metric, matroid), [0, 1, 2, 3])
        assert instance.finish() is None

    def test_counters(self, metric, matroid):
        instance = feed(MatroidCenterInstance(1, metric, matroid))
        assert instance.state.processed == 5
        assert instance.state.independence_calls > 0
        assert instance.state.distance_calls > 0
        assert instance.summary()["pivots"] == 3


class TestSeeding:
    """Tests for seeding a child instance from a parent summary."""

    def test_fold_and_adopt(self, metric, matroid):
        parent = feed(MatroidCenterInstance(1, metric, matroid))
        child = MatroidCenterInstance(6, metric, matroid)
        child.seed(parent.snapshot(), live_start=5)
        assert child.state.pivot_ids == [0, 4]
        assert child.state.pivots[0].independent_set == [0, 1, 3]
        assert child.state.pivots[1].independent_set == [4]
        assert child.live_start == 5
        assert child.origin.tau == 1

    def test_seed_needs_fresh_instance(self, metric, matroid):
        parent = feed(MatroidCenterInstance(1, metric, matroid))
        child = feed(MatroidCenterInstance(6, metric, matroid), [0])
        with pytest.raises(PreconditionError):
            child.seed(parent.snapshot())


class TestKnapsackInstance:
    """Tests for KnapsackInstance."""

    def test_lightest_representatives(self, metric):
        instance = feed(KnapsackInstance(1, metric, KnapsackConstraint(4, WEIGHTS)))
        assert instance.state.rank == 3
        assert [r.independent_set for r in instance.state.pivots] == [[1], [2], [4]]
        assert instance.storage_bound == 6

    def test_brute_finisher(self, metric):
        instance = feed(KnapsackInstance(1, metric, KnapsackConstraint(4, WEIGHTS)))
        solution = instance.finish()
        assert solution.centers == [1, 2, 4]

    def test_efficient_finisher(self, metric):
        instance = feed(KnapsackInstance(1, metric, KnapsackConstraint(4, WEIGHTS)))
        solution = instance.finish(Finisher.EFFICIENT)
        assert solution is not None
        assert KnapsackConstraint(4, WEIGHTS).feasible(solution.centers)

    def test_heavy_points_never_kept(self, metric):
        weights = {**WEIGHTS, 0: 9}
        instance = feed(KnapsackInstance(1, metric, KnapsackConstraint(4, weights)), [0])
        assert instance.state.pivots[0].independent_set == []


class TestKCenterOutlierInstance:
    """Tests for KCenterOutlierInstance."""

    def test_promotion(self, outlier_metric):
        instance = feed(KCenterOutlierInstance(1, outlier_metric, OutlierConfig(1, 2)))
        assert instance.state.pivot_ids == [0, 2]
        assert [r.support for r in instance.state.pivots] == [[0, 1], [2, 3]]
        assert instance.state.free == [4]

    def test_finish_uses_pivots(self, outlier_metric):
        instance = feed(KCenterOutlierInstance(1, outlier_metric, OutlierConfig(1, 2)))
        solution = instance.finish()
        assert solution.centers == [0, 2]
        assert cover_cost(outlier_metric, STREAM, solution.centers, 1) == 1

    def test_abort_stores_element(self, outlier_metric):
        instance = feed(KCenterOutlierInstance(1, outlier_metric, OutlierConfig(1, 1)), [0, 1, 2, 3])
        assert instance.aborted
        assert instance.state.abort_element == 3
        assert instance.state.abort_stored

    def test_needs_k(self, outlier_metric):
        with pytest.raises(ValueError, match="needs k"):
            KCenterOutlierInstance(1, outlier_metric, OutlierConfig(1))

    def test_storage_bound(self, outlier_metric):
        instance = KCenterOutlierInstance(1, outlier_metric, OutlierConfig(1, 2))
        assert instance.storage_bound == 3 * 1 + 1 + 2 * 2


class TestMatroidOutlierInstance:
    """Tests for MatroidOutlierInstance."""

    def test_finish(self, outlier_metric):
        matroid = UniformMatroid(STREAM, 2)
        instance = feed(MatroidOutlierInstance(1, outlier_metric, matroid, 1))
        assert [r.independent_set for r in instance.state.pivots] == [[0, 1], [2, 3]]
        solution = instance.finish()
        assert solution.centers == [0]
        assert solution.certified_cost == 10
        assert solution.mode is Mode.MATROID_OUTLIER


class TestKnapsackOutlierInstance:
    """Tests for KnapsackOutlierInstance."""

    def test_finish_is_feasible(self, outlier_metric):
        knapsack = KnapsackConstraint(4, WEIGHTS)
        solution = feed(KnapsackOutlierInstance(1, outlier_metric, knapsack, 1)).finish()
        assert solution is not None
        assert knapsack.feasible(solution.centers)
        assert solution.certified_cost <= 11


class TestTwoPass:
    """Tests for the two-pass algorithm."""

    def test_success(self, metric, matroid):
        result = mc_two_pass(STREAM, 1, metric, matroid)
        assert isinstance(result, Solution)
        assert matroid.is_independent(result.centers)
        assert cover_cost(metric, STREAM, result.centers) <= 3

    def test_intersection_failure(self, metric):
        tight = PartitionMatroid({0: "A", 1: "B", 2: "A", 3: "B", 4: "B"}, {"A": 1, "B": 1})
        result = mc_two_pass(STREAM, 1, metric, tight)
        assert isinstance(result, TwoPassFailure)
        assert result.certificate == [0, 2, 4]

    def test_abort_certificate(self, metric):
        result = mc_two_pass(STREAM, 1, metric, UniformMatroid(STREAM, 2))
        assert isinstance(result, TwoPassFailure)
        assert result.certificate == [0, 2, 4]

    def test_from_pivots(self, metric, matroid):
        instance = TwoPassInstance.from_pivots(1, metric, matroid, [0, 2, 4])
        for e in STREAM:
            instance.second_pass(e)
        assert [r.independent_set for r in instance.state.pivots] == [[0, 1], [2, 3], [4]]


class TestDoublingKCenter:
    """Tests for DoublingKCenter."""

    def test_merges_and_bound(self, metric):
        summary = DoublingKCenter(metric, 2)
        for e in STREAM:
            summary.process(e)
        assert summary.merges == 2
        assert summary.lower_bound == 5
        assert summary.points_stored_peak == summary.storage_bound == 3
        solution = summary.finish()
        assert solution.centers == [0]
        assert solution.certified_cost == 40
        assert cover_cost(metric, STREAM, solution.centers) <= solution.certified_cost

    def test_k_must_be_positive(self, metric):
        with pytest.raises(ValueError):
            DoublingKCenter(metric, 0)


class TestInstanceFactory:
    """Tests for instance_factory."""

    def test_builds_mode_instance(self, metric, matroid):
        factory = instance_factory(Mode.MATROID, metric, matroid)
        assert isinstance(factory(2.0), MatroidCenterInstance)

    def test_missing_constraint(self, metric):
        with pytest.raises(ValueError, match="knapsack"):
            instance_factory(Mode.KNAPSACK, metric)

    def test_doubling_has_no_instances(self, metric):
        with pytest.raises(ValueError):
            instance_factory(Mode.KCENTER_DOUBLING, metric)


class TestStorageBounds:
    """Stored points stay within the per-mode bound at every step."""

    @pytest.mark.parametrize("seed", range(10))
    def test_random_streams(self, seed):
        rng = np.random.default_rng(seed)
        n = 25
        coords = {i: rng.uniform(0, 50, size=2) for i in range(n)}
        metric = EuclideanMetric(coords)
        matroid = PartitionMatroid({i: i % 3 for i in range(n)}, {0: 1, 1: 1, 2: 1})
        weights = {i: float(rng.integers(1, 5)) for i in range(n)}
        knapsack = KnapsackConstraint(6, weights)
        for tau in (0.5, 2.0, 8.0):
            instances = [
                MatroidCenterInstance(tau, metric, matroid),
                KnapsackInstance(tau, metric, knapsack),
                MatroidOutlierInstance(tau, metric, matroid, 2),
                KCenterOutlierInstance(tau, metric, OutlierConfig(2, 3)),
                KnapsackOutlierInstance(tau, metric, knapsack, 2),
            ]
            for instance in instances:
                for e in range(n):
                    if instance.aborted:
                        break
                    instance.process(e)
                    assert len(instance.state.stored_points()) <= instance.storage_bound
                    assert len(instance.state.pivots) <= instance.state.rank
