"""Tests for the instance module."""

from textwrap import dedent

import pytest

from matroid_center.exceptions import (
    InstanceParseError,
    MatroidAxiomError,
    MetricViolationError,
)
from matroid_center.instance import (
    emit_instance,
    generate_random,
    parse_instance,
    parse_instance_text,
    write_instance,
)
from matroid_center.matroids import GraphicMatroid, LinearMatroid, PartitionMatroid

PARTITION = dedent(
    """\
    name: tiny
    metric:
      kind: euclidean
    matroid:
      kind: partition
      capacities: {red: 1, blue: 1}
    points:
      - {id: a, coords: [0, 0], part: red}
      - {id: b, coords: [3, 4], part: blue}
      - {id: c, coords: [0, 1], part: red, group: g1}
    """
)


class TestParseInstance:
    """Tests for parsing instance documents."""

    def test_partition_instance(self):
        instance = parse_instance_text(PARTITION)
        assert instance.name == "tiny"
        assert instance.labels == ["a", "b", "c"]
        assert instance.stream == [0, 1, 2]
        assert instance.metric.dist(0, 1) == 5
        assert isinstance(instance.matroid, PartitionMatroid)
        assert instance.matroid.is_independent([0, 1])
        assert not instance.matroid.is_independent([0, 2])
        assert instance.groups == {2: "g1"}
        assert instance.knapsack is None
        assert instance.outliers is None

    def test_line_markers_are_not_kept(self):
        instance = parse_instance_text(PARTITION)
        assert "__line__" not in instance.document
        assert "__line__" not in instance.document["points"][0]

    def test_matrix_metric_with_knapsack_and_outliers(self):
        text = dedent(
            """\
            metric:
              kind: matrix
              matrix: [[0, 2, 3], [2, 0, 4], [3, 4, 0]]
            knapsack:
              budget: 3
            outliers:
              z: 1
              k: 2
            points:
              - {id: x, weight: 1}
              - {id: y, weight: 2}
              - {id: z, weight: 5}
            """
        )
        instance = parse_instance_text(text)
        assert instance.matroid is None
        assert instance.metric.dist(1, 2) == 4
        assert instance.knapsack.budget == 3
        assert instance.knapsack.is_heavy(2)
        assert instance.outliers.z == 1
        assert instance.outliers.k == 2

    def test_linear_and_graphic(self):
        linear = parse_instance_text(
            dedent(
                """\
                matroid: {kind: linear, modulus: 2}
                points:
                  - {coords: [0], vector: [1, 0]}
                  - {coords: [1], vector: [0, 1]}
                  - {coords: [2], vector: [1, 1]}
                """
            )
        )
        assert isinstance(linear.matroid, LinearMatroid)
        assert not linear.matroid.is_independent([0, 1, 2])

        graphic = parse_instance_text(
            dedent(
                """\
                matroid: {kind: graphic}
                points:
                  - {coords: [0], edge: [u, v]}
                  - {coords: [1], edge: [v, w]}
                  - {coords: [2], edge: [w, u]}
                """
            )
        )
        assert isinstance(graphic.matroid, GraphicMatroid)
        assert graphic.matroid.is_independent([0, 1])
        assert not graphic.matroid.is_independent([0, 1, 2])

    def test_explicit_matroid_by_point_ids(self):
        instance = parse_instance_text(
            dedent(
                """\
                matroid:
                  kind: explicit
                  independent_sets: [[a, b]]
                points:
                  - {id: a, coords: [0]}
                  - {id: b, coords: [1]}
                  - {id: c, coords: [2]}
                """
            )
        )
        assert instance.matroid.is_independent([0, 1])
        assert not instance.matroid.is_independent([2])

    def test_unknown_part_names_its_line(self):
        text = PARTITION.replace("part: red, group: g1", "part: green")
        with pytest.raises(InstanceParseError, match="Unknown part label 'green'") as exc:
            parse_instance_text(text)
        assert exc.value.line == 10
        assert str(exc.value).startswith("line 10:")

    def test_missing_coords(self):
        text = PARTITION.replace("{id: b, coords: [3, 4], part: blue}", "{id: b, part: blue}")
        with pytest.raises(InstanceParseError, match="needs 'coords'") as exc:
            parse_instance_text(text)
        assert exc.value.line == 9

    def test_duplicate_id(self):
        with pytest.raises(InstanceParseError, match="Duplicate point id 'a'"):
            parse_instance_text(PARTITION.replace("id: c", "id: a"))

    def test_unknown_metric_kind(self):
        with pytest.raises(InstanceParseError, match="Unknown metric kind 'taxicab'"):
            parse_instance_text(PARTITION.replace("kind: euclidean", "kind: taxicab"))

    def test_missing_points(self):
        with pytest.raises(InstanceParseError, match="Missing 'points' list"):
            parse_instance_text("metric: {kind: euclidean}\n")

    def test_invalid_yaml(self):
        with pytest.raises(InstanceParseError, match="Invalid YAML"):
            parse_instance_text("points:\n  - {id: a\n  - b\n")

    def test_non_metric_matrix(self):
        text = dedent(
            """\
            metric:
              kind: matrix
              matrix: [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
            points: [{id: a}, {id: b}, {id: c}]
            """
        )
        with pytest.raises(MetricViolationError):
            parse_instance_text(text)

    def test_builder_errors_name_the_section_line(self):
        text = dedent(
            """\
            metric: {kind: euclidean}
            knapsack: {budget: -2}
            points:
              - {id: a, coords: [0], weight: 1}
            """
        )
        with pytest.raises(InstanceParseError, match="budget must be non-negative") as exc:
            parse_instance_text(text)
        assert exc.value.line == 2
        assert str(exc.value).startswith("line 2:")

    def test_explicit_family_must_be_a_matroid(self):
        text = dedent(
            """\
            matroid:
              kind: explicit
              independent_sets: [[a, b], [c]]
            points:
              - {id: a, coords: [0]}
              - {id: b, coords: [1]}
              - {id: c, coords: [2]}
            """
        )
        with pytest.raises(MatroidAxiomError, match="exchange axiom"):
            parse_instance_text(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_instance(tmp_path / "missing.yaml")


class TestGenerateRandom:
    """Tests for generate_random."""

    def test_is_deterministic(self):
        assert generate_random(8, seed=4) == generate_random(8, seed=4)
        assert generate_random(8, seed=4) != generate_random(8, seed=5)

    def test_parts_are_round_robin(self):
        document = generate_random(5, parts=2, capacity=2)
        assert [p["part"] for p in document["points"]] == ["P0", "P1", "P0", "P1", "P0"]
        assert document["matroid"]["capacities"] == {"P0": 2, "P1": 2}

    def test_outliers_and_budget(self):
        document = generate_random(6, z=2, k=3, budget=12, seed=1)
        assert len(document["points"]) == 8
        assert document["outliers"] == {"z": 2, "k": 3}
        assert document["knapsack"] == {"budget": 12}
        assert all(1 <= p["weight"] <= 10 for p in document["points"])

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            generate_random(0)

    def test_written_file_parses_back(self, tmp_path):
        document = generate_random(6, clusters=2, z=1, seed=3)
        path = tmp_path / "random.yaml"
        write_instance(document, path)
        instance = parse_instance(path)
        assert instance.document == document
        assert len(instance) == 7
        assert instance.outliers.z == 1
        assert emit_instance(instance.document) == path.read_text()
