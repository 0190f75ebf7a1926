"""Matroid independence oracles.

A matroid is only ever accessed through independence queries. Rank, span
and loop tests are derived from those queries with the greedy algorithm,
which is exact for matroids because of the exchange axiom.
"""

from abc import ABC, abstractmethod
from collections import Counter
from collections.abc import Hashable, Iterable, Mapping, Sequence
from enum import Enum
from itertools import combinations

import networkx as nx
from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix

from .exceptions import MatroidAxiomError, PreconditionError, UnknownElementError

# Elements are identified by their position in ingestion order
ElementId = int


class MatroidKind(str, Enum):
    """Shipped matroid families."""

    UNIFORM = "uniform"
    PARTITION = "partition"
    LINEAR = "linear"
    GRAPHIC = "graphic"
    EXPLICIT = "explicit"


class Matroid(ABC):
    """Independence oracle over a finite ground set of element ids.

    Oracles are immutable after construction apart from the ``calls``
    counter, which records how many independence queries were answered.
    """

    kind: MatroidKind

    def __init__(self, ground: Iterable[ElementId], rank_upper: int | None = None):
        self.ground = frozenset(ground)
        self.calls = 0
        self._rank_upper = rank_upper

    @abstractmethod
    def _independent(self, items: tuple[ElementId, ...]) -> bool:
        """Answer an independence query for distinct, validated elements."""

    @property
    def rank_upper(self) -> int:
        """Upper bound r on the rank of the ground set."""
        if self._rank_upper is None:
            self._rank_upper = self.rank(self.ground)
        return self._rank_upper

    def _validate(self, items: Iterable[ElementId]) -> None:
        for e in items:
            if e not in self.ground:
                raise UnknownElementError(e, f"{self.kind.value} matroid")

    def is_independent(self, elements: Iterable[ElementId]) -> bool:
        """Check whether a set of elements is independent.

        Raises:
            UnknownElementError: If an element is outside the ground set
        """
        items = tuple(dict.fromkeys(elements))
        self._validate(items)
        self.calls += 1
        if not items:
            return True
        return self._independent(items)

    def rank(self, elements: Iterable[ElementId]) -> int:
        """Size of a maximal independent subset, built greedily in index order."""
        return len(self.greedy_basis(elements))

    def greedy_basis(self, elements: Iterable[ElementId]) -> list[ElementId]:
        kept: list[ElementId] = []
        for e in sorted(set(elements)):
            if self.is_independent([*kept, e]):
                kept.append(e)
        return kept

    def spans(self, independent: Sequence[ElementId], e: ElementId) -> bool:
        """Check whether ``e`` lies in the span of an independent set."""
        if e in independent:
            self._validate([e])
            return True
        return not self.is_independent([*independent, e])

    def span(
        self, independent: Sequence[ElementId], universe: Iterable[ElementId]
    ) -> list[ElementId]:
        """All elements of ``universe`` spanned by an independent set."""
        return [e for e in sorted(set(universe)) if self.spans(independent, e)]

    def is_loop(self, e: ElementId) -> bool:
        return not self.is_independent([e])

    def restrict(self, subset: Iterable[ElementId]) -> "RestrictedMatroid":
        """Restriction of this matroid to a subset of its ground set."""
        return RestrictedMatroid(self, subset)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={len(self.ground)}, r<={self.rank_upper})"


class UniformMatroid(Matroid):
    """Every set of at most ``k`` elements is independent."""

    kind = MatroidKind.UNIFORM

    def __init__(self, ground: Iterable[ElementId], k: int):
        if k < 0:
            raise ValueError(f"Uniform matroid needs k >= 0, got {k}")
        super().__init__(ground, rank_upper=k)
        self.k = k

    def _independent(self, items: tuple[ElementId, ...]) -> bool:
        return len(items) <= self.k


class PartitionMatroid(Matroid):
    """At most ``capacities[p]`` elements may be chosen from part ``p``."""

    kind = MatroidKind.PARTITION

    def __init__(self, part_of: Mapping[ElementId, Hashable], capacities: Mapping[Hashable, int]):
        unknown = sorted({str(p) for p in part_of.values() if p not in capacities})
        if unknown:
            raise ValueError(f"Unknown part label(s): {', '.join(unknown)}")
        if any(cap < 0 for cap in capacities.values()):
            raise ValueError("Part capacities must be non-negative")
        super().__init__(part_of.keys(), rank_upper=sum(capacities.values()))
        self.part_of = dict(part_of)
        self.capacities = dict(capacities)

    def _independent(self, items: tuple[ElementId, ...]) -> bool:
        counts = Counter(self.part_of[e] for e in items)
        return all(n <= self.capacities[part] for part, n in counts.items())


class LinearMatroid(Matroid):
    """Vectors are independent iff they are linearly independent.

    Arithmetic is exact: over the rationals by default, or over GF(p) when a
    prime ``modulus`` is given.
    """

    kind = MatroidKind.LINEAR

    def __init__(self, vectors: Mapping[ElementId, Sequence[int]], modulus: int | None = None):
        dims = {len(v) for v in vectors.values()}
        if len(dims) > 1:
            raise ValueError(f"Linear matroid vectors have mixed dimensions: {sorted(dims)}")
        self.dimension = dims.pop() if dims else 0
        self.modulus = modulus
        self.domain = GF(modulus) if modulus else QQ
        self.vectors = {e: tuple(int(x) for x in v) for e, v in vectors.items()}
        super().__init__(vectors.keys(), rank_upper=self.dimension)

    def _independent(self, items: tuple[ElementId, ...]) -> bool:
        if len(items) > self.dimension:
            return False
        rows = [[self.domain(x) for x in self.vectors[e]] for e in items]
        matrix = DomainMatrix(rows, (len(rows), self.dimension), self.domain)
        return matrix.rank() == len(items)


class GraphicMatroid(Matroid):
    """Edges of a multigraph; a set is independent iff it forms a forest."""

    kind = MatroidKind.GRAPHIC

    def __init__(self, edges: Mapping[ElementId, tuple[Hashable, Hashable]]):
        self.edges = dict(edges)
        vertices = {v for edge in self.edges.values() for v in edge}
        super().__init__(self.edges.keys(), rank_upper=max(len(vertices) - 1, 0))

    def _independent(self, items: tuple[ElementId, ...]) -> bool:
        graph = nx.MultiGraph()
        graph.add_edges_from(self.edges[e] for e in items)
        return nx.is_forest(graph)


class ExplicitMatroid(Matroid):
    """Matroid given by an explicit family of independent sets.

    The family is closed downward on construction, so listing the bases is
    enough. The exchange axiom is then checked between every independent
    set and every independent set one element larger.

    Raises:
        MatroidAxiomError: If the closed family violates the exchange axiom
    """

    kind = MatroidKind.EXPLICIT

    def __init__(self, ground: Iterable[ElementId], independent_sets: Iterable[Iterable[ElementId]]):
        ground = frozenset(ground)
        family: set[frozenset[ElementId]] = {frozenset()}
        for members in independent_sets:
            members = frozenset(members)
            if not members <= ground:
                raise ValueError(f"Independent set {sorted(members)} leaves the ground set")
            for size in range(len(members) + 1):
                family.update(frozenset(sub) for sub in combinations(sorted(members), size))
        self.family = frozenset(family)
        self._check_exchange()
        super().__init__(ground, rank_upper=max(len(s) for s in self.family))

    def _check_exchange(self) -> None:
        # With downward closure, augmenting from one size up implies the general axiom
        by_size: dict[int, list[frozenset[ElementId]]] = {}
        for s in self.family:
            by_size.setdefault(len(s), []).append(s)
        for size, smaller in by_size.items():
            for i in smaller:
                for j in by_size.get(size + 1, ()):
                    if not any(i | {x} in self.family for x in j - i):
                        raise MatroidAxiomError(
                            f"Independent sets {sorted(i)} and {sorted(j)} "
                            "violate the exchange axiom",
                            (i, j),
                        )

    def _independent(self, items: tuple[ElementId, ...]) -> bool:
        return frozenset(items) in self.family


class RestrictedMatroid(Matroid):
    """A matroid restricted to a subset of its ground set.

    Queries are answered by the base oracle and counted there.
    """

    def __init__(self, base: Matroid, subset: Iterable[ElementId]):
        subset = frozenset(subset)
        base._validate(subset)
        super().__init__(subset, rank_upper=base.rank_upper)
        self.base = base
        self.kind = base.kind

    def is_independent(self, elements: Iterable[ElementId]) -> bool:
        items = tuple(dict.fromkeys(elements))
        self._validate(items)
        return self.base.is_independent(items)

    def _independent(self, items: tuple[ElementId, ...]) -> bool:
        return self.base.is_independent(items)


def build_transversal(
    matroid: Matroid,
    independent_sets: Sequence[Sequence[ElementId]],
    members: Sequence[ElementId],
    assignment: Mapping[ElementId, int],
) -> list[ElementId]:
    """Build an independent set meeting every one of ``independent_sets``.

    ``assignment`` maps each element s of the independent set ``members`` onto
    an index j of ``independent_sets`` whose span contains s. Elements are
    processed in the given order; an element outside its assigned set is
    swapped for the first element of that set (in index order) that keeps
    the current set independent.

    Returns:
        Independent set B with |B| = |members| and B meeting every I_j

    Raises:
        PreconditionError: If the assignment is not onto, a span check fails
            or ``members`` is dependent
    """
    t = len(independent_sets)
    if set(assignment) != set(members) or set(assignment.values()) != set(range(t)):
        raise PreconditionError("Transversal assignment must map the members onto every set")
    if not matroid.is_independent(members):
        raise PreconditionError("Transversal members must form an independent set")
    for s in members:
        if not matroid.spans(independent_sets[assignment[s]], s):
            raise PreconditionError(f"Element {s} is not spanned by its assigned set")

    current = list(members)
    for position, s in enumerate(members):
        target = independent_sets[assignment[s]]
        if s in target:
            continue
        rest = current[:position] + current[position + 1 :]
        for a in sorted(target):
            if a not in rest and matroid.is_independent([*rest, a]):
                current[position] = a
                break
        else:
            raise PreconditionError(f"No exchange partner for element {s} in its assigned set")
    return current
