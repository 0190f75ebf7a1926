"""Maximum-cardinality matroid intersection by exchange-graph augmentation."""

from collections.abc import Iterable
from dataclasses import dataclass

import networkx as nx

from .matroids import ElementId, Matroid

_SOURCE = "source"
_SINK = "sink"


@dataclass
class IntersectionProblem:
    """Two matroids over a common ground set.

    Attributes:
        ground: Elements to choose from
        m1: First matroid, must accept every ground element
        m2: Second matroid, must accept every ground element
    """

    ground: frozenset[ElementId]
    m1: Matroid
    m2: Matroid

    def __init__(self, ground: Iterable[ElementId], m1: Matroid, m2: Matroid):
        self.ground = frozenset(ground)
        self.m1 = m1
        self.m2 = m2


def _exchange_graph(problem: IntersectionProblem, current: list[ElementId]) -> nx.DiGraph:
    """Exchange graph of the common independent set ``current``.

    Nodes and edges are inserted in element-index order so that the BFS
    below is deterministic.
    """
    inside = sorted(current)
    outside = sorted(problem.ground.difference(current))
    graph = nx.DiGraph()
    graph.add_node(_SOURCE)
    graph.add_nodes_from(sorted(problem.ground))
    graph.add_node(_SINK)

    for y in outside:
        if problem.m1.is_independent([*current, y]):
            graph.add_edge(_SOURCE, y)
    for x in inside:
        rest = [e for e in current if e != x]
        for y in outside:
            if problem.m1.is_independent([*rest, y]):
                graph.add_edge(x, y)
            if problem.m2.is_independent([*rest, y]):
                graph.add_edge(y, x)
    for y in outside:
        if problem.m2.is_independent([*current, y]):
            graph.add_edge(y, _SINK)
    return graph


def _shortest_augmenting_path(graph: nx.DiGraph) -> list[ElementId] | None:
    parent: dict = {}
    for u, v in nx.bfs_edges(graph, _SOURCE):
        parent[v] = u
        if v == _SINK:
            path = []
            node = parent[_SINK]
            while node != _SOURCE:
                path.append(node)
                node = parent[node]
            return path[::-1]
    return None


def matroid_intersection(problem: IntersectionProblem) -> list[ElementId]:
    """Largest set independent in both matroids.

    Repeatedly augments along a shortest source-to-sink path of the exchange
    graph; ties are broken towards the lowest element indices.

    Returns:
        Common independent set of maximum cardinality, sorted by index
    """
    current: list[ElementId] = []
    while True:
        path = _shortest_augmenting_path(_exchange_graph(problem, current))
        if path is None:
            return sorted(current)
        current = sorted(set(current).symmetric_difference(path))
