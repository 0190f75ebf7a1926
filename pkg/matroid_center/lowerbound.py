"""Hard instances for one-pass partition matroid center.

A bit string of length q^2 (held by the first party) and an index into it
(held by the second) are turned into a partition matroid center instance
whose optimum is 1 if the indexed bit is set and at least ``delta``
otherwise. A one-pass algorithm that beats a ``delta`` approximation would
therefore recover any bit of the string from its memory.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import MatroidCenterError
from .instance import Instance, build_instance
from .offline import DEFAULT_EXACT_CAP, exact_opt

ALICE = "alice"
BOB = "bob"
PLACEHOLDER_PART = "P'"


@dataclass
class LowerBoundParams:
    """Parameters of the reduction.

    Attributes:
        q: Side size; the bit string has q^2 bits and the rank is 2q - 1
        bits: String of q^2 characters, each '0' or '1'
        index: 1-based position of the queried bit
        delta: Distance between clusters, must exceed 1
    """

    q: int
    bits: str
    index: int
    delta: float = 10.0

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be positive, got {self.q}")
        if len(self.bits) != self.q * self.q or set(self.bits) - {"0", "1"}:
            raise ValueError(f"bits must be a 0/1 string of length {self.q * self.q}")
        if not 1 <= self.index <= self.q * self.q:
            raise ValueError(f"index must be in [1, {self.q * self.q}], got {self.index}")
        if self.delta <= 1:
            raise ValueError(f"delta must exceed 1, got {self.delta}")

    @property
    def bit(self) -> int:
        return int(self.bits[self.index - 1])

    @property
    def rank(self) -> int:
        return 2 * self.q - 1


@dataclass
class LowerBoundPoint:
    """A point of the reduction: an edge point or a placeholder p(u)."""

    label: str
    owner: str
    cluster: str
    part: str


@dataclass
class LowerBoundInstance:
    """Points in stream order with their clusters and parts."""

    params: LowerBoundParams
    points: list[LowerBoundPoint]
    capacities: dict[str, int] = field(default_factory=dict)

    def matrix(self) -> list[list[float]]:
        """Unit distance inside a cluster, delta across clusters."""
        clusters = np.array([p.cluster for p in self.points])
        same = clusters[:, None] == clusters[None, :]
        values = np.where(same, 1.0, float(self.params.delta))
        np.fill_diagonal(values, 0.0)
        return values.tolist()

    def to_document(self) -> dict:
        p = self.params
        return {
            "name": f"lowerbound-q{p.q}-i{p.index}-b{p.bit}",
            "metric": {"kind": "matrix", "matrix": self.matrix()},
            "matroid": {"kind": "partition", "capacities": dict(self.capacities)},
            "points": [
                {"id": pt.label, "row": i, "part": pt.part, "group": pt.cluster}
                for i, pt in enumerate(self.points)
            ],
        }

    def to_instance(self) -> Instance:
        return build_instance(self.to_document())


def gen_index_instance(params: LowerBoundParams, permute_seed: int | None = None) -> LowerBoundInstance:
    """Build the reduction instance for ``params``.

    Vertex sets C_A and V_A have q vertices, C_B and V_B have q - 1. Bit
    number b (1-based) is the edge between C_A[i] and V_A[j] with
    (i, j) = divmod(b - 1, q). The queried bit names the edge (u, v); the
    second party matches C_A minus u with V_B and V_A minus v with C_B, and
    adds a placeholder p(u) to the cluster of every u in C_A. An edge point
    lives in the cluster of its C vertex and in the part (capacity 1) of
    its V vertex; placeholders share one part of capacity 0.

    Points are streamed first party first unless ``permute_seed`` is given.
    """
    q = params.q
    c_a = [f"CA{i}" for i in range(q)]
    v_a = [f"VA{j}" for j in range(q)]
    c_b = [f"CB{i}" for i in range(q - 1)]
    v_b = [f"VB{j}" for j in range(q - 1)]
    u_index, v_index = divmod(params.index - 1, q)
    u, v = c_a[u_index], v_a[v_index]

    points = []
    for b, bit in enumerate(params.bits):
        if bit == "1":
            i, j = divmod(b, q)
            points.append(LowerBoundPoint(f"{c_a[i]}-{v_a[j]}", ALICE, c_a[i], v_a[j]))
    for x, y in zip([c for c in c_a if c != u], v_b):
        points.append(LowerBoundPoint(f"{x}-{y}", BOB, x, y))
    for x, y in zip(c_b, [w for w in v_a if w != v]):
        points.append(LowerBoundPoint(f"{x}-{y}", BOB, x, y))
    for x in c_a:
        points.append(LowerBoundPoint(f"p({x})", BOB, x, PLACEHOLDER_PART))

    if permute_seed is not None:
        order = np.random.default_rng(permute_seed).permutation(len(points))
        points = [points[i] for i in order]

    capacities = {part: 1 for part in v_a + v_b}
    capacities[PLACEHOLDER_PART] = 0
    return LowerBoundInstance(params, points, capacities)


def verify_dichotomy(params: LowerBoundParams, cap: int = DEFAULT_EXACT_CAP) -> bool:
    """Check the optimum of the generated instance against the queried bit.

    The optimum must be exactly 1 when the bit is set. Otherwise it is
    exactly delta, or infinite for q = 1 where no point can be a center.

    Raises:
        ResourceCapError: If the instance exceeds the exact-oracle cap
    """
    instance = gen_index_instance(params).to_instance()
    if instance.matroid is None:
        raise MatroidCenterError("Reduction instance lost its matroid")
    optimum = exact_opt(instance.stream, instance.metric, instance.matroid.is_independent, cap=cap)
    if params.bit:
        return optimum.cost == 1
    if params.q == 1:
        return optimum.cost == math.inf
    return optimum.cost == params.delta
