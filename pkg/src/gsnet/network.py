"""Network geometry, classical channel structures and delay-time computation.

Two coordination protocols are modeled. The local protocol relays the
request along a chain of classical channels starting from the node that
initiated it; the central protocol has a coordinator node connected to
everyone by a star of channels, issuing all measurement commands and
collecting the outcomes. Either way, a qubit dephases from the arrival of
the request until it is measured, and the target qubits dephase until the
correction information from every measured qubit has reached them.

Distances are meters, times are seconds, speeds are meters per second.
Classical messages travel along the configured channel structure, so the
relevant distance between two nodes is the summed length of the links on
the path between them, not their straight-line separation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

DEFAULT_SIGNAL_SPEED = 2.0e8  # light in optical fiber
DEFAULT_PROCESSING_TIME = 1e-6


def _as_position(p) -> tuple[float, float]:
    if isinstance(p, (int, float)):
        return (float(p), 0.0)
    coords = tuple(float(c) for c in p)
    if len(coords) == 1:
        return (coords[0], 0.0)
    if len(coords) != 2:
        raise ValueError(f"position {p!r} is not 1D or 2D")
    return coords


@dataclass(frozen=True)
class NetworkGeometry:
    """Node positions plus the classical channel structure connecting them.

    ``structure`` is "chain" (links between consecutive nodes) or "star"
    (every node linked to the coordinator). Nodes are labeled 1..M in
    position order.
    """

    positions: tuple[tuple[float, float], ...]
    structure: str = "chain"
    coordinator: int | None = None
    signal_speed: float = DEFAULT_SIGNAL_SPEED
    processing_times: tuple[float, ...] = ()

    def __post_init__(self):
        positions = tuple(_as_position(p) for p in self.positions)
        object.__setattr__(self, "positions", positions)
        if len(positions) < 2:
            raise ValueError("a network needs at least two nodes")
        if self.structure not in ("chain", "star"):
            raise ValueError(f"unknown channel structure {self.structure!r}")
        if self.structure == "star":
            if self.coordinator is None:
                raise ValueError("star structure needs a coordinator node")
            if not 1 <= self.coordinator <= len(positions):
                raise ValueError(f"coordinator {self.coordinator} out of range")
        elif self.coordinator is not None:
            raise ValueError("a chain structure has no coordinator")
        if not self.signal_speed > 0:
            raise ValueError("signal speed must be positive")
        taus = self.processing_times
        if isinstance(taus, (int, float)):
            taus = (float(taus),) * len(positions)
        elif not taus:
            taus = (DEFAULT_PROCESSING_TIME,) * len(positions)
        else:
            taus = tuple(float(t) for t in taus)
        if len(taus) != len(positions):
            raise ValueError("need one processing time per node")
        if any(t < 0 for t in taus):
            raise ValueError("processing times must be non-negative")
        object.__setattr__(self, "processing_times", taus)

    @property
    def node_count(self) -> int:
        return len(self.positions)

    def distance(self, u: int, v: int) -> float:
        """Straight-line separation; the length of a direct link."""
        (ux, uy), (vx, vy) = self.positions[u - 1], self.positions[v - 1]
        return math.hypot(ux - vx, uy - vy)

    def processing_time(self, node: int) -> float:
        return self.processing_times[node - 1]


def line_geometry(spacings: Sequence[float], **kwargs) -> NetworkGeometry:
    """Collinear nodes with the given consecutive gaps (meters)."""
    xs = [0.0]
    for gap in spacings:
        if gap < 0:
            raise ValueError("node spacing must be non-negative")
        xs.append(xs[-1] + gap)
    return NetworkGeometry(tuple((x, 0.0) for x in xs), **kwargs)


def path_distance(geom: NetworkGeometry, u: int, v: int, structure: str | None = None) -> float:
    """Length of the classical message path between two nodes.

    Chain: the sum of consecutive link lengths between them. Star: via the
    coordinator, unless one endpoint is the coordinator itself.
    """
    structure = structure or geom.structure
    for node in (u, v):
        if not 1 <= node <= geom.node_count:
            raise ValueError(f"node {node} out of range")
    if u == v:
        return 0.0
    if structure == "chain":
        lo, hi = min(u, v), max(u, v)
        return sum(geom.distance(k, k + 1) for k in range(lo, hi))
    if structure == "star":
        c = geom.coordinator
        if c is None:
            raise ValueError("star distance needs a coordinator")
        if u == c or v == c:
            return geom.distance(u, v)
        return geom.distance(u, c) + geom.distance(c, v)
    raise ValueError(f"unknown channel structure {structure!r}")


@dataclass(frozen=True)
class EntanglementTopology:
    """Placement of the linear resource state onto network nodes.

    ``node_of[k]`` is the node holding qubit k+1. Qubit labels double as
    positions along the resource chain, so qubits with consecutive labels
    are entangled neighbors regardless of where they sit physically. The
    basic topology is the identity placement.
    """

    node_of: tuple[int, ...]

    def __post_init__(self):
        nodes = tuple(int(n) for n in self.node_of)
        object.__setattr__(self, "node_of", nodes)
        if sorted(nodes) != list(range(1, len(nodes) + 1)):
            raise ValueError("placement must be a bijection onto nodes 1..M")

    @classmethod
    def basic(cls, n: int) -> "EntanglementTopology":
        return cls(tuple(range(1, n + 1)))

    @property
    def qubit_count(self) -> int:
        return len(self.node_of)

    @property
    def is_basic(self) -> bool:
        return self.node_of == tuple(range(1, len(self.node_of) + 1))

    def node(self, qubit: int) -> int:
        if not 1 <= qubit <= len(self.node_of):
            raise ValueError(f"qubit {qubit} out of range")
        return self.node_of[qubit - 1]

    def qubit_at(self, node: int) -> int:
        try:
            return self.node_of.index(node) + 1
        except ValueError:
            raise ValueError(f"no qubit at node {node}") from None


@dataclass(frozen=True)
class Request:
    """A single Bell-pair request between two qubits of the resource chain."""

    a: int
    b: int

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("request needs two distinct target qubits")


def hops(topology: EntanglementTopology, request: Request) -> int:
    """Resource-chain distance between the two targets."""
    for q in (request.a, request.b):
        if not 1 <= q <= topology.qubit_count:
            raise ValueError(f"target qubit {q} not in the topology")
    return abs(request.a - request.b)


@dataclass(frozen=True)
class DelayProfile:
    """Dephasing exposure durations produced by one protocol run.

    ``measured`` maps each measured qubit to the time until its measurement;
    ``target_exposure`` is the single duration shared by both targets, who
    wait for each other's correction information.
    """

    measured: Mapping[int, float]
    target_exposure: float
    targets: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "measured", dict(self.measured))
        if any(t < 0 for t in self.measured.values()) or self.target_exposure < 0:
            raise ValueError("exposure durations must be non-negative")

    def exposures(self) -> dict[int, float]:
        """All per-qubit exposures, targets included."""
        out = dict(self.measured)
        for t in self.targets:
            out[t] = self.target_exposure
        return out


def _request_parts(topology: EntanglementTopology, request: Request):
    lo, hi = sorted((request.a, request.b))
    n = topology.qubit_count
    inner = list(range(lo + 1, hi))
    outer = {}
    if lo - 1 >= 1:
        outer[lo] = lo - 1
    if hi + 1 <= n:
        outer[hi] = hi + 1
    return lo, hi, inner, outer


def delays_local(
    geom: NetworkGeometry,
    topology: EntanglementTopology,
    request: Request,
    start_node: int | None = None,
    t0: float = 0.0,
) -> DelayProfile:
    """Exposure times under relay coordination over the chain structure.

    The request enters at ``start_node`` (default: the node holding target
    a) and is relayed hop by hop. A measured qubit waits for the request to
    reach its node plus local processing. A target waits until outcome
    information from its outer neighbor and every inner neighbor has been
    relayed over and back.
    """
    if geom.structure != "chain":
        raise ValueError("local protocol coordination runs over a chain structure")
    if topology.qubit_count != geom.node_count:
        raise ValueError("topology and geometry sizes differ")
    nu = geom.signal_speed
    start = topology.node(request.a) if start_node is None else start_node
    lo, hi, inner, outer = _request_parts(topology, request)

    measured = {}
    for q in inner + sorted(outer.values()):
        node = topology.node(q)
        measured[q] = path_distance(geom, start, node) / nu + geom.processing_time(node) + t0

    def branch_time(target: int) -> float:
        involved = list(inner)
        if target in outer:
            involved.append(outer[target])
        times = []
        for q in involved:
            node = topology.node(q)
            d = path_distance(geom, start, node) + path_distance(geom, topology.node(target), node)
            times.append(d / nu + geom.processing_time(node))
        return max(times, default=0.0)

    target_exposure = max(branch_time(lo), branch_time(hi)) + t0
    return DelayProfile(measured, target_exposure, (request.a, request.b))


def delays_central(
    geom: NetworkGeometry,
    topology: EntanglementTopology,
    request: Request,
    coordinator: int | None = None,
    t0: float = 0.0,
) -> DelayProfile:
    """Exposure times under coordinator-driven star coordination.

    Every measured qubit waits for its command from the coordinator plus
    local processing; a qubit co-located with the coordinator waits only
    for the processing time. A target waits for its own correction command,
    which the coordinator sends once the slowest outcome has returned.
    """
    if geom.structure != "star":
        raise ValueError("central protocol coordination runs over a star structure")
    if topology.qubit_count != geom.node_count:
        raise ValueError("topology and geometry sizes differ")
    c = geom.coordinator if coordinator is None else coordinator
    nu = geom.signal_speed
    lo, hi, inner, outer = _request_parts(topology, request)

    measured = {}
    for q in inner + sorted(outer.values()):
        node = topology.node(q)
        measured[q] = geom.distance(node, c) / nu + geom.processing_time(node) + t0

    def branch_time(target: int) -> float:
        involved = list(inner)
        if target in outer:
            involved.append(outer[target])
        round_trips = []
        for q in involved:
            node = topology.node(q)
            round_trips.append(2 * geom.distance(node, c) / nu + geom.processing_time(node))
        slowest = max(round_trips, default=0.0)
        return geom.distance(topology.node(target), c) / nu + slowest

    target_exposure = max(branch_time(lo), branch_time(hi)) + t0
    return DelayProfile(measured, target_exposure, (request.a, request.b))
