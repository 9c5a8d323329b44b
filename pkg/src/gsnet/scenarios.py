"""End-to-end request evaluation and the four experiment sweeps.

A scenario bundles the physical layer (node geometry, per-node noise), the
logical layer (which node holds which chain qubit), a Bell-pair request,
and the classical-communication protocol. Evaluating it means:

* restrict the chain to the request's segment: the two targets, the inner
  qubits between them, and the outer neighbor on each side when one exists
  (qubits further out are disconnected by the outer z measurements and
  cannot influence the pair),
* compute per-qubit storage times from the protocol's delay model,
* attach depolarizing noise and storage dephasing to every segment qubit,
* measure outer neighbors in z and inner qubits per the requested pattern,
  all in ascending label order,
* propagate the noise through the measurements and read off the fidelity
  against the ideal two-qubit pair.

The sweeps iterate this over parameter grids and emit flat rows ready for
CSV or JSON serialization; identical inputs and seed give byte-identical
files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graphstate import GraphState
from .network import (
    DelayProfile,
    EntanglementTopology,
    NetworkGeometry,
    Request,
    delays_central,
    delays_local,
    hops,
    line_geometry,
)
from .noise import NoiseAssignment
from .oracle import dense_oracle_fidelity
from .patterns import (
    MeasurementPattern,
    all_x_pattern,
    best_patterns,
    dephasing_candidate_pattern,
    evaluate_pattern,
    pattern_string,
    pattern_to_strategy,
)

USABLE_THRESHOLD = 0.5
REGIME_DEAD_BAND = 1e-9
EXHAUSTIVE_CAP = 12
PROTOCOLS = ("local", "central")

SINGLE_COLUMNS = ("protocol", "N", "a", "b", "hops", "pattern", "fidelity", "usable")
SWEEP_SYMMETRIC_COLUMNS = (
    "p",
    "T_ms",
    "protocol",
    "N",
    "best_pattern",
    "best_F",
    "F_depol_pattern",
    "F_deph_pattern",
    "regime",
)
ASYM_MEMORY_COLUMNS = ("protocol", "N", "faulty_qubit", "T_ms", "fidelity")
ASYM_POSITION_COLUMNS = ("protocol", "N", "shifted_qubit", "d_km", "fidelity")
TOPOLOGY_COLUMNS = (
    "protocol",
    "topology",
    "hops",
    "mean_F",
    "std_F",
    "n_pairs",
    "usable_pct",
)


def _broadcast(value, node, what):
    if isinstance(value, Mapping):
        try:
            return value[node]
        except KeyError:
            raise ValueError(f"no {what} configured for node {node}") from None
    return value


@dataclass(frozen=True)
class NoiseParameters:
    """Depolarizing probability and memory time per node, SI units.

    Scalars broadcast to every node; mappings are keyed by node index.
    An infinite memory time turns storage dephasing off.
    """

    depolarizing: float | Mapping[int, float] = 0.0
    memory_time: float | Mapping[int, float] = math.inf

    def __post_init__(self):
        for p in self._values(self.depolarizing):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"depolarizing probability {p} outside [0, 1]")
        for t in self._values(self.memory_time):
            if not t > 0.0:
                raise ValueError(f"memory time {t} must be positive")

    @staticmethod
    def _values(value):
        return value.values() if isinstance(value, Mapping) else (value,)

    def depolarizing_at(self, node: int) -> float:
        return float(_broadcast(self.depolarizing, node, "depolarizing probability"))

    def memory_at(self, node: int) -> float:
        return float(_broadcast(self.memory_time, node, "memory time"))


@dataclass(frozen=True)
class NetworkScenario:
    """Everything needed to evaluate one Bell-pair request."""

    geometry: NetworkGeometry
    topology: EntanglementTopology
    protocol: str
    noise: NoiseParameters
    request: Request
    pattern: MeasurementPattern | str = "optimize"
    rng_seed: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.topology.qubit_count != self.geometry.node_count:
            raise ValueError(
                f"{self.topology.qubit_count} qubits cannot be placed on "
                f"{self.geometry.node_count} nodes"
            )
        wanted = "chain" if self.protocol == "local" else "star"
        if self.geometry.structure != wanted:
            raise ValueError(
                f"the {self.protocol} protocol needs a {wanted} geometry, "
                f"got {self.geometry.structure}"
            )
        if isinstance(self.pattern, str) and self.pattern != "optimize":
            raise ValueError(
                f"pattern must be a MeasurementPattern or 'optimize', got {self.pattern!r}"
            )


@dataclass(frozen=True)
class ScenarioResult:
    """Outcome of one request: the pair fidelity and how it was obtained."""

    fidelity: float
    pattern: MeasurementPattern
    exposures: Mapping[int, float]
    hops: int
    usable: bool
    start_node: int | None
    tied_patterns: tuple[MeasurementPattern, ...] | None = None


@dataclass(frozen=True)
class _RequestContext:
    graph: GraphState
    fixed: dict[int, str]
    inner: tuple[int, ...]
    channels: tuple
    profile: DelayProfile
    hop_count: int
    start_node: int | None


def _request_context(scenario: NetworkScenario) -> _RequestContext:
    topo = scenario.topology
    req = scenario.request
    hop_count = hops(topo, req)
    n = topo.qubit_count
    lo, hi = sorted((req.a, req.b))
    inner = tuple(range(lo + 1, hi))
    segment = list(range(max(1, lo - 1), min(n, hi + 1) + 1))
    fixed = {q: "z" for q in (lo - 1, hi + 1) if 1 <= q <= n}
    graph = GraphState(segment, [(q, q + 1) for q in segment[:-1]])
    if scenario.protocol == "local":
        profile = delays_local(scenario.geometry, topo, req)
        start_node = topo.node(req.a)
    else:
        profile = delays_central(scenario.geometry, topo, req)
        start_node = None
    assignment = NoiseAssignment(
        depolarizing={
            q: scenario.noise.depolarizing_at(topo.node(q)) for q in segment
        },
        memory_time={q: scenario.noise.memory_at(topo.node(q)) for q in segment},
        exposure=profile.exposures(),
    )
    return _RequestContext(
        graph=graph,
        fixed=fixed,
        inner=inner,
        channels=assignment.channels(),
        profile=profile,
        hop_count=hop_count,
        start_node=start_node,
    )


def scenario_inputs(scenario: NetworkScenario):
    """Segment graph, fixed outer bases, inner vertices, and noise channels."""
    ctx = _request_context(scenario)
    return ctx.graph, ctx.fixed, ctx.inner, ctx.channels


def _clamp(f: float) -> float:
    return min(max(f, 0.0), 1.0)


def _evaluate(ctx: _RequestContext, pattern: MeasurementPattern) -> float:
    if set(pattern.vertices) != set(ctx.inner):
        raise ValueError(
            f"pattern covers {sorted(pattern.vertices)} but the request's "
            f"inner qubits are {sorted(ctx.inner)}"
        )
    assignment = dict(ctx.fixed)
    assignment.update(pattern.as_dict())
    return _clamp(evaluate_pattern(ctx.graph, assignment, ctx.channels))


def run_request(scenario: NetworkScenario) -> ScenarioResult:
    """Evaluate one request, optimizing the pattern when asked to."""
    ctx = _request_context(scenario)
    if scenario.pattern == "optimize":
        if len(ctx.inner) + 2 > EXHAUSTIVE_CAP:
            raise ValueError(
                f"segment of {len(ctx.inner) + 2} qubits exceeds the "
                f"exhaustive-search cap {EXHAUSTIVE_CAP}; give a pattern instead"
            )
        found = best_patterns(ctx.graph, ctx.fixed, ctx.inner, ctx.channels)
        chosen = found.canonical
        fidelity = _clamp(found.fidelity)
        tied = found.patterns
    else:
        chosen = scenario.pattern
        fidelity = _evaluate(ctx, chosen)
        tied = None
    return ScenarioResult(
        fidelity=fidelity,
        pattern=chosen,
        exposures=ctx.profile.exposures(),
        hops=ctx.hop_count,
        usable=fidelity >= USABLE_THRESHOLD,
        start_node=ctx.start_node,
        tied_patterns=tied,
    )


def dense_request_fidelity(scenario: NetworkScenario) -> float:
    """The same request pushed through the density-matrix cross-check.

    Only explicit patterns are accepted, and the segment must fit the
    oracle's qubit budget.
    """
    if isinstance(scenario.pattern, str):
        raise ValueError("the dense cross-check needs an explicit pattern")
    ctx = _request_context(scenario)
    if set(scenario.pattern.vertices) != set(ctx.inner):
        raise ValueError(
            f"pattern covers {sorted(scenario.pattern.vertices)} but the "
            f"request's inner qubits are {sorted(ctx.inner)}"
        )
    assignment = dict(ctx.fixed)
    assignment.update(scenario.pattern.as_dict())
    strategy = pattern_to_strategy(MeasurementPattern(assignment), ctx.graph)
    return dense_oracle_fidelity(ctx.graph, strategy, ctx.channels)


def symmetric_scenario(
    n: int,
    p: float,
    memory_time: float,
    protocol: str,
    spacing: float = 15e3,
    coordinator: int | None = None,
    pattern: MeasurementPattern | str = "optimize",
) -> NetworkScenario:
    """Uniformly spaced chain, identical noise everywhere, end-to-end request."""
    if n < 3:
        raise ValueError(f"a chain request needs at least 3 qubits, got {n}")
    if protocol == "local":
        geometry = line_geometry([spacing] * (n - 1))
    else:
        geometry = line_geometry(
            [spacing] * (n - 1),
            structure="star",
            coordinator=coordinator if coordinator is not None else (n + 1) // 2,
        )
    return NetworkScenario(
        geometry=geometry,
        topology=EntanglementTopology.basic(n),
        protocol=protocol,
        noise=NoiseParameters(depolarizing=p, memory_time=memory_time),
        request=Request(1, n),
        pattern=pattern,
    )


def classify_regime(best_f: float, f_depol: float, f_deph: float) -> str:
    """Which candidate wins, or unentangled when nothing reaches 0.5."""
    if best_f < USABLE_THRESHOLD:
        return "unentangled"
    diff = f_depol - f_deph
    if abs(diff) <= REGIME_DEAD_BAND:
        return "transitional"
    return "depolarizing" if diff > 0 else "dephasing"


def sweep_symmetric_grid(
    n: int,
    p_values: Sequence[float],
    memory_values: Sequence[float],
    protocol: str,
    spacing: float = 15e3,
    coordinator: int | None = None,
) -> list[dict]:
    """Optimal pattern and regime label over a (p, T) grid.

    Memory times are in seconds; the emitted column converts to ms.
    """
    p_values = list(p_values)
    memory_values = list(memory_values)
    if not p_values or not memory_values:
        raise ValueError("empty sweep grid")
    if n > EXHAUSTIVE_CAP:
        raise ValueError(f"chains longer than {EXHAUSTIVE_CAP} cannot be exhausted")
    depol_candidate = all_x_pattern(n)
    deph_candidate = dephasing_candidate_pattern(n, protocol)
    rows = []
    for p in p_values:
        for memory in memory_values:
            scenario = symmetric_scenario(n, p, memory, protocol, spacing, coordinator)
            ctx = _request_context(scenario)
            found = best_patterns(ctx.graph, ctx.fixed, ctx.inner, ctx.channels)
            f_depol = _evaluate(ctx, depol_candidate)
            f_deph = _evaluate(ctx, deph_candidate)
            best_f = _clamp(found.fidelity)
            rows.append(
                {
                    "p": float(p),
                    "T_ms": float(memory) * 1e3,
                    "protocol": protocol,
                    "N": n,
                    "best_pattern": pattern_string(found.canonical),
                    "best_F": best_f,
                    "F_depol_pattern": f_depol,
                    "F_deph_pattern": f_deph,
                    "regime": classify_regime(best_f, f_depol, f_deph),
                }
            )
    return rows


def sweep_asymmetry(
    kind: str,
    protocol: str,
    n: int | None = None,
    p: float = 0.01,
    memory_time: float = 0.1,
    spacing: float = 15e3,
    sweep_values: Sequence[float] | None = None,
    qubits: Sequence[int] | None = None,
    coordinator: int | None = None,
) -> list[dict]:
    """Fidelity curves when one element of a symmetric chain is varied.

    ``kind`` is "memory" (one node's memory time sweeps while the rest stay
    at ``memory_time``) or "position" (one node's distance to the previous
    node sweeps while other links stay at ``spacing``). Every evaluation
    uses the all-x pattern.
    """
    if kind == "memory":
        n = 7 if n is None else n
        if sweep_values is None:
            sweep_values = np.geomspace(1e-4, 0.1, 25)
        if qubits is None:
            qubits = range(1, n + 1)
    elif kind == "position":
        n = 5 if n is None else n
        if sweep_values is None:
            sweep_values = np.linspace(5e3, 25e3, 21)
        if qubits is None:
            qubits = range(2, n + 1)
    else:
        raise ValueError(f"unknown asymmetry kind {kind!r}")
    sweep_values = [float(v) for v in sweep_values]
    qubits = list(qubits)
    if any(v <= 0 for v in sweep_values):
        raise ValueError("swept values must be positive")
    if any(not 1 <= q <= n for q in qubits):
        raise ValueError(f"swept qubits must lie in 1..{n}")
    if kind == "position" and 1 in qubits:
        raise ValueError("qubit 1 has no previous node to move against")
    pattern = all_x_pattern(n)
    template = symmetric_scenario(
        n, p, memory_time, protocol, spacing, coordinator, pattern=pattern
    )
    rows = []
    for q in qubits:
        for value in sweep_values:
            if kind == "memory":
                memories = {node: memory_time for node in range(1, n + 1)}
                memories[q] = value
                scenario = replace(
                    template,
                    noise=NoiseParameters(depolarizing=p, memory_time=memories),
                )
                extra = {"faulty_qubit": q, "T_ms": value * 1e3}
            else:
                spacings = [spacing] * (n - 1)
                spacings[q - 2] = value
                geometry = line_geometry(
                    [float(s) for s in spacings],
                    structure=template.geometry.structure,
                    coordinator=template.geometry.coordinator,
                )
                scenario = replace(template, geometry=geometry)
                extra = {"shifted_qubit": q, "d_km": value / 1e3}
            row = {"protocol": protocol, "N": n}
            row.update(extra)
            row["fidelity"] = run_request(scenario).fidelity
            rows.append(row)
    return rows


def _scattered_chain_positions(rng, nodes: int, spacing_range) -> list[tuple[float, float]]:
    lengths = rng.uniform(spacing_range[0], spacing_range[1], nodes - 1)
    angles = rng.uniform(0.0, 2.0 * math.pi, nodes - 1)
    xs = np.concatenate([[0.0], np.cumsum(lengths * np.cos(angles))])
    ys = np.concatenate([[0.0], np.cumsum(lengths * np.sin(angles))])
    return [(float(x), float(y)) for x, y in zip(xs, ys)]


def default_hop_cap(nodes: int, min_pairs: int = 5) -> int:
    """Largest hop count that still has at least ``min_pairs`` target pairs."""
    cap = nodes - 2 - min_pairs
    if cap < 1:
        raise ValueError(f"no hop count has {min_pairs} pairs with {nodes} nodes")
    return cap


def run_topology_comparison(
    nodes: int = 100,
    spacing_range: tuple[float, float] = (5e3, 25e3),
    p: float = 0.01,
    memory_range: tuple[float, float] | None = (0.01, 0.1),
    seed: int = 0,
    hop_cap: int | None = None,
    instances: int = 1,
    coordinator: int | None = None,
    identity_permutation: bool = False,
    protocols: Sequence[str] = PROTOCOLS,
) -> list[dict]:
    """Average pair fidelity against hop count, custom versus basic placement.

    The custom placement scatters the chain's qubits over the nodes with a
    random permutation, so a request between qubits a few hops apart may
    span physically distant nodes; the basic placement keeps qubit i on
    node i. Every custom pair (q, q+h) whose outer neighbors both exist is
    evaluated with the all-x pattern, then the same pair of physical nodes
    is re-evaluated under the basic placement, grouped by the custom hop
    count. Passing ``memory_range=None`` disables dephasing and ``p=0``
    disables depolarizing, isolating the two competing noise effects.

    Three independent substreams (geometry, memories, permutation) are
    spawned per instance from the seed, so enabling or disabling any one
    randomized element never shifts the others.
    """
    if nodes < 4:
        raise ValueError("the comparison needs at least 4 nodes")
    cap = default_hop_cap(nodes) if hop_cap is None else int(hop_cap)
    if not 1 <= cap <= nodes - 3:
        raise ValueError(f"hop cap must lie in 1..{nodes - 3}")
    if instances < 1:
        raise ValueError("need at least one instance")
    hub = coordinator if coordinator is not None else nodes // 2
    unknown = [proto for proto in protocols if proto not in PROTOCOLS]
    if unknown:
        raise ValueError(f"unknown protocols: {unknown}")

    samples: dict[tuple[str, str, int], list[float]] = {
        (proto, topo_kind, h): []
        for proto in protocols
        for topo_kind in ("custom", "basic")
        for h in range(1, cap + 1)
    }
    root = np.random.SeedSequence(seed)
    for instance_seed in root.spawn(instances):
        geo_ss, mem_ss, perm_ss = instance_seed.spawn(3)
        positions = _scattered_chain_positions(
            np.random.default_rng(geo_ss), nodes, spacing_range
        )
        if memory_range is None:
            memory: float | dict[int, float] = math.inf
        else:
            draws = np.random.default_rng(mem_ss).uniform(
                memory_range[0], memory_range[1], nodes
            )
            memory = {node: float(t) for node, t in zip(range(1, nodes + 1), draws)}
        if identity_permutation:
            custom = EntanglementTopology.basic(nodes)
        else:
            shuffled = np.random.default_rng(perm_ss).permutation(nodes) + 1
            custom = EntanglementTopology(node_of=tuple(int(v) for v in shuffled))
        basic = EntanglementTopology.basic(nodes)
        noise = NoiseParameters(depolarizing=p, memory_time=memory)

        for proto in protocols:
            if proto == "local":
                geometry = NetworkGeometry(positions=positions)
            else:
                geometry = NetworkGeometry(
                    positions=positions, structure="star", coordinator=hub
                )
            base = NetworkScenario(
                geometry=geometry,
                topology=custom,
                protocol=proto,
                noise=noise,
                request=Request(1, 2),
                pattern=all_x_pattern(3),
                rng_seed=seed,
            )
            for h in range(1, cap + 1):
                for q in range(2, nodes - h):
                    custom_req = Request(q, q + h)
                    samples[(proto, "custom", h)].append(
                        _pair_fidelity(base, custom, custom_req)
                    )
                    node_pair = sorted((custom.node(q), custom.node(q + h)))
                    basic_req = Request(node_pair[0], node_pair[1])
                    samples[(proto, "basic", h)].append(
                        _pair_fidelity(base, basic, basic_req)
                    )

    rows = []
    for proto in protocols:
        for topo_kind in ("custom", "basic"):
            for h in range(1, cap + 1):
                values = samples[(proto, topo_kind, h)]
                usable = sum(1 for f in values if f >= USABLE_THRESHOLD)
                rows.append(
                    {
                        "protocol": proto,
                        "topology": topo_kind,
                        "hops": h,
                        "mean_F": float(np.mean(values)),
                        "std_F": float(np.std(values)),
                        "n_pairs": len(values),
                        "usable_pct": 100.0 * usable / len(values),
                    }
                )
    return rows


def _pair_fidelity(
    base: NetworkScenario, topology: EntanglementTopology, request: Request
) -> float:
    lo, hi = sorted((request.a, request.b))
    pattern = MeasurementPattern({q: "x" for q in range(lo + 1, hi)})
    scenario = replace(base, topology=topology, request=request, pattern=pattern)
    return run_request(scenario).fidelity


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_rows_csv(path, columns: Sequence[str], rows: Iterable[Mapping]) -> None:
    """Fixed-header CSV with 12-significant-digit floats and LF line ends."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_rows_json(path, columns: Sequence[str], rows: Iterable[Mapping]) -> None:
    """The same table as a JSON array of objects in column order."""
    shaped = [{c: row[c] for c in columns} for row in rows]
    Path(path).write_text(json.dumps(shaped, indent=2) + "\n", encoding="ascii")


def single_rows(scenario: NetworkScenario, result: ScenarioResult) -> list[dict]:
    """One-row table summarizing a single request evaluation."""
    return [
        {
            "protocol": scenario.protocol,
            "N": scenario.topology.qubit_count,
            "a": scenario.request.a,
            "b": scenario.request.b,
            "hops": result.hops,
            "pattern": pattern_string(result.pattern),
            "fidelity": result.fidelity,
            "usable": result.usable,
        }
    ]
