"""Measurement strategies, patterns, and exhaustive pattern optimization.

A strategy is an ordered list of single-qubit measurements where each step's
correction is applied before the next measurement. A measurement pattern is
the unordered equivalent: all qubits are measured simultaneously in fixed
bases and a single round of corrections is applied at the end. The two views
are connected by a basis rewriting: commuting a correction past a later
measurement exchanges that measurement's basis (x with y for a y step's
neighborhood, x with z for an x step's special neighbor) while leaving the
outcome statistics intact. Signs are not tracked; they only flip which
outcome branch is which.

Patterns are serialized as strings over {x, y, z} in ascending qubit order;
for the standard chain request the first character belongs to qubit 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .graphstate import GraphState, default_w0, measure_update
from .noise import strategy_fidelity

_SWAP_XY = {"x": "y", "y": "x", "z": "z"}
_SWAP_XZ = {"x": "z", "z": "x", "y": "y"}
_BASES = ("x", "y", "z")


@dataclass(frozen=True)
class MeasurementPattern:
    """Map from vertex to measurement basis, order-free."""

    assignment: tuple[tuple[int, str], ...]

    def __init__(self, assignment):
        items = dict(assignment)
        for v, basis in items.items():
            if basis not in _BASES:
                raise ValueError(f"unknown basis {basis!r} on vertex {v}")
        object.__setattr__(self, "assignment", tuple(sorted(items.items())))

    def as_dict(self) -> dict[int, str]:
        return dict(self.assignment)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.assignment)

    def basis_of(self, vertex: int) -> str:
        for v, basis in self.assignment:
            if v == vertex:
                return basis
        raise KeyError(vertex)


@dataclass(frozen=True)
class Strategy:
    """Ordered measurement steps (vertex, basis, special neighbor or None)."""

    steps: tuple[tuple[int, str, int | None], ...]

    def __init__(self, steps):
        normalized = []
        seen = set()
        for step in steps:
            if len(step) == 2:
                vertex, basis = step
                w0 = None
            else:
                vertex, basis, w0 = step
            if basis not in _BASES:
                raise ValueError(f"unknown basis {basis!r} on vertex {vertex}")
            if vertex in seen:
                raise ValueError(f"vertex {vertex} measured twice")
            seen.add(vertex)
            normalized.append((vertex, basis, w0))
        object.__setattr__(self, "steps", tuple(normalized))

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _, _ in self.steps)


def pattern_string(pattern: MeasurementPattern) -> str:
    """Bases in ascending vertex order as one compact string."""
    return "".join(basis for _, basis in pattern.assignment)


def pattern_from_string(text: str, first_vertex: int = 2) -> MeasurementPattern:
    """Inverse of pattern_string for a contiguous vertex range."""
    return MeasurementPattern({first_vertex + i: basis for i, basis in enumerate(text)})


def _resolved_steps(strategy: Strategy, graph: GraphState):
    """Walk the strategy, recording the graph before each step and the w0 used."""
    g = graph
    out = []
    for vertex, basis, w0 in strategy.steps:
        if vertex not in g.vertices:
            raise ValueError(f"vertex {vertex} not present when its step runs")
        if basis == "x":
            if w0 is None:
                w0 = default_w0(g, vertex)
            elif not g.has_edge(vertex, w0):
                raise ValueError(f"special neighbor {w0} is not adjacent to {vertex}")
        elif w0 is not None:
            raise ValueError("special neighbor applies only to x measurements")
        out.append((vertex, basis, w0, g))
        g = measure_update(g, vertex, basis, w0=w0)
    return out, g


def strategy_to_pattern(strategy: Strategy, graph: GraphState) -> MeasurementPattern:
    """One-shot pattern measuring the same vertices with the same effect.

    Processes the steps in reverse, exchanging bases of later measurements
    that the step's correction operators would have rewritten.
    """
    resolved, _ = _resolved_steps(strategy, graph)
    position = {vertex: j for j, (vertex, _, _, _) in enumerate(resolved)}
    mu = {vertex: basis for vertex, basis, _, _ in resolved}
    for j in reversed(range(len(resolved))):
        vertex, basis, w0, g = resolved[j]
        if basis == "y":
            touched = g.neighbors(vertex)
            swap = _SWAP_XY
        elif basis == "x" and w0 is not None:
            touched = (w0,)
            swap = _SWAP_XZ
        else:
            continue
        for u in touched:
            assert position.get(u, len(resolved)) > j, "past vertex in a live neighborhood"
            if u in mu:
                mu[u] = swap[mu[u]]
    return MeasurementPattern(mu)


def pattern_to_strategy(
    pattern: MeasurementPattern,
    graph: GraphState,
    order: Sequence[int] | None = None,
) -> Strategy:
    """A strategy realizing the pattern when executed in the given order.

    Defaults to ascending vertex order. Maintains the running rewrite of
    each still-unmeasured basis; the basis a step actually measures is the
    pattern entry with all earlier steps' exchanges applied, which inverts
    the reverse-order rewriting of strategy_to_pattern exactly.
    """
    assignment = pattern.as_dict()
    for v in assignment:
        if v not in graph.vertices:
            raise ValueError(f"pattern vertex {v} not in the graph")
    if order is None:
        order = sorted(assignment)
    elif sorted(order) != sorted(assignment):
        raise ValueError("order must visit exactly the pattern's vertices")
    current = dict(assignment)
    g = graph
    steps = []
    for vertex in order:
        basis = current.pop(vertex)
        w0 = default_w0(g, vertex) if basis == "x" else None
        if basis == "y":
            for u in g.neighbors(vertex):
                if u in current:
                    current[u] = _SWAP_XY[current[u]]
        elif basis == "x" and w0 is not None:
            if w0 in current:
                current[w0] = _SWAP_XZ[current[w0]]
        steps.append((vertex, basis, w0))
        g = measure_update(g, vertex, basis, w0=w0)
    return Strategy(steps)


def enumerate_patterns(n: int) -> list[MeasurementPattern]:
    """All x/y assignments to the inner vertices 2..n-1 of an n-chain.

    z is excluded: it cuts the chain and can never connect the targets.
    """
    if n < 3:
        raise ValueError(f"a chain request needs at least 3 qubits, got {n}")
    inner = range(2, n)
    return [
        MeasurementPattern(dict(zip(inner, bases)))
        for bases in itertools.product("xy", repeat=n - 2)
    ]


def all_x_pattern(n: int) -> MeasurementPattern:
    return MeasurementPattern({v: "x" for v in range(2, n)})


def dephasing_candidate_pattern(n: int, protocol: str) -> MeasurementPattern:
    """The pattern that wins deep in the dephasing-dominated corner.

    Local protocol: y on the first two inner qubits (the ones measured with
    the least accumulated storage), x elsewhere. Central protocol: y on the
    inner qubits within one position of the middle, x elsewhere.
    """
    if n < 3:
        raise ValueError(f"a chain request needs at least 3 qubits, got {n}")
    inner = range(2, n)
    if protocol == "local":
        head = set(list(inner)[:2])
        return MeasurementPattern({v: ("y" if v in head else "x") for v in inner})
    if protocol == "central":
        return MeasurementPattern(
            {v: ("y" if abs(v - n / 2) <= 1 else "x") for v in inner}
        )
    raise ValueError(f"unknown protocol {protocol!r}")


def evaluate_pattern(
    graph: GraphState,
    assignment: Mapping[int, str] | MeasurementPattern,
    channels,
    order: Sequence[int] | None = None,
) -> float:
    """Fidelity of one full measurement assignment under the given noise."""
    pattern = (
        assignment
        if isinstance(assignment, MeasurementPattern)
        else MeasurementPattern(assignment)
    )
    strategy = pattern_to_strategy(pattern, graph, order)
    return strategy_fidelity(graph, strategy, channels)


@dataclass(frozen=True)
class OptimizationResult:
    """All maximizers of an exhaustive pattern search, with their fidelity."""

    patterns: tuple[MeasurementPattern, ...]
    fidelity: float

    @property
    def canonical(self) -> MeasurementPattern:
        """Lexicographically smallest maximizer (x earlier than y)."""
        return min(self.patterns, key=pattern_string)


def best_patterns(
    graph: GraphState,
    fixed: Mapping[int, str],
    inner: Sequence[int],
    channels,
    tie_tolerance: float = 1e-12,
) -> OptimizationResult:
    """Exhaustively score every x/y assignment on the inner vertices.

    ``fixed`` holds the bases of vertices measured the same way in every
    candidate (the z measurements disconnecting the targets). Ties within
    the tolerance of the maximum are all reported, in enumeration order.
    """
    inner = list(inner)
    results = []
    for bases in itertools.product("xy", repeat=len(inner)):
        assignment = dict(fixed)
        assignment.update(zip(inner, bases))
        inner_pattern = MeasurementPattern(dict(zip(inner, bases)))
        results.append((inner_pattern, evaluate_pattern(graph, assignment, channels)))
    # No inner vertices (adjacent targets) leaves exactly the empty pattern.
    top = max(f for _, f in results)
    ties = tuple(p for p, f in results if f >= top - tie_tolerance)
    return OptimizationResult(ties, top)


def optimize_pattern(scenario, cap: int = 12) -> OptimizationResult:
    """Exhaustive search over a scenario's inner measurement patterns."""
    from .scenarios import scenario_inputs

    graph, fixed, inner, channels = scenario_inputs(scenario)
    if len(inner) + 2 > cap:
        raise ValueError(
            f"chain of {len(inner) + 2} qubits exceeds the exhaustive-search cap {cap}"
        )
    return best_patterns(graph, fixed, inner, channels)
