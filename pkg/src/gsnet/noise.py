"""Pauli noise channels and their propagation through measurement sequences.

Every noise source is modeled as a probabilistic Pauli map applied to the
ideal graph state before any measurement happens. Measurements with their
outcome-conditioned corrections then act on the noisy state. Commuting each
noise operator past the measurement layer turns the pair (noisy state,
manipulation) into (manipulated state, transformed noise), so the whole
protocol reduces to bookkeeping on Pauli strings and the quantum state never
has to be represented explicitly.

For a vertex v measured in basis alpha there are two cases. A noise operator
whose component at v commutes with the measured observable acts inside the
projected eigenspace, and the component simply drops out. An anticommuting
component flips the observed outcome, so the correction that gets applied
belongs to the opposite branch; the mismatch between the two branch
corrections is itself a Pauli operator (the byproduct of the measurement),
which replaces the lost component. In both cases the survivor is conjugated
by the reference-branch correction unitary. Only the plus branch needs
tracking: the minus-branch corrections differ from it by the byproduct, a
Pauli, so propagated operators differ at most by a sign, and signs cancel
when operators are applied by conjugation.

Channels propagate independently of each other, so the cost is linear in the
number of noise sources and measurement steps. They are only composed at the
very end, on the handful of qubits that survive, where the convolution over
the projective Pauli group is tiny. All functions here are pure and operate
on immutable inputs; propagating distinct channels or evaluating distinct
scenarios concurrently is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .graphstate import (
    GraphState,
    byproduct_operator,
    correction_operators,
    default_w0,
    measure_update,
    stabilizer_contains,
)
from .pauli import (
    CliffordGate,
    PauliString,
    conjugate_through,
    gate_support,
    hermitian_rep,
    identity,
    pauli_multiply,
    single,
)

WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PauliChannel:
    """Mixture of Pauli operators applied to a state by conjugation.

    Semantics: rho -> sum_k w_k op_k rho op_k^dagger. Weights are
    probabilities summing to one. Operator phases are irrelevant to the
    action (they cancel in the conjugation), so operators are compared
    projectively when terms are merged.
    """

    terms: tuple[tuple[float, PauliString], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(tuple(t) for t in self.terms))
        for weight, op in self.terms:
            if not -WEIGHT_TOLERANCE <= weight <= 1 + WEIGHT_TOLERANCE:
                raise ValueError(f"channel weight {weight} outside [0, 1]")
            if not isinstance(op, PauliString):
                raise TypeError("channel terms must hold PauliString operators")
        total = self.total_weight()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"channel weights sum to {total}, expected 1")

    def total_weight(self) -> float:
        return sum(weight for weight, _ in self.terms)

    def support_mask(self) -> int:
        mask = 0
        for _, op in self.terms:
            mask |= op.support_mask
        return mask


def depolarizing_channel(vertex: int, p: float) -> PauliChannel:
    """White-noise channel leaving the qubit alone with probability 1 - 3p/4."""
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing strength {p} outside [0, 1]")
    if p == 0:
        return PauliChannel(((1.0, identity()),))
    return PauliChannel(
        (
            (1 - 0.75 * p, identity()),
            (p / 4, single(vertex, "x")),
            (p / 4, single(vertex, "y")),
            (p / 4, single(vertex, "z")),
        )
    )


def dephasing_probability(t: float, memory_time: float) -> float:
    """Phase-flip probability accumulated over a storage duration.

    Grows from 0 at t = 0 toward the fully-dephased limit 1/2, with the
    memory time setting the exponential scale.
    """
    if t < 0:
        raise ValueError(f"negative storage duration {t}")
    if not memory_time > 0:
        raise ValueError(f"memory time must be positive, got {memory_time}")
    return 0.5 * (1.0 - math.exp(-t / memory_time))


def dephasing_channel(vertex: int, q: float) -> PauliChannel:
    if not 0 <= q <= 0.5:
        raise ValueError(f"dephasing probability {q} outside [0, 1/2]")
    if q == 0:
        return PauliChannel(((1.0, identity()),))
    return PauliChannel(((1 - q, identity()), (q, single(vertex, "z"))))


@dataclass(frozen=True)
class NoiseAssignment:
    """Per-qubit noise parameters: depolarizing strength, memory, exposure.

    ``depolarizing`` maps qubit -> p, ``memory_time`` maps qubit -> T in
    seconds, and ``exposure`` maps qubit -> storage duration t in seconds.
    Dephasing is built for every qubit with an exposure entry; its memory
    time must then be present too.
    """

    depolarizing: Mapping[int, float] = field(default_factory=dict)
    memory_time: Mapping[int, float] = field(default_factory=dict)
    exposure: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for v, p in self.depolarizing.items():
            if not 0 <= p <= 1:
                raise ValueError(f"depolarizing strength {p} on qubit {v} outside [0, 1]")
        for v, memory in self.memory_time.items():
            if not memory > 0:
                raise ValueError(f"memory time {memory} on qubit {v} must be positive")
        for v, t in self.exposure.items():
            if t < 0:
                raise ValueError(f"negative exposure {t} on qubit {v}")
            if v not in self.memory_time:
                raise ValueError(f"qubit {v} has an exposure but no memory time")

    def channels(self) -> tuple[PauliChannel, ...]:
        """One depolarizing and one dephasing channel per configured qubit.

        The two kinds act on the same qubit as separate channels; both are
        diagonal mixtures of Pauli conjugations, so their composition order
        does not matter.
        """
        built = []
        for v in sorted(self.depolarizing):
            built.append(depolarizing_channel(v, self.depolarizing[v]))
        for v in sorted(self.exposure):
            q = dephasing_probability(self.exposure[v], self.memory_time[v])
            built.append(dephasing_channel(v, q))
        return tuple(built)


@dataclass(frozen=True)
class CompiledStep:
    """One measurement with everything propagation needs precomputed.

    ``touched_mask`` covers the measured vertex and every qubit the
    correction gates act on, so propagation can skip the whole step for
    operators supported elsewhere.
    """

    vertex: int
    basis: str
    w0: int | None
    byproduct: PauliString
    u_plus: tuple[CliffordGate, ...]
    touched_mask: int = -1


@dataclass(frozen=True)
class CompiledStrategy:
    initial_graph: GraphState
    steps: tuple[CompiledStep, ...]
    final_graph: GraphState


StrategyLike = Union["CompiledStrategy", Sequence[tuple]]


def _step_tuples(strategy) -> Sequence[tuple]:
    steps = getattr(strategy, "steps", strategy)
    out = []
    for step in steps:
        if len(step) == 2:
            vertex, basis = step
            w0 = None
        elif len(step) == 3:
            vertex, basis, w0 = step
        else:
            raise ValueError(f"strategy step {step!r} is not (vertex, basis[, w0])")
        out.append((vertex, basis, w0))
    return out


def compile_strategy(graph: GraphState, strategy) -> CompiledStrategy:
    """Precompute byproducts, corrections and graph updates for a strategy.

    Steps execute in the order given. An x measurement with no explicit
    special neighbor uses the lowest-labeled one.
    """
    compiled = []
    g = graph
    for vertex, basis, w0 in _step_tuples(strategy):
        if basis == "x" and w0 is None:
            w0 = default_w0(g, vertex)
        byp = byproduct_operator(g, vertex, basis, w0=w0)
        pair = correction_operators(g, vertex, basis, w0=w0)
        touched = 1 << vertex
        for gate in pair.u_plus:
            touched |= gate_support(gate)
        compiled.append(CompiledStep(vertex, basis, w0, byp, pair.u_plus, touched))
        g = measure_update(g, vertex, basis, w0=w0)
    return CompiledStrategy(graph, tuple(compiled), g)


def propagate_operator(op: PauliString, strategy: CompiledStrategy) -> PauliString:
    """Image of a single Pauli operator after the whole measurement sequence."""
    for step in strategy.steps:
        # A step only moves operators that overlap the measured vertex or
        # its correction gates; everything else commutes straight through.
        if not op.support_mask & step.touched_mask:
            continue
        axis = op.axis_at(step.vertex)
        if axis is not None:
            rest = op.drop(step.vertex)
            op = rest if axis == step.basis else pauli_multiply(step.byproduct, rest)
        if step.u_plus and not op.is_identity:
            op = conjugate_through(op, step.u_plus)
    return op


def propagate_channel(ch: PauliChannel, strategy: StrategyLike, G0: GraphState | None = None) -> PauliChannel:
    """Propagate every term of a channel and merge projectively equal results.

    ``strategy`` is either an already compiled strategy or a plain sequence
    of (vertex, basis[, w0]) steps, in which case the initial graph must be
    supplied.
    """
    if isinstance(strategy, CompiledStrategy):
        compiled = strategy
    else:
        if G0 is None:
            raise ValueError("initial graph required when strategy is not compiled")
        compiled = compile_strategy(G0, strategy)
    allowed = compiled.initial_graph.vertex_mask
    merged: dict[tuple[int, int], float] = {}
    for weight, op in ch.terms:
        if op.support_mask & ~allowed:
            raise ValueError(f"operator {op} acts outside the initial graph")
        image = propagate_operator(op, compiled)
        if image.support_mask & ~compiled.final_graph.vertex_mask:
            raise AssertionError(
                f"propagated operator {image} still touches a measured vertex"
            )
        key = (image.xmask, image.zmask)
        merged[key] = merged.get(key, 0.0) + weight
    terms = tuple((w, hermitian_rep(x, z)) for (x, z), w in sorted(merged.items()))
    return PauliChannel(terms)


def assemble_fidelity(channels: Iterable[PauliChannel], target: GraphState) -> float:
    """Overlap of the noisy output with the ideal target graph state.

    Folds all channels together over the projective Pauli group on the
    target vertices and adds up the weight that lands inside the stabilizer
    group. An operator that fixes the target state up to sign contributes
    its full weight and any other operator contributes nothing, because
    Pauli expectation values on stabilizer states are 0 or a unit phase and
    enter the overlap squared.
    """
    if len(target.vertices) > 10:
        raise ValueError("target graph too large for direct convolution")
    allowed = target.vertex_mask
    table: dict[tuple[int, int], float] = {(0, 0): 1.0}
    for channel in channels:
        if channel.support_mask() & ~allowed:
            raise ValueError("channel operators act outside the target graph")
        folded: dict[tuple[int, int], float] = {}
        for (kx, kz), acc in table.items():
            for weight, op in channel.terms:
                key = (kx ^ op.xmask, kz ^ op.zmask)
                folded[key] = folded.get(key, 0.0) + acc * weight
        table = folded
    fidelity = 0.0
    for (kx, kz), weight in table.items():
        if stabilizer_contains(target, hermitian_rep(kx, kz)):
            fidelity += weight
    return fidelity


def strategy_fidelity(graph: GraphState, strategy, channels: Iterable[PauliChannel]) -> float:
    """Compile once, propagate every channel, assemble on the final graph."""
    compiled = strategy if isinstance(strategy, CompiledStrategy) else compile_strategy(graph, strategy)
    propagated = [propagate_channel(ch, compiled) for ch in channels]
    return assemble_fidelity(propagated, compiled.final_graph)
