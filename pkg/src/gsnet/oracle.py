"""Dense density-matrix reference engine.

Computes the same final fidelity as the channel-propagation engine by brute
force: build the full 2^N density matrix of the noisy resource state, apply
every measurement as a two-branch projection with outcome-conditioned
corrections, sum the branches, and read off the overlap with the ideal
target graph state. Exponential in qubit count and guarded accordingly; its
only job is to validate the fast path on small instances.

The matrix algebra here is written from scratch on purpose. The propagation
engine reasons about Pauli strings symbolically; this module never does, so
agreement between the two is meaningful. The one shared ingredient is the
protocol definition itself (which vertex gets which correction gates), taken
from the graph-state module where it is validated directly against state
vectors.
"""

from __future__ import annotations

import numpy as np

from .graphstate import GraphState, correction_operators, default_w0, measure_update
from .noise import PauliChannel, _step_tuples
from .pauli import CZ, PauliGate, PauliString, SqrtPauli

MAX_ORACLE_QUBITS = 8

_SQRT2 = np.sqrt(2.0)
_EIGVECS = {
    "x": {1: np.array([1, 1]) / _SQRT2, -1: np.array([1, -1]) / _SQRT2},
    "y": {1: np.array([1, 1j]) / _SQRT2, -1: np.array([1, -1j]) / _SQRT2},
    "z": {1: np.array([1, 0]), -1: np.array([0, 1])},
}
_PAULI_MATS = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def graph_state_vector(graph: GraphState, order: list[int]) -> np.ndarray:
    """State vector of the graph state, order[0] as the most significant bit."""
    n = len(order)
    psi = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    index = np.arange(2**n)
    pos = {v: n - 1 - k for k, v in enumerate(order)}
    for u, v in graph.edges():
        both = ((index >> pos[u]) & 1) & ((index >> pos[v]) & 1)
        psi[both == 1] *= -1
    return psi


def _pauli_action(p: PauliString, order: list[int]):
    """Index permutation and per-index coefficient realizing the operator.

    P|i> = coeff[i] |i XOR flips>.
    """
    n = len(order)
    pos = {v: n - 1 - k for k, v in enumerate(order)}
    flips = 0
    zbits = 0
    for v in order:
        if (p.xmask >> v) & 1:
            flips |= 1 << pos[v]
        if (p.zmask >> v) & 1:
            zbits |= 1 << pos[v]
    index = np.arange(2**n)
    signs = np.ones(2**n, dtype=complex)
    if zbits:
        parity = np.zeros(2**n, dtype=np.int64)
        masked = index & zbits
        while masked.any():
            parity ^= masked & 1
            masked >>= 1
        signs[parity == 1] = -1
    return index ^ flips, signs * (1j**p.phase_exp)


def apply_pauli_channel(rho: np.ndarray, channel: PauliChannel, order: list[int]) -> np.ndarray:
    out = np.zeros_like(rho)
    for weight, op in channel.terms:
        idx, coeff = _pauli_action(op, order)
        term = (coeff[:, None] * np.conj(coeff)[None, :]) * rho
        out[np.ix_(idx, idx)] += weight * term
    return out


def gate_matrix(gate, order: list[int]) -> np.ndarray:
    n = len(order)
    if isinstance(gate, CZ):
        pos = {v: n - 1 - k for k, v in enumerate(order)}
        index = np.arange(2**n)
        diag = np.ones(2**n, dtype=complex)
        both = ((index >> pos[gate.a]) & 1) & ((index >> pos[gate.b]) & 1)
        diag[both == 1] = -1
        return np.diag(diag)
    if isinstance(gate, SqrtPauli):
        local = (np.eye(2) + 1j * gate.sign * _PAULI_MATS[gate.axis]) / _SQRT2
        mat = np.array([[1.0 + 0j]])
        for v in order:
            mat = np.kron(mat, local if v == gate.vertex else np.eye(2))
        return mat
    if isinstance(gate, PauliGate):
        idx, coeff = _pauli_action(gate.pauli, order)
        mat = np.zeros((2**n, 2**n), dtype=complex)
        mat[idx, np.arange(2**n)] = coeff
        return mat
    raise TypeError(f"unknown gate {gate!r}")


def gates_matrix(gates, order: list[int]) -> np.ndarray:
    """Matrix of a gate tuple; the leftmost gate is applied last."""
    out = np.eye(2 ** len(order), dtype=complex)
    for gate in gates:
        out = out @ gate_matrix(gate, order)
    return out


def noisy_density_matrix(graph: GraphState, channels, order: list[int]) -> np.ndarray:
    psi = graph_state_vector(graph, order)
    rho = np.outer(psi, psi.conj())
    for channel in channels:
        rho = apply_pauli_channel(rho, channel, order)
    return rho


def measure_and_project(rho: np.ndarray, graph: GraphState, strategy, order: list[int]):
    """Run the measurement sequence on a density matrix, both branches summed.

    Each step projects the measured qubit onto both outcomes, applies the
    matching correction (inverted, recovering the updated graph state on the
    survivors), traces the qubit out and adds the branches. Returns the final
    density matrix, graph and qubit order.
    """
    order = list(order)
    for vertex, basis, w0 in _step_tuples(strategy):
        if basis == "x" and w0 is None:
            w0 = default_w0(graph, vertex)
        pair = correction_operators(graph, vertex, basis, w0=w0)
        pos = order.index(vertex)
        rest = [v for v in order if v != vertex]
        pre, post = 2**pos, 2 ** (len(rest) - pos)
        shaped = rho.reshape(pre, 2, post, pre, 2, post)
        acc = np.zeros((pre * post, pre * post), dtype=complex)
        for outcome, gates in ((1, pair.u_plus), (-1, pair.u_minus)):
            e = _EIGVECS[basis][outcome]
            branch = np.einsum("aibcjd,i,j->abcd", shaped, e.conj(), e)
            branch = branch.reshape(pre * post, pre * post)
            if gates:
                u = gates_matrix(gates, rest)
                branch = u.conj().T @ branch @ u
            acc += branch
        rho = acc
        order = rest
        graph = measure_update(graph, vertex, basis, w0=w0)
    return rho, graph, order


def dense_oracle_fidelity(graph: GraphState, strategy, channels) -> float:
    """Fidelity of the measured noisy state against the final graph state."""
    n = len(graph.vertices)
    if n > MAX_ORACLE_QUBITS:
        raise ValueError(f"dense oracle refuses {n} qubits (limit {MAX_ORACLE_QUBITS})")
    order = sorted(graph.vertices)
    rho = noisy_density_matrix(graph, channels, order)
    rho, final_graph, order = measure_and_project(rho, graph, strategy, order)
    target = graph_state_vector(final_graph, order)
    return float(np.real(target.conj() @ rho @ target))
