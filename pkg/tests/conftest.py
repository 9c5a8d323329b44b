"""Shared dense linear-algebra helpers used as independent test oracles.

Everything here is built from raw 2x2 matrices and Kronecker products on
purpose: the package under test must agree with plain matrix mechanics, so
none of these helpers reuse its algebra.
"""

import numpy as np

from gsnet.pauli import CZ, PauliGate, PauliString, SqrtPauli

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
AXIS_MATS = {"x": X, "y": Y, "z": Z}
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


def kron_all(mats):
    out = np.array([[1]], dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def op_on(order, factors):
    """Dense operator with the given per-label 2x2 factors (identity elsewhere)."""
    return kron_all([factors.get(v, I2) for v in order])


def pauli_matrix(p: PauliString, order):
    """Dense matrix of a PauliString: i^phase * prod X^x Z^z per qubit."""
    factors = {}
    for v in order:
        bit = 1 << v
        m = I2
        if p.xmask & bit:
            m = X
        if p.zmask & bit:
            m = m @ Z
        factors[v] = m
    return p.phase * op_on(order, factors)


def sqrt_pauli_matrix(axis, sign):
    """(1 + sign*i*sigma)/sqrt(2) = exp(sign * i * pi * sigma / 4)."""
    return (I2 + sign * 1j * AXIS_MATS[axis]) / np.sqrt(2)


def gate_matrix(gate, order):
    if isinstance(gate, CZ):
        n = len(order)
        pos = {v: i for i, v in enumerate(order)}
        dim = 2**n
        diag = np.ones(dim, dtype=complex)
        for idx in range(dim):
            ba = (idx >> (n - 1 - pos[gate.a])) & 1
            bb = (idx >> (n - 1 - pos[gate.b])) & 1
            if ba and bb:
                diag[idx] = -1
        return np.diag(diag)
    if isinstance(gate, SqrtPauli):
        return op_on(order, {gate.vertex: sqrt_pauli_matrix(gate.axis, gate.sign)})
    if isinstance(gate, PauliGate):
        return pauli_matrix(gate.pauli, order)
    raise TypeError(gate)


def gates_matrix(gates, order):
    """Product of a gate list, leftmost gate applied last (matrix product order)."""
    out = np.eye(2 ** len(order), dtype=complex)
    for g in gates:
        out = out @ gate_matrix(g, order)
    return out


def graph_state_vector(graph, order=None):
    order = list(order if order is not None else graph.vertices)
    vec = kron_all([PLUS.reshape(2, 1) for _ in order]).ravel()
    n = len(order)
    pos = {v: i for i, v in enumerate(order)}
    for u, v in graph.edges():
        for idx in range(2**n):
            if (idx >> (n - 1 - pos[u])) & 1 and (idx >> (n - 1 - pos[v])) & 1:
                vec[idx] = -vec[idx]
    return vec


def proportional(a, b, tol=1e-9):
    """True iff vectors a and b are equal up to a global phase."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < tol or nb < tol:
        return na < tol and nb < tol
    return abs(abs(np.vdot(a, b)) / (na * nb) - 1.0) < tol
