"""Graph states and the graph rules for single-qubit Pauli measurements.

A graph state |G> on vertex set V is prod_{(v,w) in E} CZ_{vw} |+>^V; it is
the unique joint +1 eigenstate of the stabilizer generators
K_v = X_v prod_{w in N_v} Z_w.  Measuring a vertex in a Pauli basis maps
|G> to a new graph state on the remaining vertices once the outcome-
dependent local correction is applied:

    P_{alpha,+-}^{(v)} |G> = |alpha,+->^{(v)} (x) U_{alpha,+-}^{(v)} |G'>

G' follows the usual rules: z deletes the vertex, y locally complements at
the vertex and then deletes it, x locally complements at a chosen neighbor
w0, then at the vertex, deletes it, and complements at w0 again.  A vertex
with no neighbors is simply removed whatever the basis.

``byproduct_operator`` returns U_- U_+^dagger, the Pauli difference between
the two outcome corrections; noise propagation absorbs it whenever a noise
component anticommutes with the measured operator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .pauli import (
    CliffordGate,
    PauliGate,
    PauliString,
    SqrtPauli,
    pauli_multiply,
    single,
)

__all__ = [
    "GraphState",
    "chain_graph",
    "CorrectionPair",
    "local_complement",
    "measure_update",
    "default_w0",
    "correction_operators",
    "byproduct_operator",
    "stabilizer_contains",
    "graph_to_json",
    "graph_from_json",
]

BASES = ("x", "y", "z")


class GraphState:
    """Simple undirected graph over integer vertex labels, no self-loops.

    Neighborhoods are stored as integer bitmasks (bit w of ``adj[v]`` set iff
    v~w), which keeps local complementation and the Pauli bookkeeping cheap.
    Instances are treated as immutable; operations return new graphs.
    """

    __slots__ = ("_adj",)

    def __init__(self, vertices, edges=()):
        adj: dict[int, int] = {}
        for v in vertices:
            if v < 0:
                raise ValueError("vertex labels must be non-negative integers")
            adj[int(v)] = 0
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if u not in adj or v not in adj:
                raise ValueError(f"edge ({u}, {v}) uses an unknown vertex")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self._adj = adj

    @classmethod
    def _from_adj(cls, adj: dict[int, int]) -> "GraphState":
        g = object.__new__(cls)
        g._adj = adj
        return g

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self._adj))

    @property
    def vertex_mask(self) -> int:
        m = 0
        for v in self._adj:
            m |= 1 << v
        return m

    def __contains__(self, v: int) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def neighbors_mask(self, v: int) -> int:
        return self._adj[v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        m = self._adj[v]
        out = []
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return tuple(out)

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u] & (1 << v))

    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for v in sorted(self._adj):
            m = self._adj[v]
            while m:
                low = m & -m
                w = low.bit_length() - 1
                if w > v:
                    out.append((v, w))
                m ^= low
        return tuple(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, GraphState) and self._adj == other._adj

    def __hash__(self):
        return hash((tuple(sorted(self._adj.items())),))

    def __repr__(self) -> str:
        return f"GraphState(vertices={list(self.vertices)}, edges={list(self.edges())})"


def chain_graph(n: int, start: int = 1) -> GraphState:
    """Linear cluster over labels start..start+n-1."""
    if n < 1:
        raise ValueError("chain needs at least one vertex")
    labels = range(start, start + n)
    return GraphState(labels, [(v, v + 1) for v in labels[:-1]])


def local_complement(g: GraphState, v: int) -> GraphState:
    """Invert the subgraph induced on the neighborhood of v."""
    nv = g._adj[v]
    adj = dict(g._adj)
    m = nv
    while m:
        low = m & -m
        w = low.bit_length() - 1
        adj[w] ^= nv & ~low
        m ^= low
    return GraphState._from_adj(adj)


def _delete_vertex(g: GraphState, v: int) -> GraphState:
    bit = 1 << v
    adj = {u: (m & ~bit) for u, m in g._adj.items() if u != v}
    return GraphState._from_adj(adj)


def default_w0(g: GraphState, v: int) -> int | None:
    """Default special neighbor for an x measurement: lowest label in N_v."""
    m = g._adj[v]
    if not m:
        return None
    return (m & -m).bit_length() - 1


def _check_measurement(g: GraphState, v: int, basis: str, w0: int | None) -> int | None:
    if v not in g._adj:
        raise ValueError(f"vertex {v} is not in the graph")
    if basis not in BASES:
        raise ValueError(f"unknown measurement basis {basis!r}")
    if basis != "x":
        return None
    if g._adj[v] == 0:
        return None  # isolated vertex: any basis just removes it
    if w0 is None:
        return default_w0(g, v)
    if not g._adj[v] & (1 << w0):
        raise ValueError(f"w0={w0} is not a neighbor of {v}")
    return w0


def measure_update(g: GraphState, v: int, basis: str, w0: int | None = None) -> GraphState:
    """Graph after measuring vertex v in the given Pauli basis."""
    w0 = _check_measurement(g, v, basis, w0)
    if basis == "z" or g._adj[v] == 0:
        return _delete_vertex(g, v)
    if basis == "y":
        return _delete_vertex(local_complement(g, v), v)
    g = local_complement(g, w0)
    g = local_complement(g, v)
    g = _delete_vertex(g, v)
    return local_complement(g, w0)


@dataclass(frozen=True)
class CorrectionPair:
    """Outcome-conditioned local corrections (gate lists, +1 then -1)."""

    u_plus: tuple[CliffordGate, ...]
    u_minus: tuple[CliffordGate, ...]


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def correction_operators(g: GraphState, v: int, basis: str, w0: int | None = None) -> CorrectionPair:
    """U_{alpha,+} and U_{alpha,-} for measuring v; empty for isolated v."""
    w0 = _check_measurement(g, v, basis, w0)
    nv = g._adj[v]
    if nv == 0:
        return CorrectionPair((), ())
    if basis == "z":
        return CorrectionPair(
            (),
            tuple(PauliGate(single(w, "z")) for w in _bits(nv)),
        )
    if basis == "y":
        return CorrectionPair(
            tuple(SqrtPauli("z", w, -1) for w in _bits(nv)),
            tuple(SqrtPauli("z", w, +1) for w in _bits(nv)),
        )
    nw0 = g._adj[w0]
    plus_z = nv & ~nw0 & ~(1 << w0)
    minus_z = nw0 & ~nv & ~(1 << v)
    u_plus = (SqrtPauli("y", w0, +1),) + tuple(PauliGate(single(w, "z")) for w in _bits(plus_z))
    u_minus = (SqrtPauli("y", w0, -1),) + tuple(PauliGate(single(w, "z")) for w in _bits(minus_z))
    return CorrectionPair(u_plus, u_minus)


def byproduct_operator(g: GraphState, v: int, basis: str, w0: int | None = None) -> PauliString:
    """U_- U_+^dagger with exact phase.

    z and y measurements give (up to phase) prod Z over N_v; x gives Y on w0
    times prod Z over the symmetric difference of the two neighborhoods,
    excluding v and w0 themselves.
    """
    w0 = _check_measurement(g, v, basis, w0)
    nv = g._adj[v]
    if nv == 0:
        return PauliString()
    if basis == "z":
        return PauliString(0, nv, 0)
    if basis == "y":
        # prod_w (i Z_w) over the neighborhood
        return PauliString(0, nv, nv.bit_count())
    nw0 = g._adj[w0]
    zs = (nv ^ nw0) & ~(1 << v) & ~(1 << w0)
    # sqrt(-iY)^2 on w0 gives -i Y = XZ with no extra phase
    return PauliString(1 << w0, (1 << w0) | zs, 0)


def stabilizer_contains(g: GraphState, p: PauliString) -> bool:
    """True iff P = +-(product of generators K_v); a +-i match is rejected.

    The X part of any generator product prod_{v in A} K_v equals A itself,
    so membership reduces to checking the implied Z part and that the phase
    of P is a plain sign.  Used for fidelities via |<G|P|G>|^2 in {0, 1}.
    """
    if len(g._adj) > 10:
        raise ValueError("stabilizer_contains is meant for small target graphs (<= 10 vertices)")
    if p.support_mask & ~g.vertex_mask:
        raise ValueError("Pauli support is not contained in the graph vertices")
    zneed = 0
    m = p.xmask
    while m:
        low = m & -m
        zneed ^= g._adj[low.bit_length() - 1]
        m ^= low
    if zneed != p.zmask:
        return False
    return p.phase_exp % 2 == 0


def generator_product(g: GraphState, subset_mask: int) -> PauliString:
    """Exact product of generators K_v over the subset, ascending labels."""
    acc = PauliString()
    m = subset_mask
    while m:
        low = m & -m
        v = low.bit_length() - 1
        acc = pauli_multiply(acc, PauliString(low, g._adj[v], 0))
        m ^= low
    return acc


def graph_to_json(g: GraphState) -> str:
    """Serialize as {"vertex_count": n, "edges": [[u, v], ...]} (labels 1..n)."""
    verts = g.vertices
    expected = tuple(range(1, len(verts) + 1))
    if verts != expected:
        raise ValueError("JSON export expects contiguous vertex labels 1..n")
    return json.dumps({"vertex_count": len(verts), "edges": [list(e) for e in g.edges()]})

def graph_from_json(text: str) -> GraphState:
    data = json.loads(text)
    n = data["vertex_count"]
    return GraphState(range(1, n + 1), [tuple(e) for e in data["edges"]])
