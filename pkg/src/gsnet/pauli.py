"""Exact Pauli-string algebra over integer-labelled qubits.

A Pauli string is stored in binary symplectic form with an explicit phase:

    P = i^phase_exp * prod_v X_v^{x_v} Z_v^{z_v}

where ``x_v``/``z_v`` are the bits of two arbitrary-width integer masks
(bit ``v`` of the mask belongs to qubit label ``v``) and ``phase_exp`` is
taken mod 4.  All strings live in one shared integer label space, so any
two strings can be multiplied; per-qubit factors are ordered X-before-Z,
which makes the (1,1) component equal to XZ = -iY.  The Hermitian Pauli
Y_v is therefore ``PauliString(bit v, bit v, phase_exp=1)``.

Clifford gates are value objects; ``conjugate_by_clifford(P, g)`` returns
``g^dagger P g`` with the exact phase.  Square roots of Paulis follow the
convention

    sqrt(+-i sigma) = (1 +- i sigma)/sqrt(2) = exp(+-i pi sigma / 4)

so that sqrt(-i sigma_z) = diag(e^{-i pi/4}, e^{+i pi/4}).  Under this
convention conjugation acts on anticommuting Paulis as
g^dagger tau g = sign * i * (tau sigma), reproducing identities such as
sigma_x sqrt(-i sigma_z) = -sqrt(-i sigma_z) sigma_y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "PauliString",
    "CZ",
    "SqrtPauli",
    "PauliGate",
    "CliffordGate",
    "identity",
    "single",
    "from_axes",
    "hermitian_rep",
    "pauli_multiply",
    "pauli_commutes",
    "conjugate_by_clifford",
    "conjugate_through",
    "gate_inverse",
    "gate_support",
]

# (x, z) bit pair of each single-qubit axis.
_AXIS_BITS = {"x": (1, 0), "y": (1, 1), "z": (0, 1)}


def _bit(v: int) -> int:
    if v < 0:
        raise ValueError(f"qubit labels must be non-negative, got {v}")
    return 1 << v


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class PauliString:
    """Immutable Pauli string i^phase_exp * X^xmask Z^zmask."""

    xmask: int = 0
    zmask: int = 0
    phase_exp: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @property
    def support_mask(self) -> int:
        return self.xmask | self.zmask

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(_iter_bits(self.support_mask))

    @property
    def phase(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase_exp]

    @property
    def is_identity(self) -> bool:
        return self.xmask == 0 and self.zmask == 0

    def weight(self) -> int:
        return self.support_mask.bit_count()

    def axis_at(self, v: int) -> str | None:
        """Letter of the component on qubit v ('x', 'y', 'z') or None."""
        b = _bit(v)
        xv, zv = bool(self.xmask & b), bool(self.zmask & b)
        if xv and zv:
            return "y"
        if xv:
            return "x"
        if zv:
            return "z"
        return None

    def drop(self, v: int) -> "PauliString":
        """Remove the component on qubit v, keeping the stored phase."""
        b = _bit(v)
        return PauliString(self.xmask & ~b, self.zmask & ~b, self.phase_exp)

    def __str__(self) -> str:
        if self.is_identity:
            body = "I"
        else:
            body = " ".join(f"{self.axis_at(v).upper()}{v}" for v in self.support)
        prefix = ("+", "+i", "-", "-i")[self.phase_exp]
        return f"{prefix}{body}"


def identity() -> PauliString:
    return PauliString(0, 0, 0)


def single(v: int, axis: str, phase_exp: int = 0) -> PauliString:
    """The Hermitian single-qubit Pauli ``axis`` on qubit v (times i^phase_exp)."""
    try:
        x, z = _AXIS_BITS[axis]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None
    extra = 1 if axis == "y" else 0  # Y = i * XZ
    return PauliString(x and _bit(v), z and _bit(v), phase_exp + extra)


def from_axes(components: dict[int, str], phase_exp: int = 0) -> PauliString:
    """Hermitian Pauli with the given per-qubit letters (times i^phase_exp)."""
    xm = zm = 0
    extra = 0
    for v, axis in components.items():
        x, z = _AXIS_BITS[axis]
        if x:
            xm |= _bit(v)
        if z:
            zm |= _bit(v)
        if axis == "y":
            extra += 1
    return PauliString(xm, zm, phase_exp + extra)


def hermitian_rep(xmask: int, zmask: int) -> PauliString:
    """The Hermitian (+1 phase) Pauli with the given symplectic masks."""
    return PauliString(xmask, zmask, (xmask & zmask).bit_count())


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product a * b (operator composition, a applied after b)."""
    # Moving X^{b.x} left through Z^{a.z} picks up (-1) per overlapping qubit.
    phase = a.phase_exp + b.phase_exp + 2 * (a.zmask & b.xmask).bit_count()
    return PauliString(a.xmask ^ b.xmask, a.zmask ^ b.zmask, phase)


def pauli_commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the strings commute (symplectic product is even)."""
    return ((a.xmask & b.zmask).bit_count() + (a.zmask & b.xmask).bit_count()) % 2 == 0


@dataclass(frozen=True)
class CZ:
    """Controlled-Z between qubits a and b."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError("CZ needs two distinct qubits")


@dataclass(frozen=True)
class SqrtPauli:
    """sqrt(sign * i * sigma_axis) on one qubit, sign in {+1, -1}."""

    axis: str
    vertex: int
    sign: int

    def __post_init__(self) -> None:
        if self.axis not in _AXIS_BITS:
            raise ValueError(f"unknown Pauli axis {self.axis!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


@dataclass(frozen=True)
class PauliGate:
    """A Pauli string applied as a (Clifford) gate."""

    pauli: PauliString


CliffordGate = Union[CZ, SqrtPauli, PauliGate]


def _rebuild(p: PauliString, images: list[tuple[int, PauliString, PauliString]]) -> PauliString:
    """Reassemble p with the given per-qubit generator images.

    ``images`` holds (v, image of X_v, image of Z_v); qubits not listed keep
    their components.  Exactness relies on the canonical ordering: factors on
    distinct qubits commute, so only the per-qubit X-before-Z order matters.
    """
    touched = 0
    for v, _, _ in images:
        touched |= _bit(v)
    acc = PauliString(0, 0, p.phase_exp)
    for v, img_x, img_z in images:
        b = _bit(v)
        if p.xmask & b:
            acc = pauli_multiply(acc, img_x)
        if p.zmask & b:
            acc = pauli_multiply(acc, img_z)
    rest = PauliString(p.xmask & ~touched, p.zmask & ~touched, 0)
    return pauli_multiply(acc, rest)


def _sqrt_images(gate: SqrtPauli) -> tuple[PauliString, PauliString]:
    v, axis, sign = gate.vertex, gate.axis, gate.sign
    sigma = single(v, axis)
    sign_exp = 0 if sign == 1 else 2

    def image(generator: PauliString) -> PauliString:
        if pauli_commutes(generator, sigma):
            return generator
        prod = pauli_multiply(generator, sigma)
        return PauliString(prod.xmask, prod.zmask, prod.phase_exp + 1 + sign_exp)

    return image(PauliString(_bit(v), 0, 0)), image(PauliString(0, _bit(v), 0))


def conjugate_by_clifford(p: PauliString, gate: CliffordGate) -> PauliString:
    """Exact g^dagger P g."""
    if isinstance(gate, PauliGate):
        if pauli_commutes(p, gate.pauli):
            return p
        return PauliString(p.xmask, p.zmask, p.phase_exp + 2)
    if isinstance(gate, CZ):
        a, b = gate.a, gate.b
        images = [
            (a, PauliString(_bit(a), _bit(b), 0), PauliString(0, _bit(a), 0)),
            (b, PauliString(_bit(b), _bit(a), 0), PauliString(0, _bit(b), 0)),
        ]
        return _rebuild(p, images)
    if isinstance(gate, SqrtPauli):
        b = _bit(gate.vertex)
        if not (p.xmask | p.zmask) & b:
            return p
        img_x, img_z = _sqrt_images(gate)
        return _rebuild(p, [(gate.vertex, img_x, img_z)])
    raise TypeError(f"not a Clifford gate: {gate!r}")


def conjugate_through(p: PauliString, gates: tuple[CliffordGate, ...] | list[CliffordGate]) -> PauliString:
    """Conjugate by a product of gates g = g_0 g_1 ...: returns g^dagger P g.

    Applied left to right, i.e. by g_0 first.  Every gate list produced in
    this package consists of mutually commuting single-qubit factors, so the
    order never matters there.
    """
    for gate in gates:
        p = conjugate_by_clifford(p, gate)
    return p


def gate_inverse(gate: CliffordGate) -> CliffordGate:
    """Inverse gate; for a PauliGate the inverse equals the gate up to phase."""
    if isinstance(gate, SqrtPauli):
        return SqrtPauli(gate.axis, gate.vertex, -gate.sign)
    return gate


def gate_support(gate: CliffordGate) -> int:
    """Bit mask of the qubits the gate can act on non-trivially."""
    if isinstance(gate, CZ):
        return _bit(gate.a) | _bit(gate.b)
    if isinstance(gate, SqrtPauli):
        return _bit(gate.vertex)
    if isinstance(gate, PauliGate):
        return gate.pauli.support_mask
    raise TypeError(f"not a Clifford gate: {gate!r}")
