"""Dense statevector simulation for small circuits.

Amplitudes are little-endian: qubit ``q`` is bit ``q`` of the basis index.
Rotations come in two conventions. ``FULL`` gates implement
``exp(-i*theta*P)`` (the form used by the data-encoding maps) and ``HALF``
gates implement ``exp(-i*theta*P/2)`` (trainable gates, for which the
+-pi/2 parameter-shift rule is exact).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend

MAX_QUBITS = 12

FULL = "full"
HALF = "half"

GATE_CODES = {
    "H": _backend.H,
    "RX": _backend.RX,
    "RY": _backend.RY,
    "RZ": _backend.RZ,
    "CNOT": _backend.CNOT,
    "CZ": _backend.CZ,
    "RZZ": _backend.RZZ,
    "RZX": _backend.RZX,
}
TWO_QUBIT = frozenset({"CNOT", "CZ", "RZZ", "RZX"})
PARAMETRIC = frozenset({"RX", "RY", "RZ", "RZZ", "RZX"})


class CircuitError(ValueError):
    """Invalid gate, circuit or state combination."""


@dataclass(frozen=True)
class Gate:
    """A single gate.

    For CNOT ``targets`` is (control, target); for RZX it is (z_qubit,
    x_qubit), i.e. ``exp(-i*theta*Z_a X_b)``.
    """

    kind: str
    targets: tuple[int, ...]
    angle: float = 0.0
    convention: str = FULL

    def __post_init__(self):
        if self.kind not in GATE_CODES:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(self.targets) != arity:
            raise CircuitError(f"{self.kind} needs {arity} target(s), got {self.targets}")
        if len(set(self.targets)) != arity:
            raise CircuitError(f"{self.kind} targets must be distinct, got {self.targets}")
        if any(t < 0 for t in self.targets):
            raise CircuitError(f"negative qubit index in {self.targets}")
        if not math.isfinite(self.angle):
            raise CircuitError(f"non-finite angle for {self.kind}: {self.angle}")
        if self.convention not in (FULL, HALF):
            raise CircuitError(f"unknown angle convention {self.convention!r}")

    @property
    def effective_angle(self) -> float:
        """``phi`` such that the gate equals ``exp(-i*phi*P)``."""
        if self.kind not in PARAMETRIC:
            return 0.0
        return self.angle / 2.0 if self.convention == HALF else self.angle

    def inverse(self) -> "Gate":
        if self.kind in PARAMETRIC:
            return Gate(self.kind, self.targets, -self.angle, self.convention)
        return self


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        _check_qubits(self.n_qubits)
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.n_qubits:
                raise CircuitError(f"gate {g.kind}{g.targets} out of range for {self.n_qubits} qubits")

    def __len__(self):
        return len(self.gates)

    def program(self):
        """Compile to the ``(codes, q0, q1, phis)`` arrays consumed by the kernels."""
        return compile_gates(self.gates)


def compile_gates(gates):
    n = len(gates)
    codes = np.empty(n, dtype=np.int32)
    q0 = np.zeros(n, dtype=np.int32)
    q1 = np.zeros(n, dtype=np.int32)
    phis = np.zeros(n, dtype=np.float64)
    for k, g in enumerate(gates):
        codes[k] = GATE_CODES[g.kind]
        q0[k] = g.targets[0]
        if len(g.targets) > 1:
            q1[k] = g.targets[1]
        phis[k] = g.effective_angle
    return codes, q0, q1, phis


def _check_qubits(n):
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_QUBITS:
        raise CircuitError(f"qubit count must be an integer in [1, {MAX_QUBITS}], got {n!r}")


class Statevector:
    """Immutable pure state of ``n_qubits`` qubits."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, *, normalize=False, atol=1e-10):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        n = int(round(math.log2(amps.shape[0]))) if amps.shape[0] > 0 else 0
        if amps.shape[0] == 0 or (1 << n) != amps.shape[0]:
            raise CircuitError(f"amplitude count {amps.shape[0]} is not a power of two")
        _check_qubits(n)
        if not np.all(np.isfinite(amps)):
            raise CircuitError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise CircuitError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > atol:
            raise CircuitError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("Statevector is immutable")

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        _check_qubits(n_qubits)
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "Statevector":
        _check_qubits(n_qubits)
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def _trusted(cls, amps):
        obj = cls.__new__(cls)
        amps.setflags(write=False)
        object.__setattr__(obj, "n_qubits", int(amps.shape[0]).bit_length() - 1)
        object.__setattr__(obj, "amplitudes", amps)
        return obj

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self):
        return self.amplitudes.shape[0]

    def __repr__(self):
        return f"Statevector(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Return ``U|state>`` for a single gate."""
    if max(gate.targets) >= state.n_qubits:
        raise CircuitError(f"gate {gate.kind}{gate.targets} out of range for {state.n_qubits} qubits")
    codes, q0, q1, phis = compile_gates([gate])
    buf = state.amplitudes.copy()[None, :]
    _backend.apply_program(buf, codes, q0, q1, phis[None, :])
    return Statevector._trusted(buf[0])


def run_circuit(circuit: Circuit, initial: Statevector | None = None) -> Statevector:
    """Apply ``circuit`` gates left to right, starting from ``|0...0>`` by default."""
    if initial is None:
        initial = Statevector.zero(circuit.n_qubits)
    if initial.n_qubits != circuit.n_qubits:
        raise CircuitError(f"circuit has {circuit.n_qubits} qubits, state has {initial.n_qubits}")
    if not circuit.gates:
        return initial
    codes, q0, q1, phis = circuit.program()
    buf = initial.amplitudes.copy()[None, :]
    _backend.apply_program(buf, codes, q0, q1, phis[None, :])
    return Statevector._trusted(buf[0])


def inner_product(a: Statevector, b: Statevector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.n_qubits != b.n_qubits:
        raise CircuitError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def parity_signs(n_qubits: int) -> np.ndarray:
    """``(-1)**popcount(b)`` for every basis index ``b``."""
    idx = np.arange(1 << n_qubits)
    pop = np.zeros_like(idx)
    for q in range(n_qubits):
        pop += (idx >> q) & 1
    return 1.0 - 2.0 * (pop & 1)


def expectation_parity_z(state: Statevector) -> float:
    """Expectation of ``Z x Z x ... x Z``."""
    probs = np.abs(state.amplitudes) ** 2
    return float(np.dot(parity_signs(state.n_qubits), probs))


def batch_parity_z(states: np.ndarray) -> np.ndarray:
    """Row-wise Z-parity expectation for an (B, 2**n) amplitude array."""
    n = states.shape[1].bit_length() - 1
    return (np.abs(states) ** 2) @ parity_signs(n)
