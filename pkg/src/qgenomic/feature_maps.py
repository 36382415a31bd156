"""Data-encoding circuits: Z, ZZ and Pauli feature maps.

All encoding rotations use the full-angle convention ``exp(-i*x*P)``.
Each repetition is laid out as

* optional Hadamard on every qubit,
* Z:     RZ(x_j) on every qubit,
* ZZ:    RZ(x_j) on every qubit, then RZZ(x_j*x_k) per entangled pair,
* PAULI: RX(x_j), RY(x_j), RZ(x_j) on every qubit, then RZX(x_j*x_k)
  per entangled pair.

Feature values are used as angles as given; scaling happens upstream.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import _backend
from .statevector import FULL, Circuit, CircuitError, Gate, Statevector, compile_gates, run_circuit

KINDS = ("Z", "ZZ", "PAULI")
FULL_PAIRS = "full_pairs"
LINEAR = "linear"

DISPLAY_NAMES = {"Z": "ZFeatureMap", "ZZ": "ZZFeatureMap", "PAULI": "PauliFeatureMap"}


@dataclass(frozen=True)
class FeatureMapConfig:
    kind: str
    n_qubits: int
    repetitions: int = 1
    entanglement: str = FULL_PAIRS
    hadamard_layer: bool = True

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in KINDS:
            raise ValueError(f"feature map kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        ent = str(self.entanglement).lower()
        if ent not in (FULL_PAIRS, LINEAR):
            raise ValueError(f"entanglement must be {FULL_PAIRS!r} or {LINEAR!r}, got {self.entanglement!r}")
        object.__setattr__(self, "entanglement", ent)
        if int(self.n_qubits) < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if int(self.repetitions) < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "repetitions", int(self.repetitions))
        object.__setattr__(self, "hadamard_layer", bool(self.hadamard_layer))

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self.kind]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureMapConfig":
        return cls(**d)


def entangled_pairs(config: FeatureMapConfig):
    n = config.n_qubits
    if config.entanglement == LINEAR:
        return [(j, j + 1) for j in range(n - 1)]
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


@lru_cache(maxsize=64)
def _layout(config: FeatureMapConfig):
    """Gate skeleton: tuples of (kind, targets, feature indices feeding the angle)."""
    n = config.n_qubits
    rep = []
    if config.hadamard_layer:
        rep += [("H", (j,), ()) for j in range(n)]
    if config.kind == "PAULI":
        for j in range(n):
            rep += [("RX", (j,), (j,)), ("RY", (j,), (j,)), ("RZ", (j,), (j,))]
    else:
        rep += [("RZ", (j,), (j,)) for j in range(n)]
    if config.kind == "ZZ":
        rep += [("RZZ", (j, k), (j, k)) for j, k in entangled_pairs(config)]
    elif config.kind == "PAULI":
        rep += [("RZX", (j, k), (j, k)) for j, k in entangled_pairs(config)]
    return tuple(rep) * config.repetitions


def _check_features(config, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != config.n_qubits:
        raise CircuitError(f"expected {config.n_qubits} features per row, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise CircuitError("feature values must be finite")
    return X


def build_feature_map(config: FeatureMapConfig, x) -> Circuit:
    """Encoding circuit ``U(x)`` for a single feature vector."""
    x = _check_features(config, np.atleast_2d(np.asarray(x, dtype=np.float64)))[0]
    gates = []
    for kind, targets, feats in _layout(config):
        angle = float(np.prod(x[list(feats)])) if feats else 0.0
        gates.append(Gate(kind, targets, angle, FULL))
    return Circuit(config.n_qubits, tuple(gates))


def program(config: FeatureMapConfig, X):
    """Batched program for the rows of ``X``: (codes, q0, q1, phis[m, G])."""
    X = _check_features(config, X)
    layout = _layout(config)
    codes, q0, q1, _ = compile_gates([Gate(k, t, 0.0) for k, t, _ in layout])
    phis = np.zeros((X.shape[0], len(layout)))
    for g, (_, _, feats) in enumerate(layout):
        if len(feats) == 1:
            phis[:, g] = X[:, feats[0]]
        elif len(feats) == 2:
            phis[:, g] = X[:, feats[0]] * X[:, feats[1]]
    return codes, q0, q1, phis


def encode_batch(config: FeatureMapConfig, X) -> np.ndarray:
    """Encoded states ``|phi(x)>`` of every row of ``X`` as an (m, 2**n) array."""
    codes, q0, q1, phis = program(config, X)
    states = np.zeros((phis.shape[0], 1 << config.n_qubits), dtype=np.complex128)
    states[:, 0] = 1.0
    return _backend.apply_program(states, codes, q0, q1, phis)


def encode(config: FeatureMapConfig, x) -> Statevector:
    return run_circuit(build_feature_map(config, x), Statevector.zero(config.n_qubits))
