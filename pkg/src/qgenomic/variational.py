"""Variational classifiers trained with the parameter-shift rule.

The trainable circuit is ``layers + 1`` rotation layers of half-angle RY
gates, with a CNOT ring after each of the first ``layers`` layers. The
classifier output is the Z-parity expectation of
``U(theta) U(x) |0...0>``; the loss is the mean squared error against
labels in {-1, +1}. VQC and QNN share this engine and differ only in depth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .feature_maps import FeatureMapConfig, encode_batch
from .qsvc import TrainingError, check_binary, sign, to_signed
from .statevector import HALF, Circuit, Gate, batch_parity_z, compile_gates

PRESETS = {"VQC": 1, "QNN": 3}
DEFAULT_LR = 0.1
DEFAULT_MAX_ITERS = 100
DEFAULT_EPS = 1e-4
SHIFT = math.pi / 2


@dataclass(frozen=True)
class AnsatzConfig:
    n_qubits: int
    layers: int = 1

    def __post_init__(self):
        if int(self.n_qubits) < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if int(self.layers) < 0:
            raise ValueError(f"layers must be >= 0, got {self.layers}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "layers", int(self.layers))

    @property
    def n_params(self) -> int:
        return self.n_qubits * (self.layers + 1)

    @classmethod
    def preset(cls, name: str, n_qubits: int) -> "AnsatzConfig":
        return cls(n_qubits, PRESETS[name.upper()])


def _ring(n):
    if n == 1:
        return []
    return [(q, (q + 1) % n) for q in range(n)]


def _ansatz_skeleton(config: AnsatzConfig):
    """List of (kind, targets, parameter index or -1)."""
    n = config.n_qubits
    out = []
    p = 0
    for layer in range(config.layers + 1):
        for q in range(n):
            out.append(("RY", (q,), p))
            p += 1
        if layer < config.layers:
            out += [("CNOT", pair, -1) for pair in _ring(n)]
    return out


def build_ansatz(config: AnsatzConfig, theta) -> Circuit:
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if theta.shape[0] != config.n_params:
        raise ValueError(f"ansatz needs {config.n_params} parameters, got {theta.shape[0]}")
    gates = [Gate(kind, t, float(theta[p]) if p >= 0 else 0.0, HALF)
             for kind, t, p in _ansatz_skeleton(config)]
    return Circuit(config.n_qubits, tuple(gates))


@dataclass(frozen=True)
class VariationalModel:
    preset: str
    feature_map: FeatureMapConfig
    ansatz: AnsatzConfig
    theta: np.ndarray
    history: list = field(default_factory=list)
    converged: bool = False

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        if theta.shape[0] != self.ansatz.n_params:
            raise ValueError(f"theta has {theta.shape[0]} entries, ansatz needs {self.ansatz.n_params}")
        if self.feature_map.n_qubits != self.ansatz.n_qubits:
            raise ValueError("feature map and ansatz act on different qubit counts")
        object.__setattr__(self, "theta", theta)

    def with_theta(self, theta) -> "VariationalModel":
        return VariationalModel(self.preset, self.feature_map, self.ansatz, theta, self.history, self.converged)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "feature_map": self.feature_map.to_dict(),
            "ansatz": {"n_qubits": self.ansatz.n_qubits, "layers": self.ansatz.layers},
            "theta": [float(t) for t in self.theta],
            "history": [[int(i), float(v)] for i, v in self.history],
            "converged": bool(self.converged),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VariationalModel":
        return cls(
            preset=d["preset"],
            feature_map=FeatureMapConfig.from_dict(d["feature_map"]),
            ansatz=AnsatzConfig(**d["ansatz"]),
            theta=np.array(d["theta"], dtype=np.float64),
            history=[(int(i), float(v)) for i, v in d.get("history", [])],
            converged=bool(d.get("converged", False)),
        )


class _Engine:
    """Cached encodings plus the compiled ansatz skeleton for fast batched evaluation."""

    def __init__(self, feature_map, ansatz, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != ansatz.n_qubits:
            raise ValueError(f"expected {ansatz.n_qubits} features per row, got {X.shape[1]}")
        self.encoded = encode_batch(feature_map, X)
        skel = _ansatz_skeleton(ansatz)
        self.codes, self.q0, self.q1, _ = compile_gates([Gate(k, t, 0.0) for k, t, _ in skel])
        self.pidx = np.array([p for _, _, p in skel], dtype=np.int64)
        self.n_params = ansatz.n_params

    def _phis(self, thetas):
        # half-angle convention: effective angle is theta/2
        phis = np.zeros((thetas.shape[0], self.pidx.shape[0]))
        mask = self.pidx >= 0
        phis[:, mask] = 0.5 * thetas[:, self.pidx[mask]]
        return phis

    def expectations(self, thetas):
        """(S, N) expectations for S parameter vectors over all N cached rows."""
        thetas = np.atleast_2d(thetas)
        S, N = thetas.shape[0], self.encoded.shape[0]
        states = np.tile(self.encoded, (S, 1))
        phis = np.repeat(self._phis(thetas), N, axis=0)
        _backend.apply_program(states, self.codes, self.q0, self.q1, phis)
        return batch_parity_z(states).reshape(S, N)

    def shifted(self, theta):
        """Expectations at theta +- pi/2 e_i: two (P, N) arrays."""
        P = self.n_params
        if P == 0:
            N = self.encoded.shape[0]
            return np.zeros((0, N)), np.zeros((0, N))
        eye = np.eye(P) * SHIFT
        e = self.expectations(np.vstack([theta + eye, theta - eye]))
        return e[:P], e[P:]

    def loss_and_grad(self, theta, y):
        e = self.expectations(theta[None, :])[0]
        plus, minus = self.shifted(theta)
        de = 0.5 * (plus - minus)
        resid = y - e
        loss = float(np.mean(resid ** 2))
        grad = (-2.0 * resid[None, :] * de).mean(axis=1) if de.size else np.zeros(0)
        return loss, grad, e


def _labels(y, n):
    y = to_signed(y).astype(np.float64)
    if y.shape[0] != n or n == 0:
        raise TrainingError(f"need one label per row (rows={n}, labels={y.shape[0]})")
    return y


def model_expectation(model: VariationalModel, x):
    """Z-parity expectation; a float for one row, an array for a (N, n) block."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    eng = _Engine(model.feature_map, model.ansatz, x)
    e = eng.expectations(model.theta[None, :])[0]
    return float(e[0]) if single else e


def squared_loss(model: VariationalModel, X, y) -> float:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0:
        raise TrainingError("empty batch")
    y = _labels(y, X.shape[0])
    e = model_expectation(model, X)
    return float(np.mean((y - e) ** 2))


def parameter_shift_gradient(model: VariationalModel, X, y) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0:
        raise TrainingError("empty batch")
    y = _labels(y, X.shape[0])
    return _Engine(model.feature_map, model.ansatz, X).loss_and_grad(model.theta, y)[1]


def train_variational(preset, feature_map, ansatz=None, X=None, y=None, lr=DEFAULT_LR,
                      max_iters=DEFAULT_MAX_ITERS, eps=DEFAULT_EPS, seed=0) -> VariationalModel:
    """Full-batch gradient descent from ``theta ~ U[-pi, pi]``.

    ``history`` holds ``(t, C(theta_t))`` from ``t = 0``; training stops once
    ``||theta_{t+1} - theta_t|| < eps`` (flagged ``converged``) or after
    ``max_iters`` updates.
    """
    preset = preset.upper()
    if preset not in PRESETS:
        raise ValueError(f"preset must be one of {sorted(PRESETS)}, got {preset!r}")
    if ansatz is None:
        ansatz = AnsatzConfig.preset(preset, feature_map.n_qubits)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0 or X.size == 0:
        raise TrainingError("empty training set")
    y = check_binary(_labels(y, X.shape[0]))
    if not lr >= 0:
        raise TrainingError(f"learning rate must be non-negative, got {lr}")
    if int(max_iters) < 1:
        raise TrainingError(f"max_iters must be >= 1, got {max_iters}")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-math.pi, math.pi, size=ansatz.n_params)
    eng = _Engine(feature_map, ansatz, X)
    history = []
    converged = False
    for t in range(int(max_iters) + 1):
        loss, grad, _ = eng.loss_and_grad(theta, y)
        history.append((t, loss))
        if converged or t == int(max_iters):
            break
        new = theta - lr * grad
        step = float(np.linalg.norm(new - theta))
        theta = new
        if step < eps:
            converged = True
    return VariationalModel(preset, feature_map, ansatz, theta, history, converged)


def variational_predict(model: VariationalModel, x):
    out = sign(model_expectation(model, x))
    return int(out) if out.ndim == 0 else out


def gradient_variance_probe(feature_map, ansatz, n_samples, seed=0) -> float:
    """Mean squared gradient norm over random ``theta`` for one fixed sample."""
    if int(n_samples) < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    if ansatz.n_params == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, math.pi, size=(1, feature_map.n_qubits))
    eng = _Engine(feature_map, ansatz, x)
    y = np.ones(1)
    sq = [float(np.sum(eng.loss_and_grad(rng.uniform(-math.pi, math.pi, ansatz.n_params), y)[1] ** 2))
          for _ in range(int(n_samples))]
    return float(np.mean(sq))
