"""Kernel SVM trained on the dual by Sequential Minimal Optimization.

Working-set selection takes the maximal violating pair: the first index is
the worst KKT violator among multipliers that may move up, the second the
index in the opposite set that maximizes ``|E_i - E_j|``. When a step
stalls numerically, partners are drawn from a seeded random stream.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .feature_maps import FeatureMapConfig

log = logging.getLogger(__name__)

DEFAULT_C = 1.0
DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 200


class TrainingError(ValueError):
    """Training inputs violate a solver precondition."""


def to_signed(labels) -> np.ndarray:
    """Map dataset classes {0, 1} to {-1, +1}; signed labels pass through."""
    y = np.asarray(labels)
    if y.size and np.all(np.isin(y, (0, 1))):
        return np.where(y == 1, 1.0, -1.0)
    if not np.all(np.isin(y, (-1, 1))):
        raise TrainingError("labels must be in {0, 1} or {-1, +1}")
    return y.astype(np.float64)


def check_binary(y, n=None):
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.size == 0:
        raise TrainingError("labels must be a non-empty vector")
    if not np.all((y == 1.0) | (y == -1.0)):
        raise TrainingError("labels must be +1 or -1")
    if np.all(y == y[0]):
        raise TrainingError("single-class input: both classes must be present")
    if n is not None and y.shape[0] != n:
        raise TrainingError(f"kernel has {n} rows but {y.shape[0]} labels were given")
    return y


def sign(v):
    """Sign with the tie-break ``sign(0) = +1``."""
    return np.where(np.asarray(v) >= 0, 1, -1)


@dataclass(frozen=True)
class QsvcModel:
    alphas: np.ndarray
    labels: np.ndarray
    bias: float
    C: float
    feature_map: FeatureMapConfig | None = None
    train_features: np.ndarray | None = None
    converged: bool = True
    n_iter: int = 0
    objective_trace: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    @property
    def support_indices(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > 0)

    def to_dict(self) -> dict:
        return {
            "alphas": [float(a) for a in self.alphas],
            "labels": [int(v) for v in self.labels],
            "bias": float(self.bias),
            "C": float(self.C),
            "feature_map": self.feature_map.to_dict() if self.feature_map else None,
            "train_features": None if self.train_features is None
            else [[float(v) for v in row] for row in self.train_features],
            "converged": bool(self.converged),
            "n_iter": int(self.n_iter),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QsvcModel":
        fm = d.get("feature_map")
        tf = d.get("train_features")
        return cls(
            alphas=np.array(d["alphas"], dtype=np.float64),
            labels=np.array(d["labels"], dtype=np.float64),
            bias=float(d["bias"]),
            C=float(d["C"]),
            feature_map=FeatureMapConfig.from_dict(fm) if fm else None,
            train_features=None if tf is None else np.array(tf, dtype=np.float64),
            converged=bool(d.get("converged", True)),
            n_iter=int(d.get("n_iter", 0)),
        )


def dual_objective(alphas, K, y) -> float:
    """``sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij``."""
    ay = np.asarray(alphas) * np.asarray(y)
    return float(np.sum(alphas) - 0.5 * ay @ np.asarray(K) @ ay)


def _bias(alphas, u, y, C):
    g = y - u
    free = (alphas > 0) & (alphas < C)
    if free.any():
        return float(g[free].mean())
    up = ((y > 0) & (alphas < C)) | ((y < 0) & (alphas > 0))
    low = ((y > 0) & (alphas > 0)) | ((y < 0) & (alphas < C))
    hi = g[up].max() if up.any() else g[low].min()
    lo = g[low].min() if low.any() else g[up].max()
    return float(0.5 * (hi + lo))


def train_qsvc(K, y, C=DEFAULT_C, tol=DEFAULT_TOL, max_passes=DEFAULT_MAX_PASSES, seed=0,
               *, feature_map=None, train_features=None, trace=False, backend=None) -> QsvcModel:
    """Solve the C-SVM dual on a precomputed kernel.

    One pass is ``m`` pair updates. Non-convergence is logged and flagged on
    the model rather than raised.
    """
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise TrainingError(f"kernel must be square, got {K.shape}")
    y = check_binary(to_signed(y), K.shape[0])
    if not C > 0:
        raise TrainingError(f"C must be positive, got {C}")
    m = y.shape[0]
    min_eig = np.linalg.eigvalsh(0.5 * (K + K.T)).min()
    if min_eig < -1e-8:
        log.warning("kernel is not PSD (min eigenvalue %.3g); SMO may not converge", min_eig)
    rand_stream = np.random.default_rng(seed).integers(0, 2**31 - 1, size=max(4 * m, 64))
    alphas, n_iter, converged, objs = _backend.smo_solve(
        K, y, C, tol, max_passes * m, True, rand_stream, trace, backend=backend)
    if not converged:
        log.warning("SMO stopped after %d updates without meeting tol=%g", n_iter, tol)
    u = K @ (alphas * y)
    return QsvcModel(
        alphas=alphas, labels=y, bias=_bias(alphas, u, y, C), C=float(C),
        feature_map=feature_map,
        train_features=None if train_features is None else np.asarray(train_features, dtype=np.float64),
        converged=bool(converged), n_iter=int(n_iter), objective_trace=objs,
    )


def solve_box_dual(K, y, C, tol=1e-10, max_iter=None, backend=None):
    """Intercept-free dual: maximize the dual objective over ``0 <= a <= C`` only.

    This is the dual of the bias-free primal that Pegasos minimizes; the
    optimal weight vector is ``w = sum_i a_i y_i phi(x_i)``.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = y.shape[0]
    if max_iter is None:
        max_iter = 20000 * m
    alphas, n_iter, converged, _ = _backend.smo_solve(
        K, y, C, tol, max_iter, False, np.zeros(1, dtype=np.int64), False, backend=backend)
    return alphas, bool(converged)


def qsvc_decision(model: QsvcModel, k_row) -> float | np.ndarray:
    """``sum_i a_i y_i k_row[i] + b``; accepts one row or a (t, m) block."""
    k_row = np.asarray(k_row, dtype=np.float64)
    if k_row.shape[-1] != model.alphas.shape[0]:
        raise ValueError(f"kernel row has length {k_row.shape[-1]}, model has {model.alphas.shape[0]} points")
    out = k_row @ (model.alphas * model.labels) + model.bias
    return float(out) if out.ndim == 0 else out


def qsvc_predict(model: QsvcModel, k_row):
    out = sign(qsvc_decision(model, k_row))
    return int(out) if out.ndim == 0 else out


def kkt_residual(model: QsvcModel, K, y=None) -> float:
    """Largest violation of the KKT case conditions (0 means exact)."""
    K = np.asarray(K, dtype=np.float64)
    y = model.labels if y is None else to_signed(y)
    a = model.alphas
    if K.shape != (a.shape[0], a.shape[0]) or y.shape[0] != a.shape[0]:
        raise ValueError("dimension mismatch between model, kernel and labels")
    yf = y * (K @ (a * y) + model.bias)
    at_zero = a <= 0
    at_c = a >= model.C
    free = ~at_zero & ~at_c
    viol = np.zeros_like(yf)
    viol[at_zero] = np.maximum(0.0, 1.0 - yf[at_zero])
    viol[free] = np.abs(yf[free] - 1.0)
    viol[at_c] = np.maximum(0.0, yf[at_c] - 1.0)
    return float(viol.max()) if viol.size else 0.0
