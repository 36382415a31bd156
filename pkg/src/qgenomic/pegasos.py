"""Kernelized Pegasos: stochastic subgradient descent on the SVM primal.

The weight vector lives in the feature space of the quantum kernel, so it
is carried as coefficients ``c`` with ``w = sum_i c_i y_i phi(x_i)``. The
``(1 - eta*lambda)`` shrink and the projection onto the ball of radius
``1/sqrt(lambda)`` act on all coefficients at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .feature_maps import FeatureMapConfig
from .qsvc import TrainingError, check_binary, sign, solve_box_dual, to_signed

DEFAULT_LAMBDA = 0.01
DEFAULT_STEPS = 1000


@dataclass(frozen=True)
class PegasosModel:
    coefficients: np.ndarray
    labels: np.ndarray
    lam: float
    steps_T: int
    feature_map: FeatureMapConfig | None = None
    train_features: np.ndarray | None = None
    objective_history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    norm_history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def to_dict(self) -> dict:
        return {
            "coefficients": [float(c) for c in self.coefficients],
            "labels": [int(v) for v in self.labels],
            "lambda": float(self.lam),
            "steps_T": int(self.steps_T),
            "feature_map": self.feature_map.to_dict() if self.feature_map else None,
            "train_features": None if self.train_features is None
            else [[float(v) for v in row] for row in self.train_features],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PegasosModel":
        fm = d.get("feature_map")
        tf = d.get("train_features")
        return cls(
            coefficients=np.array(d["coefficients"], dtype=np.float64),
            labels=np.array(d["labels"], dtype=np.float64),
            lam=float(d["lambda"]),
            steps_T=int(d["steps_T"]),
            feature_map=FeatureMapConfig.from_dict(fm) if fm else None,
            train_features=None if tf is None else np.array(tf, dtype=np.float64),
        )


def weight_norm(coefficients, K, y) -> float:
    cy = np.asarray(coefficients) * np.asarray(y)
    return math.sqrt(max(float(cy @ np.asarray(K) @ cy), 0.0))


def sample_indices(m: int, T: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, m, size=T)


def train_pegasos(K, y, lam=DEFAULT_LAMBDA, T=DEFAULT_STEPS, seed=0, *, feature_map=None,
                  train_features=None, record=False, backend=None) -> PegasosModel:
    """Run ``T`` single-sample Pegasos steps with ``eta_t = 1/(lambda*t)``.

    The final iterate is returned. With ``record`` the primal objective and
    the weight norm after every step are kept on the model.
    """
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise TrainingError(f"kernel must be square, got {K.shape}")
    y = check_binary(to_signed(y), K.shape[0])
    if not lam > 0:
        raise TrainingError(f"lambda must be positive, got {lam}")
    if int(T) < 1:
        raise TrainingError(f"T must be >= 1, got {T}")
    idx = sample_indices(y.shape[0], int(T), seed)
    coef, objs, norms = _backend.pegasos_run(K, y, lam, idx, record, backend=backend)
    return PegasosModel(
        coefficients=coef, labels=y, lam=float(lam), steps_T=int(T), feature_map=feature_map,
        train_features=None if train_features is None else np.asarray(train_features, dtype=np.float64),
        objective_history=objs, norm_history=norms,
    )


def pegasos_decision(model: PegasosModel, k_row):
    k_row = np.asarray(k_row, dtype=np.float64)
    if k_row.shape[-1] != model.coefficients.shape[0]:
        raise ValueError(f"kernel row has length {k_row.shape[-1]}, "
                         f"model has {model.coefficients.shape[0]} points")
    out = k_row @ (model.coefficients * model.labels)
    return float(out) if out.ndim == 0 else out


def pegasos_predict(model: PegasosModel, k_row):
    out = sign(pegasos_decision(model, k_row))
    return int(out) if out.ndim == 0 else out


def pegasos_objective(coefficients, K, y, lam) -> float:
    """``lambda/2 ||w||^2 + mean_i max(0, 1 - y_i <w, phi(x_i)>)``."""
    K = np.asarray(K, dtype=np.float64)
    y = to_signed(y)
    c = np.asarray(coefficients, dtype=np.float64)
    if K.shape != (c.shape[0], c.shape[0]) or y.shape[0] != c.shape[0]:
        raise ValueError("dimension mismatch between coefficients, kernel and labels")
    cy = c * y
    u = K @ cy
    return float(0.5 * lam * (cy @ u) + np.maximum(0.0, 1.0 - y * u).mean())


def optimal_objective(K, y, lam, backend=None):
    """``(f(w*), coefficients)`` of the Pegasos primal, via the dual solver.

    The primal has no bias, so its dual is the box-constrained problem with
    ``C = 1/(lambda*m)``, and ``c_i = alpha_i`` at the optimum.
    """
    y = to_signed(y)
    C = 1.0 / (lam * y.shape[0])
    alphas, converged = solve_box_dual(K, y, C, backend=backend)
    if not converged:
        raise RuntimeError("dual oracle did not converge")
    return pegasos_objective(alphas, K, y, lam), alphas


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    holds: bool
    f_opt: float
    G: float
    trials: list = field(default_factory=list)


def verify_pegasos_bound(K, y, lam, T, trials=20, seed=0, backend=None) -> BoundReport:
    """Check ``mean_t f(w_t) - f(w*) <= G**2 (1 + ln T) / (2 lambda T)`` over seeded runs.

    ``G = 1 + max_i sqrt(K_ii)`` bounds the subgradient norm inside the
    projection ball. ``lhs`` and ``holds`` report the worst trial.
    """
    if int(T) < 3:
        raise ValueError(f"the bound needs T >= 3, got {T}")
    K = np.asarray(K, dtype=np.float64)
    y = check_binary(to_signed(y), K.shape[0])
    f_opt, _ = optimal_objective(K, y, lam, backend=backend)
    G = 1.0 + float(np.sqrt(np.max(np.diag(K))))
    rhs = G * G * (1.0 + math.log(T)) / (2.0 * lam * T)
    rng = np.random.default_rng(seed)
    rows = []
    for trial_seed in rng.integers(0, 2**31 - 1, size=int(trials)):
        model = train_pegasos(K, y, lam, T, int(trial_seed), record=True, backend=backend)
        lhs = float(model.objective_history.mean() - f_opt)
        rows.append({"seed": int(trial_seed), "lhs": lhs, "holds": lhs <= rhs,
                     "max_norm": float(model.norm_history.max())})
    worst = max(r["lhs"] for r in rows)
    return BoundReport(lhs=worst, rhs=rhs, holds=all(r["holds"] for r in rows),
                       f_opt=f_opt, G=G, trials=rows)
