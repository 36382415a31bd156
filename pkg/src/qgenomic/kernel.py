"""Fidelity kernels ``K(x, y) = |<phi(x)|phi(y)>|**2`` from exact statevectors."""
from __future__ import annotations

import csv

import numpy as np

from .feature_maps import FeatureMapConfig, encode, encode_batch
from .statevector import CircuitError, inner_product


def kernel_entry(config: FeatureMapConfig, x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise CircuitError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return abs(inner_product(encode(config, x), encode(config, y))) ** 2


def _fidelities(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.abs(A.conj() @ B.T) ** 2


def gram_matrix(config: FeatureMapConfig, X) -> np.ndarray:
    """Symmetric Gram matrix; every row is encoded exactly once."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise CircuitError("gram_matrix needs a non-empty 2-D feature matrix")
    states = encode_batch(config, X)
    K = _fidelities(states, states)
    # mirror the upper triangle so symmetry is exact
    iu = np.triu_indices(K.shape[0], 1)
    K.T[iu] = K[iu]
    # |<phi|phi>|^2 is 1 for a normalized state; drop the rounding residue
    np.fill_diagonal(K, 1.0)
    return K


def cross_gram(config: FeatureMapConfig, X_train, X_test) -> np.ndarray:
    """``out[t, i] = K(test_t, train_i)``."""
    X_train = np.asarray(X_train, dtype=np.float64)
    X_test = np.asarray(X_test, dtype=np.float64)
    if X_train.ndim != 2 or X_test.ndim != 2 or X_train.shape[1] != X_test.shape[1]:
        raise CircuitError(f"width mismatch: train {X_train.shape} vs test {X_test.shape}")
    if X_test.shape[0] == 0:
        return np.zeros((0, X_train.shape[0]))
    return _fidelities(encode_batch(config, X_test), encode_batch(config, X_train))


def check_kernel_matrix(K, sym_tol=1e-10, diag_tol=1e-10, psd_tol=1e-8) -> dict:
    """Report the KernelMatrix invariants (symmetry, unit diagonal, PSD, range)."""
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        return {"square": False, "ok": False}
    asym = float(np.max(np.abs(K - K.T))) if K.size else 0.0
    diag = float(np.max(np.abs(np.diag(K) - 1.0))) if K.size else 0.0
    min_eig = float(np.linalg.eigvalsh(0.5 * (K + K.T)).min()) if K.size else 0.0
    in_range = bool(np.all((K >= 0.0) & (K <= 1.0 + 1e-9)))
    report = {
        "square": True,
        "max_asymmetry": asym,
        "max_diagonal_error": diag,
        "min_eigenvalue": min_eig,
        "in_range": in_range,
        "symmetric": asym <= sym_tol,
        "unit_diagonal": diag <= diag_tol,
        "psd": min_eig >= -psd_tol,
    }
    report["ok"] = report["symmetric"] and report["unit_diagonal"] and report["psd"] and in_range
    return report


def write_gram_csv(path, K):
    K = np.asarray(K)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(range(K.shape[1]))
        for row in K:
            w.writerow(f"{v:.17g}" for v in row)


def read_gram_csv(path_or_file):
    fh = open(path_or_file, newline="") if isinstance(path_or_file, str) else path_or_file
    try:
        rows = list(csv.reader(fh))
    finally:
        if isinstance(path_or_file, str):
            fh.close()
    if not rows:
        raise ValueError("empty Gram matrix file")
    body = [r for r in rows[1:] if r]
    K = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != len(rows[0]) or K.shape[1] != len(rows[0]):
        raise ValueError(f"Gram matrix must be square with {len(rows[0])} columns, got {K.shape}")
    return K
