"""Select the compiled kernels when available, else the numpy fallback.

Set ``QGENOMIC_BACKEND=python`` to force the fallback even when the
extension is built.
"""
import os

import numpy as np

from . import _pycore

H, RX, RY, RZ, CNOT, CZ, RZZ, RZX = _pycore.H, _pycore.RX, _pycore.RY, _pycore.RZ, \
    _pycore.CNOT, _pycore.CZ, _pycore.RZZ, _pycore.RZX

_core = None
if os.environ.get("QGENOMIC_BACKEND", "").lower() != "python":
    try:
        from . import _core
    except ImportError:  # extension not built
        _core = None

BACKEND = "cython" if _core is not None else "python"


def get(name=None):
    """Return the kernel module for ``name`` ("cython", "python" or None for active)."""
    name = name or BACKEND
    if name == "python":
        return _pycore
    if name == "cython":
        if _core is None:
            raise RuntimeError("compiled extension qgenomic._core is not available")
        return _core
    raise ValueError(f"unknown backend {name!r}")


def apply_program(states, codes, q0, q1, phis, backend=None):
    states = np.ascontiguousarray(states, dtype=np.complex128)
    codes = np.ascontiguousarray(codes, dtype=np.int32)
    q0 = np.ascontiguousarray(q0, dtype=np.int32)
    q1 = np.ascontiguousarray(q1, dtype=np.int32)
    phis = np.ascontiguousarray(phis, dtype=np.float64)
    if phis.shape != (states.shape[0], codes.shape[0]):
        raise ValueError(f"angle table shape {phis.shape} does not match "
                         f"{states.shape[0]} states x {codes.shape[0]} gates")
    get(backend).apply_program(states, codes, q0, q1, phis)
    return states


def smo_solve(K, y, C, tol, max_iter, with_bias, rand_stream, trace=False, backend=None):
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    rand_stream = np.ascontiguousarray(rand_stream, dtype=np.int64)
    return get(backend).smo_solve(K, y, float(C), float(tol), int(max_iter),
                                  bool(with_bias), rand_stream, bool(trace))


def pegasos_run(K, y, lam, idx, record=False, backend=None):
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    return get(backend).pegasos_run(K, y, float(lam), idx, bool(record))
