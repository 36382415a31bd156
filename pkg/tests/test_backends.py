"""The compiled kernels and the numpy fallback must agree."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgenomic import _backend
from qgenomic.feature_maps import FeatureMapConfig, program
from qgenomic.kernel import gram_matrix
from qgenomic.pegasos import sample_indices
from qgenomic.verify import random_circuit

cython_only = pytest.mark.skipif(_backend._core is None, reason="compiled extension not built")


def test_backend_is_reported():
    assert _backend.BACKEND in ("cython", "python")
    assert _backend.get("python") is _backend._pycore
    with pytest.raises(ValueError):
        _backend.get("fortran")


def test_angle_table_shape_is_checked():
    states = np.zeros((2, 4), dtype=complex)
    with pytest.raises(ValueError, match="angle table"):
        _backend.apply_program(states, np.zeros(3, np.int32), np.zeros(3, np.int32), np.zeros(3, np.int32),
                               np.zeros((2, 2)))


@cython_only
@given(st.integers(0, 2**32 - 1))
def test_programs_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    circ = random_circuit(rng, n, 20)
    codes, q0, q1, phis = circ.program()
    B = 3
    start = rng.normal(size=(B, 1 << n)) + 1j * rng.normal(size=(B, 1 << n))
    table = np.tile(phis, (B, 1)) + rng.normal(size=(B, len(phis)))
    a = _backend.apply_program(start.copy(), codes, q0, q1, table, backend="python")
    b = _backend.apply_program(start.copy(), codes, q0, q1, table, backend="cython")
    np.testing.assert_allclose(a, b, atol=1e-13)


@cython_only
@pytest.mark.parametrize("kind", ["Z", "ZZ", "PAULI"])
def test_feature_map_batches_agree(kind, rng):
    fm = FeatureMapConfig(kind, 4, repetitions=2)
    codes, q0, q1, phis = program(fm, rng.uniform(0, math.pi, (6, 4)))
    init = np.zeros((6, 16), dtype=complex)
    init[:, 0] = 1
    a = _backend.apply_program(init.copy(), codes, q0, q1, phis, backend="python")
    b = _backend.apply_program(init.copy(), codes, q0, q1, phis, backend="cython")
    np.testing.assert_allclose(a, b, atol=1e-13)


def _problem(seed, m=16):
    rng = np.random.default_rng(seed)
    K = gram_matrix(FeatureMapConfig("ZZ", 3), rng.uniform(0, math.pi, (m, 3)))
    y = np.where(rng.permutation(m) % 2 == 0, 1.0, -1.0)
    return K, y


@cython_only
@pytest.mark.parametrize("with_bias", [True, False])
def test_smo_agrees(with_bias):
    for seed in range(5):
        K, y = _problem(seed)
        stream = np.random.default_rng(seed).integers(0, 2**31 - 1, 64)
        pa = _backend.smo_solve(K, y, 1.0, 1e-6, 5000, with_bias, stream, True, backend="python")
        cy = _backend.smo_solve(K, y, 1.0, 1e-6, 5000, with_bias, stream, True, backend="cython")
        np.testing.assert_allclose(pa[0], cy[0], atol=1e-10)
        assert pa[1] == cy[1] and pa[2] == cy[2]
        np.testing.assert_allclose(pa[3], cy[3], atol=1e-10)


@cython_only
def test_pegasos_agrees():
    for seed in range(5):
        K, y = _problem(seed)
        idx = sample_indices(len(y), 300, seed)
        pa = _backend.pegasos_run(K, y, 0.05, idx, True, backend="python")
        cy = _backend.pegasos_run(K, y, 0.05, idx, True, backend="cython")
        for u, v in zip(pa, cy):
            np.testing.assert_allclose(u, v, rtol=1e-10, atol=1e-12)
