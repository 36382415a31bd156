import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgenomic.feature_maps import (LINEAR, FeatureMapConfig, build_feature_map, encode, encode_batch,
                                   entangled_pairs)
from qgenomic.statevector import Statevector, run_circuit

from oracles import gate_matrix

S2 = 1 / math.sqrt(2)


def test_z_map_at_zero_is_plus():
    fm = FeatureMapConfig("Z", 1)
    circ = build_feature_map(fm, [0.0])
    assert [g.kind for g in circ.gates] == ["H", "RZ"]
    np.testing.assert_allclose(encode(fm, [0.0]).amplitudes, [S2, S2], atol=1e-15)


def test_z_map_at_half_pi():
    out = encode(FeatureMapConfig("Z", 1), [math.pi / 2]).amplitudes
    np.testing.assert_allclose(out, np.exp([-1j * math.pi / 2, 1j * math.pi / 2]) * S2, atol=1e-15)


def test_zz_with_zero_product_equals_z_map():
    x = [math.pi, 0.0]
    np.testing.assert_allclose(encode(FeatureMapConfig("ZZ", 2), x).amplitudes,
                               encode(FeatureMapConfig("Z", 2), x).amplitudes, atol=1e-14)


def test_zz_two_qubits_has_one_interaction():
    gates = build_feature_map(FeatureMapConfig("ZZ", 2), [0.3, 1.7]).gates
    rzz = [g for g in gates if g.kind == "RZZ"]
    assert len(rzz) == 1 and rzz[0].angle == pytest.approx(0.3 * 1.7)


def test_pauli_at_zero_is_hadamard_state():
    np.testing.assert_allclose(encode(FeatureMapConfig("PAULI", 2), [0, 0]).amplitudes, [0.5] * 4, atol=1e-15)


def test_entanglement_layouts():
    assert entangled_pairs(FeatureMapConfig("ZZ", 4)) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert entangled_pairs(FeatureMapConfig("ZZ", 4, entanglement=LINEAR)) == [(0, 1), (1, 2), (2, 3)]


def test_gate_counts_scale_with_repetitions():
    one = len(build_feature_map(FeatureMapConfig("PAULI", 3), [0.1, 0.2, 0.3]).gates)
    two = len(build_feature_map(FeatureMapConfig("PAULI", 3, repetitions=2), [0.1, 0.2, 0.3]).gates)
    assert one == 3 + 9 + 3 and two == 2 * one


@pytest.mark.parametrize("kind", ["Z", "ZZ", "PAULI"])
def test_batched_encoding_matches_dense_product(kind, rng):
    fm = FeatureMapConfig(kind, 3, repetitions=2)
    X = rng.uniform(0, math.pi, (5, 3))
    states = encode_batch(fm, X)
    for x, s in zip(X, states):
        ref = np.zeros(8, dtype=complex)
        ref[0] = 1
        for g in build_feature_map(fm, x).gates:
            ref = gate_matrix(g.kind, g.targets, g.effective_angle, 3) @ ref
        np.testing.assert_allclose(s, ref, atol=1e-12)


def test_no_hadamard_layer():
    fm = FeatureMapConfig("Z", 2, hadamard_layer=False)
    np.testing.assert_allclose(np.abs(encode(fm, [0.4, 1.1]).amplitudes), [1, 0, 0, 0], atol=1e-15)


@given(st.sampled_from(["Z", "ZZ", "PAULI"]), st.lists(st.floats(-10, 10), min_size=3, max_size=3))
def test_encoded_states_are_normalized(kind, x):
    assert abs(encode(FeatureMapConfig(kind, 3), x).norm() - 1) < 1e-12


def test_config_validation_and_round_trip():
    with pytest.raises(ValueError):
        FeatureMapConfig("XY", 2)
    with pytest.raises(ValueError):
        FeatureMapConfig("Z", 0)
    with pytest.raises(ValueError):
        FeatureMapConfig("ZZ", 2, entanglement="circular")
    fm = FeatureMapConfig("pauli", 3, 2, "linear", False)
    assert FeatureMapConfig.from_dict(fm.to_dict()) == fm
    assert fm.display_name == "PauliFeatureMap"
    with pytest.raises(ValueError):
        encode(FeatureMapConfig("Z", 2), [0.1, 0.2, 0.3])


@given(st.integers(1, 6), st.integers(1, 3), st.booleans(), st.data())
def test_gate_count_formula(n, reps, hadamard, data):
    x = data.draw(st.lists(st.floats(-3, 3), min_size=n, max_size=n))
    base = reps * (n * hadamard + n)
    z = build_feature_map(FeatureMapConfig("Z", n, reps, hadamard_layer=hadamard), x).gates
    zz = build_feature_map(FeatureMapConfig("ZZ", n, reps, hadamard_layer=hadamard), x).gates
    lin = build_feature_map(FeatureMapConfig("ZZ", n, reps, LINEAR, hadamard), x).gates
    assert len(z) == base
    assert len(zz) == base + reps * n * (n - 1) // 2
    assert len(lin) == base + reps * (n - 1)
    assert all(g.convention == "full" for g in zz)
    assert build_feature_map(FeatureMapConfig("ZZ", n, reps, hadamard_layer=hadamard), x).gates == zz


def test_thousand_random_encodings_are_normalized(rng):
    for kind in ("Z", "ZZ", "PAULI"):
        fm = FeatureMapConfig(kind, 4, repetitions=2)
        states = encode_batch(fm, rng.uniform(-2 * math.pi, 2 * math.pi, (1000, 4)))
        assert np.max(np.abs(np.linalg.norm(states, axis=1) - 1)) <= 1e-12
