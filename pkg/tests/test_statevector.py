import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgenomic.statevector import (FULL, HALF, Circuit, CircuitError, Gate, Statevector, apply_gate,
                                  expectation_parity_z, inner_product, run_circuit)
from qgenomic.verify import random_circuit, random_state

from oracles import gate_matrix

S2 = 1 / math.sqrt(2)
PLUS = Statevector([S2, S2])


def test_hadamard_on_zero():
    out = apply_gate(Statevector.zero(1), Gate("H", (0,)))
    np.testing.assert_allclose(out.amplitudes, [S2, S2], atol=1e-15)


def test_rz_full_angle_on_plus():
    out = apply_gate(PLUS, Gate("RZ", (0,), math.pi / 2, FULL))
    np.testing.assert_allclose(out.amplitudes, np.array([-1j, 1j]) * S2, atol=1e-15)


def test_cnot_builds_bell_state():
    # (|00> + |10>)/sqrt2 in |q1 q0> notation means qubit 0 in |+>, with bit 0 the control
    psi = Statevector([S2, S2, 0, 0])
    out = apply_gate(psi, Gate("CNOT", (0, 1)))
    np.testing.assert_allclose(out.amplitudes, [S2, 0, 0, S2], atol=1e-15)


def test_empty_circuit_is_identity(rng):
    psi = random_state(rng, 3)
    assert run_circuit(Circuit(3, ()), psi).amplitudes.tolist() == psi.amplitudes.tolist()


def test_double_hadamard_is_identity():
    out = run_circuit(Circuit(1, (Gate("H", (0,)), Gate("H", (0,)))))
    np.testing.assert_allclose(out.amplitudes, [1, 0], atol=1e-12)


def test_hh_then_cz():
    circ = Circuit(2, (Gate("H", (0,)), Gate("H", (1,)), Gate("CZ", (0, 1))))
    np.testing.assert_allclose(run_circuit(circ).amplitudes, [0.5, 0.5, 0.5, -0.5], atol=1e-15)


def test_inner_products():
    assert inner_product(PLUS, PLUS) == pytest.approx(1.0)
    assert inner_product(Statevector.zero(1), Statevector.basis(1, 1)) == 0
    assert inner_product(PLUS, Statevector.zero(1)) == pytest.approx(S2)


def test_inner_product_is_conjugate_linear_in_first_argument():
    a = Statevector([S2, 1j * S2])
    assert inner_product(a, Statevector.basis(1, 1)) == pytest.approx(-1j * S2)


def test_parity_expectations():
    assert expectation_parity_z(Statevector.zero(3)) == 1.0
    assert expectation_parity_z(Statevector.basis(1, 1)) == -1.0
    assert expectation_parity_z(Statevector([S2, S2, 0, 0])) == pytest.approx(0.0, abs=1e-15)


def test_half_angle_ry_pi_flips_zero():
    out = apply_gate(Statevector.zero(1), Gate("RY", (0,), math.pi, HALF))
    np.testing.assert_allclose(out.amplitudes, [0, 1], atol=1e-15)


def test_rzx_acts_as_z_on_first_x_on_second():
    # exp(-i pi/2 Z0 X1) = -i Z0 X1; on |00> that gives -i |q1=1, q0=0>
    out = apply_gate(Statevector.zero(2), Gate("RZX", (0, 1), math.pi / 2))
    np.testing.assert_allclose(out.amplitudes, [0, 0, -1j, 0], atol=1e-15)


@pytest.mark.parametrize("kind,targets", [("H", (1,)), ("RX", (0,)), ("RY", (2,)), ("RZ", (1,)),
                                          ("CNOT", (2, 0)), ("CZ", (0, 2)), ("RZZ", (1, 2)),
                                          ("RZX", (2, 1))])
def test_each_gate_matches_enumerated_matrix(kind, targets, rng):
    phi = 0.7312
    psi = random_state(rng, 3)
    out = apply_gate(psi, Gate(kind, targets, phi)).amplitudes
    np.testing.assert_allclose(out, gate_matrix(kind, targets, phi, 3) @ psi.amplitudes, atol=1e-13)


@given(st.integers(0, 2**32 - 1))
def test_random_circuits_match_oracle_and_keep_norm(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    circ = random_circuit(rng, n, int(rng.integers(1, 12)))
    psi = random_state(rng, n)
    ref = psi.amplitudes.copy()
    for g in circ.gates:
        ref = gate_matrix(g.kind, g.targets, g.effective_angle, n) @ ref
    out = run_circuit(circ, psi)
    assert np.max(np.abs(out.amplitudes - ref)) <= 1e-12
    assert abs(out.norm() - 1) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_inverse_circuit_returns_initial_state(seed):
    rng = np.random.default_rng(seed)
    circ = random_circuit(rng, 3, 10)
    psi = random_state(rng, 3)
    back = Circuit(3, tuple(g.inverse() for g in reversed(circ.gates)))
    np.testing.assert_allclose(run_circuit(back, run_circuit(circ, psi)).amplitudes, psi.amplitudes, atol=1e-12)


def test_state_validation():
    with pytest.raises(CircuitError):
        Statevector([1, 0, 0])
    with pytest.raises(CircuitError):
        Statevector([1, 1])
    with pytest.raises(CircuitError):
        Statevector(np.ones(1 << 13) / 2 ** 6.5)
    np.testing.assert_allclose(Statevector([3, 4], normalize=True).amplitudes, [0.6, 0.8], atol=1e-15)


def test_gate_and_circuit_validation():
    with pytest.raises(CircuitError):
        Gate("CNOT", (1, 1))
    with pytest.raises(CircuitError):
        Gate("RX", (0, 1), 0.1)
    with pytest.raises(CircuitError):
        Gate("SWAP", (0, 1))
    with pytest.raises(CircuitError):
        Gate("RZ", (0,), float("nan"))
    with pytest.raises(CircuitError):
        Circuit(2, (Gate("H", (2,)),))
    with pytest.raises(CircuitError):
        run_circuit(Circuit(2, ()), Statevector.zero(1))


def test_states_are_immutable():
    psi = Statevector.zero(1)
    with pytest.raises(AttributeError):
        psi.n_qubits = 2
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0


def test_norm_preserved_on_thousand_circuits_up_to_five_qubits():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        out = run_circuit(random_circuit(rng, n, int(rng.integers(1, 30))), random_state(rng, n))
        worst = max(worst, abs(out.norm() - 1))
    assert worst < 1e-10
