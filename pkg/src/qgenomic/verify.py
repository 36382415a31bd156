"""Property checks behind the ``verify`` command.

Each check returns a ``CheckResult``; the dense-matrix simulator here is a
deliberately naive Kronecker-product construction used only as an oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .feature_maps import KINDS, FeatureMapConfig
from .kernel import check_kernel_matrix, gram_matrix
from .metrics import auroc
from .pegasos import verify_pegasos_bound
from .qsvc import dual_objective, kkt_residual, train_qsvc
from .statevector import Circuit, Gate, Statevector, run_circuit
from .variational import AnsatzConfig, VariationalModel, parameter_shift_gradient, squared_loss

_I = np.eye(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0]).astype(complex)
_P0 = np.diag([1.0, 0.0])
_P1 = np.diag([0.0, 1.0])


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    values: dict = field(default_factory=dict)


def _embed(ops: dict, n: int) -> np.ndarray:
    """Kronecker product over qubits, qubit n-1 leftmost (little-endian index)."""
    out = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, _I))
    return out


def dense_gate(gate: Gate, n: int) -> np.ndarray:
    phi = gate.effective_angle
    paulis = {"RX": _X, "RY": _Y, "RZ": _Z}
    if gate.kind == "H":
        return _embed({gate.targets[0]: np.array([[1, 1], [1, -1]]) / math.sqrt(2)}, n)
    if gate.kind in paulis:
        P = paulis[gate.kind]
        return _embed({gate.targets[0]: math.cos(phi) * _I - 1j * math.sin(phi) * P}, n)
    a, b = gate.targets
    if gate.kind == "CNOT":
        return _embed({a: _P0}, n) + _embed({a: _P1, b: _X}, n)
    if gate.kind == "CZ":
        return _embed({a: _P0}, n) + _embed({a: _P1, b: _Z}, n)
    P = _embed({a: _Z, b: _Z if gate.kind == "RZZ" else _X}, n)
    return math.cos(phi) * np.eye(1 << n) - 1j * math.sin(phi) * P


def random_circuit(rng, n, n_gates, conventions=("full", "half")):
    kinds = ["H", "RX", "RY", "RZ"] + (["CNOT", "CZ", "RZZ", "RZX"] if n > 1 else [])
    gates = []
    for _ in range(n_gates):
        k = kinds[rng.integers(len(kinds))]
        if k in ("CNOT", "CZ", "RZZ", "RZX"):
            t = tuple(int(v) for v in rng.choice(n, 2, replace=False))
        else:
            t = (int(rng.integers(n)),)
        gates.append(Gate(k, t, float(rng.uniform(-2 * math.pi, 2 * math.pi)),
                          conventions[rng.integers(len(conventions))]))
    return Circuit(n, tuple(gates))


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return Statevector(v, normalize=True)


def check_simulator(n_circuits=200, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_amp = worst_norm = 0.0
    for _ in range(n_circuits):
        n = int(rng.integers(1, 4))
        circ = random_circuit(rng, n, int(rng.integers(1, 15)))
        psi = random_state(rng, n)
        out = run_circuit(circ, psi).amplitudes
        ref = psi.amplitudes.copy()
        for g in circ.gates:
            ref = dense_gate(g, n) @ ref
        worst_amp = max(worst_amp, float(np.max(np.abs(out - ref))))
        worst_norm = max(worst_norm, abs(float(np.linalg.norm(out)) - 1.0))
    ok = worst_amp <= 1e-12 and worst_norm < 1e-10
    return CheckResult("simulator_vs_dense", ok, f"max amp err {worst_amp:.2e}, norm drift {worst_norm:.2e}",
                       {"max_amp_error": worst_amp, "max_norm_drift": worst_norm})


def check_kernels(n_sets=10, m=15, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = math.inf
    ok = True
    for kind in KINDS:
        fm = FeatureMapConfig(kind, 4)
        for _ in range(n_sets):
            rep = check_kernel_matrix(gram_matrix(fm, rng.uniform(0, math.pi, (m, 4))))
            ok &= rep["ok"]
            worst = min(worst, rep["min_eigenvalue"])
    return CheckResult("kernel_psd", bool(ok), f"min eigenvalue {worst:.2e}", {"min_eigenvalue": worst})


def check_supplied_gram(K) -> CheckResult:
    rep = check_kernel_matrix(K)
    failed = [k for k in ("square", "symmetric", "unit_diagonal", "psd", "in_range") if not rep.get(k, False)]
    detail = "all invariants hold" if not failed else "failed: " + ", ".join(failed)
    return CheckResult("supplied_gram", rep["ok"], detail, {k: v for k, v in rep.items() if k != "ok"})


def _grid_dual_optimum(K, y, C, step):
    """Best dual objective on a grid over the feasible set of a 3-point problem."""
    grid = np.arange(0.0, C + step / 2, step)
    a0, a1 = np.meshgrid(grid, grid, indexing="ij")
    a2 = -(y[0] * a0 + y[1] * a1) * y[2]
    ok = (a2 >= -1e-12) & (a2 <= C + 1e-12)
    A = np.stack([a0[ok], a1[ok], np.clip(a2[ok], 0, C)], axis=1)
    Q = (y[:, None] * y[None, :]) * K
    vals = A.sum(axis=1) - 0.5 * np.einsum("ij,jk,ik->i", A, Q, A)
    return float(vals.max())


def check_smo(seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    K = np.array([[1.0, -1.0], [-1.0, 1.0]])
    model = train_qsvc(K, np.array([1, -1]), C=10.0)
    fixture_err = float(max(np.max(np.abs(model.alphas - 0.5)), abs(model.bias)))
    worst_kkt = 0.0
    fm = FeatureMapConfig("ZZ", 4)
    for _ in range(5):
        X = rng.uniform(0, math.pi, (12, 4))
        y = np.where(np.arange(12) % 2 == 0, 1, -1)
        Kr = gram_matrix(fm, X)
        worst_kkt = max(worst_kkt, kkt_residual(train_qsvc(Kr, y, tol=1e-3), Kr, y))
    worst_gap = 0.0
    for _ in range(3):
        X = rng.uniform(0, math.pi, (3, 4))
        y = np.array([1, -1, 1])
        Kr = gram_matrix(fm, X)
        m3 = train_qsvc(Kr, y, C=1.0, tol=1e-6)
        worst_gap = max(worst_gap, abs(dual_objective(m3.alphas, Kr, m3.labels)
                                       - _grid_dual_optimum(Kr, m3.labels, 1.0, 0.001)))
    ok = fixture_err <= 1e-6 and worst_kkt <= 1e-3 and worst_gap <= 1e-3
    return CheckResult("smo_kkt", ok, f"fixture err {fixture_err:.1e}, max KKT {worst_kkt:.1e}, "
                                      f"grid gap {worst_gap:.1e}",
                       {"fixture_error": fixture_err, "max_kkt": worst_kkt, "grid_gap": worst_gap})


def check_pegasos(trials=10, seed=0) -> CheckResult:
    K = np.array([[1.0, -1.0], [-1.0, 1.0]])
    y = np.array([1, -1])
    rows = []
    for lam, T in product((0.1, 0.5), (100, 1000)):
        rep = verify_pegasos_bound(K, y, lam, T, trials=trials, seed=seed)
        rows.append((lam, T, rep.lhs, rep.rhs, rep.holds))
    ok = all(r[4] for r in rows)
    detail = "; ".join(f"lam={l} T={t}: {a:.3g} <= {b:.3g}" for l, t, a, b, _ in rows)
    return CheckResult("pegasos_bound", ok, detail)


def finite_difference_gradient(model, X, y, h=1e-5):
    g = np.zeros_like(model.theta)
    for i in range(g.shape[0]):
        tp, tm = model.theta.copy(), model.theta.copy()
        tp[i] += h
        tm[i] -= h
        g[i] = (squared_loss(model.with_theta(tp), X, y) - squared_loss(model.with_theta(tm), X, y)) / (2 * h)
    return g


def check_gradients(n_instances=20, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(n_instances):
        n = int(rng.integers(1, 4))
        fm = FeatureMapConfig(KINDS[k % 3], n)
        ans = AnsatzConfig(n, int(rng.integers(0, 3)))
        model = VariationalModel("VQC", fm, ans, rng.uniform(-math.pi, math.pi, ans.n_params))
        X = rng.uniform(0, math.pi, (3, n))
        y = rng.choice([-1, 1], 3)
        diff = parameter_shift_gradient(model, X, y) - finite_difference_gradient(model, X, y)
        worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("parameter_shift_vs_fd", worst <= 1e-6, f"max abs diff {worst:.2e}",
                       {"max_abs_diff": worst})


def pairwise_auroc(scores, labels) -> float:
    s = np.asarray(scores, dtype=float)
    t = np.asarray(labels)
    pos, neg = s[t == 1], s[t != 1]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return float(wins / (pos.shape[0] * neg.shape[0]))


def check_auroc(n_sets=20, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(n_sets):
        m = int(rng.integers(2, 200))
        t = np.where(np.arange(m) % 2 == 0, 1, -1)
        s = rng.integers(0, 10, m).astype(float)
        mismatches += auroc(s, t) != pairwise_auroc(s, t)
    return CheckResult("auroc_vs_pairwise", mismatches == 0, f"{mismatches} mismatches")


def run_all(seed=0, gram=None) -> list:
    results = [check_simulator(seed=seed), check_kernels(seed=seed), check_smo(seed=seed),
               check_pegasos(seed=seed), check_gradients(seed=seed), check_auroc(seed=seed)]
    if gram is not None:
        results.append(check_supplied_gram(gram))
    return results
