"""Acceptance gate: every criterion at its stated tolerance.

Each ``criterion_N`` returns ``(passed, detail)``. Under pytest the results
are also collected and printed as one PASS/FAIL line per criterion at the
end of the session; ``python3 tests/test_acceptance.py`` prints the same
lines directly.
"""
import csv
import functools
import io
import json
import math
import os
import sys
import tempfile
import time
from contextlib import redirect_stdout
from itertools import product

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import gate_matrix, pairwise_auroc  # noqa: E402
from qgenomic.cli import main  # noqa: E402
from qgenomic.feature_maps import KINDS, FeatureMapConfig  # noqa: E402
from qgenomic.kernel import check_kernel_matrix, cross_gram, gram_matrix  # noqa: E402
from qgenomic.metrics import ConfusionCounts, auroc, confusion, metrics  # noqa: E402
from qgenomic.pegasos import pegasos_decision, train_pegasos, verify_pegasos_bound  # noqa: E402
from qgenomic.qsvc import dual_objective, kkt_residual, qsvc_decision, sign, train_qsvc  # noqa: E402
from qgenomic.statevector import run_circuit  # noqa: E402
from qgenomic.synthetic import separable_blobs  # noqa: E402
from qgenomic.variational import (AnsatzConfig, VariationalModel, model_expectation,  # noqa: E402
                                  parameter_shift_gradient, train_variational)
from qgenomic.verify import _grid_dual_optimum, finite_difference_gradient, random_circuit, random_state  # noqa: E402

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
BENCH_CONFIG = os.path.join(ROOT, "configs", "benchmark.json")
RESULTS = {}


def record(n):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            t0 = time.perf_counter()
            ok, detail = fn()
            RESULTS[n] = (bool(ok), f"{detail} [{time.perf_counter() - t0:.1f}s]")
            return RESULTS[n]
        return wrapper
    return deco


@record(1)
def criterion_1():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_amp = worst_norm = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 4))
        circ = random_circuit(rng, n, int(rng.integers(1, 25)))
        psi = random_state(rng, n)
        ref = psi.amplitudes.copy()
        for g in circ.gates:
            ref = gate_matrix(g.kind, g.targets, g.effective_angle, n) @ ref
        out = run_circuit(circ, psi).amplitudes
        worst_amp = max(worst_amp, float(np.max(np.abs(out - ref))))
        worst_norm = max(worst_norm, abs(float(np.linalg.norm(out)) - 1.0))
    elapsed = time.perf_counter() - t0
    ok = worst_amp <= 1e-12 and worst_norm < 1e-10 and elapsed < 30
    return ok, f"500 circuits: max amp err {worst_amp:.1e}, norm drift {worst_norm:.1e}, {elapsed:.1f}s < 30s"


@record(2)
def criterion_2():
    t0 = time.perf_counter()
    xs = np.linspace(-math.pi, math.pi, 50)
    K = cross_gram(FeatureMapConfig("Z", 1), xs[:, None], xs[:, None])
    grid_err = float(np.max(np.abs(K - np.cos(xs[:, None] - xs[None, :]) ** 2)))
    rng = np.random.default_rng(202)
    min_eig, all_ok = math.inf, True
    for kind in KINDS:
        fm = FeatureMapConfig(kind, 4)
        for _ in range(50):
            rep = check_kernel_matrix(gram_matrix(fm, rng.uniform(0, math.pi, (20, 4))))
            all_ok &= rep["symmetric"] and rep["psd"]
            min_eig = min(min_eig, rep["min_eigenvalue"])
    elapsed = time.perf_counter() - t0
    ok = grid_err <= 1e-10 and all_ok and min_eig >= -1e-8 and elapsed < 60
    return ok, f"cos^2 grid err {grid_err:.1e}; 150 Gram matrices min eig {min_eig:.2e}; {elapsed:.1f}s < 60s"


@record(3)
def criterion_3():
    K = np.array([[1.0, -1.0], [-1.0, 1.0]])
    m = train_qsvc(K, np.array([1, -1]), C=10.0)
    fixture = float(max(np.max(np.abs(m.alphas - 0.5)), abs(m.bias)))
    rng = np.random.default_rng(303)
    worst_kkt = 0.0
    for i in range(20):
        fm = FeatureMapConfig(KINDS[i % 3], 4)
        X = rng.uniform(0, math.pi, (12, 4))
        y = np.where(rng.permutation(12) % 2 == 0, 1, -1)
        Kr = gram_matrix(fm, X)
        worst_kkt = max(worst_kkt, kkt_residual(train_qsvc(Kr, y, C=1.0, tol=1e-3, seed=i), Kr, y))
    worst_gap = 0.0
    for i in range(10):
        fm = FeatureMapConfig(KINDS[i % 3], 4)
        Kr = gram_matrix(fm, rng.uniform(0, math.pi, (3, 4)))
        y = np.array([1, -1, 1]) * (1 if i % 2 else -1)
        m3 = train_qsvc(Kr, y, C=1.0, tol=1e-6)
        worst_gap = max(worst_gap, abs(dual_objective(m3.alphas, Kr, m3.labels) - _grid_dual_optimum(Kr, m3.labels, 1.0, 0.001)))
    ok = fixture <= 1e-6 and worst_kkt <= 1e-3 and worst_gap <= 1e-3
    return ok, f"fixture err {fixture:.1e}; max KKT {worst_kkt:.1e} (20 problems); grid gap {worst_gap:.1e} (10 problems)"


@record(4)
def criterion_4():
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    fixtures = {"two-point": (np.array([[1.0, -1.0], [-1.0, 1.0]]), np.array([1, -1])),
                "ZZ 12-point": (gram_matrix(FeatureMapConfig("ZZ", 4), rng.uniform(0, math.pi, (12, 4))),
                                np.where(np.arange(12) % 2 == 0, 1, -1))}
    worst_ratio, holds = 0.0, True
    for (K, y), lam, T in product(fixtures.values(), (0.1, 0.5), (100, 1000)):
        rep = verify_pegasos_bound(K, y, lam, T, trials=20, seed=0)
        holds &= rep.holds
        worst_ratio = max(worst_ratio, rep.lhs / rep.rhs)
    elapsed = time.perf_counter() - t0
    ok = holds and elapsed < 60
    return ok, f"2 fixtures x 4 (lambda, T) x 20 seeds: worst lhs/rhs {worst_ratio:.3f}; {elapsed:.1f}s < 60s"


@record(5)
def criterion_5():
    rng = np.random.default_rng(505)
    worst = 0.0
    for i in range(100):
        n = int(rng.integers(1, 4))
        L = i % 3
        fm = FeatureMapConfig(KINDS[(i // 3) % 3], n)
        ans = AnsatzConfig(n, L)
        model = VariationalModel("VQC", fm, ans, rng.uniform(-math.pi, math.pi, ans.n_params))
        X = rng.uniform(0, math.pi, (4, n))
        y = rng.choice([-1, 1], 4)
        diff = parameter_shift_gradient(model, X, y) - finite_difference_gradient(model, X, y, h=1e-5)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst <= 1e-6, f"100 instances, all maps, L in {{0,1,2}}: max |PS - FD| {worst:.1e}"


@record(6)
def criterion_6():
    hand = metrics(ConfusionCounts(tp=2, fp=1, tn=3, fn=0))
    hand_ok = (hand.accuracy, hand.precision, hand.recall, hand.f1) == (5 / 6, 2 / 3, 1.0, 0.8)
    hand_ok &= confusion([1, -1], [1, -1]) == ConfusionCounts(1, 0, 1, 0)
    c = confusion([1, 1, 1], [1, -1, -1])
    hand_ok &= (c.tp, c.fp) == (1, 2)
    hand_ok &= auroc([1, 2, 3, 4], [-1, -1, 1, 1]) == 1.0 and auroc([0.5] * 4, [1, -1, 1, -1]) == 0.5
    rng = np.random.default_rng(606)
    mismatches = 0
    for i in range(50):
        m = int(rng.integers(2, 120))
        labels = np.where(np.arange(m) % 2 == 0, 1, -1)
        rng.shuffle(labels)
        scores = rng.integers(0, 12, m).astype(float) if i % 2 else rng.normal(size=m)
        mismatches += auroc(scores, labels) != pairwise_auroc(scores, labels)
    return hand_ok and mismatches == 0, f"hand values {'exact' if hand_ok else 'WRONG'}; AUROC mismatches {mismatches}/50"


@record(7)
def criterion_7():
    X, y, margin = separable_blobs(seed=0)
    Xtr, ytr, Xte, yte = X[:20], y[:20], X[20:], y[20:]
    parts, ok = [], margin > 0
    for kind in KINDS:
        fm = FeatureMapConfig(kind, 4)
        K, Kt = gram_matrix(fm, Xtr), cross_gram(fm, Xtr, Xte)
        accs = {
            "QSVC": np.mean(sign(qsvc_decision(train_qsvc(K, ytr), Kt)) == yte),
            "PEG": np.mean(sign(pegasos_decision(train_pegasos(K, ytr), Kt)) == yte),
        }
        for preset in ("VQC", "QNN"):
            vm = train_variational(preset, fm, None, Xtr, ytr, max_iters=100, seed=0)
            accs[preset] = np.mean(sign(model_expectation(vm, Xte)) == yte)
        ok &= accs["QSVC"] >= 0.95 and accs["PEG"] >= 0.95 and accs["VQC"] >= 0.80 and accs["QNN"] >= 0.80
        parts.append(f"{kind}: " + "/".join(f"{v:.2f}" for v in accs.values()))
    return ok, f"margin {margin:.2f}; test acc QSVC/PEG/VQC/QNN " + "; ".join(parts)


@functools.lru_cache(maxsize=None)
def benchmark_run(tag):
    out = tempfile.mkdtemp(prefix=f"qgenomic-bench-{tag}-")
    t0 = time.perf_counter()
    with redirect_stdout(io.StringIO()):
        rc = main(["benchmark", "--config", BENCH_CONFIG, "--out", out, "--no-timing"])
    return rc, out, time.perf_counter() - t0


def _rows(out):
    with open(os.path.join(out, "metrics.json")) as fh:
        return json.load(fh)["rows"]


@record(8)
def criterion_8():
    rc, out, elapsed = benchmark_run("a")
    rows = _rows(out)
    accs = [r["test"]["accuracy"] for r in rows if r["status"] == "OK"]
    ok = rc == 0 and len(rows) == 12 and len(accs) == 12 and all(0.40 <= a <= 0.70 for a in accs)
    ok &= elapsed < 900
    return ok, (f"{len(accs)}/12 cells OK; test acc range [{min(accs):.3f}, {max(accs):.3f}] "
                f"within [0.40, 0.70]: {sum(0.40 <= a <= 0.70 for a in accs)}/12; {elapsed:.1f}s < 900s")


@record(9)
def criterion_9():
    _, out, _ = benchmark_run("a")
    rows = [r for r in _rows(out) if r["status"] == "OK"]
    peg = [r["test"]["recall"] for r in rows if r["algorithm_key"] == "PEG_QSVC"]
    other = [r["test"]["recall"] for r in rows if r["algorithm_key"] != "PEG_QSVC"]
    ok = bool(peg) and min(peg) > max(other)
    return ok, (f"Pegasos recall {', '.join(f'{v:.2f}' for v in peg)} vs max other {max(other):.2f}; "
                f"min Pegasos recall {min(peg):.2f} (>= 0.90 expected)")


@record(10)
def criterion_10():
    _, out, _ = benchmark_run("a")
    hdir = os.path.join(out, "histories")
    worst, n, ok = -math.inf, 0, True
    for kind, preset in product(KINDS, ("VQC", "QNN")):
        path = os.path.join(hdir, f"{kind}_{preset}.csv")
        if not os.path.exists(path):
            ok = False
            continue
        with open(path) as fh:
            vals = [float(r["objective"]) for r in csv.DictReader(fh)]
        n += 1
        ok &= vals[-1] <= vals[0]
        worst = max(worst, vals[-1] - vals[0])
    return ok and n == 6, f"{n}/6 histories emitted; max (final - initial) objective {worst:.4f}"


@record(11)
def criterion_11():
    _, out_a, _ = benchmark_run("a")
    _, out_b, _ = benchmark_run("b")
    same = []
    for name in ("metrics.json", "results.csv", "table.txt"):
        with open(os.path.join(out_a, name), "rb") as a, open(os.path.join(out_b, name), "rb") as b:
            same.append(a.read() == b.read())
    return all(same), f"metrics.json/results.csv/table.txt byte-identical across two runs: {same}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_acceptance(criterion):
    ok, detail = criterion()
    assert ok, detail


def report_lines():
    return [f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for n, c in enumerate(CRITERIA, start=1):
        ok, detail = c()
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
