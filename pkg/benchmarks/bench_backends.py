"""Time the compiled kernels against the numpy fallback on the same inputs.

    python3 benchmarks/bench_backends.py [--repeat 5] [--json out.json]
"""
import argparse
import json
import math
import timeit

import numpy as np

from qgenomic import _backend
from qgenomic.feature_maps import FeatureMapConfig, program
from qgenomic.kernel import gram_matrix
from qgenomic.pegasos import sample_indices
from qgenomic.verify import random_circuit


def cases(seed=0):
    rng = np.random.default_rng(seed)
    codes, q0, q1, phis = program(FeatureMapConfig("PAULI", 4, repetitions=2), rng.uniform(0, math.pi, (160, 4)))
    encode_states = np.zeros((160, 16), dtype=complex)
    encode_states[:, 0] = 1

    circ = random_circuit(rng, 10, 200)
    c_codes, c_q0, c_q1, c_phis = circ.program()
    deep_state = np.zeros((1, 1 << 10), dtype=complex)
    deep_state[0, 0] = 1

    K = gram_matrix(FeatureMapConfig("ZZ", 4), rng.uniform(0, math.pi, (120, 4)))
    y = np.where(rng.permutation(120) % 2 == 0, 1.0, -1.0)
    stream = rng.integers(0, 2**31 - 1, 512)
    idx = sample_indices(120, 20000, seed)

    return {
        "encode 160 x PAULI(4q, 2 reps)":
            lambda b: _backend.apply_program(encode_states.copy(), codes, q0, q1, phis, backend=b),
        "random circuit 10q x 200 gates":
            lambda b: _backend.apply_program(deep_state.copy(), c_codes, c_q0, c_q1, c_phis[None, :], backend=b),
        "SMO 120 points, tol 1e-3":
            lambda b: _backend.smo_solve(K, y, 1.0, 1e-3, 200 * 120, True, stream, backend=b)[0],
        "Pegasos 120 points, T=20000":
            lambda b: _backend.pegasos_run(K, y, 0.01, idx, backend=b)[0],
    }


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", help="also write results to this file")
    args = p.parse_args()
    if _backend._core is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    rows = []
    print(f"{'case':34} {'python ms':>10} {'cython ms':>10} {'speedup':>8} {'max diff':>9}")
    for name, fn in cases().items():
        out = {b: fn(b) for b in ("python", "cython")}
        diff = float(np.max(np.abs(np.asarray(out["python"]) - np.asarray(out["cython"]))))
        t = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) * 1e3 for b in out}
        rows.append({"case": name, "python_ms": t["python"], "cython_ms": t["cython"],
                     "speedup": t["python"] / t["cython"], "max_abs_diff": diff})
        print(f"{name:34} {t['python']:10.2f} {t['cython']:10.2f} {t['python'] / t['cython']:7.1f}x {diff:9.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
