"""Synthetic stand-in for a coding-vs-intergenomic sequence corpus.

Every sequence draws its own GC content from a broad Beta distribution, a
nuisance factor that dominates the k-mer variance. Coding-like sequences
(label 1) additionally carry a weak GC boost at every third position
(codon wobble position); intergenomic-like sequences (label 0) do not. The
``signal`` knob sets the size of that boost, and rare N calls are
sprinkled in to exercise the ambiguity handling.
"""
from __future__ import annotations

import csv
import os

import numpy as np

BASES = np.array(list("ACGT"))
BUNDLED = os.path.join(os.path.dirname(__file__), "data", "synthetic_corpus.csv")
BUNDLED_PARAMS = {"n": 1000, "length": 200, "signal": 0.1, "n_rate": 0.001, "seed": 20240601}


def _probs(gc):
    return np.array([(1 - gc) / 2, gc / 2, gc / 2, (1 - gc) / 2])


def synthetic_corpus(n=1000, length=200, signal=0.1, n_rate=0.001, seed=0):
    """Return ``(sequences, labels)`` with balanced, shuffled labels."""
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % 2)
    seqs = []
    for lab in labels:
        gc = rng.beta(4.0, 4.0)
        base = rng.choice(4, size=length, p=_probs(gc))
        if lab == 1:
            gc3 = min(gc + signal, 0.98)
            wobble = np.arange(2, length, 3)
            base[wobble] = rng.choice(4, size=wobble.shape[0], p=_probs(gc3))
        chars = BASES[base]
        chars[rng.random(length) < n_rate] = "N"
        seqs.append("".join(chars))
    return seqs, [int(v) for v in labels]


def write_corpus(path, sequences, labels):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sequence", "label"])
        w.writerows(zip(sequences, labels))


def bundled_path() -> str:
    """Path of the packaged corpus, regenerating it if missing."""
    if not os.path.exists(BUNDLED):
        os.makedirs(os.path.dirname(BUNDLED), exist_ok=True)
        write_corpus(BUNDLED, *synthetic_corpus(**BUNDLED_PARAMS))
    return BUNDLED


SEPARATING_NORMAL = np.array([1.0, 1.0, -1.0, -1.0]) / 2.0


def separable_blobs(m=40, spread=0.1, gap=0.4, seed=0):
    """Two Gaussian clusters in [0, pi/2]^4 on either side of a hyperplane.

    Returns ``(X, y, margin)`` with alternating labels in {-1, +1};
    ``margin`` is the smallest signed distance to the hyperplane and is
    positive whenever the sample is linearly separable.
    """
    rng = np.random.default_rng(seed)
    center = np.full(4, np.pi / 4)
    y = np.where(np.arange(m) % 2 == 0, 1, -1)
    X = center + y[:, None] * gap * SEPARATING_NORMAL + rng.normal(0.0, spread, (m, 4))
    X = np.clip(X, 0.0, np.pi / 2)
    margin = float(np.min(y * ((X - center) @ SEPARATING_NORMAL)))
    return X, y, margin
