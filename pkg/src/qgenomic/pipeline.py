"""Sequence ingestion, k-mer vectorization, PCA, angle scaling and splitting."""
from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np

ALPHABET = frozenset("ACGTN")
_CODE = {"A": 0, "C": 1, "G": 2, "T": 3}
PCA_DIMS = 4


class DatasetError(ValueError):
    """Malformed or invalid sequence data."""


@dataclass
class RawDataset:
    sequences: list
    labels: list
    source: str = ""

    def __post_init__(self):
        if len(self.sequences) != len(self.labels):
            raise DatasetError(f"{len(self.sequences)} sequences but {len(self.labels)} labels")
        if not self.sequences:
            raise DatasetError("no records")

    def __len__(self):
        return len(self.sequences)

    def subset(self, idx) -> "RawDataset":
        return RawDataset([self.sequences[i] for i in idx], [self.labels[i] for i in idx], self.source)


@dataclass(frozen=True)
class PipelineConfig:
    kmer_k: int = 3
    angle_range: tuple = (0.0, math.pi)
    test_fraction: float = 0.25
    seed: int = 0
    subset_size: int | None = None
    pca_dims: int = PCA_DIMS

    def __post_init__(self):
        if not 1 <= int(self.kmer_k) <= 8:
            raise ValueError(f"kmer_k must be in [1, 8], got {self.kmer_k}")
        lo, hi = (float(v) for v in self.angle_range)
        if not lo < hi:
            raise ValueError(f"angle_range needs lo < hi, got {self.angle_range}")
        object.__setattr__(self, "angle_range", (lo, hi))
        if not 0.0 < float(self.test_fraction) < 1.0:
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.subset_size is not None and int(self.subset_size) < 4:
            raise ValueError(f"subset_size must be >= 4, got {self.subset_size}")
        if int(self.pca_dims) != PCA_DIMS:
            raise ValueError("pca_dims is fixed at 4")


def _validate(seq, lineno, source):
    seq = seq.strip().upper()
    if not seq:
        raise DatasetError(f"{source}:{lineno}: empty sequence")
    bad = set(seq) - ALPHABET
    if bad:
        raise DatasetError(f"{source}:{lineno}: unknown characters {''.join(sorted(bad))!r}")
    return seq


def _label(raw, lineno, source):
    try:
        lab = int(str(raw).strip())
    except ValueError:
        raise DatasetError(f"{source}:{lineno}: label {raw!r} is not an integer") from None
    if lab not in (0, 1):
        raise DatasetError(f"{source}:{lineno}: label {lab} outside {{0, 1}}")
    return lab


def _read_csv(path):
    seqs, labels = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatasetError(f"{path}: no records")
        cols = [h.strip().lower() for h in header]
        if "sequence" not in cols or "label" not in cols:
            raise DatasetError(f"{path}:1: header must contain 'sequence' and 'label', got {header}")
        si, li = cols.index("sequence"), cols.index("label")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(cols):
                raise DatasetError(f"{path}:{lineno}: expected {len(cols)} fields, got {len(row)}")
            seqs.append(_validate(row[si], lineno, path))
            labels.append(_label(row[li], lineno, path))
    return seqs, labels


def _read_fasta(path):
    seqs, labels = [], []
    header_line, label, chunks = None, None, []

    def flush():
        if header_line is None:
            return
        if not chunks:
            raise DatasetError(f"{path}:{header_line}: record has no sequence")
        seqs.append(_validate("".join(chunks), header_line, path))
        labels.append(label)

    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(">"):
                flush()
                header_line, chunks = lineno, []
                tokens = [t for t in line[1:].split() if t.startswith("label=")]
                if not tokens:
                    raise DatasetError(f"{path}:{lineno}: header lacks a label=<0|1> token")
                label = _label(tokens[0][len("label="):], lineno, path)
            else:
                if header_line is None:
                    raise DatasetError(f"{path}:{lineno}: sequence data before the first header")
                chunks.append(line)
        flush()
    return seqs, labels


def load_dataset(path, format=None) -> RawDataset:
    """Load a labelled corpus from CSV (``sequence,label``) or FASTA (``label=`` token)."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise DatasetError(f"dataset file not found: {path}")
    if format is None:
        format = "fasta" if path.lower().endswith((".fa", ".fasta", ".fna")) else "csv"
    format = format.lower()
    if format == "csv":
        seqs, labels = _read_csv(path)
    elif format == "fasta":
        seqs, labels = _read_fasta(path)
    else:
        raise DatasetError(f"unknown dataset format {format!r}")
    if not seqs:
        raise DatasetError(f"{path}: no records")
    return RawDataset(seqs, labels, path)


def read_sequences(path) -> list:
    """Sequences of a prediction input CSV; ``label`` is optional, empty files are allowed."""
    path = os.fspath(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        cols = [h.strip().lower() for h in header]
        if "sequence" not in cols:
            raise DatasetError(f"{path}:1: header must contain 'sequence'")
        si = cols.index("sequence")
        return [_validate(row[si], lineno, path)
                for lineno, row in enumerate(reader, start=2) if row and row[si].strip()]


def kmer_names(k: int) -> list:
    return ["".join(p) for p in itertools.product("ACGT", repeat=k)]


def vectorize_kmers(sequences, k: int = 3) -> np.ndarray:
    """Normalized k-mer counts, one column per k-mer in lexicographic ACGT order.

    Counts are divided by the number of windows ``len - k + 1``; windows
    containing N fall in no column.
    """
    if isinstance(sequences, RawDataset):
        sequences = sequences.sequences
    n_cols = 4 ** k
    out = np.zeros((len(sequences), n_cols))
    weights = 4 ** np.arange(k - 1, -1, -1)
    for r, seq in enumerate(sequences):
        if len(seq) < k:
            raise DatasetError(f"sequence {r} has length {len(seq)} < k={k}")
        codes = np.array([_CODE.get(ch, -1) for ch in seq], dtype=np.int64)
        win = np.lib.stride_tricks.sliding_window_view(codes, k)
        valid = (win >= 0).all(axis=1)
        idx = win[valid] @ weights
        out[r] = np.bincount(idx, minlength=n_cols) / win.shape[0]
    return out


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    rank_deficient: bool = False

    def to_dict(self) -> dict:
        return {
            "mean": [float(v) for v in self.mean],
            "components": [[float(v) for v in row] for row in self.components],
            "explained_variance": [float(v) for v in self.explained_variance],
            "rank_deficient": bool(self.rank_deficient),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        return cls(np.array(d["mean"]), np.array(d["components"]),
                   np.array(d["explained_variance"]), bool(d.get("rank_deficient", False)))


def pca_fit(X, n_components: int = PCA_DIMS) -> PcaModel:
    """Top principal directions of the sample covariance via ``eigh``.

    Each component is signed so its largest-magnitude coordinate is
    positive. When the data rank is below ``n_components`` the remaining
    axes are zero-variance directions and ``rank_deficient`` is set.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 5 or X.shape[1] < n_components:
        raise ValueError(f"PCA needs at least 5 rows and {n_components} columns, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("PCA input must be finite")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (X.shape[0] - 1)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals, kind="stable")[::-1][:n_components]
    vals = vals[order]
    comps = vecs[:, order].T.copy()
    scale = max(float(vals[0]), 1.0) if vals.size else 1.0
    tiny = vals <= 1e-12 * scale
    vals = np.where(tiny, 0.0, vals)
    for r in range(comps.shape[0]):
        j = int(np.argmax(np.abs(comps[r])))
        if comps[r, j] < 0:
            comps[r] = -comps[r]
    return PcaModel(mean, comps, vals, bool(tiny.any()))


def pca_transform(model: PcaModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.mean.shape[0]:
        raise ValueError(f"expected {model.mean.shape[0]} columns, got {X.shape}")
    return (X - model.mean) @ model.components.T


@dataclass(frozen=True)
class AngleScaler:
    col_min: np.ndarray
    col_max: np.ndarray
    lo: float = 0.0
    hi: float = math.pi

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if not np.all(np.isfinite(X)):
            raise ValueError("cannot scale non-finite values")
        span = self.col_max - self.col_min
        const = span <= 0
        safe = np.where(const, 1.0, span)
        out = self.lo + (X - self.col_min) / safe * (self.hi - self.lo)
        out[:, const] = 0.5 * (self.lo + self.hi)
        return np.clip(out, self.lo, self.hi)

    def to_dict(self) -> dict:
        return {"min": [float(v) for v in self.col_min], "max": [float(v) for v in self.col_max],
                "lo": float(self.lo), "hi": float(self.hi)}

    @classmethod
    def from_dict(cls, d: dict) -> "AngleScaler":
        return cls(np.array(d["min"]), np.array(d["max"]), float(d["lo"]), float(d["hi"]))


def scale_to_angles(X, angle_range=(0.0, math.pi), fit_stats: AngleScaler | None = None):
    """Affine per-column map of the training [min, max] onto ``angle_range``.

    Returns ``(scaled, scaler)``. Constant columns go to the midpoint;
    values outside the fitted range (unseen data) are clamped.
    """
    X = np.asarray(X, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError("cannot scale non-finite values")
    if fit_stats is None:
        lo, hi = angle_range
        fit_stats = AngleScaler(X.min(axis=0), X.max(axis=0), float(lo), float(hi))
    return fit_stats.transform(X), fit_stats


def stratified_split(labels, test_fraction: float = 0.25, seed: int = 0):
    """Seeded per-class shuffle; returns sorted ``(train_idx, test_idx)``.

    Each class contributes ``round(n_c * test_fraction)`` test samples,
    kept between 1 and ``n_c - 1``.
    """
    y = np.asarray(labels)
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    classes = np.unique(y)
    if classes.shape[0] < 2:
        raise DatasetError("stratified split needs both classes")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in classes:
        idx = np.flatnonzero(y == c)
        if idx.shape[0] < 2:
            raise DatasetError(f"class {c} has fewer than 2 samples")
        idx = rng.permutation(idx)
        n_test = min(max(int(round(idx.shape[0] * test_fraction)), 1), idx.shape[0] - 1)
        test.append(idx[:n_test])
        train.append(idx[n_test:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def subsample(labels, size: int, seed: int) -> np.ndarray:
    """Class-balanced seeded subset of ``size`` indices (sorted)."""
    y = np.asarray(labels)
    if size >= y.shape[0]:
        return np.arange(y.shape[0])
    rng = np.random.default_rng(seed)
    classes = np.unique(y)
    per = [size // classes.shape[0] + (1 if i < size % classes.shape[0] else 0)
           for i in range(classes.shape[0])]
    out = []
    for c, n in zip(classes, per):
        idx = np.flatnonzero(y == c)
        out.append(rng.permutation(idx)[:n])
    return np.sort(np.concatenate(out))


@dataclass
class PreparedData:
    """Everything a training run needs, plus the fitted transforms for prediction."""

    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    train_idx: np.ndarray
    test_idx: np.ndarray
    pca: PcaModel
    scaler: AngleScaler
    kmer_k: int
    scores: np.ndarray = field(repr=False, default=None)
    labels: np.ndarray = field(repr=False, default=None)

    def transforms_dict(self) -> dict:
        return {"kmer_k": self.kmer_k, "pca": self.pca.to_dict(), "scaler": self.scaler.to_dict()}


def prepare(dataset: RawDataset, config: PipelineConfig) -> PreparedData:
    """Subset, split, vectorize, fit PCA and scaling on the training part only."""
    labels = np.asarray(dataset.labels)
    keep = np.arange(len(dataset))
    if config.subset_size is not None:
        keep = subsample(labels, int(config.subset_size), config.seed)
    ds = dataset.subset(keep)
    y = np.asarray(ds.labels)
    train_idx, test_idx = stratified_split(y, config.test_fraction, config.seed)
    V = vectorize_kmers(ds.sequences, config.kmer_k)
    pca = pca_fit(V[train_idx])
    scores = pca_transform(pca, V)
    X_train, scaler = scale_to_angles(scores[train_idx], config.angle_range)
    X_test, _ = scale_to_angles(scores[test_idx], fit_stats=scaler)
    return PreparedData(X_train, y[train_idx], X_test, y[test_idx], train_idx, test_idx,
                        pca, scaler, config.kmer_k, scores, y)


def apply_transforms(sequences, transforms: dict) -> np.ndarray:
    """Re-apply stored vectorization, PCA and scaling to new sequences."""
    k = int(transforms["kmer_k"])
    if not sequences:
        return np.zeros((0, PCA_DIMS))
    pca = PcaModel.from_dict(transforms["pca"])
    scaler = AngleScaler.from_dict(transforms["scaler"])
    return scaler.transform(pca_transform(pca, vectorize_kmers(sequences, k)))
