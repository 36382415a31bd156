"""Confusion counts, threshold metrics and rank-based AUROC. Positive class is +1."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auroc: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _signed(v):
    v = np.asarray(v)
    if v.size and np.all(np.isin(v, (0, 1))):
        return np.where(v == 1, 1, -1)
    if not np.all(np.isin(v, (-1, 1))):
        raise ValueError("labels must be in {0, 1} or {-1, +1}")
    return v.astype(int)


def confusion(predictions, labels) -> ConfusionCounts:
    p = _signed(predictions)
    t = _signed(labels)
    if p.shape != t.shape or p.ndim != 1:
        raise ValueError(f"length mismatch: {p.shape} vs {t.shape}")
    if p.size == 0:
        raise ValueError("cannot build a confusion matrix from empty vectors")
    return ConfusionCounts(
        tp=int(np.sum((p == 1) & (t == 1))),
        fp=int(np.sum((p == 1) & (t == -1))),
        tn=int(np.sum((p == -1) & (t == -1))),
        fn=int(np.sum((p == -1) & (t == 1))),
    )


def auroc(scores, labels) -> float:
    """Probability that a positive outscores a negative, ties counted 1/2.

    Computed from average ranks (Mann-Whitney U); the rank sums are
    half-integers, so the result equals the pairwise count exactly.
    """
    s = np.asarray(scores, dtype=np.float64)
    t = _signed(labels)
    if s.shape != t.shape:
        raise ValueError(f"length mismatch: {s.shape} vs {t.shape}")
    pos = t == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs at least one positive and one negative")
    ranks = rankdata(s, method="average")
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def metrics(counts: ConfusionCounts, scores=None, labels=None) -> MetricsReport:
    if (scores is None) != (labels is None):
        raise ValueError("scores and labels must be given together")
    total = counts.total
    if total == 0:
        raise ValueError("confusion counts are empty")
    acc = (counts.tp + counts.tn) / total
    prec = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    rec = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0
    auc = auroc(scores, labels) if scores is not None else None
    return MetricsReport(acc, prec, rec, f1, auc)


def accuracy(predictions, labels) -> float:
    p, t = _signed(predictions), _signed(labels)
    return float(np.mean(p == t))


TABLE_COLUMNS = ("Feature Map", "Algorithm", "Train Acc", "Test Acc", "Precision", "Recall", "F1", "AUROC")


def render_table(rows) -> str:
    """Aligned text table in percent; rows carry feature_map, algorithm, train_accuracy, test."""
    body = []
    for r in rows:
        if r.get("status") == "FAILED":
            body.append([r["feature_map"], r["algorithm"]] + ["FAILED"] * 6)
            continue
        t = r["test"]
        cells = [r["train_accuracy"], t["accuracy"], t["precision"], t["recall"], t["f1"], t["auroc"]]
        body.append([r["feature_map"], r["algorithm"]] + [f"{100 * v:.2f}" for v in cells])
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h)
              for i, h in enumerate(TABLE_COLUMNS)]
    fmt = lambda row: " | ".join(c.ljust(w) if i < 2 else c.rjust(w)
                                 for i, (c, w) in enumerate(zip(row, widths)))
    lines = [fmt(TABLE_COLUMNS), "-+-".join("-" * w for w in widths)]
    lines += [fmt(row) for row in body]
    return "\n".join(lines) + "\n"
