"""Run configuration, per-cell training and model artifacts for the CLI.

A run config is a JSON object::

    {
      "dataset": {"path": "corpus.csv", "format": "csv"},
      "pipeline": {"kmer_k": 3, "angle_range": [0, 3.141592653589793],
                   "test_fraction": 0.25, "subset_size": 160},
      "feature_maps": [{"kind": "Z", "n_qubits": 4}],
      "algorithms": [{"name": "QSVC", "C": 1.0}],
      "seed": 0,
      "output_dir": "runs/example"
    }

``dataset.path`` is resolved relative to the config file; the special value
``builtin:synthetic`` selects the packaged stand-in corpus. Every omitted
hyperparameter is filled with its default and echoed into the outputs.
"""
from __future__ import annotations

import copy
import json
import math
import os
import time

import numpy as np

from . import pegasos as peg
from . import qsvc as qs
from . import variational as var
from .feature_maps import FeatureMapConfig
from .kernel import cross_gram, gram_matrix
from .metrics import accuracy, confusion, metrics
from .pipeline import PipelineConfig, apply_transforms, load_dataset, prepare
from .synthetic import bundled_path

MODEL_FORMAT = "qgenomic-model/1"
ALGORITHMS = ("QSVC", "PEG_QSVC", "VQC", "QNN")
ALGORITHM_DISPLAY = {"QSVC": "QSVM", "PEG_QSVC": "Peg-QSVM", "VQC": "VQC", "QNN": "QNN"}
ALGORITHM_DEFAULTS = {
    "QSVC": {"C": qs.DEFAULT_C, "tol": qs.DEFAULT_TOL, "max_passes": qs.DEFAULT_MAX_PASSES},
    "PEG_QSVC": {"lambda": peg.DEFAULT_LAMBDA, "T": peg.DEFAULT_STEPS},
    "VQC": {"lr": var.DEFAULT_LR, "max_iters": var.DEFAULT_MAX_ITERS, "eps": var.DEFAULT_EPS,
            "layers": var.PRESETS["VQC"]},
    "QNN": {"lr": var.DEFAULT_LR, "max_iters": var.DEFAULT_MAX_ITERS, "eps": var.DEFAULT_EPS,
            "layers": var.PRESETS["QNN"]},
}
PIPELINE_DEFAULTS = {"kmer_k": 3, "angle_range": [0.0, math.pi], "test_fraction": 0.25, "subset_size": 160}
FEATURE_MAP_DEFAULTS = {"n_qubits": 4, "repetitions": 1, "entanglement": "full_pairs", "hadamard_layer": True}


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


def _require(d, key, where):
    if not isinstance(d, dict) or key not in d or d[key] in (None, ""):
        raise ConfigError(f"{where}{key}: missing required field")
    return d[key]


def resolve_config(raw: dict, base_dir: str = ".", seed=None, out=None) -> dict:
    """Validate ``raw`` and fill every default; returns a new dict."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    cfg = copy.deepcopy(raw)
    ds = _require(cfg, "dataset", "")
    path = _require(ds, "path", "dataset.")
    if path != "builtin:synthetic" and not os.path.isabs(path):
        path = os.path.normpath(os.path.join(base_dir, path))
    fmt = str(ds.get("format", "fasta" if str(path).lower().endswith((".fa", ".fasta")) else "csv")).lower()
    if fmt not in ("csv", "fasta"):
        raise ConfigError(f"dataset.format: must be 'csv' or 'fasta', got {fmt!r}")
    cfg["dataset"] = {"path": path, "format": fmt}

    if seed is not None:
        cfg["seed"] = seed
    if "seed" not in cfg or cfg["seed"] is None:
        raise ConfigError("seed: missing required field (pass --seed or set it in the config)")
    try:
        cfg["seed"] = int(cfg["seed"])
    except (TypeError, ValueError):
        raise ConfigError(f"seed: must be an integer, got {cfg['seed']!r}") from None

    pipe = {**PIPELINE_DEFAULTS, **(cfg.get("pipeline") or {})}
    try:
        PipelineConfig(kmer_k=pipe["kmer_k"], angle_range=tuple(pipe["angle_range"]),
                       test_fraction=pipe["test_fraction"], seed=cfg["seed"], subset_size=pipe["subset_size"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"pipeline: {exc}") from None
    pipe["angle_range"] = [float(v) for v in pipe["angle_range"]]
    cfg["pipeline"] = pipe

    maps = cfg.get("feature_maps")
    if not maps:
        raise ConfigError("feature_maps: at least one feature map is required")
    resolved_maps = []
    for i, fm in enumerate(maps):
        fm = {**FEATURE_MAP_DEFAULTS, **fm}
        try:
            resolved_maps.append(FeatureMapConfig(**fm).to_dict())
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"feature_maps[{i}]: {exc}") from None
    cfg["feature_maps"] = resolved_maps

    algos = cfg.get("algorithms")
    if not algos:
        raise ConfigError("algorithms: at least one algorithm is required")
    resolved_algos = []
    for i, a in enumerate(algos):
        a = {"name": a} if isinstance(a, str) else dict(a)
        name = str(_require(a, "name", f"algorithms[{i}].")).upper().replace("-", "_")
        if name not in ALGORITHMS:
            raise ConfigError(f"algorithms[{i}].name: must be one of {ALGORITHMS}, got {a['name']!r}")
        unknown = set(a) - {"name"} - set(ALGORITHM_DEFAULTS[name])
        if unknown:
            raise ConfigError(f"algorithms[{i}]: unknown hyperparameter(s) {sorted(unknown)} for {name}")
        resolved_algos.append({**ALGORITHM_DEFAULTS[name], **a, "name": name})
    cfg["algorithms"] = resolved_algos

    if out is not None:
        cfg["output_dir"] = out
    cfg["output_dir"] = cfg.get("output_dir") or "runs"
    return cfg


def load_config(path, seed=None, out=None) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config: file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from None
    return resolve_config(raw, os.path.dirname(os.path.abspath(path)), seed, out)


def load_run_dataset(cfg):
    path = cfg["dataset"]["path"]
    if path == "builtin:synthetic":
        path = bundled_path()
    if not os.path.exists(path):
        raise ConfigError(f"dataset.path: file not found: {path}")
    return load_dataset(path, cfg["dataset"]["format"])


def pipeline_config(cfg) -> PipelineConfig:
    p = cfg["pipeline"]
    return PipelineConfig(kmer_k=p["kmer_k"], angle_range=tuple(p["angle_range"]),
                          test_fraction=p["test_fraction"], seed=cfg["seed"], subset_size=p["subset_size"])


def _cell_key(fm: FeatureMapConfig, algo: str) -> str:
    return f"{fm.kind}_{algo}"


def train_cell(prepared, fm: FeatureMapConfig, algo: dict, seed: int):
    """Train one (feature map, algorithm) pair; returns (model_dict, scores_fn, info)."""
    name = algo["name"]
    Xtr, ytr = prepared.X_train, qs.to_signed(prepared.y_train)
    info = {"converged": True, "history": None}
    if name in ("QSVC", "PEG_QSVC"):
        K = gram_matrix(fm, Xtr)
        if name == "QSVC":
            model = qs.train_qsvc(K, ytr, algo["C"], algo["tol"], algo["max_passes"], seed,
                                  feature_map=fm, train_features=Xtr)
            decision = qs.qsvc_decision
            info["converged"] = model.converged
        else:
            model = peg.train_pegasos(K, ytr, algo["lambda"], algo["T"], seed, feature_map=fm, train_features=Xtr)
            decision = peg.pegasos_decision
        train_scores = decision(model, K)

        def scores(X):
            return decision(model, cross_gram(fm, Xtr, X))
    else:
        ansatz = var.AnsatzConfig(fm.n_qubits, algo["layers"])
        model = var.train_variational(name, fm, ansatz, Xtr, ytr, algo["lr"], algo["max_iters"], algo["eps"], seed)
        info["converged"] = model.converged
        info["history"] = model.history
        train_scores = var.model_expectation(model, Xtr)

        def scores(X):
            return var.model_expectation(model, X)
    info["train_accuracy"] = accuracy(qs.sign(train_scores), ytr)
    return model, scores, info


def model_artifact(name, model, prepared, cfg) -> dict:
    return {
        "format": MODEL_FORMAT,
        "algorithm": name,
        "model": model.to_dict(),
        "transforms": prepared.transforms_dict(),
        "config": cfg,
    }


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model_artifact(path):
    try:
        with open(path) as fh:
            art = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"model: cannot read {path}: {exc}") from None
    if not isinstance(art, dict) or art.get("format") != MODEL_FORMAT:
        raise ConfigError(f"model: {path} is not a {MODEL_FORMAT} artifact")
    name = art["algorithm"]
    d = art["model"]
    try:
        if name == "QSVC":
            model = qs.QsvcModel.from_dict(d)
        elif name == "PEG_QSVC":
            model = peg.PegasosModel.from_dict(d)
        elif name in ("VQC", "QNN"):
            model = var.VariationalModel.from_dict(d)
        else:
            raise ConfigError(f"model: unknown algorithm {name!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"model: malformed {name} payload: {exc}") from None
    return name, model, art["transforms"]


def artifact_scores(name, model, X):
    if X.shape[0] == 0:
        return np.zeros(0)
    if name == "QSVC":
        return qs.qsvc_decision(model, cross_gram(model.feature_map, model.train_features, X))
    if name == "PEG_QSVC":
        return peg.pegasos_decision(model, cross_gram(model.feature_map, model.train_features, X))
    return var.model_expectation(model, X)


def predict_sequences(artifact_path, sequences):
    name, model, transforms = load_model_artifact(artifact_path)
    X = apply_transforms(sequences, transforms)
    fm = model.feature_map
    if X.shape[0] and X.shape[1] != fm.n_qubits:
        raise ConfigError(f"model: feature width {X.shape[1]} does not match {fm.n_qubits} qubits")
    s = np.atleast_1d(artifact_scores(name, model, X))
    return s, np.where(qs.sign(s) > 0, 1, 0) if s.size else np.zeros(0, dtype=int)


def run_benchmark(cfg, timing=True, log=print):
    """Every (map, algorithm) cell on one shared split; returns result rows."""
    prepared = prepare(load_run_dataset(cfg), pipeline_config(cfg))
    yte = qs.to_signed(prepared.y_test)
    rows, artifacts = [], {}
    for fm_d in cfg["feature_maps"]:
        fm = FeatureMapConfig.from_dict(fm_d)
        for algo in cfg["algorithms"]:
            key = _cell_key(fm, algo["name"])
            row = {"key": key, "feature_map": fm.display_name, "algorithm": ALGORITHM_DISPLAY[algo["name"]],
                   "feature_map_kind": fm.kind, "algorithm_key": algo["name"]}
            t0 = time.perf_counter()
            try:
                model, scores, info = train_cell(prepared, fm, algo, cfg["seed"])
                s = scores(prepared.X_test)
                rep = metrics(confusion(qs.sign(s), yte), s, yte)
                row.update(status="OK", train_accuracy=info["train_accuracy"], test=rep.to_dict(),
                           converged=bool(info["converged"]))
                artifacts[key] = (model_artifact(algo["name"], model, prepared, cfg), info["history"])
            except Exception as exc:  # a failing cell must not abort the grid
                row.update(status="FAILED", error=f"{type(exc).__name__}: {exc}")
            row["wall_time_s"] = round(time.perf_counter() - t0, 3) if timing else None
            log(f"{row['feature_map']:>16} {row['algorithm']:>9}  {row['status']}")
            rows.append(row)
    return rows, artifacts, prepared
