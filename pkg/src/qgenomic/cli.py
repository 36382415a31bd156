"""``qgenomic`` command line.

Subcommands: train, predict, benchmark, kernel, verify, pairplot-data.
Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import runner
from .feature_maps import KINDS, FeatureMapConfig
from .kernel import gram_matrix, read_gram_csv, write_gram_csv
from .metrics import render_table
from .pipeline import DatasetError, prepare, read_sequences
from .verify import run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _out_dir(cfg):
    os.makedirs(cfg["output_dir"], exist_ok=True)
    return cfg["output_dir"]


def _config(args, required=True):
    if args.config is None:
        if required:
            raise runner.ConfigError("--config: a run config file is required")
        return None
    return runner.load_config(args.config, seed=args.seed, out=args.out)


def cmd_train(args):
    cfg = _config(args)
    if len(cfg["feature_maps"]) != 1 or len(cfg["algorithms"]) != 1:
        raise runner.ConfigError("feature_maps/algorithms: train needs exactly one feature map and one algorithm")
    prepared = prepare(runner.load_run_dataset(cfg), runner.pipeline_config(cfg))
    fm = FeatureMapConfig.from_dict(cfg["feature_maps"][0])
    algo = cfg["algorithms"][0]
    model, _, info = runner.train_cell(prepared, fm, algo, cfg["seed"])
    out = _out_dir(cfg)
    path = os.path.join(out, "model.json")
    runner.write_json(path, runner.model_artifact(algo["name"], model, prepared, cfg))
    runner.write_json(os.path.join(out, "config.resolved.json"), cfg)
    if not info["converged"]:
        print(f"warning: {algo['name']} did not converge within its iteration budget", file=sys.stderr)
    print(f"training accuracy: {info['train_accuracy']:.4f}")
    print(f"model written to {path}")
    return EXIT_OK


def cmd_predict(args):
    if not args.model or not args.input:
        raise runner.ConfigError("predict: --model and --input are required")
    try:
        seqs = read_sequences(args.input)
    except FileNotFoundError:
        raise runner.ConfigError(f"--input: file not found: {args.input}") from None
    scores, labels = runner.predict_sequences(args.model, seqs)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "predictions.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sequence", "score", "label"])
        for s, sc, lab in zip(seqs, scores, labels):
            w.writerow([s, f"{sc:.17g}", int(lab)])
    print(f"{len(seqs)} predictions written to {path}")
    return EXIT_OK


def _write_histories(out, artifacts):
    hdir = os.path.join(out, "histories")
    os.makedirs(hdir, exist_ok=True)
    for key, (_, hist) in sorted(artifacts.items()):
        if hist is None:
            continue
        with open(os.path.join(hdir, f"{key}.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "objective"])
            w.writerows((t, f"{v:.17g}") for t, v in hist)


def cmd_benchmark(args):
    cfg = _config(args)
    timing = not args.no_timing
    rows, artifacts, prepared = runner.run_benchmark(cfg, timing=timing)
    out = _out_dir(cfg)
    mdir = os.path.join(out, "models")
    os.makedirs(mdir, exist_ok=True)
    for row in rows:
        if row["key"] in artifacts:
            row["model_path"] = os.path.join("models", f"{row['key']}.json")
            runner.write_json(os.path.join(out, row["model_path"]), artifacts[row["key"]][0])
        else:
            row["model_path"] = None
    _write_histories(out, artifacts)
    runner.write_json(os.path.join(out, "config.resolved.json"), cfg)
    split = {"n_train": int(prepared.X_train.shape[0]), "n_test": int(prepared.X_test.shape[0])}
    runner.write_json(os.path.join(out, "results.json"), {"split": split, "rows": rows})
    # metrics.json never carries wall time, so it is byte-stable per seed
    runner.write_json(os.path.join(out, "metrics.json"),
                      {"split": split, "rows": [{k: v for k, v in r.items() if k != "wall_time_s"} for r in rows]})
    with open(os.path.join(out, "results.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["feature_map", "algorithm", "status", "train_accuracy", "accuracy", "precision",
                    "recall", "f1", "auroc", "converged", "wall_time_s", "model_path"])
        for r in rows:
            t = r.get("test", {})
            w.writerow([r["feature_map"], r["algorithm"], r["status"], r.get("train_accuracy", ""),
                        *(t.get(k, "") for k in ("accuracy", "precision", "recall", "f1", "auroc")),
                        r.get("converged", ""), "" if r["wall_time_s"] is None else r["wall_time_s"],
                        r["model_path"] or ""])
    table = render_table(rows)
    with open(os.path.join(out, "table.txt"), "w") as fh:
        fh.write(table)
    print(table, end="")
    print(f"results written to {out}")
    return EXIT_OK


def _read_feature_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except FileNotFoundError:
        raise runner.ConfigError(f"--features: file not found: {path}") from None
    try:
        float(rows[0][0])
    except (ValueError, IndexError):
        rows = rows[1:]  # header
    try:
        return np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise runner.ConfigError(f"--features: non-numeric value in {path}: {exc}") from None


def cmd_kernel(args):
    cfg = _config(args, required=args.features is None)
    if args.features is not None:
        X = _read_feature_csv(args.features)
        if X.ndim != 2 or X.shape[0] == 0:
            raise runner.ConfigError("--features: no feature rows found")
        if cfg is not None:
            fm = FeatureMapConfig.from_dict(cfg["feature_maps"][0])
        else:
            fm = FeatureMapConfig(args.map, X.shape[1])
        if X.shape[1] != fm.n_qubits:
            raise runner.ConfigError(f"--features: {X.shape[1]} columns but the map has {fm.n_qubits} qubits")
    else:
        fm = FeatureMapConfig.from_dict(cfg["feature_maps"][0])
        X = prepare(runner.load_run_dataset(cfg), runner.pipeline_config(cfg)).X_train
    out = args.out or (cfg["output_dir"] if cfg else ".")
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "gram.csv")
    write_gram_csv(path, gram_matrix(fm, X))
    print(f"{X.shape[0]}x{X.shape[0]} {fm.display_name} Gram matrix written to {path}")
    return EXIT_OK


def cmd_verify(args):
    gram = None
    if args.gram is not None:
        try:
            gram = read_gram_csv(io.StringIO(sys.stdin.read()) if args.gram == "-" else args.gram)
        except (OSError, ValueError) as exc:
            raise runner.ConfigError(f"--gram: {exc}") from None
    results = run_all(seed=0 if args.seed is None else args.seed, gram=gram)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_pairplot(args):
    cfg = _config(args)
    prepared = prepare(runner.load_run_dataset(cfg), runner.pipeline_config(cfg))
    out = _out_dir(cfg)
    path = os.path.join(out, "pairplot.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"PC{i + 1}" for i in range(prepared.scores.shape[1])] + ["label"])
        for row, lab in zip(prepared.scores, prepared.labels):
            w.writerow([f"{v:.17g}" for v in row] + [int(lab)])
    print(f"{prepared.scores.shape[0]} rows written to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run config JSON")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--out", help="output directory (overrides output_dir)")
    common.add_argument("--no-timing", action="store_true", help="write null wall times")

    p = argparse.ArgumentParser(prog="qgenomic", description="Quantum-kernel and variational classifiers "
                                                             "for k-mer encoded DNA sequences.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("train", parents=[common], help="train one (feature map, algorithm) pair")
    pr = sub.add_parser("predict", parents=[common], help="score sequences with a trained model")
    pr.add_argument("--model", help="model JSON written by train or benchmark")
    pr.add_argument("--input", help="CSV or FASTA of sequences (labels optional)")
    sub.add_parser("benchmark", parents=[common], help="run the full map x algorithm grid")
    k = sub.add_parser("kernel", parents=[common], help="write a Gram matrix CSV")
    k.add_argument("--features", help="CSV of angle features, one row per point")
    k.add_argument("--map", default="Z", choices=KINDS, help="feature map when no config is given")
    v = sub.add_parser("verify", parents=[common], help="run the property checks")
    v.add_argument("--gram", help="also check a Gram matrix CSV ('-' reads stdin)")
    sub.add_parser("pairplot-data", parents=[common], help="write PCA scores and labels as CSV")
    return p


COMMANDS = {"train": cmd_train, "predict": cmd_predict, "benchmark": cmd_benchmark,
            "kernel": cmd_kernel, "verify": cmd_verify, "pairplot-data": cmd_pairplot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (runner.ConfigError, DatasetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
