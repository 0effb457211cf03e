"""Command-line front end: demo-data, augment, validate, evaluate, cdss.

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .augment import augment_to_balance, generate_minority, synthetic_count
from .baselines import SmoteConfig
from .cdss import emit_cdss_report, feature_importance, write_report
from .cohort import generate_synthetic_cohort
from .config import ConfigError, RunConfig, load_config
from .copula import fit_bgcs
from .data import DataError, SeedSpec, class_balance, load_csv, save_csv, stratified_split
from .models.evaluation import ModelParams, multi_run_eval
from .models.metrics import confusion, recall
from .models.tree import TreeConfig, predict_tree, train_tree
from .numerics import NumericError
from .statval import correlation_fidelity, feature_test_suite, pca_overlay, univariate_summary

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")


def _seed(cfg: RunConfig) -> SeedSpec:
    return SeedSpec(cfg.seed, cfg.stream)


def _read_table(path, cfg: RunConfig):
    if path is None:
        raise UsageError("an input CSV is required")
    p = Path(path)
    if not p.exists():
        raise DataError(f"no such file: {p}")
    with p.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    label = cfg.label_column if cfg.label_column in [h.strip() for h in header] else None
    return load_csv(p, label_column=label, missing_as_zero=cfg.missing_as_zero)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _augment_options(cfg: RunConfig) -> dict:
    return {
        "bgcs": {"latent": cfg.latent, "eigen_floor": cfg.eigen_floor},
        "smote": {"smote": SmoteConfig(k=cfg.k, output_mode=cfg.smote_mode)},
        "gaussian-copula": {"eigen_floor": cfg.eigen_floor},
    }


def _model_params(cfg: RunConfig) -> ModelParams:
    return ModelParams(
        tree=TreeConfig(cfg.max_depth, cfg.min_samples_leaf, cfg.decision_threshold),
        n_trees=cfg.n_trees,
        features_per_split=cfg.features_per_split,
        l2=cfg.l2,
        learning_rate=cfg.learning_rate,
        max_iters=cfg.max_iters,
        tol=cfg.tol,
    )


def cmd_demo_data(cfg: RunConfig) -> dict:
    table, truth = generate_synthetic_cohort(cfg.rows, cfg.features, cfg.minority_ratio, _seed(cfg))
    out = _out_dir(cfg)
    save_csv(table, out / "cohort.csv", cfg.label_column)
    truth.save(out / "cohort_truth.json")
    bal = class_balance(table)
    return {"rows": table.n_rows, "features": table.n_features, "positives": bal.n_positive}


def cmd_augment(cfg: RunConfig) -> dict:
    train = _read_table(cfg.input, cfg)
    opts = _augment_options(cfg).get(cfg.method, {})
    augmented = augment_to_balance(train, cfg.method, cfg.target_ratio, _seed(cfg), **opts)
    out = _out_dir(cfg)
    save_csv(augmented, out / "augmented.csv", cfg.label_column)
    n_synth = augmented.n_rows - train.n_rows
    if cfg.method == "bgcs":
        doc = fit_bgcs(train.class_rows(1).without_labels(), cfg.eigen_floor, cfg.latent).to_json()
    else:
        doc = {}
    doc.update(method=cfg.method, n_synthetic=n_synth, target_ratio=cfg.target_ratio,
               seed=cfg.seed, stream=cfg.stream)
    if cfg.method == "smote":
        doc.update(k=cfg.k, output_mode=cfg.smote_mode)
    _write_json(out / "model.json", doc)
    bal = class_balance(augmented)
    return {"rows": augmented.n_rows, "synthetic": n_synth,
            "positives": bal.n_positive, "negatives": bal.n_negative}


def _validation_pair(cfg: RunConfig):
    real = _read_table(cfg.real or cfg.input, cfg)
    if cfg.synthetic:
        synth = _read_table(cfg.synthetic, cfg)
        if not synth.same_features(real):
            raise DataError("real and synthetic tables have different features")
    else:
        source = real.class_rows(1) if real.has_labels else real
        if real.has_labels:
            bal = class_balance(real)
            m = synthetic_count(bal.n_positive, bal.n_negative, cfg.target_ratio)
        else:
            m = real.n_rows
        opts = _augment_options(cfg).get(cfg.method, {})
        synth = generate_minority(cfg.method, source, max(m, 1), _seed(cfg), **opts)
        if not real.has_labels:
            synth = synth.without_labels()
    if not cfg.all_rows:
        if real.has_labels:
            real = real.class_rows(1)
        if synth.has_labels:
            synth = synth.class_rows(1)
    return real, synth


def cmd_validate(cfg: RunConfig) -> dict:
    real, synth = _validation_pair(cfg)
    summary = feature_test_suite(real, synth, cfg.alphas)
    out = _out_dir(cfg)
    doc = summary.to_json()
    doc["source"] = {"method": None if cfg.synthetic else cfg.method,
                     "real_rows": real.n_rows, "synthetic_rows": synth.n_rows}
    fid = correlation_fidelity(real, synth)
    doc["correlation_fidelity"] = {"max_abs_dev": fid["max_abs_dev"],
                                   "frobenius_dev": fid["frobenius_dev"],
                                   "excluded": fid["excluded"]}
    doc["univariate"] = [{k: rec[k] for k in ("feature", "p_real", "p_syn", "abs_diff")}
                         for rec in univariate_summary(real, synth)]
    overlay = pca_overlay(real, synth)
    doc["pca"] = {"explained_variance": [float(v) for v in overlay.explained_variance],
                  "ranges": overlay.ranges()}
    _write_json(out / "validity.json", doc)
    overlay.write_csv(out / "pca_overlay.csv")
    rows = summary.table_rows()
    return {"scenarios": summary.n_features * len(summary.alphas),
            "similar": rows["Number of Similar Instances"],
            "dissimilar": rows["Number of Dissimilar Instances"]}


def cmd_evaluate(cfg: RunConfig) -> dict:
    data = _read_table(cfg.input, cfg)
    summary = multi_run_eval(
        data, cfg.models, cfg.augmenters, cfg.n_runs, cfg.test_fraction, cfg.target_ratio,
        _seed(cfg), _model_params(cfg), _augment_options(cfg),
    )
    out = _out_dir(cfg)
    summary.write_json(out / "evaluation.json")
    summary.write_csv(out / "evaluation_long.csv")
    if summary.errors():
        print(f"{len(summary.errors())} cells failed; see evaluation.json", file=sys.stderr)
    return {m: {a: summary.median(m, a) for a in summary.augmenters} for m in summary.models}


def cmd_cdss(cfg: RunConfig) -> dict:
    data = _read_table(cfg.input, cfg)
    seed = _seed(cfg)
    params = _model_params(cfg)
    train, test = stratified_split(data, cfg.test_fraction, seed.child(0))
    augmented = augment_to_balance(train, "bgcs", cfg.target_ratio, seed.child(1),
                                   **_augment_options(cfg)["bgcs"])
    tree = train_tree(augmented, params.tree)
    deployed = recall(confusion(predict_tree(tree, test)["labels"], test.require_labels()))
    evaluation = multi_run_eval(data, ("decision-tree",), ("none", "bgcs"), cfg.n_runs,
                                cfg.test_fraction, cfg.target_ratio, seed.child(2), params,
                                _augment_options(cfg))
    report = emit_cdss_report(tree, feature_importance(tree), evaluation, cfg.top_k)
    report["evaluation"]["deployed_model_test_recall"] = deployed
    out = _out_dir(cfg)
    write_report(report, out / "cdss_report.json", out / "cdss_report.txt")
    return {"leaves": report["model_card"]["n_leaves"], "test_recall": deployed}


COMMANDS = {
    "demo-data": cmd_demo_data,
    "augment": cmd_augment,
    "validate": cmd_validate,
    "evaluate": cmd_evaluate,
    "cdss": cmd_cdss,
}


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in _csv_list(text)]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bgcs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON run configuration; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--stream", type=int)
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--label-column", dest="label_column")
        p.add_argument("--missing-as-zero", dest="missing_as_zero", action="store_true", default=None)

    p = sub.add_parser("demo-data", help="write a synthetic cohort CSV and its ground truth")
    common(p)
    p.add_argument("--rows", type=int)
    p.add_argument("--features", type=int)
    p.add_argument("--minority-ratio", dest="minority_ratio", type=float)

    def augment_flags(p):
        p.add_argument("--method")
        p.add_argument("--target-ratio", dest="target_ratio", type=float)
        p.add_argument("--k", type=int)
        p.add_argument("--smote-mode", dest="smote_mode")
        p.add_argument("--latent")
        p.add_argument("--eigen-floor", dest="eigen_floor", type=float)

    p = sub.add_parser("augment", help="balance a training CSV with synthetic positives")
    common(p)
    p.add_argument("--input")
    augment_flags(p)

    p = sub.add_parser("validate", help="compare real and synthetic minority rows")
    common(p)
    p.add_argument("--real")
    p.add_argument("--synthetic", help="synthetic CSV; omitted means generate with --method")
    augment_flags(p)
    p.add_argument("--alphas", type=_float_list)
    p.add_argument("--all-rows", dest="all_rows", action="store_true", default=None)

    def model_flags(p):
        p.add_argument("--input")
        p.add_argument("--n-runs", dest="n_runs", type=int)
        p.add_argument("--test-fraction", dest="test_fraction", type=float)
        p.add_argument("--target-ratio", dest="target_ratio", type=float)
        p.add_argument("--max-depth", dest="max_depth", type=int)
        p.add_argument("--min-samples-leaf", dest="min_samples_leaf", type=int)
        p.add_argument("--n-trees", dest="n_trees", type=int)
        p.add_argument("--max-iters", dest="max_iters", type=int)
        p.add_argument("--latent")

    p = sub.add_parser("evaluate", help="multi-run recall comparison")
    common(p)
    model_flags(p)
    p.add_argument("--models", type=_csv_list)
    p.add_argument("--augmenters", type=_csv_list)
    p.add_argument("--k", type=int)
    p.add_argument("--smote-mode", dest="smote_mode")

    p = sub.add_parser("cdss", help="decision-tree rules and feature ranking report")
    common(p)
    model_flags(p)
    p.add_argument("--top-k", dest="top_k", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = load_config(args.config, overrides)
        result = COMMANDS[args.command](cfg)
    except (ConfigError, UsageError) as exc:
        print(f"bgcs {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"bgcs {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"bgcs {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"bgcs {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
