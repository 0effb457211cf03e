"""Decision-support report: leaf rules, impurity-based feature ranking, text rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .models.evaluation import EvalSummary
from .models.forest import Forest
from .models.tree import TrainedTree, TreeNode

LE, GT = "<=0.5", ">0.5"
DISCLAIMER = (
    "This report is an auxiliary decision aid derived from a statistical model. "
    "It is not a substitute for clinical judgment, and every flagged case needs "
    "review by a qualified clinician."
)


@dataclass(frozen=True)
class DecisionRule:
    conditions: tuple  # ((feature_name, LE | GT), ...)
    class1_probability: float
    support: int

    def matches(self, x: np.ndarray, index: dict) -> np.ndarray:
        ok = np.ones(len(x), dtype=bool)
        for name, pred in self.conditions:
            col = x[:, index[name]] > 0.5
            ok &= col if pred == GT else ~col
        return ok

    def describe(self) -> str:
        body = " AND ".join(f"{n} {p}" for n, p in self.conditions) or "always"
        return f"IF {body} THEN P(positive) = {self.class1_probability:.3f} (n={self.support})"

    def to_json(self) -> dict:
        return {"conditions": [{"feature": n, "predicate": p} for n, p in self.conditions],
                "probability": self.class1_probability, "support": self.support}


def extract_rules(tree: TrainedTree) -> list[DecisionRule]:
    """One rule per leaf, in left-to-right leaf order."""
    names = tree.feature_names
    rules = []

    def walk(node: TreeNode, path):
        if node.is_leaf:
            rules.append(DecisionRule(tuple(path), node.class1_probability, node.sample_count))
            return
        name = names[node.feature]
        walk(node.left, path + [(name, LE)])
        walk(node.right, path + [(name, GT)])

    walk(tree.root, [])
    return rules


def predict_with_rules(rules: list[DecisionRule], feature_names, x) -> np.ndarray:
    """Probability lookup through the rule table; every row must match exactly one rule."""
    x = np.asarray(x)
    index = {n: j for j, n in enumerate(feature_names)}
    out = np.full(len(x), np.nan)
    hits = np.zeros(len(x), dtype=int)
    for rule in rules:
        m = rule.matches(x, index)
        out[m] = rule.class1_probability
        hits += m
    if (hits != 1).any():
        raise AssertionError("rule table does not partition the input space")
    return out


def _tree_importance(root: TreeNode, n_features: int) -> np.ndarray:
    total = root.sample_count
    imp = np.zeros(n_features)
    for node in root.iter_nodes():
        if node.is_leaf:
            continue
        l, r = node.left, node.right
        child = (l.sample_count * l.gini + r.sample_count * r.gini) / node.sample_count
        imp[node.feature] += node.sample_count / total * (node.gini - child)
    return imp


def feature_importance(model: TrainedTree | Forest) -> list[tuple[str, float]]:
    """Mean decrease in impurity, normalised to sum to one; empty when nothing splits."""
    names = model.feature_names
    if isinstance(model, Forest):
        per_tree = []
        for t in model.trees:
            raw = _tree_importance(t.root, len(names))
            if raw.sum() > 0:
                per_tree.append(raw / raw.sum())
        raw = np.mean(per_tree, axis=0) if per_tree else np.zeros(len(names))
    else:
        raw = _tree_importance(model.root, len(names))
    if raw.sum() <= 0:
        return []
    scores = raw / raw.sum()
    order = sorted(range(len(names)), key=lambda j: (-scores[j], j))
    return [(names[j], float(scores[j])) for j in order]


def emit_cdss_report(tree: TrainedTree, ranking, evaluation: EvalSummary | None = None,
                     top_k: int = 10, model_name: str = "decision-tree",
                     augmenter: str = "bgcs") -> dict:
    rules = sorted(extract_rules(tree), key=lambda r: -r.class1_probability)
    eval_doc = None
    if evaluation is not None:
        cell = evaluation.cell(model_name, augmenter)
        eval_doc = {
            "model": model_name,
            "augmenter": augmenter,
            "n_runs": evaluation.n_runs,
            "median_recall": cell["median"],
            "mean_recall": cell["mean"],
            "iqr": cell["iqr"],
            "baseline_median_recall": evaluation.median(model_name, "none"),
            "improvement_pct": evaluation.improvement(model_name, augmenter),
        }
    return {
        "model_card": {
            "model": model_name,
            "max_depth": tree.config.max_depth,
            "min_samples_leaf": tree.config.min_samples_leaf,
            "decision_threshold": tree.config.decision_threshold,
            "training_rows": tree.n_train,
            "n_features": tree.n_features,
            "depth": tree.depth(),
            "n_leaves": len(rules),
            "trivial": not ranking,
        },
        "importance": [{"feature": f, "score": s} for f, s in ranking if s > 0][:top_k],
        "rules": [r.to_json() for r in rules],
        "evaluation": eval_doc,
        "disclaimer": DISCLAIMER,
    }


def render_report(report: dict) -> str:
    card = report["model_card"]
    lines = ["DECISION SUPPORT REPORT", "=" * 23, ""]
    lines.append(f"Model: {card['model']}  depth={card['depth']}  leaves={card['n_leaves']}  "
                 f"trained on {card['training_rows']} rows x {card['n_features']} features")
    lines.append("")
    if not report["importance"]:
        lines.append("Trivial model: the tree has no splits, so no feature ranking exists.")
    else:
        lines.append(f"Top {len(report['importance'])} features (impurity decrease share):")
        for i, item in enumerate(report["importance"], 1):
            lines.append(f"  {i:2d}. {item['feature']:<24} {item['score']:.4f}")
    lines.append("")
    lines.append("Rules, highest risk first:")
    for r in report["rules"]:
        cond = " AND ".join(f"{c['feature']} {c['predicate']}" for c in r["conditions"]) or "always"
        lines.append(f"  P={r['probability']:.3f} n={r['support']:<5d} IF {cond}")
    ev = report.get("evaluation")
    if ev:
        lines.append("")
        lines.append(
            f"Recall over {ev['n_runs']} runs ({ev['augmenter']}-augmented training): "
            f"median {_fmt(ev['median_recall'])}, mean {_fmt(ev['mean_recall'])}, "
            f"IQR {_fmt(ev['iqr'])}; baseline median {_fmt(ev['baseline_median_recall'])}"
        )
    lines.append("")
    lines.append(report["disclaimer"])
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    return "n/a" if v is None else f"{v:.3f}"


def write_report(report: dict, json_path, text_path=None) -> None:
    Path(json_path).write_text(json.dumps(report, indent=2) + "\n")
    if text_path is not None:
        Path(text_path).write_text(render_report(report))


REPORT_SCHEMA = {
    "type": "object",
    "required": ["model_card", "importance", "rules", "evaluation", "disclaimer"],
    "properties": {
        "model_card": {"type": "object"},
        "importance": {
            "type": "array",
            "items": {"type": "object", "required": ["feature", "score"],
                      "properties": {"feature": {"type": "string"},
                                     "score": {"type": "number", "minimum": 0}}},
        },
        "rules": {
            "type": "array",
            "items": {"type": "object", "required": ["conditions", "probability", "support"],
                      "properties": {"probability": {"type": "number", "minimum": 0, "maximum": 1},
                                     "support": {"type": "integer", "minimum": 1}}},
        },
        "evaluation": {"type": ["object", "null"]},
        "disclaimer": {"type": "string", "minLength": 1},
    },
}
