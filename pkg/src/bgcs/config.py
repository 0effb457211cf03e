"""Run configuration: a JSON manifest merged under command-line overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .augment import AUGMENTERS
from .cohort import DEFAULT_FEATURES, DEFAULT_MINORITY_RATIO, DEFAULT_ROWS
from .models.evaluation import MODELS
from .statval import DEFAULT_ALPHAS

DEFAULT_SEED = 20240101


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = DEFAULT_SEED
    stream: int = 0
    input: str | None = None
    real: str | None = None
    synthetic: str | None = None
    out_dir: str = "out"
    label_column: str = "label"
    missing_as_zero: bool = False
    # cohort
    rows: int = DEFAULT_ROWS
    features: int = DEFAULT_FEATURES
    minority_ratio: float = DEFAULT_MINORITY_RATIO
    # augmentation
    method: str = "bgcs"
    target_ratio: float = 1.0
    k: int = 5
    smote_mode: str = "fractional"
    latent: str = "pearson"
    eigen_floor: float = 1e-8
    # validation
    alphas: list = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    all_rows: bool = False
    # evaluation
    test_fraction: float = 0.25
    n_runs: int = 25
    models: list = field(default_factory=lambda: list(MODELS))
    augmenters: list = field(default_factory=lambda: ["none", "bgcs"])
    max_depth: int | None = 6
    min_samples_leaf: int = 5
    decision_threshold: float = 0.5
    n_trees: int = 100
    features_per_split: int | None = None
    l2: float = 0.0
    learning_rate: float = 0.1
    max_iters: int = 5000
    tol: float = 1e-6
    # report
    top_k: int = 10

    def validate(self) -> "RunConfig":
        if self.method not in AUGMENTERS[1:]:
            raise ConfigError(f"unknown method {self.method!r}; choose from {AUGMENTERS[1:]}")
        for a in self.augmenters:
            if a not in AUGMENTERS:
                raise ConfigError(f"unknown augmenter {a!r}")
        for m in self.models:
            if m not in MODELS:
                raise ConfigError(f"unknown model {m!r}")
        if self.smote_mode not in ("fractional", "binarized"):
            raise ConfigError("smote_mode must be 'fractional' or 'binarized'")
        if self.latent not in ("pearson", "tetrachoric"):
            raise ConfigError("latent must be 'pearson' or 'tetrachoric'")
        if not 0 < self.test_fraction < 1:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if not 0 < self.target_ratio <= 1:
            raise ConfigError("target_ratio must lie in (0, 1]")
        if any(not 0 < a < 1 for a in self.alphas):
            raise ConfigError("every alpha must lie in (0, 1)")
        if self.n_runs < 1 or self.k < 1 or self.top_k < 1:
            raise ConfigError("n_runs, k and top_k must be positive")
        paths = [p for p in (self.input, self.real, self.synthetic) if p]
        if len(set(map(str, paths))) != len(paths):
            raise ConfigError("input paths must be distinct")
        return self

    def to_json(self) -> dict:
        return asdict(self)


def load_config(path: str | None, overrides: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    doc = {}
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        doc = {k.replace("-", "_"): v for k, v in doc.items()}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    doc.update({k: v for k, v in overrides.items() if v is not None and k in known})
    return RunConfig(**doc).validate()
