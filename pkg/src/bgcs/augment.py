"""Minority-class augmentation up to a target positive:negative ratio."""

from __future__ import annotations

import math

from .baselines import SmoteConfig, gaussian_copula_generate, random_oversample, smote_generate
from .copula import fit_bgcs, sample_bgcs
from .data import BinaryTable, DataError, SeedSpec, class_balance, concat_tables

AUGMENTERS = ("none", "bgcs", "smote", "gaussian-copula", "random-oversample")


def synthetic_count(n_pos: int, n_neg: int, target_ratio: float) -> int:
    """Rows needed so that positives / negatives reaches ``target_ratio``."""
    return int(math.ceil(target_ratio * n_neg - 1e-9)) - n_pos


def generate_minority(augmenter: str, minority: BinaryTable, m: int, seed: SeedSpec,
                      smote: SmoteConfig | None = None, latent: str = "pearson",
                      eigen_floor: float = 1e-8) -> BinaryTable:
    """Fit ``augmenter`` on minority rows only and draw m positives."""
    if augmenter == "bgcs":
        model = fit_bgcs(minority.without_labels(), eigen_floor, latent=latent)
        return sample_bgcs(model, m, seed, label=1)
    if augmenter == "smote":
        return smote_generate(minority, smote or SmoteConfig(), seed, n=m).with_labels(
            [1] * m)
    if augmenter == "gaussian-copula":
        return gaussian_copula_generate(minority, m, seed, eigen_floor).with_labels([1] * m)
    if augmenter == "random-oversample":
        return random_oversample(minority, m, seed)
    raise ValueError(f"unknown augmenter {augmenter!r}; choose from {AUGMENTERS[1:]}")


def augment_to_balance(train: BinaryTable, augmenter: str, target_ratio: float = 1.0,
                       seed: SeedSpec = SeedSpec(), **options) -> BinaryTable:
    """Append synthetic positives after the original rows, which are left untouched."""
    if augmenter == "none":
        return train
    bal = class_balance(train)
    if bal.n_positive == 0:
        raise DataError("minority class is empty")
    if bal.n_negative == 0:
        raise DataError("no negative rows to balance against")
    current = bal.n_positive / bal.n_negative
    if not current < target_ratio <= 1.0:
        raise ValueError(
            f"target_ratio must lie in ({current:.4f}, 1]; got {target_ratio}"
        )
    m = synthetic_count(bal.n_positive, bal.n_negative, target_ratio)
    if m <= 0:
        raise ValueError("target ratio already reached; nothing to generate")
    minority = train.class_rows(1)
    synth = generate_minority(augmenter, minority, m, seed, **options)
    return concat_tables([train, synth])
