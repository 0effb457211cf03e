"""Binary dataset carrier, CSV I/O, stratified splitting and the seeding contract."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Malformed or inconsistent tabular input."""


@dataclass(frozen=True)
class SeedSpec:
    """A master seed plus a stream index.

    Every consumer draws from ``rng(*extra)``, which maps
    ``(master_seed, stream_index, *path, *extra)`` onto an independent numpy
    stream. ``child`` extends the path for nested consumers (run, cell, ...).
    """

    master_seed: int = 20240101
    stream_index: int = 0
    path: tuple = ()

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")

    def rng(self, *extra: int) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=int(self.master_seed) & 0xFFFFFFFFFFFFFFFF,
            spawn_key=(int(self.stream_index), *self.path, *(int(e) for e in extra)),
        )
        return np.random.default_rng(seq)

    def stream(self, index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, index)

    def child(self, *keys: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_index, self.path + tuple(int(k) for k in keys))


@dataclass(frozen=True)
class ClassBalance:
    n_positive: int
    n_negative: int

    @property
    def ratio(self) -> float:
        total = self.n_positive + self.n_negative
        return self.n_positive / total if total else 0.0


@dataclass(frozen=True, eq=False)
class BinaryTable:
    """Rows x features matrix over {0, 1} with feature names and optional labels.

    ``binary=False`` admits real-valued cells; only fractional SMOTE output
    uses it. Arrays are copied and frozen on construction.
    """

    values: np.ndarray
    feature_names: tuple[str, ...]
    labels: np.ndarray | None = None
    binary: bool = True
    _digest: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim == 1 and len(self.feature_names) == 1:
            vals = vals.reshape(-1, 1)
        if vals.ndim != 2:
            raise DataError(f"values must be 2-D, got shape {vals.shape}")
        names = tuple(str(n) for n in self.feature_names)
        if len(names) != vals.shape[1]:
            raise DataError(
                f"{len(names)} feature names for {vals.shape[1]} columns"
            )
        if any(not n for n in names):
            raise DataError("feature names must be non-empty")
        if len(set(names)) != len(names):
            raise DataError("feature names must be unique")
        if self.binary:
            if vals.size and not np.isin(vals, (0, 1)).all():
                raise DataError("binary table contains cells outside {0, 1}")
            vals = vals.astype(np.uint8)
        else:
            vals = vals.astype(np.float64)
            if not np.isfinite(vals).all():
                raise DataError("table contains non-finite cells")
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        labels = self.labels
        if labels is not None:
            labels = np.asarray(labels).reshape(-1)
            if len(labels) != vals.shape[0]:
                raise DataError(
                    f"{len(labels)} labels for {vals.shape[0]} rows"
                )
            if labels.size and not np.isin(labels, (0, 1)).all():
                raise DataError("labels must be 0 or 1")
            labels = labels.astype(np.uint8)
            labels.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "labels", labels)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise DataError("table has no labels")
        return self.labels

    def take(self, rows) -> "BinaryTable":
        rows = np.asarray(rows)
        labels = None if self.labels is None else self.labels[rows]
        return BinaryTable(self.values[rows], self.feature_names, labels, self.binary)

    def with_labels(self, labels) -> "BinaryTable":
        return BinaryTable(self.values, self.feature_names, labels, self.binary)

    def without_labels(self) -> "BinaryTable":
        return BinaryTable(self.values, self.feature_names, None, self.binary)

    def class_rows(self, label: int) -> "BinaryTable":
        return self.take(np.flatnonzero(self.require_labels() == label))

    def float_values(self) -> np.ndarray:
        return self.values.astype(np.float64)

    def digest(self) -> str:
        """SHA-256 over shape, names, cells and labels; used for leakage checks."""
        if not self._digest:
            h = hashlib.sha256()
            h.update(repr((self.values.shape, self.feature_names, self.binary)).encode())
            h.update(self.values.tobytes())
            if self.labels is not None:
                h.update(self.labels.tobytes())
            self._digest.append(h.hexdigest())
        return self._digest[0]

    def same_features(self, other: "BinaryTable") -> bool:
        return self.feature_names == other.feature_names


def concat_tables(tables: Sequence[BinaryTable]) -> BinaryTable:
    first = tables[0]
    for t in tables[1:]:
        if not t.same_features(first):
            raise DataError("cannot concatenate tables with different features")
    with_labels = [t.has_labels for t in tables]
    if any(with_labels) and not all(with_labels):
        raise DataError("cannot mix labelled and unlabelled tables")
    binary = all(t.binary for t in tables)
    values = np.vstack([t.values if binary else t.float_values() for t in tables])
    labels = np.concatenate([t.labels for t in tables]) if all(with_labels) else None
    return BinaryTable(values, first.feature_names, labels, binary)


def load_csv(path, label_column: str | None = None, missing_as_zero: bool = False) -> BinaryTable:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: missing header row") from None
        header = [h.strip() for h in header]
        seen = set()
        for h in header:
            if h in seen:
                raise DataError(f"{path}: duplicate header {h!r}")
            seen.add(h)
        if label_column is not None and label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found")
        rows = []
        for i, raw in enumerate(reader, start=1):
            if not raw:
                continue
            if len(raw) != len(header):
                raise DataError(
                    f"{path}: row {i} has {len(raw)} cells, expected {len(header)}"
                )
            parsed = []
            for col, cell in zip(header, raw):
                cell = cell.strip()
                if cell == "":
                    if not missing_as_zero:
                        raise DataError(f"{path}: missing value at (row {i}, col {col})")
                    parsed.append(0)
                elif cell in ("0", "1"):
                    parsed.append(int(cell))
                else:
                    raise DataError(
                        f"{path}: non-binary cell {cell!r} at (row {i}, col {col})"
                    )
            rows.append(parsed)
    data = np.array(rows, dtype=np.uint8).reshape(len(rows), len(header))
    if label_column is None:
        return BinaryTable(data, tuple(header))
    j = header.index(label_column)
    keep = [c for c in range(len(header)) if c != j]
    return BinaryTable(
        data[:, keep], tuple(header[c] for c in keep), labels=data[:, j]
    )


def save_csv(table: BinaryTable, path, label_column: str | None = "label") -> None:
    """Write a table; labels go in a trailing column when present."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(table.feature_names)
    add_labels = table.has_labels and label_column is not None
    if add_labels:
        if label_column in header:
            raise DataError(f"label column {label_column!r} clashes with a feature")
        header.append(label_column)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        if table.binary:
            cells = table.values.astype(str)
        else:
            cells = np.vectorize(repr)(table.float_values())
        for i in range(table.n_rows):
            row = list(cells[i])
            if add_labels:
                row.append(str(int(table.labels[i])))
            fh.write(",".join(row) + "\n")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(
    table: BinaryTable, test_fraction: float, seed: SeedSpec
) -> tuple[BinaryTable, BinaryTable]:
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    labels = table.require_labels()
    rng = seed.rng()
    test_idx = []
    for cls in (0, 1):
        members = np.flatnonzero(labels == cls)
        if len(members) < 2:
            raise DataError(f"class {cls} has {len(members)} members; need at least 2")
        n_test = _round_half_up(len(members) * test_fraction)
        test_idx.append(rng.permutation(members)[:n_test])
    test_mask = np.zeros(table.n_rows, dtype=bool)
    test_mask[np.concatenate(test_idx)] = True
    return table.take(np.flatnonzero(~test_mask)), table.take(np.flatnonzero(test_mask))


def class_balance(table: BinaryTable) -> ClassBalance:
    labels = table.require_labels()
    n_pos = int(labels.sum())
    return ClassBalance(n_positive=n_pos, n_negative=int(len(labels) - n_pos))
