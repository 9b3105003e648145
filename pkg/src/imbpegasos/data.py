"""Labeled datasets, CSV ingestion, class weights and stratified splitting."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DegenerateDataError, InputError


class LabeledPoint(NamedTuple):
    features: np.ndarray
    label: int


@dataclass(frozen=True)
class ClassWeights:
    w_plus: float
    w_minus: float

    @classmethod
    def from_counts(cls, n_plus: int, n_minus: int) -> "ClassWeights":
        if n_plus <= 0 or n_minus <= 0:
            raise DegenerateDataError(f"both classes need rows (n_plus={n_plus}, n_minus={n_minus})")
        return cls(1.0 / (2 * n_plus), 1.0 / (2 * n_minus))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Dense feature matrix with +1/-1 labels.

    ``X`` has shape (m, d); ``y`` is an int8 vector of +1/-1. Both arrays are
    made read-only on construction so a dataset can be shared freely.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, order="C")
        y = np.asarray(self.y)
        if X.ndim != 2:
            raise InputError(f"features must be 2-D, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise InputError(f"labels shape {y.shape} does not match {X.shape[0]} rows")
        if not np.all((y == 1) | (y == -1)):
            raise InputError("labels must be +1 or -1")
        if not np.all(np.isfinite(X)):
            raise InputError("features must be finite")
        y = y.astype(np.int8)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def positive_indices(self) -> np.ndarray:
        return np.flatnonzero(self.y == 1)

    @property
    def negative_indices(self) -> np.ndarray:
        return np.flatnonzero(self.y == -1)

    @property
    def n_plus(self) -> int:
        return int(np.count_nonzero(self.y == 1))

    @property
    def n_minus(self) -> int:
        return int(np.count_nonzero(self.y == -1))

    @property
    def points(self) -> list[LabeledPoint]:
        return [self[i] for i in range(self.m)]

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, i: int) -> LabeledPoint:
        return LabeledPoint(self.X[i], int(self.y[i]))

    def class_weights(self) -> ClassWeights:
        return ClassWeights.from_counts(self.n_plus, self.n_minus)

    def row_weights(self) -> np.ndarray:
        """Per-row class weight, the loss multiplier each row carries."""
        cw = self.class_weights()
        return np.where(self.y == 1, cw.w_plus, cw.w_minus)

    def require_both_classes(self) -> None:
        if self.n_plus == 0 or self.n_minus == 0:
            raise DegenerateDataError(
                f"dataset needs both classes (n_plus={self.n_plus}, n_minus={self.n_minus})"
            )

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.X[idx], self.y[idx], self.feature_names)

    def imbalance_ratio(self) -> float:
        """Majority-to-minority count ratio."""
        lo, hi = sorted((self.n_plus, self.n_minus))
        return hi / lo if lo else math.inf


def load_csv(path, target_column: str, positive_label: str) -> Dataset:
    """Read a comma-separated file with a header row.

    Rows whose ``target_column`` cell equals ``positive_label`` (after
    stripping whitespace) become +1, every other row -1. All remaining
    columns must parse as finite reals.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such data file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if target_column not in header:
            raise InputError(f"{path}: missing target column {target_column!r}")
        target_at = header.index(target_column)
        feature_cols = [j for j in range(len(header)) if j != target_at]
        rows, labels = [], []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(record)}")
            try:
                values = [float(record[j]) for j in feature_cols]
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric feature cell") from None
            if not all(math.isfinite(v) for v in values):
                raise InputError(f"{path}:{lineno}: non-finite feature value")
            rows.append(values)
            labels.append(1 if record[target_at].strip() == positive_label else -1)
    if not rows:
        raise InputError(f"{path}: no data rows")
    ds = Dataset(np.asarray(rows, dtype=np.float64), np.asarray(labels), tuple(header[j] for j in feature_cols))
    ds.require_both_classes()
    return ds


def class_weight(label: int, dataset: Dataset) -> float:
    if label == 1:
        n = dataset.n_plus
    elif label == -1:
        n = dataset.n_minus
    else:
        raise InputError(f"label must be +1 or -1, got {label!r}")
    if n == 0:
        raise DegenerateDataError(f"class {label:+d} has no rows")
    return 1.0 / (2 * n)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_holdout_indices(dataset: Dataset, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Stratified train/test index split; each class is shuffled and cut independently."""
    if not 0.0 < train_fraction < 1.0:
        raise InputError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for label, idx in ((1, dataset.positive_indices), (-1, dataset.negative_indices)):
        n_train = _round_half_up(train_fraction * idx.size)
        if n_train == 0 or n_train == idx.size:
            raise DegenerateDataError(
                f"fraction {train_fraction} leaves class {label:+d} ({idx.size} rows) empty in one partition"
            )
        perm = rng.permutation(idx)
        train.append(perm[:n_train])
        test.append(perm[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def split_holdout(dataset: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    train_idx, test_idx = split_holdout_indices(dataset, train_fraction, seed)
    return dataset.subset(train_idx), dataset.subset(test_idx)


def stratified_subsample_indices(dataset: Dataset, proportion: float, seed: int) -> np.ndarray:
    """Keep ``round(proportion * n_c)`` rows of each class; proportion 1 keeps everything in order."""
    if not 0.0 < proportion <= 1.0:
        raise InputError(f"proportion must lie in (0, 1], got {proportion}")
    if proportion == 1.0:
        return np.arange(dataset.m)
    rng = np.random.default_rng(seed)
    keep = []
    for idx in (dataset.positive_indices, dataset.negative_indices):
        n_keep = _round_half_up(proportion * idx.size)
        keep.append(rng.permutation(idx)[:n_keep])
    return np.sort(np.concatenate(keep))
