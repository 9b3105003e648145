"""Stratified cross-validation, (lambda, bias) grid search, curves, holdout.

Seeds for individual training runs are derived from the base seed and the
task's grid and fold position, so results do not depend on how many worker
threads ran them.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .data import Dataset, stratified_subsample_indices
from .errors import DegenerateDataError, InputError
from .kernel import KernelSpec
from .metrics import roc_auc
from .sampler import derive_seed
from .solvers import fit
from .stopping import select_stop_parameter

DEFAULT_LAMBDAS = (0.0001, 0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
DEFAULT_BIASES = tuple(np.linspace(-2.0, 2.0, 10).tolist())
DEFAULT_PROPORTIONS = (0.2, 0.4, 0.6, 0.8, 1.0)

# leading part of derived seeds, keeps the streams of different tasks apart
_STOP_STREAM = 0
_FOLD_STREAM = 1
_SUBSAMPLE_STREAM = 2


@dataclass(frozen=True)
class GridSpec:
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    biases: tuple[float, ...] = DEFAULT_BIASES

    def __post_init__(self):
        lambdas = tuple(float(v) for v in self.lambdas)
        biases = tuple(float(v) for v in self.biases)
        if not lambdas or not biases:
            raise InputError("grid needs at least one lambda and one bias")
        if any(not v > 0 for v in lambdas):
            raise InputError("every lambda must be positive")
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "biases", biases)

    def __len__(self) -> int:
        return len(self.lambdas) * len(self.biases)


class FoldScore(NamedTuple):
    fold: int
    train_auc: float
    val_auc: float


@dataclass
class GridRow:
    lam: float
    bias: float
    stop_x: int
    fold_aucs: list[float]

    @property
    def mean_auc(self) -> float:
        return float(np.mean(self.fold_aucs))


@dataclass
class CVResult:
    rows: list[GridRow]
    k: int
    stop_stats: list = field(default_factory=list, repr=False)

    @property
    def best(self) -> GridRow:
        # max() keeps the first of equal means, i.e. grid order breaks ties
        return max(self.rows, key=lambda r: r.mean_auc)


class CurveRow(NamedTuple):
    value: float
    fold: int
    train_auc: float
    val_auc: float


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def stratified_kfold(dataset: Dataset, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deal each class's shuffled rows round-robin over ``k`` folds.

    The negatives continue dealing where the positives stopped, which keeps
    total fold sizes within one of each other as well.
    """
    if int(k) != k or k < 2:
        raise InputError(f"need at least 2 folds, got {k}")
    k = int(k)
    for label, n in ((+1, dataset.n_plus), (-1, dataset.n_minus)):
        if n < k:
            raise DegenerateDataError(f"class {label:+d} has {n} rows, fewer than {k} folds")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(dataset.m, dtype=np.int64)
    offset = 0
    for idx in (dataset.positive_indices, dataset.negative_indices):
        perm = rng.permutation(idx)
        fold_of[perm] = (offset + np.arange(perm.size)) % k
        offset += perm.size
    all_idx = np.arange(dataset.m)
    return [(all_idx[fold_of != f], all_idx[fold_of == f]) for f in range(k)]


def _train_and_score(train: Dataset, val: Dataset, lam, b, X, T, seed, kernel, projection) -> tuple[float, float]:
    model, _ = fit(train, lam, b, T, X, seed, kernel=kernel, projection=projection)
    return (
        roc_auc(model.decision_scores(train.X), train.y),
        roc_auc(model.decision_scores(val.X), val.y),
    )


def cross_validate(dataset: Dataset, lam: float, b: float, X: int, k: int = 5, T: int = 1000, seed: int = 0,
                   kernel: KernelSpec | None = None, projection: bool = False, jobs: int = 1,
                   grid_pos: tuple[int, int] = (0, 0)) -> list[FoldScore]:
    """Train on k-1 folds, score ROC-AUC on the held-out fold, for each fold."""
    folds = stratified_kfold(dataset, k, seed)

    def run(f: int) -> FoldScore:
        tr, va = folds[f]
        fold_seed = derive_seed(seed, _FOLD_STREAM, grid_pos[0], grid_pos[1], f)
        train_auc, val_auc = _train_and_score(
            dataset.subset(tr), dataset.subset(va), lam, b, X, T, fold_seed, kernel, projection
        )
        return FoldScore(f, train_auc, val_auc)

    return _map(run, list(range(len(folds))), jobs)


def grid_search(dataset: Dataset, grid: GridSpec | None = None, k: int = 5, T: int = 1000, seed: int = 0,
                kernel: KernelSpec | None = None, projection: bool = False, mode: str = "verbatim",
                jobs: int = 1) -> CVResult:
    """Pick the check interval per grid point on the full data, then cross-validate it.

    A grid point whose probe run never beats the 0.5 baseline gets ``X = T``
    and ``None`` in ``stop_stats``.
    """
    grid = grid or GridSpec()
    stratified_kfold(dataset, k, seed)  # fail fast on impossible fold counts
    points = [(li, bi) for li in range(len(grid.lambdas)) for bi in range(len(grid.biases))]

    def run(pos):
        li, bi = pos
        lam, b = grid.lambdas[li], grid.biases[bi]
        try:
            stats = select_stop_parameter(
                dataset, lam, b, T=T, seed=derive_seed(seed, _STOP_STREAM, li, bi),
                mode=mode, kernel=kernel, projection=projection,
            )
            x = stats.X_selected
        except DegenerateDataError:
            # no improvement in the whole probe: unbounded waiting time, check only at the end
            stats, x = None, T
        scores = cross_validate(
            dataset, lam, b, x, k=k, T=T, seed=seed,
            kernel=kernel, projection=projection, grid_pos=pos,
        )
        return GridRow(lam, b, x, [s.val_auc for s in scores]), stats

    results = _map(run, points, jobs)
    return CVResult(rows=[r for r, _ in results], k=k, stop_stats=[s for _, s in results])


def learning_curve(dataset: Dataset, lam: float, b: float, X: int,
                   proportions: Iterable[float] = DEFAULT_PROPORTIONS, k: int = 5, T: int = 1000, seed: int = 0,
                   kernel: KernelSpec | None = None, projection: bool = False, jobs: int = 1) -> list[CurveRow]:
    """k-fold CV on stratified subsamples holding a growing share of the rows."""
    proportions = [float(p) for p in proportions]
    subsets = []
    for pi, p in enumerate(proportions):
        idx = stratified_subsample_indices(dataset, p, derive_seed(seed, _SUBSAMPLE_STREAM, pi))
        sub = dataset.subset(idx)
        if sub.n_plus < k or sub.n_minus < k:
            raise DegenerateDataError(
                f"proportion {p} keeps {sub.n_plus} positives and {sub.n_minus} negatives, fewer than {k} folds"
            )
        subsets.append(sub)

    def run(pi: int) -> list[CurveRow]:
        scores = cross_validate(subsets[pi], lam, b, X, k=k, T=T, seed=seed, kernel=kernel, projection=projection)
        return [CurveRow(proportions[pi], s.fold, s.train_auc, s.val_auc) for s in scores]

    return [row for rows in _map(run, list(range(len(proportions))), jobs) for row in rows]


def validation_curve(dataset: Dataset, varied: str, values: Iterable[float], fixed_other: float, X: int,
                     k: int = 5, T: int = 1000, seed: int = 0, kernel: KernelSpec | None = None,
                     projection: bool = False, jobs: int = 1) -> list[CurveRow]:
    """One k-fold CV per value of ``varied`` ("lambda" or "bias"), the other held at ``fixed_other``."""
    if varied not in ("lambda", "bias"):
        raise InputError(f"can only vary 'lambda' or 'bias', got {varied!r}")
    values = [float(v) for v in values]
    if not values:
        raise InputError("no values to vary over")
    stratified_kfold(dataset, k, seed)

    def run(v: float) -> list[CurveRow]:
        lam, b = (v, fixed_other) if varied == "lambda" else (fixed_other, v)
        scores = cross_validate(dataset, lam, b, X, k=k, T=T, seed=seed, kernel=kernel, projection=projection)
        return [CurveRow(v, s.fold, s.train_auc, s.val_auc) for s in scores]

    return [row for rows in _map(run, values, jobs) for row in rows]


def evaluate_holdout(train: Dataset, test: Dataset, lam: float, b: float, X: int,
                     kernel: KernelSpec | None = None, T: int = 1000, seed: int = 0,
                     projection: bool = False) -> float:
    if train.d != test.d:
        raise InputError(f"train has {train.d} features, test has {test.d}")
    test.require_both_classes()
    model, _ = fit(train, lam, b, T, X, seed, kernel=kernel, projection=projection)
    return roc_auc(model.decision_scores(test.X), test.y)
