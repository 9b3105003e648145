"""Class-weighted linear PEGASOS with a fixed bias and an AUC-based halt.

Step ``t`` uses the step size ``1/(lambda t)``. A margin violation on a
positive row adds ``x / (2 n_plus lambda t)``, on a negative row subtracts
``x / (2 n_minus lambda t)``, and every step shrinks ``w`` by ``1 - 1/t``.
Every ``check_every`` steps the training-set ROC-AUC of ``X w + b`` is
compared with the best value so far (baseline 0.5); training stops the first
time it fails to strictly improve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .data import ClassWeights, Dataset, LabeledPoint
from .errors import InputError
from .sampler import sample_sequence

BASELINE_AUC = 0.5


@dataclass
class TrainingTrace:
    """What happened during one training run.

    ``checks`` pairs each check iteration with the training AUC measured
    there. ``improvement_iterations`` holds 1-based positions in ``checks``
    where the AUC strictly beat every earlier value (and the 0.5 baseline).
    """

    checks: list[tuple[int, float]]
    halted_early: bool
    steps_run: int
    check_every: int
    violations: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0, dtype=bool))
    weight_norms: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    baseline_auc: float = BASELINE_AUC

    @property
    def improvement_iterations(self) -> list[int]:
        best = self.baseline_auc
        out = []
        for pos, (_, auc) in enumerate(self.checks, start=1):
            if auc > best:
                out.append(pos)
                best = auc
        return out

    @property
    def final_auc(self) -> float | None:
        return self.checks[-1][1] if self.checks else None


@dataclass
class LinearModel:
    w: np.ndarray
    b: float
    lam: float
    iterations_run: int = 0
    seed: int = 0

    def decision_scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.w.shape[0]:
            raise InputError(f"model expects {self.w.shape[0]} features, data has {X.shape[1]}")
        return X @ self.w + self.b


def _validate(lam: float, T: int, X: int) -> None:
    if not lam > 0:
        raise InputError(f"lambda must be positive, got {lam}")
    if int(T) != T or T < 1:
        raise InputError(f"iterations must be a positive integer, got {T}")
    if int(X) != X or X < 1:
        raise InputError(f"stop parameter must be a positive integer, got {X}")


def hinge_objective(model: LinearModel, dataset: Dataset) -> float:
    """Regularised, class-weighted hinge loss of ``model`` on ``dataset``."""
    dataset.require_both_classes()
    margins = dataset.y * decision_scores(model, dataset)
    hinge = np.maximum(0.0, 1.0 - margins)
    reg = 0.5 * model.lam * float(model.w @ model.w)
    return reg + float(dataset.row_weights() @ hinge)


def pegasos_step(w, sample: LabeledPoint, t: int, lam: float, b: float, weights: ClassWeights) -> np.ndarray:
    if t < 1:
        raise InputError(f"iteration index starts at 1, got {t}")
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(sample.features, dtype=np.float64)
    if x.shape != w.shape:
        raise InputError(f"dimension mismatch: w has {w.shape}, x has {x.shape}")
    y = sample.label
    shrunk = (1.0 - 1.0 / t) * w
    if y * (x @ w + b) < 1.0:
        c = weights.w_plus if y == 1 else weights.w_minus
        return shrunk + (c * y / (lam * t)) * x
    return shrunk


def project(w, lam: float) -> np.ndarray:
    """Scale ``w`` onto the ball of radius ``1/sqrt(lam)`` if it lies outside."""
    if not lam > 0:
        raise InputError(f"lambda must be positive, got {lam}")
    w = np.asarray(w, dtype=np.float64)
    nrm = float(np.linalg.norm(w))
    if nrm == 0.0:
        return w.copy()
    return min(1.0, (1.0 / math.sqrt(lam)) / nrm) * w


def decision_scores(model: LinearModel, dataset: Dataset) -> np.ndarray:
    return model.decision_scores(dataset.X)


def run_linear(dataset: Dataset, order: np.ndarray, lam: float, b: float, X: int,
               projection: bool = False, halt: bool = True, seed: int = 0) -> tuple[LinearModel, TrainingTrace]:
    """Train on an explicit sequence of row indices (one per step)."""
    order = np.ascontiguousarray(order, dtype=np.int64)
    _validate(lam, order.shape[0], X)
    dataset.require_both_classes()
    y = dataset.y.astype(np.float64)
    w, steps, check_t, check_auc, halted, violated, norms = _kernels.linear_train(
        dataset.X, y, dataset.row_weights(), order, float(lam), float(b), int(X), bool(projection), bool(halt)
    )
    model = LinearModel(w=np.asarray(w), b=float(b), lam=float(lam), iterations_run=int(steps), seed=seed)
    trace = TrainingTrace(
        checks=list(zip(check_t.tolist(), check_auc.tolist())),
        halted_early=bool(halted),
        steps_run=int(steps),
        check_every=int(X),
        violations=np.asarray(violated),
        weight_norms=np.asarray(norms),
    )
    return model, trace


def train_linear(dataset: Dataset, lam: float, b: float, T: int = 1000, X: int | None = None,
                 projection: bool = False, seed: int = 0, halt: bool = True) -> tuple[LinearModel, TrainingTrace]:
    """Class-weighted PEGASOS from ``w = 0`` on balanced samples drawn with ``seed``.

    ``X`` defaults to ``T``: a single check after the last step. ``halt=False``
    keeps recording checks without ever stopping, which the stop-parameter
    probe relies on.
    """
    X = T if X is None else X
    _validate(lam, T, X)
    dataset.require_both_classes()
    order = sample_sequence(dataset, int(T), seed)
    return run_linear(dataset, order, lam, b, X, projection=projection, halt=halt, seed=seed)
