"""Kernelised class-weighted PEGASOS.

``alpha[j]`` collects the class weight of row ``j`` once for every step at
which that row was sampled and violated the margin, so ``alpha[j] / c_j`` is
a violation count. After ``t`` steps the decision function is::

    f(x) = (1 / (lambda t)) * sum_j alpha[j] y[j] K(x, x_j) + b

and the margin check at step ``t`` evaluates it with the ``t - 1`` steps
completed so far. With the linear kernel this reproduces the linear solver
step for step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import Dataset
from .errors import InputError
from .linear import TrainingTrace, _validate
from .sampler import sample_sequence

CACHE_LIMIT = 2000

_KIND_CODES = {"linear": _kernels.KERNEL_LINEAR, "rbf": _kernels.KERNEL_RBF, "polynomial": _kernels.KERNEL_POLY}
_ALIASES = {"poly": "polynomial"}


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "linear"
    gamma: float = 1.0
    degree: int = 2
    coef0: float = 1.0

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in _KIND_CODES:
            raise InputError(f"unknown kernel {self.kind!r}; choose linear, rbf or polynomial")
        object.__setattr__(self, "kind", kind)
        if kind == "rbf" and not self.gamma > 0:
            raise InputError(f"rbf gamma must be positive, got {self.gamma}")
        if kind == "polynomial" and (int(self.degree) != self.degree or self.degree < 1):
            raise InputError(f"polynomial degree must be an integer >= 1, got {self.degree}")

    @property
    def code(self) -> int:
        return _KIND_CODES[self.kind]

    def gram(self, A, B) -> np.ndarray:
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        B = np.atleast_2d(np.asarray(B, dtype=np.float64))
        if A.shape[1] != B.shape[1]:
            raise InputError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
        return _kernels.gram_matrix(A, B, self.code, float(self.gamma), int(self.degree), float(self.coef0))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "gamma": self.gamma, "degree": self.degree, "coef0": self.coef0}


def kernel_eval(spec: KernelSpec, x, x_prime) -> float:
    x = np.asarray(x, dtype=np.float64)
    x_prime = np.asarray(x_prime, dtype=np.float64)
    if x.shape != x_prime.shape:
        raise InputError(f"dimension mismatch: {x.shape} vs {x_prime.shape}")
    return float(spec.gram(x[None, :], x_prime[None, :])[0, 0])


@dataclass
class KernelModel:
    alpha: np.ndarray
    support_points: np.ndarray
    labels: np.ndarray
    kernel: KernelSpec
    b: float
    lam: float
    t_final: int
    seed: int = 0

    def decision_scores(self, X, t: int | None = None) -> np.ndarray:
        t = self.t_final if t is None else t
        if t < 1:
            raise InputError(f"iteration scale must be >= 1, got {t}")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.support_points.shape[1]:
            raise InputError(f"model expects {self.support_points.shape[1]} features, data has {X.shape[1]}")
        active = np.flatnonzero(self.alpha)
        if active.size == 0:
            return np.full(X.shape[0], float(self.b))
        coef = self.alpha[active] * self.labels[active]
        return self.kernel.gram(X, self.support_points[active]) @ coef / (self.lam * t) + self.b


def kernel_decision(model: KernelModel, x, t: int | None = None) -> float:
    return float(model.decision_scores(np.asarray(x, dtype=np.float64)[None, :], t)[0])


def kernel_objective(model: KernelModel, dataset: Dataset) -> float:
    """Regularised class-weighted hinge loss in the dual parametrisation.

    The regulariser is ``(lambda/2) ||w||^2`` for the implicit
    ``w = (1/(lambda t)) sum_j alpha[j] y[j] phi(x_j)``.
    """
    dataset.require_both_classes()
    coef = model.alpha * model.labels / (model.lam * model.t_final)
    K = model.kernel.gram(model.support_points, model.support_points)
    reg = 0.5 * model.lam * float(coef @ K @ coef)
    margins = dataset.y * model.decision_scores(dataset.X)
    return reg + float(dataset.row_weights() @ np.maximum(0.0, 1.0 - margins))


def run_kernel(dataset: Dataset, order: np.ndarray, lam: float, kernel: KernelSpec, b: float, X: int,
               halt: bool = True, seed: int = 0) -> tuple[KernelModel, TrainingTrace]:
    order = np.ascontiguousarray(order, dtype=np.int64)
    _validate(lam, order.shape[0], X)
    dataset.require_both_classes()
    Xtr = dataset.X
    if dataset.m <= CACHE_LIMIT:
        K = np.ascontiguousarray(kernel.gram(Xtr, Xtr))
    else:
        K = np.zeros((0, 0))
    y = dataset.y.astype(np.float64)
    alpha, steps, check_t, check_auc, halted, violated, _ = _kernels.kernel_train(
        Xtr, y, dataset.row_weights(), order, float(lam), float(b), int(X), bool(halt),
        kernel.code, float(kernel.gamma), int(kernel.degree), float(kernel.coef0), K,
    )
    model = KernelModel(
        alpha=np.asarray(alpha),
        support_points=np.array(Xtr),
        labels=y,
        kernel=kernel,
        b=float(b),
        lam=float(lam),
        t_final=int(steps),
        seed=seed,
    )
    trace = TrainingTrace(
        checks=list(zip(check_t.tolist(), check_auc.tolist())),
        halted_early=bool(halted),
        steps_run=int(steps),
        check_every=int(X),
        violations=np.asarray(violated),
    )
    return model, trace


def train_kernel(dataset: Dataset, lam: float, kernel: KernelSpec, b: float = 0.0, T: int = 1000,
                 X: int | None = None, seed: int = 0, halt: bool = True) -> tuple[KernelModel, TrainingTrace]:
    X = T if X is None else X
    _validate(lam, T, X)
    dataset.require_both_classes()
    order = sample_sequence(dataset, int(T), seed)
    return run_kernel(dataset, order, lam, kernel, b, X, halt=halt, seed=seed)
