"""Single entry point over the linear and kernel solvers."""
from __future__ import annotations

from .data import Dataset
from .kernel import KernelModel, KernelSpec, train_kernel
from .linear import LinearModel, TrainingTrace, train_linear


def fit(dataset: Dataset, lam: float, b: float, T: int, X: int, seed: int,
        kernel: KernelSpec | None = None, projection: bool = False,
        halt: bool = True) -> tuple[LinearModel | KernelModel, TrainingTrace]:
    """Linear PEGASOS when ``kernel`` is None, kernel PEGASOS otherwise."""
    if kernel is None:
        return train_linear(dataset, lam, b, T=T, X=X, projection=projection, seed=seed, halt=halt)
    return train_kernel(dataset, lam, kernel, b=b, T=T, X=X, seed=seed, halt=halt)
