from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from imbpegasos import Dataset, _kernels
from imbpegasos._accel import HAVE_NUMBA

DATA_DIR = Path(__file__).parent / "data"
ECOLI_CSV = DATA_DIR / "ecoli_imu.csv"

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Namespace of kernel functions for one backend."""
    suffix = request.param

    class _NS:
        name = suffix
        auc_rank = getattr(_kernels, f"auc_rank_{suffix}")
        linear_train = getattr(_kernels, f"linear_train_{suffix}")
        kernel_train = getattr(_kernels, f"kernel_train_{suffix}")

    return _NS


def make_blobs(n_pos: int, n_neg: int, d: int = 2, shift: float = 1.5, seed: int = 0) -> Dataset:
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(shift, 1.0, (n_pos, d)), rng.normal(-shift, 1.0, (n_neg, d))])
    y = np.r_[np.ones(n_pos), -np.ones(n_neg)]
    perm = rng.permutation(n_pos + n_neg)
    return Dataset(X[perm], y[perm])


def make_separable(n_pos: int = 10, n_neg: int = 190, seed: int = 0) -> Dataset:
    """Positives have x0 in [1, 3], negatives x0 in [-3, -1]: a gap of 2 along x0."""
    rng = np.random.default_rng(seed)
    pos = np.c_[rng.uniform(1.0, 3.0, n_pos), rng.normal(0.0, 1.0, n_pos)]
    neg = np.c_[rng.uniform(-3.0, -1.0, n_neg), rng.normal(0.0, 1.0, n_neg)]
    return Dataset(np.vstack([pos, neg]), np.r_[np.ones(n_pos), -np.ones(n_neg)])


@pytest.fixture
def blobs():
    return make_blobs(12, 28, d=3, seed=3)


@pytest.fixture(scope="session")
def ecoli():
    from imbpegasos import load_csv

    return load_csv(ECOLI_CSV, "Class", "positive")
