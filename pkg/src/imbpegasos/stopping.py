"""Choosing the AUC check interval from geometric waiting times.

A probe run checks the training AUC after every step without halting. The
number of checks between successive strict improvements is treated as an
i.i.d. geometric sample ``k_1..k_n``. From it we estimate the success
probability, build a normal-approximation interval for the mean waiting time,
and grid-search integer check intervals inside it.

Two interval centres are available:

``verbatim``
    ``p - p/(1-p)`` taken literally as the centre (default).
``standard``
    ``1/p``, the usual estimate of the geometric mean.

Both use the half-width ``1.96 * sqrt(var_mleb) / sqrt(n)`` with
``var_mleb = (1-p) / ((n-1) p^2)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DegenerateDataError, InputError
from .kernel import KernelSpec
from .linear import TrainingTrace
from .metrics import roc_auc
from .sampler import derive_seed
from .solvers import fit

Z_975 = 1.96
MODES = ("verbatim", "standard")


@dataclass(frozen=True)
class WaitingTimes:
    k: tuple[int, ...]

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if any(v < 1 for v in k):
            raise InputError("waiting times must be >= 1")
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def mean(self) -> float:
        return sum(self.k) / self.n


@dataclass
class StopStatistics:
    n: int
    p_hat: float
    p_bc: float | None
    var_mleb: float | None
    ci_low: float | None
    ci_high: float | None
    X_selected: int
    mode: str = "verbatim"
    waiting_times: tuple[int, ...] = ()
    candidates: list[int] = field(default_factory=list)
    candidate_aucs: list[float] = field(default_factory=list)


def collect_waiting_times(trace: TrainingTrace) -> WaitingTimes:
    improvements = trace.improvement_iterations
    if not improvements:
        raise DegenerateDataError("probe run never improved the training AUC; no waiting times to estimate from")
    gaps = np.diff(np.r_[0, improvements])
    return WaitingTimes(tuple(gaps.tolist()))


def mle_p(times: WaitingTimes) -> float:
    if times.n == 0:
        raise InputError("empty waiting-time sample")
    return times.n / sum(times.k)


def bias_corrected_p(p_hat: float) -> float:
    if not 0.0 < p_hat < 1.0:
        raise DegenerateDataError(f"bias correction is singular at p_hat={p_hat}")
    return p_hat - p_hat / (1.0 - p_hat)


def mleb_variance(p_hat: float, n: int) -> float:
    if n < 2:
        raise InputError(f"variance needs at least two waiting times, got {n}")
    if not 0.0 < p_hat <= 1.0:
        raise InputError(f"p_hat must lie in (0, 1], got {p_hat}")
    return (1.0 - p_hat) / ((n - 1) * p_hat * p_hat)


def interval_center(p_hat: float, mode: str = "verbatim") -> float:
    if mode == "verbatim":
        return bias_corrected_p(p_hat)
    if mode == "standard":
        return 1.0 / p_hat
    raise InputError(f"unknown mode {mode!r}; choose one of {MODES}")


def confidence_interval(times: WaitingTimes, mode: str = "verbatim") -> tuple[float, float]:
    """Endpoints where the standardised mean waiting time equals -1.96 and +1.96."""
    if times.n < 2:
        raise InputError(f"confidence interval needs n >= 2, got {times.n}")
    p = mle_p(times)
    if p >= 1.0:
        raise DegenerateDataError("every check improved (p_hat = 1); the interval is degenerate")
    center = interval_center(p, mode)
    half = Z_975 * math.sqrt(mleb_variance(p, times.n)) / math.sqrt(times.n)
    return center - half, center + half


def q_statistic(x_bar: float, times: WaitingTimes, mode: str = "verbatim") -> float:
    """Standardised distance of a mean waiting time from the interval centre."""
    p = mle_p(times)
    return math.sqrt(times.n) * (x_bar - interval_center(p, mode)) / math.sqrt(mleb_variance(p, times.n))


def candidate_range(low: float, high: float, T: int) -> list[int]:
    lo = max(1, math.ceil(low))
    hi = min(int(T), math.floor(high))
    return list(range(lo, hi + 1)) if lo <= hi else [1]


def select_stop_parameter(dataset: Dataset, lam: float, b: float, T: int = 1000, seed: int = 0,
                          mode: str = "verbatim", kernel: KernelSpec | None = None,
                          projection: bool = False, jobs: int = 1) -> StopStatistics:
    """Probe, estimate, and pick the check interval with the best training AUC.

    Every candidate is trained on the same sample sequence so that only the
    check interval differs between them; ties go to the smallest interval.
    """
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}; choose one of {MODES}")
    _, probe = fit(dataset, lam, b, T, 1, seed, kernel=kernel, projection=projection, halt=False)
    times = collect_waiting_times(probe)
    p = mle_p(times)
    p_bc = var = low = high = None
    if p < 1.0:
        p_bc = bias_corrected_p(p)
    if times.n >= 2:
        var = mleb_variance(p, times.n)
    if p < 1.0 and times.n >= 2:
        low, high = confidence_interval(times, mode)
        candidates = candidate_range(low, high, T)
    else:
        candidates = [1]

    score_seed = derive_seed(seed, 7)

    def score(x: int) -> float:
        model, _ = fit(dataset, lam, b, T, x, score_seed, kernel=kernel, projection=projection)
        return roc_auc(model.decision_scores(dataset.X), dataset.y)

    if jobs > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            aucs = list(pool.map(score, candidates))
    else:
        aucs = [score(x) for x in candidates]
    best = int(np.argmax(aucs))
    return StopStatistics(
        n=times.n,
        p_hat=p,
        p_bc=p_bc,
        var_mleb=var,
        ci_low=low,
        ci_high=high,
        X_selected=candidates[best],
        mode=mode,
        waiting_times=times.k,
        candidates=candidates,
        candidate_aucs=aucs,
    )
