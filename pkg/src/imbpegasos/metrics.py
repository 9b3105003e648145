"""ROC curves and area under them.

Ties between a positive and a negative score count one half. With that
convention the trapezoidal area under :func:`roc_curve` and the pairwise
(Mann-Whitney) count agree exactly.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DegenerateDataError, InputError


class RocCurve(NamedTuple):
    fpr: np.ndarray
    tpr: np.ndarray

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def _check(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if scores.shape != labels.shape:
        raise InputError(f"{scores.size} scores vs {labels.size} labels")
    if not np.all((labels == 1) | (labels == -1)):
        raise InputError("labels must be +1 or -1")
    n_pos = int(np.count_nonzero(labels > 0))
    if n_pos == 0 or n_pos == labels.size:
        raise DegenerateDataError("ROC-AUC needs at least one positive and one negative")
    return scores, labels


def roc_curve(scores, labels) -> RocCurve:
    """Sweep the threshold down through every distinct score.

    Starts at (0, 0) and ends at (1, 1); a block of tied scores moves both
    rates at once, giving a diagonal segment.
    """
    scores, labels = _check(scores, labels)
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    pos = (labels[order] > 0).astype(np.float64)
    tp = np.cumsum(pos)
    fp = np.cumsum(1.0 - pos)
    # last index of each run of equal scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tpr = np.r_[0.0, tp[ends] / tp[-1]]
    fpr = np.r_[0.0, fp[ends] / fp[-1]]
    return RocCurve(fpr, tpr)


def auc_trapezoid(curve: RocCurve) -> float:
    fpr, tpr = np.asarray(curve[0], dtype=np.float64), np.asarray(curve[1], dtype=np.float64)
    if fpr.shape != tpr.shape or fpr.size < 2:
        raise InputError("ROC curve needs matching fpr/tpr arrays with at least two points")
    if np.any(np.diff(fpr) < 0):
        raise InputError("fpr must be non-decreasing")
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def auc_pairwise(scores, labels) -> float:
    """Fraction of (positive, negative) pairs ranked correctly, ties worth 1/2.

    Computed from the rank sum in O(n log n).
    """
    scores, labels = _check(scores, labels)
    return float(_kernels.auc_rank(scores, labels))


def roc_auc(scores, labels) -> float:
    return auc_pairwise(scores, labels)
