"""Inner loops of the solvers, in two interchangeable flavours.

Every public routine here exists as ``<name>_numpy`` and, when numba is
importable, ``<name>_numba``. The bare ``<name>`` is bound to whichever
backend :mod:`imbpegasos._accel` selected at import time.

Labels are float64 arrays of +1.0 / -1.0 and ``row_weight`` carries the class
weight of each row (1/(2 n_plus) or 1/(2 n_minus)), so the loops never branch
on class counts.

The training loops return a flat tuple::

    (coef, steps_run, check_t, check_auc, halted, violated, norms)

where ``coef`` is ``w`` for the linear solver and ``alpha`` for the kernel
solver, ``violated[s]`` flags a margin violation at step ``s + 1`` and
``norms`` holds ``||w||`` after every step (linear) or is empty (kernel).
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA

KERNEL_LINEAR = 0
KERNEL_RBF = 1
KERNEL_POLY = 2


# --------------------------------------------------------------------------
# numpy reference path
# --------------------------------------------------------------------------


def _auc_midrank(scores: np.ndarray, labels: np.ndarray) -> float:
    """Rank-sum AUC with mid-ranks for ties."""
    _, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    upper = np.cumsum(counts)
    midrank = upper - (counts - 1) / 2.0
    ranks = midrank[inverse]
    pos = labels > 0
    n_pos = int(pos.sum())
    n_neg = labels.shape[0] - n_pos
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def _auc_search(scores: np.ndarray, labels: np.ndarray) -> float:
    """Pair count: sort the larger class, binary-search the smaller one into it."""
    pos = labels > 0
    a, b = scores[pos], scores[~pos]
    n_pos, n_neg = a.size, b.size
    if n_pos >= n_neg:
        ref = np.sort(a)
        lo, hi = np.searchsorted(ref, b, "left"), np.searchsorted(ref, b, "right")
        wins = float((n_pos - hi).sum())
    else:
        ref = np.sort(b)
        lo, hi = np.searchsorted(ref, a, "left"), np.searchsorted(ref, a, "right")
        wins = float(lo.sum())
    return (wins + 0.5 * float((hi - lo).sum())) / (n_pos * n_neg)


def auc_rank_numpy(scores: np.ndarray, labels: np.ndarray) -> float:
    """Exact AUC, ties worth 1/2; labels are +1/-1.

    Strongly imbalanced inputs take the search route, which only sorts the
    majority class; otherwise the mid-rank sum is cheaper.
    """
    n_pos = int(np.count_nonzero(labels > 0))
    if 8 * min(n_pos, labels.shape[0] - n_pos) < labels.shape[0]:
        return _auc_search(scores, labels)
    return _auc_midrank(scores, labels)


def linear_train_numpy(X, y, row_weight, order, lam, b, check_every, projection, halt):
    m, d = X.shape
    n_steps = order.shape[0]
    w = np.zeros(d)
    radius = 1.0 / math.sqrt(lam)
    check_t, check_auc = [], []
    violated = np.zeros(n_steps, dtype=np.bool_)
    norms = np.zeros(n_steps)
    best = 0.5
    halted = False
    steps = 0
    for t in range(1, n_steps + 1):
        i = order[t - 1]
        x = X[i]
        shrink = 1.0 - 1.0 / t
        if y[i] * (x @ w + b) < 1.0:
            w = shrink * w + (row_weight[i] * y[i] / (lam * t)) * x
            violated[t - 1] = True
        else:
            w = shrink * w
        nrm = math.sqrt(w @ w)
        if projection and nrm > radius:
            w = (radius / nrm) * w
            nrm = math.sqrt(w @ w)
        norms[t - 1] = nrm
        steps = t
        if t % check_every == 0:
            auc = auc_rank_numpy(X @ w + b, y)
            check_t.append(t)
            check_auc.append(auc)
            if auc <= best:
                if halt:
                    halted = True
                    break
            else:
                best = auc
    return (
        w,
        steps,
        np.asarray(check_t, dtype=np.int64),
        np.asarray(check_auc, dtype=np.float64),
        halted,
        violated[:steps],
        norms[:steps],
    )


def gram_matrix(A: np.ndarray, B: np.ndarray, kind: int, gamma: float, degree: int, coef0: float) -> np.ndarray:
    """Kernel matrix ``K[i, j] = k(A[i], B[j])``."""
    if kind == KERNEL_LINEAR:
        return A @ B.T
    if kind == KERNEL_RBF:
        sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)
    if kind == KERNEL_POLY:
        return (A @ B.T + coef0) ** degree
    raise ValueError(f"unknown kernel code {kind}")


def kernel_train_numpy(X, y, row_weight, order, lam, b, check_every, halt, kind, gamma, degree, coef0, K):
    m = X.shape[0]
    n_steps = order.shape[0]
    use_cache = K.shape[0] == m
    alpha = np.zeros(m)
    # f[r] = sum_j alpha[j] y[j] k(x_r, x_j), maintained incrementally
    f = np.zeros(m)
    check_t, check_auc = [], []
    violated = np.zeros(n_steps, dtype=np.bool_)
    best = 0.5
    halted = False
    steps = 0
    for t in range(1, n_steps + 1):
        i = order[t - 1]
        decision = b if t == 1 else f[i] / (lam * (t - 1)) + b
        if y[i] * decision < 1.0:
            alpha[i] += row_weight[i]
            violated[t - 1] = True
            col = K[:, i] if use_cache else gram_matrix(X, X[i : i + 1], kind, gamma, degree, coef0)[:, 0]
            f += (row_weight[i] * y[i]) * col
        steps = t
        if t % check_every == 0:
            auc = auc_rank_numpy(f / (lam * t) + b, y)
            check_t.append(t)
            check_auc.append(auc)
            if auc <= best:
                if halt:
                    halted = True
                    break
            else:
                best = auc
    return (
        alpha,
        steps,
        np.asarray(check_t, dtype=np.int64),
        np.asarray(check_auc, dtype=np.float64),
        halted,
        violated[:steps],
        np.zeros(0),
    )


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit, objmode

    # numba's own sort is several times slower than numpy's vectorised one, so
    # above this size the AUC is handed back to numpy
    NUMBA_AUC_MAX_ROWS = 2048

    @njit(cache=True, nogil=True)
    def _auc_search_numba(scores, labels):
        pos = scores[labels > 0]
        neg = scores[labels <= 0]
        n_pos, n_neg = pos.shape[0], neg.shape[0]
        if n_pos <= n_neg:
            small, big = np.sort(pos), neg
        else:
            small, big = np.sort(neg), pos
        S = small.shape[0]
        below = 0.0
        ties = 0.0
        for j in range(big.shape[0]):
            v = big[j]
            # branchless lower bound of v in small
            base = 0
            n = S
            while n > 1:
                half = n >> 1
                base = base + half if small[base + half - 1] < v else base
                n -= half
            lo = base + (1 if small[base] < v else 0)
            hi = lo
            while hi < S and small[hi] == v:
                hi += 1
            below += lo
            ties += hi - lo
        if n_pos <= n_neg:
            # big holds the negatives; below counts positives under each one
            wins = n_pos * n_neg - below - ties
        else:
            wins = below
        return (wins + 0.5 * ties) / (n_pos * n_neg)

    @njit(cache=True)
    def auc_rank_numba(scores, labels):
        if scores.shape[0] <= NUMBA_AUC_MAX_ROWS:
            return _auc_search_numba(scores, labels)
        with objmode(auc="float64"):
            auc = auc_rank_numpy(scores, labels)
        return auc

    @njit(cache=True, nogil=True)
    def _kernel_value(X, r, i, kind, gamma, degree, coef0):
        d = X.shape[1]
        if kind == 1:
            sq = 0.0
            for k in range(d):
                diff = X[r, k] - X[i, k]
                sq += diff * diff
            return math.exp(-gamma * sq)
        dot = 0.0
        for k in range(d):
            dot += X[r, k] * X[i, k]
        if kind == 2:
            return (dot + coef0) ** degree
        return dot

    @njit(cache=True, nogil=True)
    def linear_train_numba(X, y, row_weight, order, lam, b, check_every, projection, halt):
        m, d = X.shape
        n_steps = order.shape[0]
        w = np.zeros(d)
        radius = 1.0 / math.sqrt(lam)
        max_checks = n_steps // check_every
        check_t = np.zeros(max_checks, dtype=np.int64)
        check_auc = np.zeros(max_checks)
        violated = np.zeros(n_steps, dtype=np.bool_)
        norms = np.zeros(n_steps)
        scores = np.empty(m)
        best = 0.5
        n_checks = 0
        halted = False
        steps = 0
        for t in range(1, n_steps + 1):
            i = order[t - 1]
            dot = 0.0
            for k in range(d):
                dot += w[k] * X[i, k]
            shrink = 1.0 - 1.0 / t
            if y[i] * (dot + b) < 1.0:
                step = row_weight[i] * y[i] / (lam * t)
                for k in range(d):
                    w[k] = shrink * w[k] + step * X[i, k]
                violated[t - 1] = True
            else:
                for k in range(d):
                    w[k] = shrink * w[k]
            sq = 0.0
            for k in range(d):
                sq += w[k] * w[k]
            nrm = math.sqrt(sq)
            if projection and nrm > radius:
                scale = radius / nrm
                sq = 0.0
                for k in range(d):
                    w[k] = scale * w[k]
                    sq += w[k] * w[k]
                nrm = math.sqrt(sq)
            norms[t - 1] = nrm
            steps = t
            if t % check_every == 0:
                for r in range(m):
                    s = b
                    for k in range(d):
                        s += w[k] * X[r, k]
                    scores[r] = s
                auc = auc_rank_numba(scores, y)
                check_t[n_checks] = t
                check_auc[n_checks] = auc
                n_checks += 1
                if auc <= best:
                    if halt:
                        halted = True
                        break
                else:
                    best = auc
        return (
            w,
            steps,
            check_t[:n_checks].copy(),
            check_auc[:n_checks].copy(),
            halted,
            violated[:steps].copy(),
            norms[:steps].copy(),
        )

    @njit(cache=True, nogil=True)
    def kernel_train_numba(X, y, row_weight, order, lam, b, check_every, halt, kind, gamma, degree, coef0, K):
        m = X.shape[0]
        n_steps = order.shape[0]
        use_cache = K.shape[0] == m
        alpha = np.zeros(m)
        f = np.zeros(m)
        max_checks = n_steps // check_every
        check_t = np.zeros(max_checks, dtype=np.int64)
        check_auc = np.zeros(max_checks)
        violated = np.zeros(n_steps, dtype=np.bool_)
        scores = np.empty(m)
        best = 0.5
        n_checks = 0
        halted = False
        steps = 0
        for t in range(1, n_steps + 1):
            i = order[t - 1]
            if t == 1:
                decision = b
            else:
                decision = f[i] / (lam * (t - 1)) + b
            if y[i] * decision < 1.0:
                alpha[i] += row_weight[i]
                violated[t - 1] = True
                coef = row_weight[i] * y[i]
                if use_cache:
                    for r in range(m):
                        f[r] += coef * K[r, i]
                else:
                    for r in range(m):
                        f[r] += coef * _kernel_value(X, r, i, kind, gamma, degree, coef0)
            steps = t
            if t % check_every == 0:
                scale = 1.0 / (lam * t)
                for r in range(m):
                    scores[r] = f[r] * scale + b
                auc = auc_rank_numba(scores, y)
                check_t[n_checks] = t
                check_auc[n_checks] = auc
                n_checks += 1
                if auc <= best:
                    if halt:
                        halted = True
                        break
                else:
                    best = auc
        return (
            alpha,
            steps,
            check_t[:n_checks].copy(),
            check_auc[:n_checks].copy(),
            halted,
            violated[:steps].copy(),
            np.zeros(0),
        )


if USE_NUMBA:
    auc_rank = auc_rank_numba
    linear_train = linear_train_numba
    kernel_train = kernel_train_numba
else:
    auc_rank = auc_rank_numpy
    linear_train = linear_train_numpy
    kernel_train = kernel_train_numpy
