"""Class-balanced row sampling for stochastic subgradient steps.

Each draw first picks a class with probability 1/2, then a row uniformly
within that class, so every positive row has probability 1/(2 n_plus) and
every negative row 1/(2 n_minus).

The generator is numpy's PCG64. A draw consumes exactly two uniform doubles:
the first decides the class (``u < 0.5`` means positive), the second picks the
row as ``floor(u * n_class)``. Batch and one-at-a-time drawing therefore walk
the same stream.
"""
from __future__ import annotations

import numpy as np

from .data import Dataset, LabeledPoint


class BalancedSampler:
    def __init__(self, dataset: Dataset, seed: int):
        dataset.require_both_classes()
        self.dataset = dataset
        self.seed = seed
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._pos = dataset.positive_indices
        self._neg = dataset.negative_indices

    def _pick(self, u_class: np.ndarray, u_row: np.ndarray) -> np.ndarray:
        positive = u_class < 0.5
        n_pos, n_neg = self._pos.size, self._neg.size
        pos_at = np.minimum((u_row * n_pos).astype(np.int64), n_pos - 1)
        neg_at = np.minimum((u_row * n_neg).astype(np.int64), n_neg - 1)
        return np.where(positive, self._pos[pos_at], self._neg[neg_at])

    def next_sample(self) -> tuple[int, LabeledPoint]:
        u = self._rng.random(2)
        i = int(self._pick(u[:1], u[1:])[0])
        return i, self.dataset[i]

    def draw_indices(self, n: int) -> np.ndarray:
        """Row indices of the next ``n`` samples, same stream as ``n`` calls to :meth:`next_sample`."""
        u = self._rng.random(2 * n).reshape(n, 2)
        return self._pick(u[:, 0], u[:, 1]).astype(np.int64)


def sample_sequence(dataset: Dataset, n: int, seed: int) -> np.ndarray:
    return BalancedSampler(dataset, seed).draw_indices(n)


def derive_seed(*parts: int) -> int:
    """Deterministic 63-bit child seed from non-negative integer parts."""
    state = np.random.SeedSequence([int(p) for p in parts]).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])
