"""Time the numba and pure-numpy hot loops on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly, so the PEGASOS_DISABLE_NUMBA flag does
not matter here. The first numba call (compilation or cache load) is excluded.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from imbpegasos import Dataset, _kernels
from imbpegasos._accel import HAVE_NUMBA
from imbpegasos.sampler import sample_sequence


def _dataset(m: int, d: int, ratio: int, seed: int = 0) -> Dataset:
    rng = np.random.default_rng(seed)
    n_pos = max(2, m // (ratio + 1))
    X = np.vstack([rng.normal(0.7, 1.0, (n_pos, d)), rng.normal(0.0, 1.0, (m - n_pos, d))])
    return Dataset(X, [1] * n_pos + [-1] * (m - n_pos))


def _best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    big = _dataset(11183, 6, 42)
    y_big = big.y.astype(np.float64)
    order = sample_sequence(big, 1000, 0)
    rw = big.row_weights()
    small = _dataset(1000, 7, 9)
    y_small = small.y.astype(np.float64)
    k_order = sample_sequence(small, 1000, 0)
    K = _kernels.gram_matrix(small.X, small.X, _kernels.KERNEL_RBF, 0.5, 2, 1.0)
    scores = np.random.default_rng(1).normal(size=big.m)

    yield "auc_rank m=11183", "auc_rank", (scores, y_big)
    yield "auc_rank m=336", "auc_rank", (scores[:336], np.where(np.arange(336) < 35, 1.0, -1.0))
    yield "linear_train m=11183 T=1000 X=1000", "linear_train", (big.X, y_big, rw, order, 1.0, -1.111, 1000, False, True)
    yield "linear_train m=11183 T=1000 X=1 nohalt", "linear_train", (big.X, y_big, rw, order, 1e-4, 0.0, 1, False, False)
    yield "linear_train m=1000 T=1000 X=1 nohalt", "linear_train", (
        small.X, y_small, small.row_weights(), k_order, 1e-4, 0.0, 1, False, False)
    yield "kernel_train rbf m=1000 cached", "kernel_train", (
        small.X, y_small, small.row_weights(), k_order, 0.01, 0.0, 1000, True, _kernels.KERNEL_RBF, 0.5, 2, 1.0, K)
    yield "kernel_train rbf m=1000 on-demand", "kernel_train", (
        small.X, y_small, small.row_weights(), k_order, 0.01, 0.0, 1000, True, _kernels.KERNEL_RBF, 0.5, 2, 1.0,
        np.zeros((0, 0)))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy timings are shown")
    print(f"{'case':<42}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    for label, name, call_args in cases():
        np_fn = getattr(_kernels, f"{name}_numpy")
        t_np = _best_of(lambda: np_fn(*call_args), args.repeat)
        if HAVE_NUMBA:
            nb_fn = getattr(_kernels, f"{name}_numba")
            nb_fn(*call_args)  # warm-up
            t_nb = _best_of(lambda: nb_fn(*call_args), args.repeat)
            print(f"{label:<42}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>8.1f}x")
        else:
            print(f"{label:<42}{t_np * 1e3:>12.2f}{'-':>12}{'-':>9}")


if __name__ == "__main__":
    main()
