import os
import subprocess
import sys

import numpy as np
import pytest

from imbpegasos import _kernels
from imbpegasos._accel import HAVE_NUMBA
from imbpegasos.sampler import sample_sequence

from conftest import make_blobs

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def _inputs(seed=0, n_pos=15, n_neg=60, d=4, T=400):
    ds = make_blobs(n_pos, n_neg, d=d, seed=seed)
    order = sample_sequence(ds, T, seed)
    return ds, ds.y.astype(np.float64), ds.row_weights(), order


def _same(a, b):
    coef_a, steps_a, ct_a, ca_a, h_a, v_a, n_a = a
    coef_b, steps_b, ct_b, ca_b, h_b, v_b, n_b = b
    assert steps_a == steps_b and bool(h_a) == bool(h_b)
    np.testing.assert_array_equal(ct_a, ct_b)
    np.testing.assert_allclose(ca_a, ca_b, atol=1e-12)
    np.testing.assert_array_equal(v_a, v_b)
    np.testing.assert_allclose(coef_a, coef_b, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(n_a, n_b, rtol=1e-9, atol=1e-12)


@needs_numba
@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("projection", [False, True])
@pytest.mark.parametrize("X", [1, 7, 400])
def test_linear_backends_agree(seed, projection, X):
    ds, y, rw, order = _inputs(seed)
    args = (ds.X, y, rw, order, 0.05, 0.3, X, projection, True)
    _same(_kernels.linear_train_numpy(*args), _kernels.linear_train_numba(*args))


@needs_numba
@pytest.mark.parametrize("kind", [_kernels.KERNEL_LINEAR, _kernels.KERNEL_RBF, _kernels.KERNEL_POLY])
@pytest.mark.parametrize("cached", [True, False])
def test_kernel_backends_agree(kind, cached):
    ds, y, rw, order = _inputs(3, T=300)
    K = _kernels.gram_matrix(ds.X, ds.X, kind, 0.3, 2, 1.0) if cached else np.zeros((0, 0))
    args = (ds.X, y, rw, order, 0.1, 0.0, 10, True, kind, 0.3, 2, 1.0, K)
    _same(_kernels.kernel_train_numpy(*args), _kernels.kernel_train_numba(*args))


@needs_numba
@pytest.mark.parametrize("max_n", [300, 6000])
def test_auc_backends_agree(max_n):
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(2, max_n))
        scores = np.round(rng.normal(size=n), 1)
        labels = np.where(rng.random(n) < rng.uniform(0.01, 0.99), 1.0, -1.0)
        labels[0], labels[-1] = 1.0, -1.0
        assert _kernels._auc_midrank(scores, labels) == pytest.approx(
            _kernels._auc_search(scores, labels), abs=1e-12
        )
        assert _kernels.auc_rank_numba(scores, labels) == pytest.approx(
            _kernels.auc_rank_numpy(scores, labels), abs=1e-12
        )


def test_env_flag_forces_numpy():
    code = (
        "import imbpegasos, imbpegasos._kernels as k;"
        "print(imbpegasos.backend_name(), k.linear_train is k.linear_train_numpy)"
    )
    env = dict(os.environ, PEGASOS_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_numpy_backend_end_to_end_matches():
    code = (
        "import numpy as np, imbpegasos as ip;"
        "ds = ip.load_csv(r'%s', 'Class', 'positive');"
        "m, t = ip.train_linear(ds, 1e-3, 0.5, T=500, X=5, seed=2);"
        "print(t.steps_run); print(repr(m.w.tolist()))"
    )
    from conftest import ECOLI_CSV
    from imbpegasos import load_csv, train_linear

    env = dict(os.environ, PEGASOS_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code % ECOLI_CSV], env=env, capture_output=True, text=True,
                         check=True).stdout.splitlines()
    m, t = train_linear(load_csv(ECOLI_CSV, "Class", "positive"), 1e-3, 0.5, T=500, X=5, seed=2)
    assert int(out[0]) == t.steps_run
    np.testing.assert_allclose(eval(out[1]), m.w, rtol=1e-9)
