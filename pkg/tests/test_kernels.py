"""Compiled kernels and their numpy fallbacks must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from graphonfl import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba unavailable")


def _tie_heavy(rng, n):
    # quantized values force many exact ties in the scan's comparisons
    return np.round(rng.random(n) * 4.0) / 4.0


@needs_numba
def test_tv1d_paths_agree_exactly():
    rng = np.random.default_rng(1001)
    for trial in range(200):
        n = int(rng.integers(1, 60))
        y = _tie_heavy(rng, n) if trial % 3 == 0 else rng.normal(size=n)
        lam = float(rng.choice([0.0, 1e-6, 0.05, 0.5, 3.0]))
        a = np.empty(n)
        b = np.empty(n)
        K.tv1d(y, lam, a)
        K.tv1d_py(y, lam, b)
        assert np.array_equal(a, b), f"trial {trial} n={n} lam={lam}"


@needs_numba
def test_tv1d_paths_agree_on_edge_shapes():
    for y in (np.array([2.0]), np.array([0.0, 0.0]), np.array([1.0, -1.0, 1.0, -1.0])):
        a = np.empty_like(y)
        b = np.empty_like(y)
        K.tv1d(y, 0.5, a)
        K.tv1d_py(y, 0.5, b)
        assert np.array_equal(a, b)


@needs_numba
def test_grid_fused_paths_agree_exactly():
    rng = np.random.default_rng(77)
    for trial in range(12):
        r = int(rng.integers(1, 12))
        c = int(rng.integers(1, 12))
        y = rng.random((r, c))
        lam = float(rng.choice([0.02, 0.3, 1.5]))
        ja = K.grid_fused(y, lam, 1e-9, 500, y.copy())
        pa = K.grid_fused_py(y, lam, 1e-9, 500, y.copy())
        for got, want in zip((ja[0], ja[1], ja[2], ja[7]), (pa[0], pa[1], pa[2], pa[7])):
            assert np.array_equal(got, want)
        assert ja[3] == pa[3] and ja[4] == pa[4]
        assert ja[5] == pa[5] and ja[6] == pa[6]


@needs_numba
def test_greedy_tour_paths_agree():
    rng = np.random.default_rng(5)
    for trial in range(30):
        s = int(rng.integers(1, 40))
        d = rng.random((s, s))
        d = d + d.T
        np.fill_diagonal(d, 0.0)
        if trial % 2 == 0:
            d = np.round(d, 1)  # exercise tie handling
        start = int(rng.integers(0, s))
        oa, ca, za = K.greedy_tour(d, start)
        ob, cb, zb = K.greedy_tour_py(d, start)
        assert np.array_equal(oa, ob)
        assert ca == cb and za == zb


@needs_numba
def test_cheb_pairwise_paths_agree():
    rng = np.random.default_rng(9)
    for _ in range(20):
        t = int(rng.integers(1, 25))
        m = int(rng.integers(1, 25))
        g = rng.random((t, m))
        assert np.array_equal(K.cheb_pairwise(g), K.cheb_pairwise_py(g))


@needs_numba
def test_cheb_pairwise_excl_paths_agree():
    rng = np.random.default_rng(10)
    for _ in range(20):
        t = int(rng.integers(2, 25))
        g = rng.random((t, t))
        excl = K.cheb_pairwise_excl(g)
        assert np.array_equal(excl, K.cheb_pairwise_excl_py(g))
        # Dropping candidates from a max can only lower it.
        assert (excl <= K.cheb_pairwise(g)).all()


def test_env_flag_disables_numba():
    """GRAPHONFL_NO_NUMBA=1 must select the numpy path and still solve."""
    code = (
        "import numpy as np\n"
        "from graphonfl import _kernels as K\n"
        "assert not K.HAVE_NUMBA\n"
        "from graphonfl.tvdenoise import fused_lasso_grid\n"
        "fit = fused_lasso_grid(np.array([[0.0, 2.0]]), 0.5, tol=1e-12)\n"
        "assert abs(fit.beta[0, 0] - 0.5) < 1e-5\n"
        "assert abs(fit.beta[0, 1] - 1.5) < 1e-5\n"
        "print('ok')\n"
    )
    env = dict(os.environ, GRAPHONFL_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "ok"
