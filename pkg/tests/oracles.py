"""Slow reference implementations the tests check the library against.

Nothing here shares iteration code with the package. The grid solver
oracle is an accelerated projected-gradient ascent on the box-constrained
dual, run until its own certificate is far below the comparison
tolerance; the tour and AUC oracles are plain enumeration.
"""

from __future__ import annotations

import itertools

import numpy as np

try:
    from numba import njit

    def _maybe_jit(fn):
        return njit(cache=True)(fn)
except ImportError:
    def _maybe_jit(fn):
        return fn


def grid_objective(y: np.ndarray, beta: np.ndarray, lam: float) -> float:
    """Primal objective 0.5*||y-beta||_F^2 + lam * grid TV."""
    fid = 0.5 * float(np.sum((y - beta) ** 2))
    tv = float(np.sum(np.abs(np.diff(beta, axis=1))))
    tv += float(np.sum(np.abs(np.diff(beta, axis=0))))
    return fid + lam * tv


def _apply_beta(y, zh, zv):
    """beta(z) = y - adjoint(z) for edge duals zh (r,c-1), zv (r-1,c)."""
    r, c = y.shape
    b = y.copy()
    for i in range(r):
        for j in range(c - 1):
            b[i, j] += zh[i, j]
            b[i, j + 1] -= zh[i, j]
    for i in range(r - 1):
        for j in range(c):
            b[i, j] += zv[i, j]
            b[i + 1, j] -= zv[i, j]
    return b


_apply_beta = _maybe_jit(_apply_beta)


def _dual_ascent_loop(y, lam, rel_gap, max_iter):
    # Maximize D(z) = 0.5||y||^2 - 0.5||beta(z)||^2 over the box
    # |z| <= lam, with beta(z) = y - adjoint(z). dD/dz is the forward
    # difference of beta; step 1/8 covers the grid operator norm.
    r, c = y.shape
    zh = np.zeros((r, c - 1))
    zv = np.zeros((r - 1, c))
    wh = zh.copy()
    wv = zv.copy()
    t = 1.0
    dual_prev = -np.inf
    pobj = 0.0
    gap = np.inf
    step = 1.0 / 8.0
    yn = 0.0
    for i in range(r):
        for j in range(c):
            yn += y[i, j] * y[i, j]
    for it in range(max_iter):
        beta = _apply_beta(y, wh, wv)
        zh_new = np.empty_like(zh)
        zv_new = np.empty_like(zv)
        for i in range(r):
            for j in range(c - 1):
                v = wh[i, j] + step * (beta[i, j + 1] - beta[i, j])
                zh_new[i, j] = min(lam, max(-lam, v))
        for i in range(r - 1):
            for j in range(c):
                v = wv[i, j] + step * (beta[i + 1, j] - beta[i, j])
                zv_new[i, j] = min(lam, max(-lam, v))

        if it % 10 == 0:
            b = _apply_beta(y, zh_new, zv_new)
            fid = 0.0
            bn = 0.0
            tv = 0.0
            for i in range(r):
                for j in range(c):
                    d = y[i, j] - b[i, j]
                    fid += d * d
                    bn += b[i, j] * b[i, j]
            for i in range(r):
                for j in range(c - 1):
                    tv += abs(b[i, j + 1] - b[i, j])
            for i in range(r - 1):
                for j in range(c):
                    tv += abs(b[i + 1, j] - b[i, j])
            pobj = 0.5 * fid + lam * tv
            dobj = 0.5 * (yn - bn)
            gap = pobj - dobj
            if gap <= rel_gap * (1.0 + abs(pobj)):
                zh = zh_new
                zv = zv_new
                break
            if dobj < dual_prev:
                t = 1.0  # adaptive restart
            dual_prev = dobj
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        mom = (t - 1.0) / t_new
        for i in range(r):
            for j in range(c - 1):
                wh[i, j] = zh_new[i, j] + mom * (zh_new[i, j] - zh[i, j])
        for i in range(r - 1):
            for j in range(c):
                wv[i, j] = zv_new[i, j] + mom * (zv_new[i, j] - zv[i, j])
        zh = zh_new
        zv = zv_new
        t = t_new
    beta = _apply_beta(y, zh, zv)
    return beta, pobj, gap


_dual_ascent_jit = _maybe_jit(_dual_ascent_loop)


def dual_ascent_grid(y, lam, rel_gap=1e-10, max_iter=400_000):
    """High-precision grid fused lasso by FISTA on the dual.

    Returns (beta, objective, self_certified_gap). The gap is absolute;
    callers should confirm it is small enough for their comparison.
    """
    y = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    if lam == 0.0:
        return y.copy(), 0.0, 0.0
    if y.shape[0] == 1 and y.shape[1] == 1:
        return y.copy(), 0.0, 0.0
    beta, pobj, gap = _dual_ascent_jit(y, float(lam), float(rel_gap),
                                       int(max_iter))
    return beta, grid_objective(y, beta, lam), float(gap)


def bisect_lambda_max(solve, y, hi_start=1.0, flat_tol=1e-10, iters=60):
    """Smallest lam (by bisection) at which solve(y, lam) is constant.

    solve(y, lam) -> matrix. Doubles hi until flat, then bisects.
    """
    hi = hi_start
    for _ in range(80):
        if np.ptp(solve(y, hi)) <= flat_tol:
            break
        hi *= 2.0
    else:
        raise RuntimeError("no flat fit found while doubling lam")
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.ptp(solve(y, mid)) <= flat_tol:
            hi = mid
        else:
            lo = mid
    return hi


def _all_perms(s: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(s))), dtype=np.int64)


def optimal_open_cost(dist: np.ndarray) -> float:
    """Minimum open-path cost over every permutation (s <= 9)."""
    d = np.asarray(dist, dtype=np.float64)
    s = d.shape[0]
    if s == 1:
        return 0.0
    perms = _all_perms(s)
    costs = d[perms[:, :-1], perms[:, 1:]].sum(axis=1)
    return float(costs.min())


def optimal_closed_cost(dist: np.ndarray) -> float:
    """Minimum closed-tour cost over every permutation (s <= 9)."""
    d = np.asarray(dist, dtype=np.float64)
    s = d.shape[0]
    if s == 1:
        return 0.0
    perms = _all_perms(s)
    costs = d[perms[:, :-1], perms[:, 1:]].sum(axis=1)
    costs += d[perms[:, -1], perms[:, 0]]
    return float(costs.min())


def pairwise_auc(scores, labels) -> float:
    """AUC by direct comparison of every positive-negative pair."""
    s = np.asarray(scores, dtype=np.float64)
    lab = np.asarray(labels)
    pos = s[lab == 1]
    neg = s[lab == 0]
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (wins + 0.5 * ties) / (pos.size * neg.size)


def random_euclidean_metric(s: int, rng: np.random.Generator,
                            dim: int = 2) -> np.ndarray:
    """Random point cloud distances: triangle inequality holds exactly."""
    pts = rng.random((s, dim)) * rng.uniform(0.5, 3.0)
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(d, 0.0)
    return d
