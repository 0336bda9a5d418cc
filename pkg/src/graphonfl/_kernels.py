"""Hot numerical loops, compiled with numba when available.

Each kernel exists twice: the plain function (suffix ``_py``) and the
active entry point, which is the jitted version when numba is importable
and ``GRAPHONFL_NO_NUMBA`` is unset. The fallback path keeps the package
fully functional without a JIT, just slower on large problems; see
``benchmarks/bench_kernels.py`` for the measured gap.
"""

import os

import numpy as np


def _numba_disabled():
    return os.environ.get("GRAPHONFL_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


HAVE_NUMBA = False
if not _numba_disabled():
    try:
        from numba import njit as _numba_njit

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False


def _jit(func):
    if HAVE_NUMBA:
        return _numba_njit(cache=True, nogil=True)(func)
    return func


def tv1d_py(y, lam, out):
    """Exact minimizer of 0.5*||y - x||^2 + lam*sum_i |x[i+1] - x[i]|.

    Single forward scan over the signal (taut-string construction), no
    iterations. Maintains the candidate segment [k0, k] together with the
    lowest and highest values it could still take (vmin, vmax), the running
    slack against each bound (umin, umax), and the last positions where each
    bound was tight (km, kp). Writes the solution into ``out``.
    """
    n = y.shape[0]
    if n == 0:
        return
    if n == 1 or lam <= 0.0:
        for i in range(n):
            out[i] = y[i]
        return
    k = 0
    k0 = 0
    km = 0
    kp = 0
    vmin = y[0] - lam
    vmax = y[0] + lam
    umin = lam
    umax = -lam
    while True:
        while k == n - 1:
            # Right boundary: the segment must close its slack exactly.
            if umin < 0.0:
                # Lower bound broke: emit [k0, km] at vmin, then restart a
                # fresh segment after the forced down jump.
                while True:
                    out[k0] = vmin
                    k0 += 1
                    if k0 > km:
                        break
                if k0 >= n:
                    # Tie noise can push a zero slack barely negative right
                    # at the boundary; everything is written, so stop.
                    return
                k = k0
                km = k0
                kp = k0
                vmin = y[k]
                vmax = vmin + 2.0 * lam
                umin = lam
                umax = -lam
            elif umax > 0.0:
                while True:
                    out[k0] = vmax
                    k0 += 1
                    if k0 > kp:
                        break
                if k0 >= n:
                    return
                k = k0
                km = k0
                kp = k0
                vmax = y[k]
                vmin = vmax - 2.0 * lam
                umin = lam
                umax = -lam
            else:
                v = vmin + umin / (k - k0 + 1)
                while True:
                    out[k0] = v
                    k0 += 1
                    if k0 > k:
                        break
                return
        umin += y[k + 1] - vmin
        if umin < -lam:
            # Negative jump is unavoidable: flush [k0, km] at vmin.
            while True:
                out[k0] = vmin
                k0 += 1
                if k0 > km:
                    break
            k = k0
            km = k0
            kp = k0
            vmin = y[k]
            vmax = vmin + 2.0 * lam
            umin = lam
            umax = -lam
        else:
            umax += y[k + 1] - vmax
            if umax > lam:
                # Positive jump: flush [k0, kp] at vmax.
                while True:
                    out[k0] = vmax
                    k0 += 1
                    if k0 > kp:
                        break
                k = k0
                km = k0
                kp = k0
                vmax = y[k]
                vmin = vmax - 2.0 * lam
                umin = lam
                umax = -lam
            else:
                # Segment extends; re-tighten the bounds if slack allows.
                k += 1
                if umin >= lam:
                    vmin += (umin - lam) / (k - k0 + 1)
                    umin = lam
                    km = k
                if umax <= -lam:
                    vmax += (umax + lam) / (k - k0 + 1)
                    umax = -lam
                    kp = k


tv1d = _jit(tv1d_py)


def grid_fused_py(y, lam, tol, max_iter, s0):
    """Grid fused lasso by alternating exact row/column TV proxes.

    Operator splitting between the row part and the column part of the
    penalty, each handled by the exact tv1d prox (Douglas-Rachford
    iteration with the quadratic folded into the row block; plain cyclic
    alternation needs thousands of sweeps at mid-range lam, this needs
    tens). The residuals p and q are, at every sweep, divergences of
    box-feasible edge duals, so a duality gap for the current iterate is
    available cheaply and certifies the solution.

    s0 seeds the splitting state: pass a copy of y to start cold, or the
    returned state of a solve at a nearby lam to start warm. The step
    size shrinks with lam relative to the data range (measured fastest
    settings on sorted adjacency blocks; large steps stall badly once
    lam is large enough to build wide plateaus).

    Returns (x, p, q, primal_objective, gap, sweeps, converged, state);
    the caller chose tol as a relative gap target.
    """
    r = y.shape[0]
    c = y.shape[1]
    relax = 1.8  # over-relaxation
    ynorm2 = 0.0
    ymin = y[0, 0]
    ymax = y[0, 0]
    for i in range(r):
        for j in range(c):
            ynorm2 += y[i, j] * y[i, j]
            if y[i, j] < ymin:
                ymin = y[i, j]
            if y[i, j] > ymax:
                ymax = y[i, j]
    rng = ymax - ymin
    if rng <= 0.0:
        rng = 1.0
    step = 0.04 * np.sqrt(rng / lam)
    if step < 0.02:
        step = 0.02
    elif step > 0.25:
        step = 0.25
    mu = step * lam / (1.0 + step)
    s = s0.copy()
    x = np.empty((r, c))
    u = np.empty((r, c))
    p = np.zeros((r, c))
    q = np.zeros((r, c))
    rbuf = np.empty(c)
    rout = np.empty(c)
    cbuf = np.empty(r)
    cout = np.empty(r)
    pobj = 0.0
    gap = 0.0
    sweeps = 0
    converged = False
    for sweeps in range(1, max_iter + 1):
        # Row block: prox of (quadratic + row TV) at s. Scaled input,
        # scaled weight; residual scaled back is the row-dual divergence.
        for i in range(r):
            for j in range(c):
                rbuf[j] = (s[i, j] + step * y[i, j]) / (1.0 + step)
            tv1d(rbuf, mu, rout)
            for j in range(c):
                x[i, j] = rout[j]
                p[i, j] = (rbuf[j] - rout[j]) * (1.0 + step) / step
        # Column block at the reflected point 2x - s.
        for j in range(c):
            for i in range(r):
                cbuf[i] = 2.0 * x[i, j] - s[i, j]
            tv1d(cbuf, step * lam, cout)
            for i in range(r):
                u[i, j] = cout[i]
                q[i, j] = (cbuf[i] - cout[i]) / step
        for i in range(r):
            for j in range(c):
                s[i, j] += relax * (u[i, j] - x[i, j])
        # Certificate: p + q is the divergence of a box-feasible edge
        # dual, so D = 0.5*||y||^2 - 0.5*||y - (p+q)||^2 lower-bounds the
        # optimum. Checked on a schedule once sweeps pile up.
        if sweeps <= 64 or sweeps % 8 == 0 or sweeps == max_iter:
            fid = 0.0
            wnorm2 = 0.0
            for i in range(r):
                for j in range(c):
                    d = y[i, j] - u[i, j]
                    fid += d * d
                    w = y[i, j] - p[i, j] - q[i, j]
                    wnorm2 += w * w
            tvx = 0.0
            for i in range(r):
                for j in range(c - 1):
                    tvx += abs(u[i, j + 1] - u[i, j])
            for i in range(r - 1):
                for j in range(c):
                    tvx += abs(u[i + 1, j] - u[i, j])
            pobj = 0.5 * fid + lam * tvx
            dobj = 0.5 * ynorm2 - 0.5 * wnorm2
            gap = pobj - dobj
            if gap <= tol * (1.0 + abs(pobj)):
                converged = True
                break
    return u, p, q, pobj, gap, sweeps, converged, s


grid_fused = _jit(grid_fused_py)


def _greedy_tour_loop(dist, start):
    s = dist.shape[0]
    order = np.empty(s, dtype=np.int64)
    visited = np.zeros(s, dtype=np.bool_)
    order[0] = start
    visited[start] = True
    cur = start
    cost = 0.0
    for step in range(1, s):
        best = -1
        bestd = np.inf
        for cand in range(s):
            if not visited[cand]:
                d = dist[cur, cand]
                if d < bestd:
                    bestd = d
                    best = cand
        order[step] = best
        visited[best] = True
        cost += bestd
        cur = best
    closed = cost + dist[cur, start]
    return order, cost, closed


if HAVE_NUMBA:
    greedy_tour = _numba_njit(cache=True, nogil=True)(_greedy_tour_loop)
else:
    greedy_tour = _greedy_tour_loop


def greedy_tour_py(dist, start):
    """Numpy fallback for the greedy tour; ties resolve to the first argmin,
    matching the strict < of the loop version, so both paths agree exactly."""
    s = dist.shape[0]
    order = np.empty(s, dtype=np.int64)
    visited = np.zeros(s, dtype=bool)
    order[0] = start
    visited[start] = True
    cur = start
    cost = 0.0
    for step in range(1, s):
        row = dist[cur].copy()
        row[visited] = np.inf
        nxt = int(np.argmin(row))
        order[step] = nxt
        visited[nxt] = True
        cost += row[nxt]
        cur = nxt
    closed = cost + dist[cur, start]
    return order, cost, closed


def _cheb_pairwise_loop(g, out):
    t = g.shape[0]
    m = g.shape[1]
    for i in range(t):
        out[i, i] = 0.0
        for j in range(i + 1, t):
            best = 0.0
            for k in range(m):
                d = abs(g[i, k] - g[j, k])
                if d > best:
                    best = d
            out[i, j] = best
            out[j, i] = best


def _cheb_pairwise_excl_loop(g, out):
    t = g.shape[0]
    m = g.shape[1]
    for i in range(t):
        out[i, i] = 0.0
        for j in range(i + 1, t):
            best = 0.0
            for k in range(m):
                if k == i or k == j:
                    continue
                d = abs(g[i, k] - g[j, k])
                if d > best:
                    best = d
            out[i, j] = best
            out[j, i] = best


if HAVE_NUMBA:
    _cheb_pairwise_jit = _numba_njit(cache=True, nogil=True)(_cheb_pairwise_loop)
    _cheb_pairwise_excl_jit = _numba_njit(cache=True, nogil=True)(_cheb_pairwise_excl_loop)

    def cheb_pairwise(g):
        out = np.empty((g.shape[0], g.shape[0]))
        _cheb_pairwise_jit(g, out)
        return out

    def cheb_pairwise_excl(g):
        out = np.empty((g.shape[0], g.shape[0]))
        _cheb_pairwise_excl_jit(g, out)
        return out

else:

    def cheb_pairwise(g):
        return cheb_pairwise_py(g)

    def cheb_pairwise_excl(g):
        return cheb_pairwise_excl_py(g)


def cheb_pairwise_py(g):
    """Pairwise max-abs row differences, row-at-a-time numpy version."""
    t = g.shape[0]
    out = np.zeros((t, t))
    for i in range(t):
        out[i, i:] = np.abs(g[i] - g[i:]).max(axis=1)
    return np.maximum(out, out.T)


def cheb_pairwise_excl_py(g):
    """cheb_pairwise for square g whose row i and column i are the same
    node: anchors k == i and k == j sit out of the (i, j) maximum."""
    t = g.shape[0]
    out = np.zeros((t, t))
    for i in range(t):
        diffs = np.abs(g[i] - g[i:])
        diffs[:, i] = 0.0
        diffs[np.arange(t - i), np.arange(i, t)] = 0.0
        out[i, i:] = diffs.max(axis=1)
    return np.maximum(out, out.T)
