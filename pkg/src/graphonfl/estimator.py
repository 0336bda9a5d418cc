"""End-to-end link-probability estimators.

Each fused-lasso method pairs a node metric with an ordering rule:
nn_fl uses the inner-product metric and a greedy tour, sas_fl sorts by
degree, l1_fl runs the greedy tour on Hamming distances. The reordered
adjacency matrix is then denoised on the grid and scattered back. A
USVT spectral comparator is included for benchmarks.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .metrics import metric_by_kind
from .ordering import nn_tour, sort_ordering
from .rng import DEFAULT_SEED, derive_seed, substream
from .sim import validate_adjacency
from .tvdenoise import fused_lasso_grid

METHODS = ("nn_fl", "sas_fl", "l1_fl", "usvt")
MODES = ("single", "split")

_METHOD_METRIC = {"nn_fl": "inner", "sas_fl": "degree", "l1_fl": "l1"}

_LAMBDA_SEARCH_START = 0.25
_LAMBDA_SEARCH_DOUBLINGS = 60
_CONSTANT_RANGE = 1e-10


@dataclass(frozen=True)
class EstimatorConfig:
    """Everything estimate() needs besides the adjacency matrix.

    lam may be a nonnegative number or "cv". m resolves to floor(n/2)
    under "half" and only matters in split mode. The CV grid spans
    [cv_span * lambda_bar, lambda_bar] with cv_candidates points, where
    lambda_bar is the smallest doubling of 0.25 whose single-mode fit
    is constant. usvt ignores everything except usvt_factor.
    """

    method: str = "nn_fl"
    mode: str = "single"
    m: Union[int, str] = "half"
    lam: Union[float, str] = "cv"
    cv_candidates: int = 30
    cv_holdout: float = 0.2
    cv_span: float = 1e-4
    nn_start: Union[int, str] = "medoid"
    inner_divisor: Optional[float] = None
    usvt_factor: float = 2.02
    tol: float = 1e-8
    max_iter: int = 5000
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if isinstance(self.lam, str):
            if self.lam != "cv":
                raise ValueError(f'lam must be a nonnegative number or "cv", got {self.lam!r}')
        elif self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if isinstance(self.m, str) and self.m != "half":
            raise ValueError(f'm must be an integer or "half", got {self.m!r}')
        if self.cv_candidates < 2:
            raise ValueError(f"cv_candidates must be at least 2, got {self.cv_candidates}")
        if not 0.0 < self.cv_holdout < 1.0:
            raise ValueError(f"cv_holdout must lie in (0,1), got {self.cv_holdout}")
        if not 0.0 < self.cv_span < 1.0:
            raise ValueError(f"cv_span must lie in (0,1), got {self.cv_span}")


@dataclass(frozen=True)
class GraphonEstimate:
    """theta_hat plus how it was produced.

    Symmetric, zero diagonal, entries in [0,1]. lambda_chosen is None
    for usvt, which has no penalty. diagnostics holds one entry per
    solved block with the fit's gap, sweep count, and converged flag.
    """

    theta_hat: np.ndarray
    method: str
    mode: str
    lambda_chosen: Optional[float]
    orderings: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    cv_curve: Optional[np.ndarray] = field(default=None, repr=False)


def split_indices(n, m_policy="half"):
    """S1 = first m nodes, S2 = the rest; m = floor(n/2) under "half"."""
    if n < 4:
        raise ValueError(f"splitting needs n >= 4 nodes, got {n}")
    m = n // 2 if isinstance(m_policy, str) and m_policy == "half" else int(m_policy)
    if not 1 <= m <= n - 2:
        raise ValueError(f"resolved m={m} outside [1, {n - 2}]")
    return np.arange(m, dtype=np.int64), np.arange(m, n, dtype=np.int64)


def block_estimate(a, row_order, col_order, lam, tol=1e-8, max_iter=5000, warm=None):
    """Denoise one reordered block of A; returns (matrix, fit).

    The block A[row_order, col_order] is solved as a grid and the
    result is scattered back so the returned matrix is indexed by the
    ascending-sorted row and column ids. Row and column sets must be
    disjoint or identical (the diagonal-block case). warm is a previous
    fit's warm_state for the same block and tours; fit.warm_state on
    the result continues the chain.
    """
    rows = np.asarray(row_order.order, dtype=np.int64)
    cols = np.asarray(col_order.order, dtype=np.int64)
    rset = np.sort(rows)
    cset = np.sort(cols)
    if not np.array_equal(rset, cset) and len(np.intersect1d(rset, cset)) > 0:
        raise ValueError("row and column node sets must be disjoint or identical")
    y = np.asarray(a, dtype=np.float64)[np.ix_(rows, cols)]
    fit = fused_lasso_grid(y, lam, tol=tol, max_iter=max_iter, warm=warm)
    out = np.empty_like(fit.beta)
    rrank = np.searchsorted(rset, rows)
    crank = np.searchsorted(cset, cols)
    out[np.ix_(rrank, crank)] = fit.beta
    return out, fit


def _fit_summary(fit):
    return {
        "lam": fit.lam,
        "iterations": fit.iterations,
        "duality_gap": fit.duality_gap,
        "objective": fit.objective,
        "converged": fit.converged,
    }


def _tour_for(a, cfg, targets, reference, label):
    kind = _METHOD_METRIC[cfg.method]
    m = metric_by_kind(kind, a, targets, reference, divisor=cfg.inner_divisor)
    if cfg.method == "sas_fl":
        return sort_ordering(m)
    seed = derive_seed(cfg.seed, "start", label) if cfg.nn_start == "random" else None
    return nn_tour(m, start=cfg.nn_start, seed=seed)


def _orderings_for(a, cfg):
    n = a.shape[0]
    everyone = np.arange(n, dtype=np.int64)
    if cfg.mode == "single":
        return {"full": _tour_for(a, cfg, everyone, everyone, "full")}
    s1, s2 = split_indices(n, cfg.m)
    return {
        "diag_s1": _tour_for(a, cfg, s1, s2, "diag_s1"),
        "diag_s2": _tour_for(a, cfg, s2, s1, "diag_s2"),
        "rect_rows": _tour_for(a, cfg, s1, s1, "rect_rows"),
        "rect_cols": _tour_for(a, cfg, s2, s2, "rect_cols"),
    }


def _postprocess(theta):
    np.clip(theta, 0.0, 1.0, out=theta)
    np.fill_diagonal(theta, 0.0)
    return (theta + theta.T) / 2.0


def _assemble(a, cfg, tours, lam, threads=1, warm=None):
    """Solve every block at one lam; returns (theta, diags, states).

    warm/states map block label to solver state so a caller sweeping
    lam on fixed tours can chain solves. Blocks are independent, so
    threading them cannot change the result.
    """
    n = a.shape[0]
    warm = warm or {}
    if cfg.mode == "single":
        full = tours["full"]
        block, fit = block_estimate(
            a, full, full, lam, tol=cfg.tol, max_iter=cfg.max_iter, warm=warm.get("full")
        )
        return _postprocess(block), {"full": _fit_summary(fit)}, {"full": fit.warm_state}
    s1, s2 = split_indices(n, cfg.m)
    tasks = [
        ("s1_s1", tours["diag_s1"], tours["diag_s1"]),
        ("s2_s2", tours["diag_s2"], tours["diag_s2"]),
        ("s1_s2", tours["rect_rows"], tours["rect_cols"]),
    ]

    def solve(task):
        label, ro, co = task
        return block_estimate(
            a, ro, co, lam, tol=cfg.tol, max_iter=cfg.max_iter, warm=warm.get(label)
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, tasks))
    else:
        results = [solve(t) for t in tasks]
    theta = np.zeros((n, n))
    (b11, f11), (b22, f22), (b12, f12) = results
    theta[np.ix_(s1, s1)] = b11
    theta[np.ix_(s2, s2)] = b22
    theta[np.ix_(s1, s2)] = b12
    theta[np.ix_(s2, s1)] = b12.T
    diags = {"s1_s1": _fit_summary(f11), "s2_s2": _fit_summary(f22), "s1_s2": _fit_summary(f12)}
    states = {"s1_s1": f11.warm_state, "s2_s2": f22.warm_state, "s1_s2": f12.warm_state}
    return _postprocess(theta), diags, states


def estimate(a, cfg, threads=1):
    """Estimate the link-probability matrix of a single observed graph.

    Split mode solves three blocks (each half against the other, plus
    the rectangle between them); single mode reorders and solves the
    whole matrix at once. lam="cv" runs cross_validate_lambda first.
    The result is clipped to [0,1], diagonal-zeroed, and symmetrized.
    """
    validate_adjacency(a)
    a = np.asarray(a)
    n = a.shape[0]
    if cfg.method == "usvt":
        return usvt_comparator(a, threshold_factor=cfg.usvt_factor)
    if cfg.mode == "split" and n < 4:
        raise ValueError(f"split mode needs n >= 4 nodes, got {n}")
    cv_curve = None
    lam = cfg.lam
    if isinstance(lam, str):
        lam, cv_curve = cross_validate_lambda(a, cfg, threads=threads)
    tours = _orderings_for(a, cfg)
    theta, diags, _ = _assemble(a, cfg, tours, float(lam), threads=threads)
    return GraphonEstimate(
        theta_hat=theta,
        method=cfg.method,
        mode=cfg.mode,
        lambda_chosen=float(lam),
        orderings=tours,
        diagnostics=diags,
        cv_curve=cv_curve,
    )


def _lambda_bar(a0, cfg):
    """Smallest doubling of 0.25 whose single-mode fit is constant."""
    n = a0.shape[0]
    everyone = np.arange(n, dtype=np.int64)
    tour = _tour_for(a0, cfg, everyone, everyone, "lambda-bar")
    y = np.asarray(a0, dtype=np.float64)[np.ix_(tour.order, tour.order)]
    lam = _LAMBDA_SEARCH_START
    state = None
    for _ in range(_LAMBDA_SEARCH_DOUBLINGS):
        fit = fused_lasso_grid(y, lam, tol=cfg.tol, max_iter=cfg.max_iter, warm=state)
        state = fit.warm_state
        if float(np.ptp(fit.beta)) <= _CONSTANT_RANGE:
            return lam
        lam *= 2.0
    warnings.warn(f"no constant fit found up to lam={lam:g}; using it as the grid top")
    return lam


def cross_validate_lambda(a, cfg, threads=1):
    """Pick lambda by holdout prediction; returns (lambda_star, curve).

    A random 20% (cv_holdout) of unordered pairs is erased to zero, the
    estimator runs on the erased matrix for each of cv_candidates
    log-spaced lambdas, and each fit is scored by its squared error on
    the held-out entries. Score ties go to the larger lambda. The curve
    is an array of (lambda, score) rows.
    """
    if cfg.method == "usvt":
        raise ValueError("usvt has no lambda to cross-validate")
    validate_adjacency(a)
    a = np.asarray(a)
    n = a.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    n_pairs = len(iu)
    n_hold = int(round(cfg.cv_holdout * n_pairs))
    if not 1 <= n_hold < n_pairs:
        raise ValueError(
            f"holdout of {n_hold} pairs out of {n_pairs} leaves nothing to fit or score"
        )
    sel = substream(cfg.seed, "cv", "holdout").permutation(n_pairs)[:n_hold]
    hi, hj = iu[sel], ju[sel]
    a0 = a.copy()
    a0[hi, hj] = 0
    a0[hj, hi] = 0
    if not a0.any():
        warnings.warn("erasing the holdout left an all-zero matrix; CV scores are uninformative")
    lam_bar = _lambda_bar(a0, cfg)
    candidates = np.geomspace(cfg.cv_span * lam_bar, lam_bar, cfg.cv_candidates)
    tours = _orderings_for(a0, cfg)
    truth = a[hi, hj].astype(np.float64)
    # Candidates run in ascending order so each solve warm-starts from
    # the previous one; threads only spread the blocks inside a solve.
    scores = []
    states = None
    for lam in candidates:
        theta, _, states = _assemble(a0, cfg, tours, float(lam), threads=threads, warm=states)
        scores.append(float(((theta[hi, hj] - truth) ** 2).sum()))
    best_lam = candidates[0]
    best_score = scores[0]
    for lam, sc in zip(candidates[1:], scores[1:]):
        if sc <= best_score:
            best_lam, best_score = lam, sc
    curve = np.column_stack([candidates, np.asarray(scores)])
    return float(best_lam), curve


def usvt_comparator(a, threshold_factor=2.02):
    """Spectral baseline: keep singular values above a noise threshold.

    The threshold is threshold_factor * sqrt(n * density). Reconstructs
    from the kept components, then clips, zeros the diagonal, and
    symmetrizes like the fused-lasso methods.
    """
    validate_adjacency(a)
    af = np.asarray(a, dtype=np.float64)
    n = af.shape[0]
    density = float(af.sum()) / (n * (n - 1))
    threshold = threshold_factor * np.sqrt(n * density)
    u, s, vt = np.linalg.svd(af)
    keep = s >= threshold
    theta = (u[:, keep] * s[keep]) @ vt[keep]
    theta = _postprocess(theta)
    return GraphonEstimate(
        theta_hat=theta,
        method="usvt",
        mode="single",
        lambda_chosen=None,
        orderings={},
        diagnostics={
            "full": {
                "rank_kept": int(keep.sum()),
                "threshold": float(threshold),
                "edge_density": density,
            }
        },
    )
