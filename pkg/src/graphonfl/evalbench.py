"""Evaluation metrics and Monte-Carlo benchmark harnesses.

MSE is measured over the strict upper triangle (the diagonal is zero by
construction and carries no information). Link prediction masks a
random subset of pairs, re-estimates from the masked matrix, and scores
only the held-out pairs by AUC-ROC.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import rankdata

from .estimator import EstimatorConfig, estimate
from .rng import derive_seed, substream
from .sim import builtin_graphon, probability_matrix, sample_adjacency, sample_latents, validate_adjacency


@dataclass(frozen=True)
class BenchmarkResult:
    """One method's MSE record over the trials of a paired benchmark."""

    scenario: str
    n: int
    method: str
    n_trials: int
    mse_mean_x1000: float
    mse_std_x1000: float
    mse_trials: list
    seeds: list
    converged: list

    def __post_init__(self):
        if len(self.mse_trials) != self.n_trials:
            raise ValueError("n_trials does not match the per-trial list")


@dataclass(frozen=True)
class LinkPredResult:
    """One method's mean AUC over link-prediction trials."""

    scenario: str
    method: str
    auc_mean: float
    n_trials: int
    auc_trials: list = field(default_factory=list)
    n_excluded: int = 0


def mse_upper(theta_hat, theta_star):
    """Mean squared error over entries with i < j."""
    h = np.asarray(theta_hat, dtype=np.float64)
    s = np.asarray(theta_star, dtype=np.float64)
    if h.shape != s.shape:
        raise ValueError(f"shape mismatch: {h.shape} vs {s.shape}")
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected square matrices, got shape {h.shape}")
    iu, ju = np.triu_indices(h.shape[0], k=1)
    return float(((h[iu, ju] - s[iu, ju]) ** 2).mean())


def mask_links(a, keep_prob, seed):
    """Zero each unordered pair independently with probability 1-keep_prob.

    Returns (a_masked, mask) where mask is a symmetric boolean matrix,
    True exactly at the erased pairs (whether or not an edge was there).
    """
    validate_adjacency(a)
    if not 0.0 < keep_prob <= 1.0:
        raise ValueError(f"keep_prob must lie in (0,1], got {keep_prob}")
    a = np.asarray(a)
    n = a.shape[0]
    mask = np.zeros((n, n), dtype=bool)
    masked = a.copy()
    if keep_prob < 1.0:
        iu, ju = np.triu_indices(n, k=1)
        drop = substream(seed, "mask").random(len(iu)) >= keep_prob
        mi, mj = iu[drop], ju[drop]
        mask[mi, mj] = True
        mask[mj, mi] = True
        masked[mi, mj] = 0
        masked[mj, mi] = 0
    return masked, mask


def auc_roc(scores, labels):
    """P(score of a positive > score of a negative), ties counted half.

    Computed exactly from midranks, so it matches the brute-force mean
    over all positive-negative pairs.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be 1-D and the same length")
    pos = int((y == 1).sum())
    neg = int((y == 0).sum())
    if pos + neg != len(y):
        raise ValueError("labels must be 0 or 1")
    if pos == 0 or neg == 0:
        raise ValueError("need at least one positive and one negative label")
    ranks = rankdata(s)
    r_pos = float(ranks[y == 1].sum())
    return (r_pos - pos * (pos + 1) / 2.0) / (pos * neg)


def link_prediction_trial(a, cfg, keep_prob, seed):
    """Mask, re-estimate, and score the held-out pairs by AUC.

    The seed drives both the mask and the estimator's own randomness
    (CV holdout); raises like auc_roc if the masked pairs are all-edge
    or all-non-edge.
    """
    masked, mask = mask_links(a, keep_prob, seed)
    trial_cfg = replace(cfg, seed=derive_seed(seed, "estimate"))
    est = estimate(masked, trial_cfg)
    mi, mj = np.where(np.triu(mask, k=1))
    if len(mi) == 0:
        raise ValueError("no pairs were masked; nothing to score")
    return auc_roc(est.theta_hat[mi, mj], np.asarray(a)[mi, mj])


def _scenario_graphon(scenario):
    return builtin_graphon(scenario) if isinstance(scenario, str) else scenario


def _sample_trial(g, n, trial_seed):
    xi = sample_latents(n, trial_seed)
    theta_star = probability_matrix(g, xi)
    return theta_star, sample_adjacency(theta_star, trial_seed)


def monte_carlo_benchmark(scenario, n, methods, n_trials, base_seed, mode="single", threads=1):
    """Paired MSE benchmark: every method sees the same A in each trial.

    Per trial, a fresh graph is drawn from a recorded sub-seed and each
    method estimates with cross-validated lambda (sharing the trial
    seed, hence the same CV holdout). Returns one BenchmarkResult per
    method, in the order given.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be at least 1, got {n_trials}")
    g = _scenario_graphon(scenario)
    name = g.name
    seeds = [derive_seed(base_seed, "trial", t) for t in range(n_trials)]

    def run_trial(trial_seed):
        theta_star, a = _sample_trial(g, n, trial_seed)
        row = {}
        for method in methods:
            cfg = EstimatorConfig(method=method, mode=mode, seed=trial_seed)
            est = estimate(a, cfg)
            ok = all(d.get("converged", True) for d in est.diagnostics.values())
            row[method] = (mse_upper(est.theta_hat, theta_star), ok)
        return row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run_trial, seeds))
    else:
        rows = [run_trial(s) for s in seeds]
    results = []
    for method in methods:
        vals = [rows[t][method][0] for t in range(n_trials)]
        flags = [rows[t][method][1] for t in range(n_trials)]
        mean = float(np.mean(vals))
        std = float(np.std(vals, ddof=1)) if n_trials > 1 else 0.0
        results.append(
            BenchmarkResult(
                scenario=name,
                n=n,
                method=method,
                n_trials=n_trials,
                mse_mean_x1000=1000.0 * mean,
                mse_std_x1000=1000.0 * std,
                mse_trials=vals,
                seeds=list(seeds),
                converged=flags,
            )
        )
    return results


def link_prediction_run(
    scenario=None, n=None, methods=("nn_fl",), n_trials=10, base_seed=0,
    keep_prob=0.8, mode="single", threads=1, a=None,
):
    """Paired link-prediction benchmark over masked-pair AUC.

    Either a scenario name (a fresh graph per trial) or a fixed matrix
    `a` (re-masked per trial). Trials whose masked pairs come out
    single-class are excluded from the mean with a warning; n_trials on
    the result counts the trials that scored.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be at least 1, got {n_trials}")
    if (scenario is None) == (a is None):
        raise ValueError("pass exactly one of scenario or a")
    if a is not None:
        validate_adjacency(a)
        label = "input"
        g = None
    else:
        g = _scenario_graphon(scenario)
        label = g.name
    seeds = [derive_seed(base_seed, "trial", t) for t in range(n_trials)]

    def run_trial(trial_seed):
        a_t = a if a is not None else _sample_trial(g, n, trial_seed)[1]
        row = {}
        for method in methods:
            cfg = EstimatorConfig(method=method, mode=mode, seed=trial_seed)
            try:
                row[method] = link_prediction_trial(a_t, cfg, keep_prob, trial_seed)
            except ValueError as e:
                row[method] = None
                warnings.warn(f"excluding a {method} trial: {e}")
        return row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run_trial, seeds))
    else:
        rows = [run_trial(s) for s in seeds]
    results = []
    for method in methods:
        vals = [rows[t][method] for t in range(n_trials) if rows[t][method] is not None]
        if not vals:
            raise ValueError(f"every {method} trial was excluded; nothing to average")
        results.append(
            LinkPredResult(
                scenario=label,
                method=method,
                auc_mean=float(np.mean(vals)),
                n_trials=len(vals),
                auc_trials=vals,
                n_excluded=n_trials - len(vals),
            )
        )
    return results


def benchmark_report(results):
    """JSON-ready dict with full per-trial detail."""
    return {
        "results": [
            {
                "scenario": r.scenario,
                "n": r.n,
                "method": r.method,
                "n_trials": r.n_trials,
                "mse_mean_x1000": r.mse_mean_x1000,
                "mse_std_x1000": r.mse_std_x1000,
                "mse_trials": list(r.mse_trials),
                "seeds": [int(s) for s in r.seeds],
                "converged": [bool(c) for c in r.converged],
            }
            for r in results
        ]
    }


def benchmark_table_csv(results):
    """Table cells: MSE x1000 to one decimal, one row per method."""
    lines = ["scenario,n,method,n_trials,mse_mean_x1000,mse_std_x1000"]
    for r in results:
        lines.append(
            f"{r.scenario},{r.n},{r.method},{r.n_trials},"
            f"{r.mse_mean_x1000:.1f},{r.mse_std_x1000:.1f}"
        )
    return "\n".join(lines) + "\n"


def linkpred_report(results):
    """JSON-ready dict for link-prediction runs."""
    return {
        "results": [
            {
                "scenario": r.scenario,
                "method": r.method,
                "auc_mean": r.auc_mean,
                "n_trials": r.n_trials,
                "auc_trials": list(r.auc_trials),
                "n_excluded": r.n_excluded,
            }
            for r in results
        ]
    }
