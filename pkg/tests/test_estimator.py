"""Estimator plumbing: splits, block solves, CV selection, USVT baseline."""

import numpy as np
import pytest

from graphonfl.estimator import (
    EstimatorConfig,
    block_estimate,
    cross_validate_lambda,
    estimate,
    split_indices,
    usvt_comparator,
)
from graphonfl.ordering import Tour
from graphonfl.sim import builtin_graphon, probability_matrix, sample_adjacency, sample_latents


def _graph(name, n, seed):
    g = builtin_graphon(name)
    xi = sample_latents(n, seed=seed)
    theta = probability_matrix(g, xi)
    return sample_adjacency(theta, seed=seed + 1), theta


def _trivial_tour(order):
    order = np.asarray(order, dtype=np.int64)
    return Tour(order=order, start=int(order[0]), cost_open=0.0, cost_closed=0.0)


def test_split_indices_half():
    s1, s2 = split_indices(10)
    assert np.array_equal(s1, np.arange(5))
    assert np.array_equal(s2, np.arange(5, 10))


def test_split_indices_explicit_m():
    s1, s2 = split_indices(5, 2)
    assert np.array_equal(s1, [0, 1])
    assert np.array_equal(s2, [2, 3, 4])


def test_split_indices_rejects_tiny_and_bad_m():
    with pytest.raises(ValueError, match="n >= 4"):
        split_indices(3)
    with pytest.raises(ValueError, match="outside"):
        split_indices(6, 5)
    with pytest.raises(ValueError, match="outside"):
        split_indices(6, 0)


def test_config_validation():
    with pytest.raises(ValueError, match="method"):
        EstimatorConfig(method="ridge")
    with pytest.raises(ValueError, match="mode"):
        EstimatorConfig(mode="triple")
    with pytest.raises(ValueError, match="cv"):
        EstimatorConfig(lam="auto")
    with pytest.raises(ValueError, match="nonnegative"):
        EstimatorConfig(lam=-2.0)
    with pytest.raises(ValueError, match="half"):
        EstimatorConfig(m="most")
    with pytest.raises(ValueError, match="at least 2"):
        EstimatorConfig(cv_candidates=1)
    with pytest.raises(ValueError, match="cv_holdout"):
        EstimatorConfig(cv_holdout=1.0)
    with pytest.raises(ValueError, match="cv_span"):
        EstimatorConfig(cv_span=0.0)


def test_block_estimate_lam_zero_returns_block():
    """At lam=0 the scatter must undo the tour's shuffle exactly."""
    rng = np.random.default_rng(3)
    a = (rng.random((6, 6)) < 0.5).astype(np.int8)
    a = np.triu(a, 1)
    a = a + a.T
    tour = _trivial_tour([4, 1, 3])
    out, fit = block_estimate(a, tour, tour, 0.0)
    want = a[np.ix_([1, 3, 4], [1, 3, 4])].astype(np.float64)
    assert np.array_equal(out, want)
    assert fit.converged and fit.iterations == 0


def test_block_estimate_rectangle_lam_zero():
    rng = np.random.default_rng(4)
    a = (rng.random((7, 7)) < 0.4).astype(np.int8)
    a = np.triu(a, 1)
    a = a + a.T
    rows = _trivial_tour([2, 0])
    cols = _trivial_tour([6, 3, 5])
    out, _ = block_estimate(a, rows, cols, 0.0)
    assert np.array_equal(out, a[np.ix_([0, 2], [3, 5, 6])].astype(np.float64))


def test_block_estimate_large_lam_flattens_to_block_mean():
    rng = np.random.default_rng(5)
    a = (rng.random((8, 8)) < 0.5).astype(np.int8)
    a = np.triu(a, 1)
    a = a + a.T
    tour = _trivial_tour([0, 1, 2, 3])
    out, _ = block_estimate(a, tour, tour, 100.0, tol=1e-10)
    block = a[np.ix_(range(4), range(4))]
    assert np.allclose(out, block.mean(), atol=1e-8)


def test_block_estimate_rejects_partial_overlap():
    a = np.zeros((5, 5), dtype=np.int8)
    with pytest.raises(ValueError, match="disjoint or identical"):
        block_estimate(a, _trivial_tour([0, 1]), _trivial_tour([1, 2]), 0.1)


def test_estimate_lam_zero_reproduces_adjacency():
    a, _ = _graph("ex2_sqrt", 24, seed=10)
    for mode in ("single", "split"):
        cfg = EstimatorConfig(method="nn_fl", mode=mode, lam=0.0)
        est = estimate(a, cfg)
        assert np.array_equal(est.theta_hat, a.astype(np.float64))
        assert est.lambda_chosen == 0.0
        assert est.cv_curve is None


def test_estimate_output_invariants():
    a, _ = _graph("ex4_poly", 26, seed=21)
    for method in ("nn_fl", "sas_fl", "l1_fl", "usvt"):
        for mode in ("single", "split"):
            cfg = EstimatorConfig(method=method, mode=mode, lam=0.35)
            est = estimate(a, cfg)
            t = est.theta_hat
            assert t.shape == a.shape
            assert np.array_equal(t, t.T)
            assert np.all(np.diagonal(t) == 0.0)
            assert t.min() >= 0.0 and t.max() <= 1.0


def test_estimate_diagnostics_keys():
    a, _ = _graph("ex3_constdeg", 20, seed=33)
    single = estimate(a, EstimatorConfig(lam=0.3, mode="single"))
    assert set(single.diagnostics) == {"full"}
    split = estimate(a, EstimatorConfig(lam=0.3, mode="split"))
    assert set(split.diagnostics) == {"s1_s1", "s2_s2", "s1_s2"}
    for d in split.diagnostics.values():
        assert d["converged"]
        assert d["lam"] == 0.3


def test_estimate_split_orderings_cover_both_halves():
    a, _ = _graph("ex1_sbm12", 22, seed=40)
    est = estimate(a, EstimatorConfig(lam=0.2, mode="split"))
    tours = est.orderings
    assert set(tours) == {"diag_s1", "diag_s2", "rect_rows", "rect_cols"}
    assert sorted(tours["diag_s1"].order) == list(range(11))
    assert sorted(tours["diag_s2"].order) == list(range(11, 22))


def test_sas_relabeling_equivariance():
    """Relabeling nodes relabels the estimate.

    Degree ties break by node id, so the relabeling is constrained to
    keep the id order inside each tied-degree class; otherwise the two
    runs may legitimately sort tied nodes differently.
    """
    a, _ = _graph("ex2_sqrt", 30, seed=7)
    cfg = EstimatorConfig(method="sas_fl", lam=0.4)
    base = estimate(a, cfg).theta_hat
    perm = np.random.default_rng(8).permutation(30)
    deg = a.sum(axis=1)
    for d in np.unique(deg):
        grp = np.flatnonzero(deg[perm] == d)
        perm[grp] = np.sort(perm[grp])
    relabeled = estimate(a[np.ix_(perm, perm)], cfg).theta_hat
    assert np.array_equal(relabeled, base[np.ix_(perm, perm)])


def test_random_start_is_seed_deterministic():
    a, _ = _graph("ex4_poly", 18, seed=51)
    cfg = EstimatorConfig(method="nn_fl", nn_start="random", lam=0.3, seed=99)
    t1 = estimate(a, cfg).theta_hat
    t2 = estimate(a, cfg).theta_hat
    assert np.array_equal(t1, t2)


def test_cv_on_constant_graphon_recovers_level():
    g = builtin_graphon("ex3_constdeg")
    theta = np.full((60, 60), 0.4)
    np.fill_diagonal(theta, 0.0)
    a = sample_adjacency(theta, seed=13)
    cfg = EstimatorConfig(method="sas_fl", lam="cv", cv_candidates=12, seed=5)
    est = estimate(a, cfg)
    off = est.theta_hat[~np.eye(60, dtype=bool)]
    assert abs(off.mean() - 0.4) < 0.05
    assert np.abs(off - 0.4).max() < 0.25
    del g


def test_cv_curve_layout_and_selection_rule():
    a, _ = _graph("ex2_sqrt", 36, seed=17)
    cfg = EstimatorConfig(method="sas_fl", lam="cv", cv_candidates=8, seed=3)
    est = estimate(a, cfg)
    curve = est.cv_curve
    assert curve.shape == (8, 2)
    lams, scores = curve[:, 0], curve[:, 1]
    assert np.all(np.diff(lams) > 0)
    assert np.all(np.isfinite(scores)) and np.all(scores >= 0)
    # grid spans cv_span * lambda_bar .. lambda_bar
    assert np.isclose(lams[0] / lams[-1], cfg.cv_span, rtol=1e-9)
    # chosen = largest candidate achieving the minimal score
    want = lams[np.flatnonzero(scores == scores.min()).max()]
    assert est.lambda_chosen == want


def test_cv_prefers_smoothing_when_truth_is_flat():
    theta = np.full((40, 40), 0.5)
    np.fill_diagonal(theta, 0.0)
    a = sample_adjacency(theta, seed=29)
    lam_star, curve = cross_validate_lambda(
        a, EstimatorConfig(method="sas_fl", cv_candidates=10, seed=11)
    )
    assert lam_star >= np.median(curve[:, 0])


def test_cv_rejects_usvt():
    a, _ = _graph("ex1_sbm12", 16, seed=2)
    with pytest.raises(ValueError, match="no lambda"):
        cross_validate_lambda(a, EstimatorConfig(method="usvt"))


def test_usvt_complete_graph_is_near_one():
    n = 30
    a = np.ones((n, n), dtype=np.int8)
    np.fill_diagonal(a, 0)
    est = usvt_comparator(a)
    off = est.theta_hat[~np.eye(n, dtype=bool)]
    assert off.min() > 0.9
    assert est.diagnostics["full"]["rank_kept"] == 1
    assert est.lambda_chosen is None
    assert est.method == "usvt"


def test_usvt_empty_graph_is_zero():
    a = np.zeros((12, 12), dtype=np.int8)
    est = usvt_comparator(a)
    assert np.array_equal(est.theta_hat, np.zeros((12, 12)))


def test_usvt_block_model_keeps_few_components():
    a, _ = _graph("ex1_sbm12", 240, seed=61)
    est = usvt_comparator(a)
    assert 1 <= est.diagnostics["full"]["rank_kept"] <= 20


def test_estimate_rejects_invalid_adjacency():
    bad = np.array([[0, 1], [0, 0]], dtype=np.int8)
    with pytest.raises(ValueError, match="symmetric"):
        estimate(bad, EstimatorConfig(lam=0.1))
