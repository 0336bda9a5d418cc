"""Node dissimilarity matrices computed from adjacency rows.

Three kinds are provided. `inner` compares rows through their inner
products against reference rows, taking a max over reference anchors
followed by a square root (which restores the triangle inequality).
`degree` compares empirical degrees restricted to the reference set.
`l1` is the Hamming distance between rows on the reference columns.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._kernels import cheb_pairwise, cheb_pairwise_excl
from .rng import substream
from .sim import validate_adjacency

METRIC_KINDS = ("inner", "degree", "l1")


@dataclass(frozen=True)
class MetricMatrix:
    """Pairwise distances over a target node set.

    dist[a, b] is the distance between node_ids[a] and node_ids[b].
    `embedding` holds per-node scalars when the metric is induced by one
    (degrees, for kind="degree"); pairwise distances alone determine a
    1-D layout only up to reflection, so order-based consumers need it.
    """

    dist: np.ndarray
    node_ids: np.ndarray
    kind: str
    triangle_certified: bool = False
    embedding: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"kind must be one of {METRIC_KINDS}, got {self.kind!r}")

    def size(self):
        return len(self.node_ids)


@dataclass(frozen=True)
class TriangleReport:
    ok: bool
    max_violation: float
    worst: tuple


def _check_sets(a, targets, reference):
    validate_adjacency(a)
    n = a.shape[0]
    targets = np.asarray(sorted(set(int(t) for t in targets)), dtype=np.int64)
    reference = np.asarray(sorted(set(int(r) for r in reference)), dtype=np.int64)
    if len(targets) < 2:
        raise ValueError("need at least two target nodes")
    if len(reference) < 1:
        raise ValueError("need at least one reference node")
    for name, ids in (("target", targets), ("reference", reference)):
        if ids.min() < 0 or ids.max() >= n:
            raise ValueError(f"{name} ids must lie in [0, {n}), got {ids.min()}..{ids.max()}")
    overlap = np.intersect1d(targets, reference)
    if len(overlap) and not np.array_equal(targets, reference):
        raise ValueError(
            "target and reference sets overlap partially; they must be "
            "disjoint or identical"
        )
    return np.asarray(a, dtype=float), targets, reference


def inner_product_metric(a, targets, reference, divisor=None):
    """sqrt of the max-over-anchors inner-product discrepancy.

    d(i,j)^2 = max_k |<A_i, A_k> - <A_j, A_k>| / divisor with rows
    restricted to the reference columns and anchors k ranging over the
    reference set. When the two sets coincide, k skips i and j
    themselves: those anchors contribute |deg - overlap| terms that
    drown the signal on sparse graphs. divisor defaults to the full
    matrix dimension n.
    """
    af, targets, reference = _check_sets(a, targets, reference)
    div = float(a.shape[0]) if divisor is None else float(divisor)
    if div <= 0:
        raise ValueError(f"divisor must be positive, got {div}")
    g = af[np.ix_(targets, reference)] @ af[np.ix_(reference, reference)].T
    pairwise = cheb_pairwise_excl if np.array_equal(targets, reference) else cheb_pairwise
    d = np.sqrt(pairwise(g) / div)
    np.fill_diagonal(d, 0.0)
    return MetricMatrix(dist=d, node_ids=targets, kind="inner")


def degree_metric(a, targets, reference):
    """|deg_i - deg_j| where deg is the row mean over reference columns."""
    af, targets, reference = _check_sets(a, targets, reference)
    deg = af[np.ix_(targets, reference)].mean(axis=1)
    d = np.abs(deg[:, None] - deg[None, :])
    return MetricMatrix(
        dist=d, node_ids=targets, kind="degree", triangle_certified=True, embedding=deg
    )


def l1_metric(a, targets, reference):
    """||A_i - A_j||_1 over reference columns (Hamming on binary rows)."""
    af, targets, reference = _check_sets(a, targets, reference)
    rows = af[np.ix_(targets, reference)]
    s = rows.sum(axis=1)
    # On 0/1 rows, |x-y| = x + y - 2xy entrywise, so the row sums and the
    # Gram matrix give every pairwise distance at once.
    d = s[:, None] + s[None, :] - 2.0 * (rows @ rows.T)
    np.fill_diagonal(d, 0.0)
    return MetricMatrix(dist=d, node_ids=targets, kind="l1", triangle_certified=True)


def triangle_check(m, trials=1000, seed=0):
    """Spot-check d(i,k) <= d(i,j) + d(j,k) on random (or all) triples.

    Exhaustive when the target set is small enough that it costs no more
    than the requested number of random trials.
    """
    d = m.dist
    s = d.shape[0]
    if s < 3:
        return TriangleReport(ok=True, max_violation=0.0, worst=())
    n_all = s * (s - 1) * (s - 2)
    if n_all <= trials:
        idx = np.arange(s)
        ii, jj, kk = np.meshgrid(idx, idx, idx, indexing="ij")
        keep = (ii != jj) & (jj != kk) & (ii != kk)
        ii, jj, kk = ii[keep], jj[keep], kk[keep]
    else:
        rng = substream(seed, "triangle")
        ii = rng.integers(0, s, size=trials)
        jj = rng.integers(0, s, size=trials)
        kk = rng.integers(0, s, size=trials)
        keep = (ii != jj) & (jj != kk) & (ii != kk)
        ii, jj, kk = ii[keep], jj[keep], kk[keep]
    viol = d[ii, kk] - d[ii, jj] - d[jj, kk]
    w = int(np.argmax(viol))
    worst_val = float(viol[w])
    if worst_val <= 1e-12:
        return TriangleReport(ok=True, max_violation=max(worst_val, 0.0), worst=())
    ids = m.node_ids
    return TriangleReport(
        ok=False,
        max_violation=worst_val,
        worst=(int(ids[ii[w]]), int(ids[jj[w]]), int(ids[kk[w]])),
    )


def metric_by_kind(kind, a, targets, reference, divisor=None):
    """Dispatch helper used by the estimator."""
    if kind == "inner":
        return inner_product_metric(a, targets, reference, divisor=divisor)
    if kind == "degree":
        return degree_metric(a, targets, reference)
    if kind == "l1":
        return l1_metric(a, targets, reference)
    raise ValueError(f"kind must be one of {METRIC_KINDS}, got {kind!r}")
