"""Node orderings: greedy nearest-neighbor tours and degree sorting.

The greedy tour repeatedly hops to the closest unvisited node. For
metrics satisfying the triangle inequality its closed cost is within a
(1 + log2(s)/2) factor of the optimal circuit, which the brute-force
oracle here can verify on small instances.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from ._kernels import HAVE_NUMBA, greedy_tour, greedy_tour_py
from .rng import substream

_BRUTE_FORCE_MAX = 10


@dataclass(frozen=True)
class Tour:
    """A visiting sequence over a metric's node ids, with its costs.

    cost_open sums consecutive hops; cost_closed adds the return edge.
    """

    order: np.ndarray
    start: int
    cost_open: float
    cost_closed: float

    def __len__(self):
        return len(self.order)


def _as_dist(m):
    d = np.ascontiguousarray(np.asarray(m.dist, dtype=np.float64))
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    return d


def _ascending(m):
    """Distance matrix and ids with ids ascending.

    Metrics built by this package already satisfy that; hand-built ones
    are permuted so that position ties equal smallest-id ties.
    """
    d = _as_dist(m)
    ids = np.asarray(m.node_ids)
    if np.any(np.diff(ids) < 0):
        perm = np.argsort(ids, kind="stable")
        ids = ids[perm]
        d = np.ascontiguousarray(d[np.ix_(perm, perm)])
    return d, ids


def _tour_costs(d, pos_order):
    open_cost = float(d[pos_order[:-1], pos_order[1:]].sum())
    closed = open_cost + float(d[pos_order[-1], pos_order[0]])
    return open_cost, closed


def nn_tour(m, start="medoid", seed=None):
    """Greedy nearest-neighbor tour of the metric's node set.

    start is a node id, "medoid" (node minimizing total distance to the
    rest, the default), or "random" (needs seed). Distance ties resolve
    to the smallest node id.
    """
    d, ids = _ascending(m)
    s = d.shape[0]
    if isinstance(start, str):
        if start == "medoid":
            start_pos = int(np.argmin(d.sum(axis=1)))
        elif start == "random":
            if seed is None:
                raise ValueError('start="random" requires a seed')
            start_pos = int(substream(seed, "nn-start").integers(0, s))
        else:
            raise ValueError(f'start must be a node id, "medoid", or "random"; got {start!r}')
    else:
        hits = np.flatnonzero(ids == int(start))
        if len(hits) == 0:
            raise ValueError(f"start node {start} is not in the metric's node ids")
        start_pos = int(hits[0])
    run = greedy_tour if HAVE_NUMBA else greedy_tour_py
    pos_order, open_cost, closed = run(d, start_pos)
    return Tour(
        order=ids[pos_order],
        start=int(ids[start_pos]),
        cost_open=float(open_cost),
        cost_closed=float(closed),
    )


def brute_force_optimal_tour(m, chunk=65536):
    """Exact minimum-cost closed tour by enumerating permutations.

    The first city is pinned to the smallest node id (every rotation of
    a circuit has equal cost); cost ties resolve to the lexicographically
    smallest order. Refuses s > 10.
    """
    d, ids = _ascending(m)
    s = d.shape[0]
    if s > _BRUTE_FORCE_MAX:
        raise ValueError(f"brute force is limited to {_BRUTE_FORCE_MAX} nodes, got {s}")
    if s == 1:
        return Tour(order=ids.copy(), start=int(ids[0]), cost_open=0.0, cost_closed=0.0)
    first = int(np.argmin(ids))
    rest = [p for p in range(s) if p != first]
    best_cost = np.inf
    best_order = None
    it = itertools.permutations(rest)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        tails = np.asarray(block, dtype=np.int64)
        full = np.concatenate(
            [np.full((len(tails), 1), first, dtype=np.int64), tails], axis=1
        )
        costs = d[full[:, :-1], full[:, 1:]].sum(axis=1) + d[full[:, -1], full[:, 0]]
        k = int(np.argmin(costs))
        # argmin takes the first hit and blocks arrive in lexicographic
        # order, so strict < keeps the lexicographically smallest tie.
        if costs[k] < best_cost:
            best_cost = float(costs[k])
            best_order = full[k]
    open_cost, closed = _tour_costs(d, best_order)
    return Tour(
        order=ids[best_order],
        start=int(ids[first]),
        cost_open=open_cost,
        cost_closed=closed,
    )


def sort_ordering(m):
    """Ascending sort by the metric's 1-D embedding (degrees).

    For a degree metric the sorted order is an optimal open path, so no
    tour search is needed. Only kind="degree" metrics qualify.
    """
    if m.kind != "degree":
        raise ValueError(f'sort_ordering needs a metric of kind "degree", got {m.kind!r}')
    if m.embedding is None:
        raise ValueError("degree metric is missing its embedding; build it with degree_metric")
    d = _as_dist(m)
    ids = np.asarray(m.node_ids)
    pos_order = np.lexsort((ids, np.asarray(m.embedding, dtype=np.float64)))
    open_cost, closed = _tour_costs(d, pos_order) if len(ids) > 1 else (0.0, 0.0)
    return Tour(
        order=ids[pos_order],
        start=int(ids[pos_order[0]]),
        cost_open=open_cost,
        cost_closed=closed,
    )


def tour_cost(m, order):
    """Open and closed cost of an explicit visiting order of node ids."""
    d = _as_dist(m)
    ids = np.asarray(m.node_ids)
    lookup = {int(v): i for i, v in enumerate(ids)}
    try:
        pos = np.asarray([lookup[int(v)] for v in order], dtype=np.int64)
    except KeyError as e:
        raise ValueError(f"order contains node {e.args[0]} not in the metric") from None
    if len(pos) != len(ids) or len(set(pos.tolist())) != len(ids):
        raise ValueError("order must visit every node exactly once")
    return _tour_costs(d, pos)
