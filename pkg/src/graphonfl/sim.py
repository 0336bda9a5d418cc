"""Graphon functions and network simulation.

A graphon f0 maps the unit square to link probabilities. Sampling draws
latent positions xi ~ U[0,1], builds theta[i,j] = f0(xi_i, xi_j), then
draws each edge A[i,j] ~ Bernoulli(theta[i,j]) independently for i < j.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .rng import substream


@dataclass(frozen=True)
class Graphon:
    """A link-probability function on [0,1]^2 plus metadata."""

    name: str
    fn: Callable = field(repr=False)
    symmetric: bool = True

    def eval(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.asarray(self.fn(u, v), dtype=float)


@dataclass(frozen=True)
class LatentPositions:
    xi: np.ndarray
    seed: int

    def __len__(self):
        return len(self.xi)


def _block(u, n_blocks):
    return np.minimum(np.floor(np.asarray(u, dtype=float) * n_blocks), n_blocks - 1)


def _ex1_sbm12(u, v):
    # 12 equal blocks; within 0.6, across 0.03. The degree function is the
    # same constant (0.6/12 + 0.03*11/12) for every u, so degree sorting
    # carries no information about the block structure.
    return np.where(_block(u, 12) == _block(v, 12), 0.6, 0.03)


def _ex2_sqrt(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return 0.1 + 0.15 * (np.sqrt(u) + np.sqrt(v)) + 0.25 * ((u > 0.5) & (v > 0.5))


def _ex3_constdeg(u, v):
    # 3 equal blocks; within 0.7, across 0.25; degree identically 0.4.
    return np.where(_block(u, 3) == _block(v, 3), 0.7, 0.25)


def _ex4_poly(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return (u + v) ** 2 / 4.0


BUILTIN_GRAPHONS = {
    "ex1_sbm12": Graphon("ex1_sbm12", _ex1_sbm12),
    "ex2_sqrt": Graphon("ex2_sqrt", _ex2_sqrt),
    "ex3_constdeg": Graphon("ex3_constdeg", _ex3_constdeg),
    "ex4_poly": Graphon("ex4_poly", _ex4_poly),
}


def builtin_graphon(name):
    """Look up one of the four bundled scenarios by name."""
    try:
        return BUILTIN_GRAPHONS[name]
    except KeyError:
        valid = ", ".join(sorted(BUILTIN_GRAPHONS))
        raise ValueError(f"unknown graphon {name!r}; valid names: {valid}") from None


def validate_graphon(g, grid=101):
    """Check range (and symmetry, if claimed) on a grid x grid lattice."""
    ticks = np.linspace(0.0, 1.0, grid)
    m = g.eval(ticks[:, None], ticks[None, :])
    if m.shape != (grid, grid):
        raise ValueError(f"graphon {g.name!r} did not broadcast to a lattice")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"graphon {g.name!r} returned non-finite values")
    if m.min() < 0.0 or m.max() > 1.0:
        raise ValueError(f"graphon {g.name!r} leaves [0,1] on the lattice")
    if g.symmetric and not np.array_equal(m, m.T):
        raise ValueError(f"graphon {g.name!r} is flagged symmetric but is not")
    return True


def sample_latents(n, seed):
    """n i.i.d. U[0,1] latent positions, deterministic given seed."""
    if n < 2:
        raise ValueError(f"need n >= 2 nodes, got {n}")
    rng = substream(seed, "latents")
    return LatentPositions(xi=rng.random(n), seed=int(seed))


def probability_matrix(g, xi):
    """theta[i,j] = f0(xi_i, xi_j) off the diagonal, zero on it.

    Asymmetric graphons are symmetrized as (M + M.T)/2 rather than
    rejected. Raises if any value leaves [0,1], naming the offending
    (u, v) pair.
    """
    x = xi.xi if isinstance(xi, LatentPositions) else np.asarray(xi, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("latent positions must be a vector of length >= 2")
    m = g.eval(x[:, None], x[None, :])
    bad = (m < 0.0) | (m > 1.0) | ~np.isfinite(m)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"graphon {g.name!r} returned {m[i, j]!r} outside [0,1] "
            f"at (u, v) = ({x[i]!r}, {x[j]!r})"
        )
    if not g.symmetric:
        m = (m + m.T) / 2.0
    np.fill_diagonal(m, 0.0)
    return m


def sample_adjacency(theta, seed):
    """Draw A[i,j] ~ Bernoulli(theta[i,j]) for i < j, mirror, zero diagonal."""
    validate_probability_matrix(theta)
    n = theta.shape[0]
    rng = substream(seed, "adjacency")
    iu, ju = np.triu_indices(n, k=1)
    draws = rng.random(len(iu))
    a = np.zeros((n, n), dtype=np.int8)
    hits = draws < theta[iu, ju]
    a[iu[hits], ju[hits]] = 1
    a[ju[hits], iu[hits]] = 1
    return a


def validate_probability_matrix(theta):
    theta = np.asarray(theta)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise ValueError(f"probability matrix must be square, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("probability matrix has non-finite entries")
    if theta.min() < 0.0 or theta.max() > 1.0:
        raise ValueError("probability matrix entries must lie in [0,1]")
    if not np.array_equal(theta, theta.T):
        raise ValueError("probability matrix must be symmetric")
    if np.any(np.diagonal(theta) != 0.0):
        raise ValueError("probability matrix must have a zero diagonal")
    return True


def validate_adjacency(a):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {a.shape}")
    vals = np.unique(a)
    if not np.all(np.isin(vals, (0, 1))):
        raise ValueError("adjacency entries must be 0 or 1")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency matrix must be symmetric")
    if np.any(np.diagonal(a) != 0):
        raise ValueError("adjacency diagonal must be zero")
    return True
