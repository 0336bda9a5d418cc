"""Matrix file formats: dense CSV and edge-list TSV.

Dense CSV holds one matrix row per line. Edge-list TSV holds one
"i<TAB>j" line per edge, 0-indexed with i < j, and is only for binary
adjacency matrices; isolated trailing nodes are invisible to it, so
readers accept an explicit n. The extension picks the format.
"""

import os

import numpy as np

from .sim import validate_adjacency


def save_dense_csv(path, m):
    np.savetxt(path, np.asarray(m, dtype=np.float64), delimiter=",", fmt="%.17g")


def load_dense_csv(path):
    m = np.loadtxt(path, delimiter=",", ndmin=2)
    if m.ndim != 2:
        raise ValueError(f"{path} did not parse as a 2-D matrix")
    return m


def save_edge_tsv(path, a):
    validate_adjacency(a)
    iu, ju = np.where(np.triu(np.asarray(a), k=1) == 1)
    with open(path, "w") as fh:
        for i, j in zip(iu, ju):
            fh.write(f"{i}\t{j}\n")


def load_edge_tsv(path, n=None):
    """Symmetric 0/1 matrix from an edge list; n defaults to max id + 1."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two node ids, got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: node ids must be integers") from None
            if i < 0 or j < 0:
                raise ValueError(f"{path}:{lineno}: node ids must be nonnegative")
            if i == j:
                raise ValueError(f"{path}:{lineno}: self-loop {i}-{j} is not allowed")
            pairs.append((min(i, j), max(i, j)))
    if n is None:
        if not pairs:
            raise ValueError(f"{path} has no edges; pass n explicitly")
        n = max(max(p) for p in pairs) + 1
    a = np.zeros((n, n), dtype=np.int8)
    for i, j in pairs:
        if j >= n:
            raise ValueError(f"{path}: node id {j} exceeds n={n}")
        a[i, j] = 1
        a[j, i] = 1
    return a


def load_matrix(path, n=None):
    """Dense .csv or edge-list .tsv, by extension."""
    ext = os.path.splitext(path)[1].lower()
    if ext == ".csv":
        return load_dense_csv(path)
    if ext == ".tsv":
        return load_edge_tsv(path, n=n)
    raise ValueError(f"unrecognized matrix extension {ext!r} (use .csv or .tsv)")


def save_matrix(path, m):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".csv":
        save_dense_csv(path, m)
    elif ext == ".tsv":
        save_edge_tsv(path, m)
    else:
        raise ValueError(f"unrecognized matrix extension {ext!r} (use .csv or .tsv)")
