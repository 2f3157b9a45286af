"""Pure-Python kernels mirroring the compiled ones.

`csr_longest_path_py` is a straight reference loop (used for cross-checking
and as the last-resort path for non-grid DAGs). `grid_longest_path_np` is the
fast fallback: it exploits the fixed offset stencil of grid DAGs to relax one
time row at a time with vectorized maxima, visiting rows in topological order
so every edge is relaxed exactly once.
"""

from __future__ import annotations

import numpy as np


def csr_longest_path_py(indptr, indices, weights, source):
    n = len(indptr) - 1
    dist = np.full(n, -np.inf)
    dist[source] = 0.0
    for u in range(source, n):
        du = dist[u]
        if du == -np.inf:
            continue
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            cand = du + weights[e]
            if cand > dist[v]:
                dist[v] = cand
    return dist


def grid_longest_path_np(shape, offsets, wtable, source_index):
    """Longest path on a grid DAG given per-row offset weights.

    shape: (nt, ns1[, ns2]) node layout, row-major, t first.
    offsets: int array (n_off, ndim) of index displacements, dt >= 1.
    wtable: (nt, n_off) chord weights; -inf marks a non-causal chord.
    source_index: flat node index of the source.

    Equivalent to the CSR sweep: when row `it` is used as a relaxation source,
    every edge into it (from rows < it) has already been applied.
    """
    nt = shape[0]
    spatial = tuple(shape[1:])
    dist = np.full((nt,) + spatial, -np.inf)
    src = np.unravel_index(source_index, (nt,) + spatial)
    dist[src] = 0.0
    n_off = offsets.shape[0]
    roll_axes = tuple(range(len(spatial)))
    for it in range(src[0], nt - 1):
        row = dist[it]
        if not np.isfinite(row.max()):
            continue
        for k in range(n_off):
            w = wtable[it, k]
            if w == -np.inf:
                continue
            di = int(offsets[k, 0])
            jt = it + di
            if jt >= nt:
                continue
            cand = row + w
            shift = tuple(int(d) for d in offsets[k, 1:])
            if any(shift):
                cand = np.roll(cand, shift, axis=roll_axes)
            np.maximum(dist[jt], cand, out=dist[jt])
    return dist.reshape(-1)
