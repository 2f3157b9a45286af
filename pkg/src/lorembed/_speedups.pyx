# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled longest-path sweep over a topologically ordered causal DAG."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def csr_longest_path(const cnp.int64_t[::1] indptr,
                     const cnp.int64_t[::1] indices,
                     const double[::1] weights,
                     Py_ssize_t source):
    """Longest weighted path from `source` to every node.

    Edges must point from lower to higher node index (the node index order is
    the topological order), so a single forward pass relaxes every edge once.
    Unreachable nodes are -inf.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, -INFINITY)
    cdef double[::1] dist = out
    cdef Py_ssize_t u, e, v
    cdef double du, cand
    dist[source] = 0.0
    for u in range(source, n):
        du = dist[u]
        if du == -INFINITY:
            continue
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            cand = du + weights[e]
            if cand > dist[v]:
                dist[v] = cand
    return out
