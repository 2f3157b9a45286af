"""Length structures induced by embedding distances.

Partition lengths and their dyadic sup, the induced length metric as an
epsilon-graph shortest path, and the two classical experiments: the Noldus
divergence sequence (spatial curves are not rectifiable for the sup
distance) and Beem additivity (causal curves are geodesics for the cone
volume distance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from lorembed import embedding as emb
from lorembed.sigma import relation
from lorembed.spacetime import Grid, Point, SpacetimeSpec, grid_build, point


@dataclass
class SampledCurve:
    """A curve given by strictly increasing parameters and sample points."""

    params: np.ndarray
    points: list

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        if self.params.ndim != 1 or self.params.size < 2:
            raise ValueError("need at least two samples")
        if len(self.points) != self.params.size:
            raise ValueError("parameter/point count mismatch")
        if np.any(np.diff(self.params) <= 0):
            raise ValueError("parameters must be strictly increasing")

    def at(self, tau: float):
        idx = int(np.searchsorted(self.params, tau))
        if idx >= self.params.size or self.params[idx] != tau:
            raise ValueError(f"{tau} is not a sample parameter")
        return self.points[idx]


@dataclass
class PartitionLengthRecord:
    depth: int
    partition: np.ndarray
    value: float


def partition_length(curve: SampledCurve, d, Z) -> float:
    """Sum of d over consecutive partition points.

    Z must be a subset of the curve parameters containing both endpoints.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 1 or Z.size < 2 or np.any(np.diff(Z) <= 0):
        raise ValueError("partition must be strictly increasing, size >= 2")
    if Z[0] != curve.params[0] or Z[-1] != curve.params[-1]:
        raise ValueError("partition must contain both endpoints")
    pts = [curve.at(tau) for tau in Z]
    return math.fsum(d(pts[i - 1], pts[i]) for i in range(1, len(pts)))


def _dyadic_partition(params: np.ndarray, depth: int) -> np.ndarray:
    n = params.size - 1
    pieces = min(2 ** depth, n)
    idx = np.unique(np.round(np.arange(pieces + 1) * n / pieces).astype(int))
    return params[idx]


def sup_length(curve: SampledCurve, d, max_depth: int = 8):
    """Dyadic refinement sequence of partition lengths.

    Returns (records, converged); converged means the last two values agree
    to a relative 1e-3. The sequence is non-decreasing whenever d obeys the
    triangle inequality.
    """
    records = []
    for k in range(max_depth + 1):
        Z = _dyadic_partition(curve.params, k)
        records.append(PartitionLengthRecord(k, Z, partition_length(
            curve, d, Z)))
        if Z.size == curve.params.size:
            break
    converged = False
    if len(records) >= 2:
        a, b = records[-2].value, records[-1].value
        converged = abs(b - a) <= 1e-3 * max(abs(a), abs(b), 1e-300)
    return records, converged


def length_metric(points, d, eps: float = None) -> np.ndarray:
    """All-pairs induced-length distances via the eps-neighborhood graph.

    d may be a callable on point pairs or a precomputed symmetric matrix.
    Default eps is three times the largest nearest-neighbor gap. Raises if
    the graph is disconnected at the given eps.
    """
    if callable(d):
        n = len(points)
        D = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                D[i, j] = D[j, i] = float(d(points[i], points[j]))
    else:
        D = np.asarray(d, dtype=float)
        n = D.shape[0]
        if D.shape != (n, n):
            raise ValueError("distance matrix must be square")
    if eps is None:
        off = D + np.diag(np.full(n, np.inf))
        eps = 3.0 * float(np.max(np.min(off, axis=1)))
    mask = (D <= eps) & ~np.eye(n, dtype=bool)
    graph = csr_matrix((D[mask], np.nonzero(mask)), shape=(n, n))
    lam = shortest_path(graph, method="D", directed=False)
    if not np.all(np.isfinite(lam)):
        raise ValueError(f"neighborhood graph disconnected at eps={eps:g}")
    return lam


def noldus_closed_form(a: float, t: float, n) -> np.ndarray:
    """S(n) = n D(t/n) with D(tau) = sqrt(tau (2a - tau))."""
    n = np.asarray(n, dtype=float)
    return np.sqrt(t) * np.sqrt(2.0 * a * n - t)


@dataclass
class NoldusRecord:
    a: float
    t: float
    n_list: np.ndarray
    closed: np.ndarray
    grid: np.ndarray = None


def noldus_divergence(a: float, t: float, n_list, grid_n: int = 0,
                      circumference: float = 4.0) -> NoldusRecord:
    """Divergence sequence S(n) of the sup-distance length refinement.

    Closed form always; when grid_n > 0 the same quantities are measured
    with grid sup distances on the slab [1-2a, 1] x S^1.
    """
    if not 0.0 < t < 2.0 * a:
        raise ValueError("need 0 < t < 2a")
    n_arr = np.asarray(list(n_list), dtype=int)
    if np.any(n_arr < 1):
        raise ValueError("refinement counts must be >= 1")
    closed = noldus_closed_form(a, t, n_arr)
    grid_vals = None
    if grid_n:
        spec = SpacetimeSpec(2, 1.0 - 2.0 * a, 1.0, (circumference,), (1.0,))
        grid = grid_build(spec, grid_n, grid_n)
        h = 1.0 - a
        grid_vals = np.empty(n_arr.size)
        for i, n in enumerate(n_arr):
            p = point(spec, h, 0.0)
            q = point(spec, h, t / n)
            grid_vals[i] = n * emb.dist_p(spec, grid, p, q, emb.ABS, "inf")
    return NoldusRecord(a, t, n_arr, closed, grid_vals)


def beem_geodesic_check(spec: SpacetimeSpec, grid: Grid, p: Point, q: Point,
                        r: Point, dag=None) -> float:
    """Additivity residual |d_B(p,r) - d_B(p,q) - d_B(q,r)| for p <= q <= r."""
    for x, y in ((p, q), (q, r)):
        if x == y:
            continue
        kind, order = relation(spec, x, y)
        if kind == "unrelated" or order != 1:
            raise ValueError("points must form a future-directed causal "
                             "chain p <= q <= r")
    d_pr = emb.beem_distance(spec, grid, p, r, dag=dag)
    d_pq = emb.beem_distance(spec, grid, p, q, dag=dag)
    d_qr = emb.beem_distance(spec, grid, q, r, dag=dag)
    return abs(d_pr - d_pq - d_qr)
