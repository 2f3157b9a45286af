"""Signed Lorentzian distance on slabs: sup of proper time over causal curves.

Two routes. On constant-warp slabs the maximizer is the straight chord with
winding-minimized spatial displacement, giving the closed form
sign(dt) * sqrt(dt^2 - dS^2). For every spec (warped included) there is a
causal-DAG estimator: grid nodes, directed edges into the forward Chebyshev
neighborhood of radius R whose chords are causal, edge weight = proper time
of the chord, and a single longest-path sweep in time order. Null chords get
weight 0 and are kept so that causal (not just chronological) reachability
is represented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from lorembed import kernels
from lorembed.spacetime import Grid, Point, SpacetimeSpec

# quadrature for chord proper time under a non-constant warp
_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(8)
_GU = 0.5 * (_GAUSS_X + 1.0)
_GW = 0.5 * _GAUSS_W
# denser parameter samples for the chord causality test
_CAUSAL_U = np.linspace(0.0, 1.0, 17)


def sigma_flat(spec: SpacetimeSpec, x: Point, y: Point) -> float:
    """Closed-form signed distance on a constant-warp slab."""
    if not spec.is_constant_warp:
        raise ValueError("closed form requires a constant warp")
    c = spec.warp_coeffs[0]
    dtv = y.t - x.t
    q = dtv * dtv - c * c * spec.spatial_dist2(x.s, y.s)
    if q <= 0.0:
        return 0.0
    return math.copysign(math.sqrt(q), dtv)


def sigma_flat_block(spec: SpacetimeSpec, src: np.ndarray,
                     dst: np.ndarray) -> np.ndarray:
    """Signed sigma for every (src, dst) coordinate pair; constant warp.

    src: (m, dim), dst: (n, dim) coordinate arrays; returns (m, n).
    """
    if not spec.is_constant_warp:
        raise ValueError("closed form requires a constant warp")
    c = spec.warp_coeffs[0]
    dtv = dst[None, :, 0] - src[:, None, 0]
    d2 = np.zeros(dtv.shape)
    for a, L in enumerate(spec.circumferences):
        d = np.abs(dst[None, :, 1 + a] - src[:, None, 1 + a]) % L
        d = np.minimum(d, L - d)
        d2 += d * d
    q = dtv * dtv - c * c * d2
    np.clip(q, 0.0, None, out=q)
    return np.sign(dtv) * np.sqrt(q)


def chord_proper_time(spec: SpacetimeSpec, t0: float, dt: float,
                      d_spatial: float) -> float:
    """Proper time of the coordinate chord from (t0, s) to (t0+dt, s+d).

    Returns -inf when the chord is not everywhere causal. dt must be > 0;
    d_spatial is the physical spatial displacement (winding included).
    """
    if spec.is_constant_warp:
        q = dt * dt - (spec.warp_coeffs[0] * d_spatial) ** 2
        return math.sqrt(q) if q >= 0.0 else -np.inf
    tq = t0 + _CAUSAL_U * dt
    qq = dt * dt - np.asarray(spec.warp(tq)) ** 2 * d_spatial ** 2
    if np.min(qq) < -1e-12 * dt * dt:
        return -np.inf
    tg = t0 + _GU * dt
    qg = dt * dt - np.asarray(spec.warp(tg)) ** 2 * d_spatial ** 2
    return float(np.sqrt(np.clip(qg, 0.0, None)) @ _GW)


def _offset_table(grid: Grid, R: int):
    """All forward offsets (di >= 1, |dj| <= R) and per-row chord weights."""
    spec = grid.spec
    nsp = len(grid.ns)
    ranges = [range(1, R + 1)] + [range(-R, R + 1)] * nsp
    offsets = np.array(np.meshgrid(*ranges, indexing="ij"),
                       dtype=np.int64).reshape(nsp + 1, -1).T
    dt_off = offsets[:, 0] * grid.dt
    d2 = np.zeros(len(offsets))
    for a in range(nsp):
        d2 += (offsets[:, 1 + a] * grid.ds[a]) ** 2
    if spec.is_constant_warp:
        c = spec.warp_coeffs[0]
        q = dt_off ** 2 - c * c * d2
        wrow = np.where(q >= 0.0, np.sqrt(np.clip(q, 0.0, None)), -np.inf)
        wtable = np.broadcast_to(wrow, (grid.nt, len(offsets))).copy()
        return offsets, wtable
    t0 = grid.t_nodes[:, None, None]
    tc = t0 + _CAUSAL_U[None, None, :] * dt_off[None, :, None]
    qc = dt_off[None, :, None] ** 2 - np.asarray(spec.warp(tc)) ** 2 \
        * d2[None, :, None]
    causal = np.min(qc, axis=2) >= -1e-12 * dt_off[None, :] ** 2
    tg = t0 + _GU[None, None, :] * dt_off[None, :, None]
    qg = dt_off[None, :, None] ** 2 - np.asarray(spec.warp(tg)) ** 2 \
        * d2[None, :, None]
    w = np.sqrt(np.clip(qg, 0.0, None)) @ _GW
    wtable = np.where(causal, w, -np.inf)
    return offsets, wtable


def _csr_from_offsets(shape, offsets, wtable):
    """Expand the offset stencil into CSR arrays (edges sorted by offset)."""
    nt = shape[0]
    spatial = tuple(shape[1:])
    ss = int(np.prod(spatial))
    n = nt * ss
    counts = np.zeros(n, dtype=np.int64)
    idx_chunks = []
    w_chunks = []
    # flat spatial target index for each offset, precomputed once
    tflat = {}
    for k in range(len(offsets)):
        dsp = tuple(int(d) for d in offsets[k, 1:])
        if dsp not in tflat:
            axes = [(np.arange(m) + d) % m for m, d in zip(spatial, dsp)]
            mesh = np.meshgrid(*axes, indexing="ij")
            tflat[dsp] = np.ravel_multi_index(mesh, spatial).reshape(-1)
    for i in range(nt):
        ks = [k for k in range(len(offsets))
              if wtable[i, k] != -np.inf and i + offsets[k, 0] < nt]
        counts[i * ss:(i + 1) * ss] = len(ks)
        if not ks:
            continue
        tg = np.empty((ss, len(ks)), dtype=np.int64)
        wg = np.empty((ss, len(ks)))
        for c, k in enumerate(ks):
            dsp = tuple(int(d) for d in offsets[k, 1:])
            tg[:, c] = (i + int(offsets[k, 0])) * ss + tflat[dsp]
            wg[:, c] = wtable[i, k]
        idx_chunks.append(tg.reshape(-1))
        w_chunks.append(wg.reshape(-1))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    if idx_chunks:
        indices = np.concatenate(idx_chunks)
        weights = np.concatenate(w_chunks)
    else:
        indices = np.empty(0, dtype=np.int64)
        weights = np.empty(0)
    return indptr, indices, weights


@dataclass
class CausalDAG:
    """Forward causal stencil graph over a grid, topologically ordered."""

    grid: Grid
    R: int
    offsets: np.ndarray
    wtable: np.ndarray
    grid_shape: tuple
    _csr: tuple = field(default=None, repr=False)
    _rev: "CausalDAG" = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.grid.n_nodes

    def _ensure_csr(self):
        if self._csr is None:
            self._csr = _csr_from_offsets(self.grid_shape, self.offsets,
                                          self.wtable)
        return self._csr

    @property
    def indptr(self):
        return self._ensure_csr()[0]

    @property
    def indices(self):
        return self._ensure_csr()[1]

    @property
    def weights(self):
        return self._ensure_csr()[2]

    def out_degree(self, node: int) -> int:
        ptr = self.indptr
        return int(ptr[node + 1] - ptr[node])

    def vertical_step(self) -> float:
        """Smallest one-row straight-up edge weight (timelike scale)."""
        k = None
        for kk in range(len(self.offsets)):
            if self.offsets[kk, 0] == 1 and not self.offsets[kk, 1:].any():
                k = kk
                break
        return float(np.min(self.wtable[: self.grid.nt - 1, k]))

    def reversed(self) -> "CausalDAG":
        """Same edges traversed backwards, re-expressed on the t-mirrored
        grid so the sweep kernels (which need forward time) apply."""
        if self._rev is None:
            nt = self.grid.nt
            off_r = self.offsets.copy()
            off_r[:, 1:] *= -1
            wt_r = np.full_like(self.wtable, -np.inf)
            for k in range(len(self.offsets)):
                di = int(self.offsets[k, 0])
                rows = np.arange(0, nt - di)
                wt_r[rows, k] = self.wtable[nt - 1 - rows - di, k]
            self._rev = CausalDAG(self.grid, self.R, off_r, wt_r,
                                  self.grid_shape)
        return self._rev

    def mirror_index(self, idx: int) -> int:
        ss = self.n_nodes // self.grid.nt
        i, r = divmod(idx, ss)
        return (self.grid.nt - 1 - i) * ss + r


def causal_graph(grid: Grid, R: int = 5) -> CausalDAG:
    """Build the forward causal stencil DAG with neighbor radius R."""
    if R < 2:
        raise ValueError("neighbor radius must be at least 2")
    offsets, wtable = _offset_table(grid, R)
    return CausalDAG(grid, R, offsets, wtable, grid.shape)


def mixing_envelope(grid: Grid, R: int = 5, v_cap: float = 0.8) -> float:
    """Worst relative proper-time deficit of stencil chains over chords
    with velocity at most v_cap (constant warp).

    The longest path can only mix the finitely many step velocities the
    radius-R stencil provides; tau(v) = sqrt(1 - v^2) is concave, so the
    best mix between two adjacent representable velocities lies on the
    chord, and the envelope is the largest relative chord gap on
    [0, v_cap].  The observed max error of sigma_graph over a velocity
    window saturates this bound as the grid refines.
    """
    spec = grid.spec
    if not spec.is_constant_warp:
        raise ValueError("the envelope assumes a constant warp")
    if not 0.0 < v_cap < 1.0:
        raise ValueError("need 0 < v_cap < 1")
    offsets, _ = _offset_table(grid, R)
    dt_off = offsets[:, 0] * grid.dt
    d2 = np.zeros(len(offsets))
    for a in range(len(grid.ns)):
        d2 += (offsets[:, 1 + a] * grid.ds[a]) ** 2
    c = spec.warp_coeffs[0]
    v = c * np.sqrt(d2) / dt_off
    knots = np.unique(np.concatenate([[0.0], v[v <= 1.0]]))
    worst = 0.0
    for v1, v2 in zip(knots[:-1], knots[1:]):
        if v1 >= v_cap:
            break
        t1 = math.sqrt(1.0 - v1 * v1)
        t2 = math.sqrt(max(1.0 - v2 * v2, 0.0))
        m = (t2 - t1) / (v2 - v1)
        vs = min(max(abs(m) / math.sqrt(1.0 + m * m), v1),
                 min(v2, v_cap))
        line = t1 + m * (vs - v1)
        worst = max(worst, 1.0 - line / math.sqrt(1.0 - vs * vs))
    return worst


def _future_values(dag: CausalDAG, node: int) -> np.ndarray:
    """Longest-path proper time from node to every node (-inf unreachable)."""
    return kernels.longest_path_from(dag, node)


def _past_values(dag: CausalDAG, node: int) -> np.ndarray:
    """Longest-path proper time from every node into node."""
    rev = dag.reversed()
    d = kernels.longest_path_from(rev, dag.mirror_index(node))
    ss = dag.n_nodes // dag.grid.nt
    return d.reshape(dag.grid.nt, ss)[::-1].reshape(-1)


def sigma_graph(dag: CausalDAG, x_node: int, y_node: int) -> float:
    """Signed longest-path estimate of sigma between two grid nodes."""
    if x_node == y_node:
        return 0.0
    ss = dag.n_nodes // dag.grid.nt
    ix, iy = x_node // ss, y_node // ss
    if iy > ix:
        d = _future_values(dag, x_node)[y_node]
        return float(d) if d != -np.inf else 0.0
    if iy < ix:
        d = _future_values(dag, y_node)[x_node]
        return -float(d) if d != -np.inf else 0.0
    return 0.0


def sigma_graph_field(dag: CausalDAG, x_node: int) -> np.ndarray:
    """Signed sigma from one node to all nodes (future and past sweeps)."""
    fut = _future_values(dag, x_node)
    pst = _past_values(dag, x_node)
    vals = np.zeros(dag.n_nodes)
    m = fut != -np.inf
    vals[m] = fut[m]
    m = pst != -np.inf
    vals[m] = -pst[m]
    vals[x_node] = 0.0
    return vals


@dataclass
class SigmaField:
    """sigma(source, .) sampled on a grid, positive toward the future."""

    source: Point
    grid: Grid
    values: np.ndarray

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def sigma_field(spec: SpacetimeSpec, grid: Grid, x: Point,
                dag: CausalDAG = None, R: int = 5) -> SigmaField:
    """sigma from x to every grid node.

    Constant warp: exact closed form from the given point. Otherwise the
    point is snapped to its nearest node and the DAG estimator runs one
    future and one past sweep.
    """
    if spec.is_constant_warp:
        vals = sigma_flat_block(spec, np.array([(x.t,) + x.s]),
                                grid.coords())[0]
        return SigmaField(x, grid, vals)
    if dag is None:
        dag = causal_graph(grid, R)
    node = grid.nearest_index(x)
    return SigmaField(grid.node_point(node), grid,
                      sigma_graph_field(dag, node))


def relation(spec: SpacetimeSpec, x: Point, y: Point, grid: Grid = None,
             dag: CausalDAG = None, R: int = 5):
    """Causal relation of two points: (kind, order).

    kind is 'chronological', 'causal' (causal but not chronological), or
    'unrelated'; order is +1 when x precedes y, -1 when y precedes x, 0
    when unrelated or identical.
    """
    if spec.is_constant_warp:
        c = spec.warp_coeffs[0]
        dtv = y.t - x.t
        d = c * math.sqrt(spec.spatial_dist2(x.s, y.s))
        gap = abs(dtv) - d
        order = 0 if dtv == 0.0 else (1 if dtv > 0 else -1)
        if gap > 1e-12:
            return ("chronological", order)
        if gap >= -1e-12:
            return ("causal", order)
        return ("unrelated", 0)
    if dag is None:
        if grid is None:
            raise ValueError("non-constant warp needs a grid or a DAG")
        dag = causal_graph(grid, R)
    g = dag.grid
    nx, ny = g.nearest_index(x), g.nearest_index(y)
    if nx == ny:
        return ("causal", 0)
    tol = max(1e-9, 0.5 * dag.vertical_step())
    ss = dag.n_nodes // g.nt
    if ny // ss < nx // ss:
        kind, order = relation(spec, y, x, dag=dag)
        return (kind, -order)
    d = _future_values(dag, nx)[ny]
    if d == -np.inf:
        return ("unrelated", 0)
    if d > tol:
        return ("chronological", 1)
    return ("causal", 1)
