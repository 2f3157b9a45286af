"""Warped-product Cauchy slabs and their quadrature grids.

A slab is [t_min, t_max] x S with S a circle or flat 2-torus and metric
-dt^2 + f(t)^2 * (flat spatial metric). The warp f is a polynomial in t,
kept positive on the slab, so every derived quantity (volume, chord proper
time, Christoffel symbols) has an exact closed form to test against.

Grids are cell-centered: interior nodes carry volume weights that sum to the
slab volume, and the two boundary slices t = t_min, t_max get their own node
rings with area weights for boundary integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

NULL_TOL = 1e-12


@dataclass(frozen=True)
class SpacetimeSpec:
    """Warped-product slab: -dt^2 + f(t)^2 * flat, spatial factor closed."""

    dimension: int
    t_min: float
    t_max: float
    circumferences: tuple
    warp_coeffs: tuple = (1.0,)

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValueError("dimension must be 2 or 3 (time included)")
        if not self.t_min < self.t_max:
            raise ValueError("need t_min < t_max")
        circ = tuple(float(L) for L in self.circumferences)
        if len(circ) != self.dimension - 1:
            raise ValueError("one circumference per spatial axis")
        if any(L <= 0 for L in circ):
            raise ValueError("circumferences must be positive")
        coeffs = tuple(float(c) for c in self.warp_coeffs)
        if not coeffs:
            raise ValueError("warp needs at least the constant coefficient")
        object.__setattr__(self, "circumferences", circ)
        object.__setattr__(self, "warp_coeffs", coeffs)
        # positivity of f on the slab; dense sampling suffices for polynomials
        ts = np.linspace(self.t_min, self.t_max, 2049)
        if np.min(P.polyval(ts, coeffs)) <= 0.0:
            raise ValueError("warp must be positive on [t_min, t_max]")

    @property
    def is_constant_warp(self) -> bool:
        return all(c == 0.0 for c in self.warp_coeffs[1:])

    @property
    def t_extent(self) -> float:
        return self.t_max - self.t_min

    def warp(self, t):
        return P.polyval(np.asarray(t, dtype=float), self.warp_coeffs)

    def warp_d1(self, t):
        return P.polyval(np.asarray(t, dtype=float),
                         P.polyder(self.warp_coeffs))

    def warp_d2(self, t):
        return P.polyval(np.asarray(t, dtype=float),
                         P.polyder(self.warp_coeffs, 2))

    def warp_min(self) -> float:
        ts = np.linspace(self.t_min, self.t_max, 2049)
        return float(np.min(self.warp(ts)))

    def warp_max(self) -> float:
        ts = np.linspace(self.t_min, self.t_max, 2049)
        return float(np.max(self.warp(ts)))

    def volume(self) -> float:
        """Exact slab volume: prod(L_i) * integral of f^(dim-1) dt."""
        dens = self.warp_coeffs
        if self.dimension == 3:
            dens = P.polymul(dens, self.warp_coeffs)
        anti = P.polyint(dens)
        tvol = P.polyval(self.t_max, anti) - P.polyval(self.t_min, anti)
        return float(tvol * math.prod(self.circumferences))

    def boundary_volume(self, side: str) -> float:
        """(dim-1)-volume of the t = const boundary slice ('minus'/'plus')."""
        t = self.t_min if side == "minus" else self.t_max
        return float(self.warp(t) ** (self.dimension - 1)
                     * math.prod(self.circumferences))

    def wrap(self, s: float, axis: int) -> float:
        return float(s % self.circumferences[axis])

    def spatial_delta(self, s_from, s_to):
        """Per-axis winding-minimal displacement, each in [-L/2, L/2)."""
        out = []
        for a, L in enumerate(self.circumferences):
            d = (s_to[a] - s_from[a] + 0.5 * L) % L - 0.5 * L
            out.append(d)
        return tuple(out)

    def spatial_dist2(self, s_from, s_to) -> float:
        """Squared winding-minimal distance, exactly symmetric in its args."""
        d2 = 0.0
        for a, L in enumerate(self.circumferences):
            d = abs(s_to[a] - s_from[a]) % L
            d = min(d, L - d)
            d2 += d * d
        return d2


@dataclass(frozen=True)
class Point:
    t: float
    s: tuple

    def coords(self) -> np.ndarray:
        return np.array((self.t,) + self.s)


@dataclass(frozen=True)
class Tangent:
    base: Point
    components: tuple

    @property
    def v_t(self) -> float:
        return self.components[0]

    @property
    def v_s(self) -> tuple:
        return self.components[1:]

    def array(self) -> np.ndarray:
        return np.array(self.components, dtype=float)


def point(spec: SpacetimeSpec, t: float, *s: float) -> Point:
    """Canonical point: t clamped-checked, spatial coords reduced mod L."""
    if len(s) != spec.dimension - 1:
        raise ValueError("wrong number of spatial coordinates")
    if not (spec.t_min - 1e-12 <= t <= spec.t_max + 1e-12):
        raise ValueError(f"t={t} outside slab [{spec.t_min}, {spec.t_max}]")
    t = min(max(t, spec.t_min), spec.t_max)
    return Point(float(t), tuple(spec.wrap(x, a) for a, x in enumerate(s)))


def tangent(spec: SpacetimeSpec, base: Point, *components: float) -> Tangent:
    if len(components) != spec.dimension:
        raise ValueError("tangent needs one component per coordinate")
    return Tangent(base, tuple(float(c) for c in components))


def metric_eval(spec: SpacetimeSpec, p: Point, u: Tangent, v: Tangent) -> float:
    """g(u, v) = -u_t v_t + f(t)^2 sum_i u_si v_si at p."""
    if u.base != p or v.base != p:
        raise ValueError("tangents must be based at the evaluation point")
    f2 = float(spec.warp(p.t)) ** 2
    val = -u.v_t * v.v_t
    for a in range(spec.dimension - 1):
        val += f2 * (u.v_s[a] * v.v_s[a])
    return float(val)


def causal_character(spec: SpacetimeSpec, p: Point, v: Tangent) -> str:
    """'timelike' / 'null' / 'spacelike' by the sign of g(v,v); 'zero'."""
    if all(c == 0.0 for c in v.components):
        return "zero"
    q = metric_eval(spec, p, v, v)
    if abs(q) < NULL_TOL:
        return "null"
    return "timelike" if q < 0 else "spacelike"


class Grid:
    """Cell-centered quadrature grid over a slab.

    Interior nodes are at cell centers (no node lies on the boundary); node
    index order is row-major with t varying slowest. Boundary rings at the
    exact t = t_min / t_max slices are kept separately with area weights.
    """

    def __init__(self, spec: SpacetimeSpec, shape: tuple):
        self.spec = spec
        self.shape = tuple(int(n) for n in shape)
        self.nt = self.shape[0]
        self.ns = self.shape[1:]
        self.dt = spec.t_extent / self.nt
        self.ds = tuple(L / n for L, n in zip(spec.circumferences, self.ns))
        self.t_nodes = spec.t_min + (np.arange(self.nt) + 0.5) * self.dt
        self.s_nodes = tuple((np.arange(n) + 0.5) * d
                             for n, d in zip(self.ns, self.ds))
        self.n_nodes = int(np.prod(self.shape))
        cell = self.dt * math.prod(self.ds)
        dens = spec.warp(self.t_nodes) ** (spec.dimension - 1)
        w_rows = cell * dens
        self.weights = np.repeat(w_rows, self.n_nodes // self.nt)
        self._coords = None

    def coords(self) -> np.ndarray:
        """(n_nodes, dim) node coordinates in index order."""
        if self._coords is None:
            axes = (self.t_nodes,) + self.s_nodes
            mesh = np.meshgrid(*axes, indexing="ij")
            self._coords = np.stack([m.reshape(-1) for m in mesh], axis=1)
        return self._coords

    def node_index(self, *multi: int) -> int:
        return int(np.ravel_multi_index(multi, self.shape))

    def node_multi(self, idx: int) -> tuple:
        return tuple(int(i) for i in np.unravel_index(idx, self.shape))

    def node_point(self, idx: int) -> Point:
        m = self.node_multi(idx)
        s = tuple(float(self.s_nodes[a][m[1 + a]]) for a in range(len(self.ns)))
        return Point(float(self.t_nodes[m[0]]), s)

    def points(self) -> list:
        return [self.node_point(i) for i in range(self.n_nodes)]

    def nearest_index(self, p: Point) -> int:
        it = int(np.clip(np.rint((p.t - self.spec.t_min) / self.dt - 0.5),
                         0, self.nt - 1))
        multi = [it]
        for a, n in enumerate(self.ns):
            j = int(np.rint(p.s[a] / self.ds[a] - 0.5)) % n
            multi.append(j)
        return self.node_index(*multi)

    def boundary_nodes(self, side: str):
        """(coords, weights) for one boundary ring; weights sum to its area."""
        t = self.spec.t_min if side == "minus" else self.spec.t_max
        mesh = np.meshgrid(*self.s_nodes, indexing="ij") if self.ns else []
        m = int(np.prod(self.ns))
        coords = np.empty((m, self.spec.dimension))
        coords[:, 0] = t
        for a, g in enumerate(mesh):
            coords[:, 1 + a] = g.reshape(-1)
        area = math.prod(self.ds) * float(self.spec.warp(t)) ** (
            self.spec.dimension - 1)
        return coords, np.full(m, area)


def grid_build(spec: SpacetimeSpec, n_t: int, n_s) -> Grid:
    """Build a cell-centered grid; every axis needs at least 4 cells."""
    ns = (n_s,) if np.isscalar(n_s) else tuple(n_s)
    if len(ns) != spec.dimension - 1:
        raise ValueError("one spatial resolution per spatial axis")
    if n_t < 4 or any(n < 4 for n in ns):
        raise ValueError("grid resolution must be at least 4 per axis")
    return Grid(spec, (int(n_t),) + tuple(int(n) for n in ns))


@dataclass
class GeodesicPath:
    """Sampled geodesic: affine parameter, coordinates, velocities."""

    spec: SpacetimeSpec
    lam: np.ndarray
    coords: np.ndarray
    vels: np.ndarray
    exited: bool = field(default=False)

    def points(self) -> list:
        return [point(self.spec, c[0], *c[1:]) for c in self.coords]

    def end_point(self) -> Point:
        c = self.coords[-1]
        return point(self.spec, c[0], *c[1:])

    def spatial_momenta(self) -> np.ndarray:
        """Conserved f(t)^2 * ds/dlam per spatial axis, sampled along."""
        f2 = np.asarray(self.spec.warp(self.coords[:, 0])) ** 2
        return f2[:, None] * self.vels[:, 1:]

    def momentum_drift(self) -> float:
        mom = self.spatial_momenta()
        if mom.size == 0:
            return 0.0
        return float(np.max(np.abs(mom - mom[0])))

    def norm_drift(self) -> float:
        """Drift of g(c', c') along the path (conserved for geodesics)."""
        f2 = np.asarray(self.spec.warp(self.coords[:, 0])) ** 2
        q = -self.vels[:, 0] ** 2 + f2 * np.sum(self.vels[:, 1:] ** 2, axis=1)
        return float(np.max(np.abs(q - q[0])))


def _geodesic_rhs(spec: SpacetimeSpec, y: np.ndarray) -> np.ndarray:
    # y = (t, s..., vt, vs...); warped-product geodesic equations
    dim = spec.dimension
    t = y[0]
    v = y[dim:]
    f = float(spec.warp(t))
    fp = float(spec.warp_d1(t))
    out = np.empty_like(y)
    out[:dim] = v
    vs2 = float(np.sum(v[1:] ** 2))
    out[dim] = -f * fp * vs2
    out[dim + 1:] = -2.0 * (fp / f) * v[0] * v[1:]
    return out


def _rk4_step(spec: SpacetimeSpec, y: np.ndarray, h: float) -> np.ndarray:
    k1 = _geodesic_rhs(spec, y)
    k2 = _geodesic_rhs(spec, y + 0.5 * h * k1)
    k3 = _geodesic_rhs(spec, y + 0.5 * h * k2)
    k4 = _geodesic_rhs(spec, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def geodesic_shoot(spec: SpacetimeSpec, p: Point, v: Tangent,
                   steps: int = 256, param_max: float = None) -> GeodesicPath:
    """Integrate the geodesic from p with initial velocity v.

    Fixed-step RK4; the path is truncated at the slab boundary by bisecting
    the final step, so the last sample lies on t = t_min or t_max to 1e-12.
    """
    if all(c == 0.0 for c in v.components):
        raise ValueError("cannot shoot the zero vector")
    if v.base != p:
        raise ValueError("velocity must be based at the start point")
    if param_max is None:
        if abs(v.v_t) > 1e-12:
            param_max = 1.5 * spec.t_extent / abs(v.v_t)
        else:
            vmag = math.sqrt(sum(c * c for c in v.components))
            param_max = 2.0 * sum(spec.circumferences) / vmag
    h = param_max / steps
    dim = spec.dimension
    y = np.concatenate([p.coords(), v.array()])
    lam = [0.0]
    ys = [y.copy()]
    exited = False
    for _ in range(steps):
        y_next = _rk4_step(spec, y, h)
        t_next = y_next[0]
        if t_next < spec.t_min or t_next > spec.t_max:
            # bisect the step length to land on the boundary
            lo, hi = 0.0, h
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                y_mid = _rk4_step(spec, y, mid)
                if spec.t_min <= y_mid[0] <= spec.t_max:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-15 * max(1.0, h):
                    break
            y = _rk4_step(spec, y, lo)
            y[0] = min(max(y[0], spec.t_min), spec.t_max)
            lam.append(lam[-1] + lo)
            ys.append(y.copy())
            exited = True
            break
        y = y_next
        lam.append(lam[-1] + h)
        ys.append(y.copy())
    arr = np.array(ys)
    return GeodesicPath(spec, np.array(lam), arr[:, :dim], arr[:, dim:],
                        exited=exited)


def flat_slab(t_min: float = -1.0, t_max: float = 1.0,
              circumference: float = 4.0, warp: float = 1.0) -> SpacetimeSpec:
    """Convenience constructor for the 2D constant-warp slab."""
    return SpacetimeSpec(2, t_min, t_max, (circumference,), (warp,))
