"""Distance-function embeddings of a slab into L2 of its own grid.

Phi maps a point x to the field f(sigma_x) over the grid; the family of
weightings f (quartic h, the signed-quartic f_r family, absolute value,
identity, cone indicators) yields the distance family d_p. On constant-warp
slabs the chord from x to a node is the inverse exponential in closed form,
which gives the differential and Hessian of Phi pointwise and the pullback
Riemannian metric as a Gram matrix of differential fields.

Sign conventions of the differential and Hessian are normalized against the
flat finite-difference oracle (see the tests): with w the chord and sigma
signed,
  dPhi.v  (y) = f'(sigma) g(v, w) / sigma
  HessPhi(v,v)(y) = f''(sigma) (g(v,w)/sigma)^2 - f'(sigma) g(vp, vp) / sigma
where vp is the g-orthogonal part of v relative to w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lorembed.diffgeo import ConjugatePointError, JacobiSolution, \
    jacobi_two_point
from lorembed.sigma import CausalDAG, sigma_field
from lorembed.spacetime import GeodesicPath, Grid, Point, SpacetimeSpec, \
    Tangent

_SMOOTH = ("h", "fr")
_VARIANTS = ("h", "fr", "abs", "id", "chi_plus", "chi_minus")


@dataclass(frozen=True)
class FSpec:
    """Weighting function applied to sigma fields.

    h(x) = x^4; fr(x) = (1/2 + (r/2) sgn x) |x| x^3, i.e. a_r x^4 on x >= 0
    and -b_r x^4 on x < 0 with a_r = (1+r)/2, b_r = (1-r)/2; abs, id, and the
    cone indicators chi_plus / chi_minus are value-only (not differentiable).
    """

    variant: str
    r: float = 0.0

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown f variant {self.variant!r}")
        if self.variant == "fr" and not -1.0 <= self.r <= 1.0:
            raise ValueError("r must lie in [-1, 1]")

    @property
    def smooth(self) -> bool:
        return self.variant in _SMOOTH

    @property
    def a(self) -> float:
        return 0.5 * (1.0 + self.r)

    @property
    def b(self) -> float:
        return 0.5 * (1.0 - self.r)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.variant == "h":
            return x ** 4
        if self.variant == "fr":
            return np.where(x >= 0, self.a * x ** 4, -self.b * x ** 4)
        if self.variant == "abs":
            return np.abs(x)
        if self.variant == "id":
            return x.copy()
        if self.variant == "chi_plus":
            return (x > 0).astype(float)
        return (x < 0).astype(float)

    def d1(self, x):
        if not self.smooth:
            raise ValueError(f"{self.variant} is not differentiable")
        x = np.asarray(x, dtype=float)
        if self.variant == "h":
            return 4.0 * x ** 3
        return np.where(x >= 0, 4.0 * self.a * x ** 3, -4.0 * self.b * x ** 3)

    def d2(self, x):
        if not self.smooth:
            raise ValueError(f"{self.variant} is not differentiable")
        x = np.asarray(x, dtype=float)
        if self.variant == "h":
            return 12.0 * x ** 2
        return np.where(x >= 0, 12.0 * self.a * x ** 2,
                        -12.0 * self.b * x ** 2)

    @staticmethod
    def parse(token: str) -> "FSpec":
        """CLI token: h | fr:<r> | abs | id | chi+ | chi-."""
        tok = token.strip()
        if tok.startswith("fr:"):
            return FSpec("fr", float(tok[3:]))
        alias = {"chi+": "chi_plus", "chi-": "chi_minus", "id": "id",
                 "abs": "abs", "h": "h", "chi_plus": "chi_plus",
                 "chi_minus": "chi_minus"}
        if tok not in alias:
            raise ValueError(f"unknown f token {token!r}")
        return FSpec(alias[tok])


H = FSpec("h")
ABS = FSpec("abs")
CHI_PLUS = FSpec("chi_plus")
CHI_MINUS = FSpec("chi_minus")


def f_r(r: float) -> FSpec:
    return FSpec("fr", r)


@dataclass
class EmbeddedPoint:
    base: Point
    fspec: FSpec
    grid: Grid
    values: np.ndarray


@dataclass
class MetricAtPoint:
    base: Point
    components: np.ndarray


def phi(spec: SpacetimeSpec, grid: Grid, x: Point, fspec: FSpec,
        dag: CausalDAG = None) -> EmbeddedPoint:
    """The embedded point f(sigma_x) sampled over the grid."""
    sig = sigma_field(spec, grid, x, dag=dag).values
    return EmbeddedPoint(x, fspec, grid, fspec.value(sig))


def l2_inner(f1: np.ndarray, f2: np.ndarray, grid: Grid) -> float:
    """Weighted inner product; deterministic pairwise summation."""
    if f1.shape != (grid.n_nodes,) or f2.shape != (grid.n_nodes,):
        raise ValueError("fields must be sampled on the given grid")
    return float(np.sum(grid.weights * f1 * f2))


def l2_norm(f: np.ndarray, grid: Grid) -> float:
    return math.sqrt(max(l2_inner(f, f, grid), 0.0))


def lp_dist_fields(f1: np.ndarray, f2: np.ndarray, grid: Grid, p) -> float:
    """L^p distance of two sampled fields under the grid weights."""
    if f1.shape != (grid.n_nodes,) or f2.shape != (grid.n_nodes,):
        raise ValueError("fields must be sampled on the given grid")
    diff = f1 - f2
    if p == 1:
        return float(np.sum(grid.weights * np.abs(diff)))
    if p == 2:
        return math.sqrt(max(float(np.sum(grid.weights * diff * diff)), 0.0))
    if p in ("inf", np.inf):
        return float(np.max(np.abs(diff[grid.weights > 0])))
    raise ValueError("p must be 1, 2, or 'inf'")


def _sup_dist_abs_rows(spec: SpacetimeSpec, grid: Grid, x: Point,
                       y: Point) -> float:
    """Exact sup of ||sigma_x| - |sigma_y|| over the sampled t-rows plus
    the two boundary slices (dim 2, constant warp).

    Along one row the difference is piecewise smooth with cusps only at
    the four cone crossings, peaks at the base longitudes, kinks at the
    antipodes, and stationary points that solve a linear equation after
    squaring; the row sup is the maximum over those closed-form
    candidates.  Node sampling alone misses the sup by O(sqrt(ds)) because
    it concentrates on the cones.
    """
    c = spec.warp_coeffs[0]
    L = spec.circumferences[0]
    sx, sy = x.s[0], y.s[0]
    levels = np.concatenate([grid.t_nodes, [spec.t_min, spec.t_max]])
    best = 0.0
    for t in levels:
        dtx, dty = t - x.t, t - y.t
        A, B = abs(dtx) / c, abs(dty) / c
        cand = [sx, sy, sx + 0.5 * L, sy + 0.5 * L,
                sx + A, sx - A, sy + B, sy - B]
        # stationary points of sqrt(dtx^2-c^2(s-a)^2)-sqrt(dty^2-c^2(s-b)^2)
        # per unwrapped branch: (s-a) B = +-(s-b) A
        for a in (sx - L, sx, sx + L):
            for b in (sy - L, sy, sy + L):
                if abs(B - A) > 1e-15:
                    cand.append((a * B - b * A) / (B - A))
                if A + B > 1e-15:
                    cand.append((a * B + b * A) / (B + A))
        for s in cand:
            u = abs(s - sx) % L
            u = min(u, L - u)
            v = abs(s - sy) % L
            v = min(v, L - v)
            gx = math.sqrt(max(dtx * dtx - (c * u) ** 2, 0.0))
            gy = math.sqrt(max(dty * dty - (c * v) ** 2, 0.0))
            best = max(best, abs(gx - gy))
    return best


def dist_p(spec: SpacetimeSpec, grid: Grid, x: Point, y: Point, fspec: FSpec,
           p=2, dag: CausalDAG = None) -> float:
    if p in ("inf", np.inf) and fspec.variant == "abs" \
            and spec.is_constant_warp and spec.dimension == 2:
        return _sup_dist_abs_rows(spec, grid, x, y)
    fx = phi(spec, grid, x, fspec, dag=dag).values
    fy = phi(spec, grid, y, fspec, dag=dag).values
    return lp_dist_fields(fx, fy, grid, p)


def beem_distance(spec: SpacetimeSpec, grid: Grid, x: Point, y: Point,
                  dag: CausalDAG = None) -> float:
    """Summed volumes of the cone symmetric differences.

    Computed literally as d_1 with the past-cone indicator plus d_1 with the
    future-cone indicator, so the identity with that distance pair is exact.
    """
    sx = sigma_field(spec, grid, x, dag=dag).values
    sy = sigma_field(spec, grid, y, dag=dag).values
    d = lp_dist_fields(CHI_MINUS.value(sx), CHI_MINUS.value(sy), grid, 1)
    d += lp_dist_fields(CHI_PLUS.value(sx), CHI_PLUS.value(sy), grid, 1)
    return d


def chords_from(spec: SpacetimeSpec, grid: Grid, x: Point):
    """Inverse-exponential chords from x to every node (constant warp).

    Returns (w, sig): w is (n_nodes, dim) with winding-minimal spatial
    displacement, sig the signed proper time of the chord (0 if not
    timelike-related).
    """
    if not spec.is_constant_warp:
        raise NotImplementedError(
            "closed-form chords require a constant warp")
    coords = grid.coords()
    dtv = coords[:, 0] - x.t
    cols = [dtv]
    c = spec.warp_coeffs[0]
    q = dtv * dtv
    for a, L in enumerate(spec.circumferences):
        d = (coords[:, 1 + a] - x.s[a] + 0.5 * L) % L - 0.5 * L
        cols.append(d)
        q = q - (c * c) * (d * d)
    w = np.column_stack(cols)
    sig = np.sign(dtv) * np.sqrt(np.clip(q, 0.0, None))
    sig[q <= 0.0] = 0.0
    return w, sig


def _metric_dot(spec: SpacetimeSpec, v: np.ndarray, w: np.ndarray):
    """g(v, w) for one vector v against rows of w; constant warp."""
    c2 = spec.warp_coeffs[0] ** 2
    out = -v[0] * w[:, 0]
    for a in range(1, spec.dimension):
        out = out + c2 * (v[a] * w[:, a])
    return out


def dphi(spec: SpacetimeSpec, grid: Grid, x: Point, v: Tangent,
         fspec: FSpec) -> np.ndarray:
    """Directional derivative field of Phi at x along v.

    Supported on timelike-related nodes; requires a differentiable fspec.
    """
    if not fspec.smooth:
        raise ValueError("dphi needs a differentiable f (h or fr)")
    if v.base != x:
        raise ValueError("direction must be based at x")
    w, sig = chords_from(spec, grid, x)
    out = np.zeros(grid.n_nodes)
    m = sig != 0.0
    gvw = _metric_dot(spec, v.array(), w[m])
    out[m] = fspec.d1(sig[m]) * gvw / sig[m]
    return out


def hessian(spec: SpacetimeSpec, grid: Grid, x: Point, v: Tangent,
            fspec: FSpec) -> np.ndarray:
    """Second directional derivative field of Phi at x along v.

    f''(sigma) (dsigma.v)^2 + f'(sigma) Hess sigma(v,v), with
    Hess sigma(v,v) = -g(vp, vp)/sigma from the orthogonal part vp of v;
    signs fixed against the flat finite-difference oracle.
    """
    if not fspec.smooth:
        raise ValueError("hessian needs a differentiable f (h or fr)")
    if v.base != x:
        raise ValueError("direction must be based at x")
    w, sig = chords_from(spec, grid, x)
    out = np.zeros(grid.n_nodes)
    m = sig != 0.0
    sm = sig[m]
    varr = v.array()
    gvw = _metric_dot(spec, varr, w[m])
    c2 = spec.warp_coeffs[0] ** 2
    gvv = -varr[0] ** 2 + c2 * float(np.sum(varr[1:] ** 2))
    # g(w,w) = -sigma^2 on timelike chords, so the orthogonal part has
    # g(vp, vp) = g(v,v) + g(v,w)^2 / sigma^2
    g_perp = gvv + (gvw / sm) ** 2
    dsig = gvw / sm
    out[m] = fspec.d2(sm) * dsig * dsig - fspec.d1(sm) * g_perp / sm
    return out


def pullback_metric(spec: SpacetimeSpec, grid: Grid, x: Point, fspec: FSpec,
                    route: str = "gram") -> MetricAtPoint:
    """Pullback Riemannian metric at x: Gram matrix of the dphi fields.

    route='integrand' evaluates the explicit quadrature
    sum w_y f'(sigma)^2 g(e_a, w) g(e_b, w) / sigma^2 instead; the two must
    agree to rounding.
    """
    dim = spec.dimension
    G = np.zeros((dim, dim))
    if route == "gram":
        fields = []
        for a in range(dim):
            comps = tuple(1.0 if i == a else 0.0 for i in range(dim))
            fields.append(dphi(spec, grid, x, Tangent(x, comps), fspec))
        for a in range(dim):
            for b in range(a, dim):
                G[a, b] = G[b, a] = l2_inner(fields[a], fields[b], grid)
    elif route == "integrand":
        w, sig = chords_from(spec, grid, x)
        m = sig != 0.0
        sm = sig[m]
        wm = w[m]
        wt = grid.weights[m]
        fp2 = fspec.d1(sm) ** 2
        basis = np.eye(dim)
        dots = [_metric_dot(spec, basis[a], wm) for a in range(dim)]
        for a in range(dim):
            for b in range(a, dim):
                val = float(np.sum(wt * fp2 * dots[a] * dots[b] / sm ** 2))
                G[a, b] = G[b, a] = val
    else:
        raise ValueError("route must be 'gram' or 'integrand'")
    return MetricAtPoint(x, G)


def jacobi_solve(spec: SpacetimeSpec, geodesic: GeodesicPath, v: Tangent,
                 steps: int = 512) -> JacobiSolution:
    """Jacobi field along the geodesic with K(0) = v and K(1) = 0."""
    return jacobi_two_point(spec, geodesic, v, steps=steps)


def phi_block(spec: SpacetimeSpec, grid: Grid, sources: np.ndarray,
              fspec: FSpec) -> np.ndarray:
    """Fields f(sigma_x) for many sources at once; constant warp.

    sources: (m, dim) coordinates. Returns (m, n_nodes).
    """
    from lorembed.sigma import sigma_flat_block
    return fspec.value(sigma_flat_block(spec, sources, grid.coords()))


def d2_matrix(fields: np.ndarray, grid: Grid) -> np.ndarray:
    """All-pairs L2 distances between row fields via one Gram product."""
    fw = fields * grid.weights
    gram = fw @ fields.T
    sq = np.diag(gram).copy()
    d2 = sq[:, None] + sq[None, :] - 2.0 * gram
    np.clip(d2, 0.0, None, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)
