"""Bounding invariants of slab spacetimes and the class-membership predicate.

Scalar bounding functions (timelike sectional curvature, boundary second
form, Lorentzian diameter, causal-set volumes, injectivity radii, Gamma)
plus the seven-constraint membership test against a bound vector, and a
finite-difference Gaussian curvature for pullback metrics.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import quad

from .spacetime import SpacetimeSpec, Grid, Point, point, tangent, \
    geodesic_shoot
from .diffgeo import metric_matrix, christoffel_fd, _riemann_from, \
    shape_operator_fd, second_form_norm, first_conjugate_parameter
from .embedding import FSpec, pullback_metric


# ---------------------------------------------------------------------------
# curvature bounds

def csec(spec: SpacetimeSpec, p, plane=None, h: float = 1e-4) -> float:
    """Timelike sectional curvature from finite-difference Christoffels.

    p may be a Point or a bare t value (the metric depends on t only).
    For 2-d slabs the timelike plane is unique; higher dimensions must
    pass plane = (u, v) as coordinate components.  Richardson-extrapolated
    central differences; near the boundary the stencil uses the polynomial
    extension of the warp.
    """
    t = float(p.t) if hasattr(p, "t") else float(p)
    d = spec.dimension
    if plane is None:
        if d != 2:
            raise ValueError("plane required when dimension > 2")
        u = np.array([0.0, 1.0])
        v = np.array([1.0, 0.0])
    else:
        u = np.asarray(plane[0], dtype=float)
        v = np.asarray(plane[1], dtype=float)
    g = metric_matrix(spec, t)
    guu = float(u @ g @ u)
    gvv = float(v @ g @ v)
    guv = float(u @ g @ v)
    den = guu * gvv - guv * guv
    if abs(den) < 1e-14:
        raise ValueError("degenerate plane")

    def num_at(hh):
        G = christoffel_fd(spec, t, hh)
        dG = [np.zeros((d, d, d)) for _ in range(d)]
        dG[0] = (christoffel_fd(spec, t + hh, hh)
                 - christoffel_fd(spec, t - hh, hh)) / (2 * hh)
        R = _riemann_from(G, dG)
        Rv = np.einsum("ijkl,j,k,l->i", R, v, u, v)
        return float(Rv @ g @ u)

    if h < 1e-8:
        raise ValueError("step underflow")
    num = (4.0 * num_at(h / 2) - num_at(h)) / 3.0
    return num / den


def k2_boundary(spec: SpacetimeSpec, h: float = 1e-5) -> float:
    """Sup over the two boundary slices of the shape-operator norm.

    One-sided finite differences of the slice metric (the stencil never
    leaves the slab), Richardson extrapolated.  Constant warp gives 0.
    """
    if h < 1e-9:
        raise ValueError("step underflow")
    best = 0.0
    for t, side in ((spec.t_min, 1), (spec.t_max, -1)):
        a = shape_operator_fd(spec, t, h, side=side)
        b = shape_operator_fd(spec, t, h / 2, side=side)
        best = max(best, second_form_norm((4.0 * b - a) / 3.0))
    return best


def cdiam(spec: SpacetimeSpec, grid: Grid = None) -> float:
    """Lorentzian diameter of the slab: max over point pairs of sigma.

    Closed form valid for every warp: along any causal curve d(tau) <= dt
    pointwise (the warp only subtracts), and the vertical segment between
    the two boundary slices attains equality, so the diameter is the slab
    height.  The grid carries the boundary slices explicitly, hence the
    value is the same with or without a grid argument.
    """
    return float(spec.t_extent)


# ---------------------------------------------------------------------------
# causal-set volumes

def _psi_at(spec: SpacetimeSpec, t: float) -> float:
    # conformal time: integral of 1/f from t_min; exact causal radius
    val, _ = quad(lambda u: 1.0 / float(spec.warp(u)), spec.t_min, float(t),
                  limit=200)
    return val


def _row_conformal_times(spec: SpacetimeSpec, grid: Grid) -> np.ndarray:
    return np.array([_psi_at(spec, t) for t in grid.t_nodes])


def _wrap_dist(spec: SpacetimeSpec, s_block: np.ndarray, s_ref) -> np.ndarray:
    acc = np.zeros(s_block.shape[0])
    for a, L in enumerate(spec.circumferences):
        d = np.abs(s_block[:, a] - s_ref[a])
        d = np.minimum(d, L - d)
        acc += d * d
    return np.sqrt(acc)


def _cone_mask(dist, rho):
    # ties resolve into the cone: J is the closed relation
    return dist <= rho * (1.0 + 1e-12) + 1e-14


def jvol(spec: SpacetimeSpec, grid: Grid, p: Point,
         _psi_rows: np.ndarray = None) -> float:
    """Weighted grid measure of J(p) = J+(p) union J-(p).

    In conformal coordinates the causal relation is exactly |wrap
    distance| <= |conformal time difference|, so the mask is closed-form;
    no graph search is involved.
    """
    if not spec.t_min <= p.t <= spec.t_max:
        raise ValueError("source outside the slab")
    psi = _row_conformal_times(spec, grid) if _psi_rows is None else _psi_rows
    rho_rows = np.abs(psi - _psi_at(spec, p.t))
    rho = np.repeat(rho_rows, grid.n_nodes // grid.nt)
    dist = _wrap_dist(spec, grid.coords()[:, 1:], np.asarray(p.s))
    return float(np.sum(grid.weights[_cone_mask(dist, rho)]))


def jvol_boundary(spec: SpacetimeSpec, grid: Grid, p: Point) -> float:
    """Boundary-area measure of J(p) intersected with both boundary slices."""
    if not spec.t_min <= p.t <= spec.t_max:
        raise ValueError("source outside the slab")
    psi_p = _psi_at(spec, p.t)
    total = 0.0
    for side, tb in (("minus", spec.t_min), ("plus", spec.t_max)):
        coords, w = grid.boundary_nodes(side)
        rho = abs(_psi_at(spec, tb) - psi_p)
        dist = _wrap_dist(spec, coords[:, 1:], np.asarray(p.s))
        total += float(np.sum(w[_cone_mask(dist, rho)]))
    return total


def _source_points(spec: SpacetimeSpec, grid: Grid):
    # one source per t-row plus the two boundary slices; jvol is invariant
    # under the discrete spatial rotations, so the s coordinate is free
    s0 = tuple(float(grid.s_nodes[a][0]) for a in range(len(grid.ns)))
    ts = [float(t) for t in grid.t_nodes] + [spec.t_min, spec.t_max]
    return [point(spec, t, *s0) for t in ts]


def jvol_sup(spec: SpacetimeSpec, grid: Grid) -> float:
    """Sup of jvol over source points of the closed slab."""
    psi = _row_conformal_times(spec, grid)
    return max(jvol(spec, grid, p, _psi_rows=psi)
               for p in _source_points(spec, grid))


def jvol_boundary_sup(spec: SpacetimeSpec, grid: Grid) -> float:
    """Sup of jvol_boundary over source points of the closed slab."""
    return max(jvol_boundary(spec, grid, p)
               for p in _source_points(spec, grid))


# ---------------------------------------------------------------------------
# injectivity radii

def _warp_min_on(spec: SpacetimeSpec, a: float, b: float) -> float:
    c = np.asarray(spec.warp_coeffs, dtype=float)
    cand = [a, b]
    der = P.polyder(c)
    if der.size >= 2 and np.any(der != 0.0):
        for r in P.polyroots(der):
            if abs(r.imag) < 1e-12 and a < r.real < b:
                cand.append(float(r.real))
    return float(np.min(P.polyval(np.asarray(cand), c)))


def _winding_cap(h: float, C: float) -> float:
    """Largest proper time tau with exp a diffeomorphism on every tau-diamond.

    On a cylinder of physical circumference C the exponential map is
    injective on the diamond of w = (a, b) exactly when a - |b| <= C, so
    sup sqrt(a^2 - b^2) over a <= h is h itself while h <= C and
    sqrt(C (2h - C)) beyond (the boosted diamond of height h wins).
    """
    if h <= C:
        return h
    return math.sqrt(C * (2.0 * h - C))


def _vertical_conjugate(spec: SpacetimeSpec, grid: Grid, x: Point,
                        sign: int) -> float:
    # first conjugate proper time along the vertical unit geodesic; the
    # product structure rules this out for constant warp.  256 scan steps
    # are detection-grade (the determinant is smooth along verticals and
    # localization is refined by bisection inside the solver).
    if spec.is_constant_warp:
        return math.inf
    h = (spec.t_max - x.t) if sign > 0 else (x.t - spec.t_min)
    if h <= 1e-14:
        return math.inf
    v = tangent(spec, x, float(sign), *([0.0] * (spec.dimension - 1)))
    path = geodesic_shoot(spec, x, v, steps=max(128, 2 * grid.nt))
    lam = first_conjugate_parameter(spec, path, steps=256)
    return math.inf if lam is None else float(lam)


def injrad_pm(spec: SpacetimeSpec, grid: Grid, x: Point) -> tuple:
    """(injrad+, injrad-) at x: sup of proper times of tangent diamonds
    on which exp is a diffeomorphism.

    Failure modes per direction: leaving the slab (time to boundary),
    winding around the smallest spatial circumference, and conjugate
    points along the vertical geodesic.  The winding cap uses the minimum
    physical circumference over the traversed sub-slab, exact for
    constant warp.
    """
    if not spec.t_min <= x.t <= spec.t_max:
        raise ValueError("point outside the slab")
    out = []
    for sign in (1, -1):
        if sign > 0:
            h, lo, hi = spec.t_max - x.t, x.t, spec.t_max
        else:
            h, lo, hi = x.t - spec.t_min, spec.t_min, x.t
        fmin = _warp_min_on(spec, lo, hi)
        C = min(L * fmin for L in spec.circumferences)
        r = min(_winding_cap(h, C), _vertical_conjugate(spec, grid, x, sign))
        out.append(float(r))
    return tuple(out)


def _injrad_rows(spec: SpacetimeSpec, grid: Grid):
    s0 = tuple(float(grid.s_nodes[a][0]) for a in range(len(grid.ns)))
    ip = np.empty(grid.nt)
    im = np.empty(grid.nt)
    for i, t in enumerate(grid.t_nodes):
        ip[i], im[i] = injrad_pm(spec, grid, point(spec, float(t), *s0))
    return ip, im


def gamma(spec: SpacetimeSpec, grid: Grid) -> float:
    """Grid infimum over nodes of max(injrad+, injrad-).

    Both radii are spatially homogeneous, so one source per t-row
    suffices.
    """
    ip, im = _injrad_rows(spec, grid)
    return float(np.min(np.maximum(ip, im)))


# ---------------------------------------------------------------------------
# membership

@dataclass
class MembershipResult:
    """Per-constraint flags against a 7-vector of bounds, plus the AND."""

    bounds: tuple
    flags: tuple
    all_ok: bool


def membership(report, b) -> MembershipResult:
    """Evaluate the seven class constraints against bound vector b.

    Constraint order: curvature floor -csec_min <= b1, second form
    k2 <= e^b2, diameter cdiam <= e^b3, inverse volume <= e^b4,
    jvol_sup <= e^b5, inverse gamma <= e^b6, boundary jvol <= e^b7.
    Entries may be +inf.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (7,):
        raise ValueError("need a 7-vector of bounds")
    with np.errstate(over="ignore"):
        e = np.exp(b)
    flags = (
        bool(-report.csec_min <= b[0]),
        bool(report.k2_sup <= e[1]),
        bool(report.cdiam <= e[2]),
        bool(1.0 / report.vol <= e[3]),
        bool(report.jvol_sup <= e[4]),
        bool(1.0 / report.gamma <= e[5]),
        bool(report.jvol_boundary_sup <= e[6]),
    )
    return MembershipResult(tuple(float(x) for x in b), flags, all(flags))


# ---------------------------------------------------------------------------
# Gaussian curvature of a 2-d metric callable

def _metric_christoffel(metric_fn, u: np.ndarray, h: float) -> np.ndarray:
    d = u.size
    dg = np.empty((d, d, d))
    for k in range(d):
        up = u.copy()
        um = u.copy()
        up[k] += h
        um[k] -= h
        dg[k] = (metric_fn(up) - metric_fn(um)) / (2 * h)
    gi = np.linalg.inv(metric_fn(u))
    sym = np.empty((d, d, d))
    for j in range(d):
        for k in range(d):
            for l in range(d):
                sym[l, j, k] = dg[j, l, k] + dg[k, l, j] - dg[l, j, k]
    return 0.5 * np.einsum("il,ljk->ijk", gi, sym)


def gaussian_curvature(metric_fn, u, h: float = 1e-3) -> float:
    """Gauss curvature of a 2-d Riemannian metric callable at u.

    metric_fn maps a coordinate pair to a 2x2 SPD matrix; curvature comes
    from finite-difference Christoffels with Richardson extrapolation.
    """
    u = np.asarray(u, dtype=float)
    if h < 1e-7:
        raise ValueError("step underflow")

    def k_at(hh):
        G = _metric_christoffel(metric_fn, u, hh)
        dG = []
        for k in range(2):
            up = u.copy()
            um = u.copy()
            up[k] += hh
            um[k] -= hh
            dG.append((_metric_christoffel(metric_fn, up, hh)
                       - _metric_christoffel(metric_fn, um, hh)) / (2 * hh))
        R = _riemann_from(G, dG)
        g = metric_fn(u)
        r0101 = float(g[0] @ R[:, 1, 0, 1])
        return r0101 / float(np.linalg.det(g))

    return (4.0 * k_at(h / 2) - k_at(h)) / 3.0


def pullback_curvature(spec: SpacetimeSpec, grid: Grid, fspec="h",
                       nodes=None, h: float = None) -> np.ndarray:
    """Gaussian curvature field of the pullback metric on a 2-d slab.

    Exploratory quantity: evaluated at the given node indices (all nodes
    by default), one curvature value per node.  Each evaluation samples
    the pullback metric on a local stencil, so restrict nodes on fine
    grids.
    """
    if spec.dimension != 2:
        raise ValueError("curvature field needs a 2-d slab")
    fr = FSpec.parse(fspec) if isinstance(fspec, str) else fspec
    if h is None:
        h = min(grid.dt, min(grid.ds)) / 8.0
    L = spec.circumferences[0]

    def gfun(uv):
        x = point(spec, float(uv[0]), float(uv[1]) % L)
        return pullback_metric(spec, grid, x, fr).components

    idx = range(grid.n_nodes) if nodes is None else nodes
    out = np.empty(len(idx) if hasattr(idx, "__len__") else grid.n_nodes)
    for m, i in enumerate(idx):
        pt = grid.node_point(int(i))
        out[m] = gaussian_curvature(gfun, np.array([pt.t, pt.s[0]]), h)
    return out


# ---------------------------------------------------------------------------
# assembled report

@dataclass
class InvariantReport:
    """All scalar invariants of one discretized slab.

    vol is the grid measure (sum of node weights) so that jvol_sup <= vol
    holds structurally; injrad fields are per-node arrays in node index
    order.
    """

    csec_min: float
    k2_sup: float
    vol: float
    cdiam: float
    jvol_sup: float
    jvol_boundary_sup: float
    injrad_plus: np.ndarray
    injrad_minus: np.ndarray
    gamma: float
    membership: MembershipResult = None


def invariant_report(spec: SpacetimeSpec, grid: Grid,
                     b=None) -> InvariantReport:
    """Compute every invariant on the grid; membership when b is given."""
    secs = []
    for t in grid.t_nodes:
        if spec.dimension == 2:
            secs.append(csec(spec, float(t)))
        else:
            et = np.zeros(spec.dimension)
            et[0] = 1.0
            for a in range(1, spec.dimension):
                ea = np.zeros(spec.dimension)
                ea[a] = 1.0
                secs.append(csec(spec, float(t), plane=(et, ea)))
    ip_rows, im_rows = _injrad_rows(spec, grid)
    per_row = grid.n_nodes // grid.nt
    report = InvariantReport(
        csec_min=float(np.min(secs)),
        k2_sup=k2_boundary(spec),
        vol=float(np.sum(grid.weights)),
        cdiam=cdiam(spec, grid),
        jvol_sup=jvol_sup(spec, grid),
        jvol_boundary_sup=jvol_boundary_sup(spec, grid),
        injrad_plus=np.repeat(ip_rows, per_row),
        injrad_minus=np.repeat(im_rows, per_row),
        gamma=float(np.min(np.maximum(ip_rows, im_rows))),
    )
    if b is not None:
        report.membership = membership(report, b)
    return report
