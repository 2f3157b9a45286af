"""Connection, curvature, and Jacobi fields on warped-product slabs.

Everything here exists in two routes: exact formulas obtained by polynomial
arithmetic on the warp (no hand-derived curvature identities are trusted),
and finite-difference routes computed straight from metric samples. Tests
cross-check the two; downstream invariants use the FD route as primary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lorembed.spacetime import GeodesicPath, SpacetimeSpec, Tangent


class ConjugatePointError(RuntimeError):
    """Two-point Jacobi system is singular: endpoint conjugate to start."""


def metric_matrix(spec: SpacetimeSpec, t: float) -> np.ndarray:
    d = spec.dimension
    g = np.zeros((d, d))
    g[0, 0] = -1.0
    f2 = float(spec.warp(t)) ** 2
    for a in range(1, d):
        g[a, a] = f2
    return g


def christoffel(spec: SpacetimeSpec, t: float) -> np.ndarray:
    """Gamma^i_jk from the warp polynomial, exact."""
    d = spec.dimension
    f = float(spec.warp(t))
    fp = float(spec.warp_d1(t))
    G = np.zeros((d, d, d))
    for a in range(1, d):
        G[0, a, a] = f * fp
        G[a, 0, a] = G[a, a, 0] = fp / f
    return G


def christoffel_dt(spec: SpacetimeSpec, t: float) -> np.ndarray:
    """d/dt of christoffel, again exact polynomial arithmetic."""
    d = spec.dimension
    f = float(spec.warp(t))
    fp = float(spec.warp_d1(t))
    fpp = float(spec.warp_d2(t))
    G = np.zeros((d, d, d))
    for a in range(1, d):
        G[0, a, a] = fp * fp + f * fpp
        G[a, 0, a] = G[a, a, 0] = (fpp * f - fp * fp) / (f * f)
    return G


def christoffel_fd(spec: SpacetimeSpec, t: float, h: float = 1e-5) -> np.ndarray:
    """Gamma^i_jk by central differences of the metric components."""
    d = spec.dimension
    g0 = metric_matrix(spec, t)
    ginv = np.linalg.inv(g0)
    # only the t-derivative is nonzero for a warped product
    dg = np.zeros((d, d, d))
    dg[0] = (metric_matrix(spec, t + h) - metric_matrix(spec, t - h)) / (2 * h)
    G = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            for k in range(d):
                s = 0.0
                for l in range(d):
                    s += ginv[i, l] * (dg[j, l, k] + dg[k, l, j] - dg[l, j, k])
                G[i, j, k] = 0.5 * s
    return G


def _riemann_from(G, dG) -> np.ndarray:
    """R^i_jkl with R(e_k, e_l) e_j = R^i_jkl e_i; dG[k] = d Gamma / dx^k."""
    d = G.shape[0]
    R = np.zeros((d, d, d, d))
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    val = dG[k][i, l, j] - dG[l][i, k, j]
                    for m in range(d):
                        val += G[i, k, m] * G[m, l, j] \
                            - G[i, l, m] * G[m, k, j]
                    R[i, j, k, l] = val
    return R


def riemann(spec: SpacetimeSpec, t: float) -> np.ndarray:
    d = spec.dimension
    dG = [np.zeros((d, d, d)) for _ in range(d)]
    dG[0] = christoffel_dt(spec, t)
    return _riemann_from(christoffel(spec, t), dG)


def riemann_fd(spec: SpacetimeSpec, t: float, h: float = 1e-4) -> np.ndarray:
    d = spec.dimension
    dG = [np.zeros((d, d, d)) for _ in range(d)]
    dG[0] = (christoffel_fd(spec, t + h) - christoffel_fd(spec, t - h)) \
        / (2 * h)
    return _riemann_from(christoffel_fd(spec, t), dG)


def sectional(spec: SpacetimeSpec, t: float, u: np.ndarray, v: np.ndarray,
              route: str = "exact") -> float:
    """Sectional curvature of span(u, v) at (t, .): g(R(u,v)v, u) / area^2."""
    R = riemann(spec, t) if route == "exact" else riemann_fd(spec, t)
    g = metric_matrix(spec, t)
    # R(u, v) v: arguments k=u, l=v, j=v
    Rv = np.einsum("ijkl,j,k,l->i", R, v, u, v)
    num = float(Rv @ g @ u)
    guu = float(u @ g @ u)
    gvv = float(v @ g @ v)
    guv = float(u @ g @ v)
    den = guu * gvv - guv * guv
    if abs(den) < 1e-14:
        raise ValueError("degenerate plane")
    return num / den


def shape_operator_exact(spec: SpacetimeSpec, t: float) -> np.ndarray:
    """Shape operator of the t = const slice w.r.t. the future unit normal."""
    d = spec.dimension
    rate = float(spec.warp_d1(t)) / float(spec.warp(t))
    return rate * np.eye(d - 1)


def shape_operator_fd(spec: SpacetimeSpec, t: float, h: float = 1e-5,
                      side: int = 0) -> np.ndarray:
    """FD shape operator: (1/2) h^{-1} d h / dt with h the slice metric.

    side > 0 uses a forward one-sided stencil, side < 0 backward, so the
    boundary slices can be handled without leaving the slab.
    """
    def slice_metric(tt):
        return float(spec.warp(tt)) ** 2 * np.eye(spec.dimension - 1)

    if side == 0:
        dh = (slice_metric(t + h) - slice_metric(t - h)) / (2 * h)
    elif side > 0:
        dh = (-3 * slice_metric(t) + 4 * slice_metric(t + h)
              - slice_metric(t + 2 * h)) / (2 * h)
    else:
        dh = (3 * slice_metric(t) - 4 * slice_metric(t - h)
              + slice_metric(t - 2 * h)) / (2 * h)
    return 0.5 * np.linalg.inv(slice_metric(t)) @ dh


def second_form_norm(S: np.ndarray) -> float:
    """Frobenius norm of the shape operator (slice-metric orthonormal frame)."""
    return float(np.sqrt(np.sum(S * S)))


@dataclass
class JacobiSolution:
    """Jacobi field K along a unit-reparametrized geodesic, K(1) = 0."""

    tau: np.ndarray         # (m,) parameter samples in [0, 1]
    K: np.ndarray           # (m, dim) coordinate components
    dK0: np.ndarray         # coordinate dK/dtau at tau = 0
    coords: np.ndarray      # geodesic samples used by the solver
    vels: np.ndarray        # geodesic velocity in the tau parameter

    def norms_sq(self, spec: SpacetimeSpec) -> np.ndarray:
        f2 = np.asarray(spec.warp(self.coords[:, 0])) ** 2
        return -self.K[:, 0] ** 2 + f2 * np.sum(self.K[:, 1:] ** 2, axis=1)


def _jacobi_rhs(spec, dim, y):
    # y layout: x(dim), u(dim), K(dim, dim+1), W(dim, dim+1) flattened
    x = y[:dim]
    u = y[dim:2 * dim]
    nc = dim + 1
    K = y[2 * dim:2 * dim + dim * nc].reshape(dim, nc)
    W = y[2 * dim + dim * nc:].reshape(dim, nc)
    G = christoffel(spec, x[0])
    R = riemann(spec, x[0])
    du = -np.einsum("ijk,j,k->i", G, u, u)
    Gu = np.einsum("ijk,j->ik", G, u)
    dK = W - Gu @ K
    dW = -Gu @ W - np.einsum("ijkl,j,ka,l->ia", R, u, K, u)
    return np.concatenate([u, du, dK.reshape(-1), dW.reshape(-1)])


def jacobi_two_point(spec: SpacetimeSpec, path: GeodesicPath, v: Tangent,
                     steps: int = 512) -> JacobiSolution:
    """Solve D^2 K + R(K, c') c' = 0 with K(0) = v, K(1) = 0.

    The geodesic is reparametrized to [0, 1]; linear shooting with the
    fundamental matrix. Raises ConjugatePointError when the endpoint system
    is singular.
    """
    dim = spec.dimension
    span = float(path.lam[-1])
    if span <= 0:
        raise ValueError("geodesic path has zero parameter span")
    x0 = path.coords[0].copy()
    u0 = path.vels[0] * span  # unit-interval parametrization
    vb = np.array([v.base.t, *v.base.s])
    if not np.allclose(vb, x0, atol=1e-9):
        raise ValueError("variation vector must sit at the geodesic start")
    nc = dim + 1
    K0 = np.zeros((dim, nc))
    K0[:, 0] = v.array()
    W0 = np.zeros((dim, nc))
    W0[:, 1:] = np.eye(dim)
    y = np.concatenate([x0, u0, K0.reshape(-1), W0.reshape(-1)])
    h = 1.0 / steps
    taus = np.linspace(0.0, 1.0, steps + 1)
    Ks = np.empty((steps + 1, dim, nc))
    Xs = np.empty((steps + 1, dim))
    Us = np.empty((steps + 1, dim))
    Ks[0] = K0
    Xs[0] = x0
    Us[0] = u0
    for n in range(steps):
        k1 = _jacobi_rhs(spec, dim, y)
        k2 = _jacobi_rhs(spec, dim, y + 0.5 * h * k1)
        k3 = _jacobi_rhs(spec, dim, y + 0.5 * h * k2)
        k4 = _jacobi_rhs(spec, dim, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        Xs[n + 1] = y[:dim]
        Us[n + 1] = y[dim:2 * dim]
        Ks[n + 1] = y[2 * dim:2 * dim + dim * nc].reshape(dim, nc)
    M_end = Ks[-1][:, 1:]
    k1_end = Ks[-1][:, 0]
    if not np.all(np.isfinite(M_end)) or np.linalg.cond(M_end) > 1e8:
        raise ConjugatePointError("endpoint is conjugate to the start point")
    c = np.linalg.solve(M_end, -k1_end)
    K = Ks[:, :, 0] + Ks[:, :, 1:] @ c
    G0 = christoffel(spec, x0[0])
    dK0 = c - np.einsum("ijk,j,k->i", G0, u0, v.array())
    return JacobiSolution(taus, K, dK0, Xs, Us)


def first_conjugate_parameter(spec: SpacetimeSpec, path: GeodesicPath,
                              steps: int = 1024):
    """First tau in (0, 1] where det of the fundamental matrix vanishes.

    Returns the unnormalized path parameter of the first conjugate point,
    or None if there is none along the sampled stretch.
    """
    dim = spec.dimension
    span = float(path.lam[-1])
    if span <= 0:
        return None
    x0 = path.coords[0].copy()
    u0 = path.vels[0] * span
    nc = dim + 1
    K0 = np.zeros((dim, nc))
    W0 = np.zeros((dim, nc))
    W0[:, 1:] = np.eye(dim)
    y = np.concatenate([x0, u0, K0.reshape(-1), W0.reshape(-1)])
    h = 1.0 / steps

    def rk4(state, hh):
        k1 = _jacobi_rhs(spec, dim, state)
        k2 = _jacobi_rhs(spec, dim, state + 0.5 * hh * k1)
        k3 = _jacobi_rhs(spec, dim, state + 0.5 * hh * k2)
        k4 = _jacobi_rhs(spec, dim, state + hh * k3)
        return state + (hh / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    def det_of(state):
        M = state[2 * dim:2 * dim + dim * nc].reshape(dim, nc)[:, 1:]
        return float(np.linalg.det(M))

    prev_det = None
    prev_tau = 0.0
    for n in range(steps):
        y_prev = y
        y = rk4(y, h)
        tau = (n + 1) * h
        det = det_of(y)
        # det ~ tau^dim > 0 near the start; skip the trivial zero at tau = 0
        if tau > 4 * h and prev_det is not None:
            if det == 0.0 or (det < 0) != (prev_det < 0):
                # bisect inside the bracketing step, restarting from the
                # saved state so the crossing is pinned near roundoff
                lo, hi, dlo = 0.0, h, prev_det
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    ym = y_prev
                    for _ in range(4):
                        ym = rk4(ym, mid / 4.0)
                    dm = det_of(ym)
                    if dm == 0.0:
                        lo = hi = mid
                        break
                    if (dm < 0) == (dlo < 0):
                        lo, dlo = mid, dm
                    else:
                        hi = mid
                    if hi - lo <= 1e-16 * h:
                        break
                return (prev_tau + 0.5 * (lo + hi)) * span
        prev_det = det
        prev_tau = tau
    return None
