"""Recovering causal structure from the three-distance family.

Given only the distances (d_{-1/2}, d_0, d_{1/2}) between sample points,
recover the per-pair Gram data A = |u+|^2, B = |u-|^2, C = <u+, u->, and
from it the whole d_r family, the boundary slices, the chronological order,
its causal closure, and the chronological overlap integrals.

The cone fields have disjoint supports, so on the grid quadrature the
statistic C vanishes exactly for non-related pairs and the future fields of
top-row nodes vanish identically; both facts make the detections exact on
sampled slabs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lorembed.sigma import sigma_flat_block
from lorembed.spacetime import Grid, Point, SpacetimeSpec

# rows: r in {-1/2, 0, 1/2}; columns multiply (A, B, C)
R_PROBES = (-0.5, 0.0, 0.5)


def _ab(r: float):
    return 0.5 * (1.0 + r), 0.5 * (1.0 - r)


def coefficient_matrix() -> np.ndarray:
    M = np.empty((3, 3))
    for i, r in enumerate(R_PROBES):
        a, b = _ab(r)
        M[i] = (a * a, b * b, -2.0 * a * b)
    return M


@dataclass
class Gram:
    """Per-pair Gram data of the cone-lobe difference vectors."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


@dataclass
class DistanceTriple:
    """Symmetric distance matrices at r = -1/2, 0, 1/2."""

    dm: np.ndarray
    d0: np.ndarray
    dp: np.ndarray

    def stack(self) -> np.ndarray:
        return np.stack([self.dm, self.d0, self.dp])


def lambda_block(spec: SpacetimeSpec, grid: Grid,
                 sources: np.ndarray) -> tuple:
    """Quartic cone-lobe fields (future, past) for many sources at once."""
    sig = sigma_flat_block(spec, sources, grid.coords())
    q = sig ** 4
    lam_p = np.where(sig > 0.0, q, 0.0)
    lam_m = np.where(sig < 0.0, q, 0.0)
    return lam_p, lam_m


def _sq_gram(fields: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Squared pairwise L2 distances of row fields."""
    g = (fields * weights) @ fields.T
    d = np.diag(g).copy()
    out = d[:, None] + d[None, :] - (g + g.T)
    np.clip(out, 0.0, None, out=out)
    np.fill_diagonal(out, 0.0)
    return out


def gram_matrices(spec: SpacetimeSpec, grid: Grid,
                  sources: np.ndarray = None) -> Gram:
    """All-pairs Gram data computed from the cone fields directly."""
    if sources is None:
        sources = grid.coords()
    lam_p, lam_m = lambda_block(spec, grid, sources)
    A = _sq_gram(lam_p, grid.weights)
    B = _sq_gram(lam_m, grid.weights)
    P = (lam_p * grid.weights) @ lam_m.T
    C = -(P + P.T)
    np.fill_diagonal(C, 0.0)
    return Gram(A, B, C)


def triple_from_gram(gram: Gram) -> DistanceTriple:
    return DistanceTriple(*(d_r_eval(gram, r) for r in R_PROBES))


def triple_from_fields(spec: SpacetimeSpec, grid: Grid,
                       sources: np.ndarray = None) -> DistanceTriple:
    """Distance triple evaluated from embedded fields, no Gram shortcut."""
    if sources is None:
        sources = grid.coords()
    lam_p, lam_m = lambda_block(spec, grid, sources)
    mats = []
    for r in R_PROBES:
        a, b = _ab(r)
        mats.append(np.sqrt(_sq_gram(a * lam_p - b * lam_m, grid.weights)))
    return DistanceTriple(*mats)


def gram_recover(triple: DistanceTriple) -> Gram:
    """Solve the 3x3 system mapping (A, B, C) to the squared distances."""
    M = coefficient_matrix()
    if abs(np.linalg.det(M)) < 1e-12:
        raise RuntimeError("probe system is singular")
    sq = triple.stack().astype(float) ** 2
    flat = sq.reshape(3, -1)
    sol = np.linalg.solve(M, flat)
    A, B, C = (sol[i].reshape(sq.shape[1:]) for i in range(3))
    return Gram(A, B, C)


def d_r_eval(gram: Gram, r: float) -> np.ndarray:
    """Distance at parameter r from Gram data, elementwise."""
    a, b = _ab(r)
    val = a * a * gram.A + b * b * gram.B - 2.0 * a * b * gram.C
    return np.sqrt(np.clip(val, 0.0, None))


def boundary_detect(gram: Gram, tol: float = None) -> tuple:
    """Indices whose d_{+1} (resp. d_{-1}) nearest gap vanishes.

    Future-boundary points have identically vanishing future cones on the
    sampled slab, so their pairwise d_1 is exactly zero; any positive tol
    below the first interior gap detects the sets exactly.
    """
    d1 = d_r_eval(gram, 1.0)
    dm1 = d_r_eval(gram, -1.0)
    n = d1.shape[0]
    if n < 2:
        raise ValueError("need at least two sample points")
    eye = np.eye(n, dtype=bool)
    if tol is None:
        tol = 1e-10 * max(float(np.max(d1)), float(np.max(dm1)), 1e-30)
    plus = np.nonzero(np.min(np.where(eye, np.inf, d1), axis=1) < tol)[0]
    minus = np.nonzero(np.min(np.where(eye, np.inf, dm1), axis=1) < tol)[0]
    if plus.size == 0 or minus.size == 0:
        raise ValueError(f"no boundary points detected at tol={tol:g}")
    return plus, minus


def chron_reconstruct(gram: Gram, ref_plus: int,
                      tol: float = 0.0) -> np.ndarray:
    """Chronological relation matrix: out[p, q] iff p << q.

    A pair is related iff |C| exceeds tol (the quadrature statistic is an
    exact zero for unrelated pairs); the direction comes from comparing
    d_1(., ref_plus) against the future-boundary reference point.
    """
    n = gram.A.shape[0]
    d1 = d_r_eval(gram, 1.0)
    near = np.min(np.where(np.eye(n, dtype=bool), np.inf, d1)[ref_plus])
    if not near < 1e-6 * max(float(np.max(d1)), 1e-30):
        raise ValueError("reference index is not on the future boundary")
    related = np.abs(gram.C) > tol
    np.fill_diagonal(related, False)
    earlier = d1[:, ref_plus][:, None] > d1[:, ref_plus][None, :]
    return related & earlier


def causal_closure(chron: np.ndarray) -> np.ndarray:
    """p <= q iff every point chronologically after q is also after p."""
    R = chron.astype(float)
    miss = (R @ (1.0 - R).T).T
    out = miss < 0.5
    np.fill_diagonal(out, True)
    return out


def chron_truth_matrix(spec: SpacetimeSpec, grid: Grid,
                       sources: np.ndarray = None) -> np.ndarray:
    """Ground-truth chronological matrix for constant-warp slabs."""
    if not spec.is_constant_warp:
        raise NotImplementedError("ground truth requires a constant warp")
    if sources is None:
        sources = grid.coords()
    c = spec.warp_coeffs[0]
    dt = sources[None, :, 0] - sources[:, None, 0]
    d2 = np.zeros_like(dt)
    for a, L in enumerate(spec.circumferences):
        ds = np.abs(sources[None, :, 1 + a] - sources[:, None, 1 + a]) % L
        ds = np.minimum(ds, L - ds)
        d2 = d2 + ds * ds
    return (dt > 0.0) & (dt * dt - c * c * d2 > 1e-12)


def overlap_integral(spec: SpacetimeSpec, grid: Grid, p: Point, q: Point,
                     constant: float = 1.0) -> tuple:
    """Quartic chronological overlap: (direct quadrature, from distances).

    direct integrates the product of the future lobe of p and the past lobe
    of q (plus the reverse order); reconstructed recovers the same number
    from the three-distance triple of the pair alone, scaled by the
    calibration constant (unity in this normalization).
    """
    sources = np.array([[p.t, *p.s], [q.t, *q.s]])
    lam_p, lam_m = lambda_block(spec, grid, sources)
    w = grid.weights
    direct = float(np.sum(w * lam_p[0] * lam_m[1])
                   + np.sum(w * lam_p[1] * lam_m[0]))
    dists = np.empty(3)
    for i, r in enumerate(R_PROBES):
        a, b = _ab(r)
        f = a * lam_p - b * lam_m
        diff = f[0] - f[1]
        dists[i] = np.sqrt(max(float(np.sum(w * diff * diff)), 0.0))
    triple = DistanceTriple(*dists)
    gram = gram_recover(triple)
    reconstructed = -float(gram.C) * constant
    return direct, reconstructed
