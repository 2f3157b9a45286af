"""Invariant computations: curvature bounds, causal volumes, injectivity
radii, membership flags, and the pullback curvature engine."""

import math

import numpy as np
import pytest
from pytest import approx

from lorembed.spacetime import SpacetimeSpec, flat_slab, grid_build, point
from lorembed.sigma import sigma_flat_block, chord_proper_time
from lorembed.diffgeo import sectional, riemann_fd, metric_matrix
from lorembed.invariants import (
    csec, k2_boundary, cdiam, jvol, jvol_boundary, jvol_sup,
    jvol_boundary_sup, injrad_pm, gamma, membership, gaussian_curvature,
    pullback_curvature, invariant_report,
)

WARPED = SpacetimeSpec(2, -1.0, 1.0, (4.0,), (1.0, 0.0, 1.0))
STRONG = SpacetimeSpec(2, -1.0, 1.0, (4.0,), (1.0, 0.0, 4.0))


# ---------------------------------------------------------------------------
# curvature bounds

def test_csec_flat_and_constant_zero():
    for spec in (flat_slab(), SpacetimeSpec(2, -1.0, 1.0, (4.0,), (2.0,))):
        for t in (-0.9, 0.0, 0.45):
            assert abs(csec(spec, t)) <= 1e-6


def test_csec_warped_two_stencil_cross_check():
    u = np.array([0.0, 1.0])
    v = np.array([1.0, 0.0])
    for t in (0.0, 0.5, -0.8):
        fd = csec(WARPED, t)
        exact = sectional(WARPED, t, u, v, route="exact")
        assert fd == approx(exact, abs=1e-4)
        # independent stencil: full Riemann by finite differences
        R = riemann_fd(WARPED, t, h=2e-4)
        g = metric_matrix(WARPED, t)
        Rv = np.einsum("ijkl,j,k,l->i", R, v, u, v)
        den = float((u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2)
        assert fd == approx(float(Rv @ g @ u) / den, abs=1e-4)


def test_csec_accepts_point_and_requires_plane_in_3d():
    spec3 = SpacetimeSpec(3, -1.0, 1.0, (4.0, 4.0), (1.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        csec(spec3, 0.2)
    et = np.array([1.0, 0.0, 0.0])
    e1 = np.array([0.0, 1.0, 0.0])
    val = csec(spec3, point(spec3, 0.2, 1.0, 1.0), plane=(et, e1))
    assert val == approx(sectional(spec3, 0.2, et, e1, route="exact"),
                         abs=1e-4)


def test_k2_constant_warp_zero():
    assert k2_boundary(flat_slab()) <= 1e-6
    assert k2_boundary(SpacetimeSpec(2, -1.0, 1.0, (4.0,), (3.0,))) <= 1e-6


def test_k2_warped_matches_fd_oracle():
    # oracle: one-sided FD of the slice metric f(t)^2 at t = 1 with its
    # own stencil, S = g^-1 g' / 2, Frobenius norm in the slice frame
    h = 1e-6
    f2 = lambda t: float(WARPED.warp(t)) ** 2
    d = (3 * f2(1.0) - 4 * f2(1.0 - h) + f2(1.0 - 2 * h)) / (2 * h)
    oracle = abs(0.5 * d / f2(1.0))
    assert k2_boundary(WARPED) == approx(oracle, abs=1e-4)
    # symbolic-derivative cross-check of the same quantity
    assert oracle == approx(
        abs(float(WARPED.warp_d1(1.0)) / float(WARPED.warp(1.0))), abs=1e-4)


# ---------------------------------------------------------------------------
# diameter

def test_cdiam_closed_forms():
    assert cdiam(flat_slab()) == 2.0
    assert cdiam(SpacetimeSpec(2, 0.0, 1.0, (4.0,), (1.0,))) == 1.0
    a = cdiam(SpacetimeSpec(2, -0.5, 0.5, (4.0,), (1.0,)))
    assert a == approx(0.5 * cdiam(flat_slab()), rel=1e-12)


def test_cdiam_dominates_grid_all_pairs():
    spec = flat_slab()
    grid = grid_build(spec, 16, 16)
    xs = grid.coords()
    sig = sigma_flat_block(spec, xs, xs)
    assert np.max(sig) == approx(spec.t_extent - grid.dt, abs=1e-12)
    assert np.max(sig) <= cdiam(spec, grid)
    # vertical chords realize the full height for non-constant warp too
    assert chord_proper_time(STRONG, -1.0, 2.0, 0.0) == approx(2.0, rel=1e-12)


# ---------------------------------------------------------------------------
# causal-set volumes

def test_jvol_center_flat():
    spec = flat_slab()
    grid = grid_build(spec, 64, 64)
    assert jvol(spec, grid, point(spec, 0.0, 0.0)) == approx(2.0, rel=0.03)


def test_jvol_boundary_source_single_cone():
    spec = flat_slab()
    grid = grid_build(spec, 64, 64)
    # on the top slice only the past cone contributes, area (1+1)^2
    assert jvol(spec, grid, point(spec, 1.0, 0.5)) == approx(4.0, rel=0.03)
    assert jvol(spec, grid, point(spec, -1.0, 0.5)) == approx(4.0, rel=0.03)


def test_jvol_wrap_saturation():
    # L = 0.5: the cone covers full rows beyond |t| = 0.25 and jvol
    # approaches the slab volume
    spec = SpacetimeSpec(2, -1.0, 1.0, (0.5,), (1.0,))
    grid = grid_build(spec, 32, 16)
    vol = float(np.sum(grid.weights))
    v = jvol(spec, grid, point(spec, 0.0, 0.1))
    assert v == approx(0.875, rel=0.03)
    assert 0.85 * vol <= v <= vol


def test_jvol_sup_attained_at_boundary():
    spec = flat_slab()
    grid = grid_build(spec, 64, 64)
    sup = jvol_sup(spec, grid)
    assert sup == approx(4.0, rel=0.03)
    assert sup <= float(np.sum(grid.weights))


def test_jvol_boundary_measure():
    spec = flat_slab()
    grid = grid_build(spec, 32, 32)
    # both cones cut constant total width 2(1-t) + 2(1+t) = 4 out of the
    # two boundary circles
    for t in (-0.6, 0.0, 0.7):
        v = jvol_boundary(spec, grid, point(spec, t, 1.0))
        assert v == approx(4.0, rel=0.05)
    assert jvol_boundary_sup(spec, grid) <= 8.0 + 1e-9


def test_jvol_spatially_homogeneous():
    spec = flat_slab()
    grid = grid_build(spec, 32, 32)
    vals = [jvol(spec, grid, point(spec, 0.3, s)) for s in
            (grid.s_nodes[0][0], grid.s_nodes[0][7], grid.s_nodes[0][20])]
    assert max(vals) - min(vals) <= 1e-9


# ---------------------------------------------------------------------------
# injectivity radii

def test_injrad_flat_time_to_boundary():
    spec = flat_slab()
    grid = grid_build(spec, 32, 32)
    for t in (-0.75, 0.0, 0.6):
        ip, im = injrad_pm(spec, grid, point(spec, t, 1.3))
        assert ip == approx(1.0 - t, abs=1e-15)
        assert im == approx(1.0 + t, abs=1e-15)
    ip, im = injrad_pm(spec, grid, point(spec, 1.0, 0.0))
    assert ip == 0.0


def test_injrad_winding_cap():
    # physical circumference 0.3 < height: the boosted diamond formula
    spec = SpacetimeSpec(2, 0.0, 1.0, (0.6,), (0.5,))
    grid = grid_build(spec, 32, 8)
    ip, im = injrad_pm(spec, grid, point(spec, 0.5, 0.1))
    assert ip == approx(math.sqrt(0.3 * (2 * 0.5 - 0.3)), abs=1e-12)
    assert im == ip
    # short leg below the circumference stays time-to-boundary
    ip, im = injrad_pm(spec, grid, point(spec, 0.9, 0.1))
    assert ip == approx(0.1, abs=1e-15)


def test_injrad_warped_conjugate_branch():
    # vertical geodesics of warped slabs carry no conjugate points, so the
    # jacobi scan leaves time-to-boundary in charge
    grid = grid_build(STRONG, 16, 8)
    ip, im = injrad_pm(STRONG, grid, point(STRONG, 0.3, 1.0))
    assert ip == approx(0.7, abs=1e-9)
    assert im == approx(1.3, abs=1e-9)


def test_gamma_flat():
    spec = flat_slab()
    grid = grid_build(spec, 32, 32)
    g = gamma(spec, grid)
    assert g == approx(1.0 + grid.dt / 2, abs=1e-12)
    assert g == approx(1.0, abs=grid.dt)


def test_gamma_le_cdiam():
    for spec, shape in ((flat_slab(), (16, 16)), (STRONG, (8, 8)),
                        (SpacetimeSpec(2, -2.0, 2.0, (4.0,), (1.0, 0.0, -0.24)),
                         (8, 8))):
        grid = grid_build(spec, *shape)
        assert gamma(spec, grid) <= cdiam(spec, grid) + 1e-12


def test_gamma_cylinder_family_monotone():
    gs = []
    vols = []
    for eps in (1.0, 0.5, 0.1):
        spec = SpacetimeSpec(2, 0.0, 1.0, (0.6,), (eps,))
        grid = grid_build(spec, 64, 16)
        gs.append(gamma(spec, grid))
        vols.append(float(np.sum(grid.weights)))
    assert all(a > b for a, b in zip(gs, gs[1:]))
    assert all(a > b for a, b in zip(vols, vols[1:]))


# ---------------------------------------------------------------------------
# membership

def test_membership_flags():
    spec = flat_slab()
    grid = grid_build(spec, 32, 32)
    rep = invariant_report(spec, grid)
    generous = [1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 2.5]
    assert membership(rep, generous).all_ok
    tight3 = membership(rep, [1.0, 1.0, 0.0, 1.0, 2.0, 1.0, 2.5])
    assert tight3.flags[2] is False
    assert sum(tight3.flags) == 6
    assert membership(rep, [np.inf] * 7).all_ok
    with pytest.raises(ValueError):
        membership(rep, [1.0, 2.0])


def test_membership_monotone_in_b():
    spec = flat_slab()
    grid = grid_build(spec, 16, 16)
    rep = invariant_report(spec, grid)
    prev = None
    for step in np.linspace(-3.0, 4.0, 20):
        flags = membership(rep, [step] * 7).flags
        if prev is not None:
            for a, b in zip(prev, flags):
                assert b or not a
        prev = flags
    assert all(prev)


# ---------------------------------------------------------------------------
# curvature engine and pullback field

def test_gaussian_curvature_round_sphere():
    R = 1.7
    metric = lambda u: np.diag([R ** 2, (R * math.sin(u[0])) ** 2])
    assert gaussian_curvature(metric, (0.9, 0.3)) == approx(1 / R ** 2,
                                                            abs=1e-3)


def test_gaussian_curvature_flat_fixtures():
    assert abs(gaussian_curvature(lambda u: np.eye(2), (0.4, 0.2))) <= 1e-6
    cyl = lambda u: np.diag([1.0, 2.25])
    assert abs(gaussian_curvature(cyl, (0.4, 0.2))) <= 1e-6
    with pytest.raises(ValueError):
        gaussian_curvature(lambda u: np.eye(2), (0.0, 0.0), h=1e-9)


def test_pullback_curvature_field_homogeneous():
    spec = flat_slab()
    grid = grid_build(spec, 16, 16)
    nodes = [grid.node_index(8, 2), grid.node_index(8, 11),
             grid.node_index(4, 2)]
    ks = pullback_curvature(spec, grid, "h", nodes=nodes)
    assert ks.shape == (3,)
    assert np.all(np.isfinite(ks))
    assert abs(ks[0] - ks[1]) <= 1e-9


# ---------------------------------------------------------------------------
# assembled report

def test_invariant_report_flat():
    spec = flat_slab()
    grid = grid_build(spec, 32, 32)
    rep = invariant_report(spec, grid, b=[1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 2.5])
    assert rep.vol == approx(8.0, abs=1e-6)
    assert rep.cdiam == approx(2.0, abs=grid.dt)
    assert rep.gamma == approx(1.0, abs=grid.dt)
    assert abs(rep.csec_min) <= 1e-6
    assert rep.k2_sup <= 1e-6
    assert rep.jvol_sup <= rep.vol + 1e-12
    assert rep.jvol_boundary_sup <= 8.0 + 1e-9
    assert rep.gamma <= rep.cdiam
    assert rep.injrad_plus.shape == (grid.n_nodes,)
    assert rep.injrad_minus.shape == (grid.n_nodes,)
    assert rep.membership.all_ok


def test_invariant_report_3d():
    spec = SpacetimeSpec(3, -1.0, 1.0, (4.0, 4.0), (1.0,))
    grid = grid_build(spec, 8, (8, 8))
    rep = invariant_report(spec, grid)
    assert rep.vol == approx(2.0 * 16.0, abs=1e-6)
    assert rep.gamma == approx(1.0 + grid.dt / 2, abs=1e-12)
    assert rep.jvol_sup <= rep.vol + 1e-12
    assert abs(rep.csec_min) <= 1e-6
