"""Signed Lorentzian distance: closed form, causal DAG, longest-path sweeps."""

import math

import numpy as np
import pytest

from lorembed import (
    SpacetimeSpec,
    causal_graph,
    chord_proper_time,
    flat_slab,
    grid_build,
    point,
    relation,
    sigma_field,
    sigma_flat,
    sigma_flat_block,
    sigma_graph,
    sigma_graph_field,
)
from lorembed._kernels_py import csr_longest_path_py, grid_longest_path_np
from lorembed import kernels
from lorembed import sigma as sg

FLAT = flat_slab()  # [-1,1] x S^1(L=4), f = 1
WARPED = SpacetimeSpec(2, -1.0, 1.0, (4.0,), (1.0, 0.0, 1.0))


def test_sigma_flat_fixtures():
    x = point(FLAT, 0.0, 0.0)
    assert sigma_flat(FLAT, x, point(FLAT, 0.5, 0.3)) == pytest.approx(0.4)
    assert sigma_flat(FLAT, point(FLAT, 0.5, 0.3), x) == pytest.approx(-0.4)
    assert sigma_flat(FLAT, x, point(FLAT, 0.2, 0.5)) == 0.0
    # winding: displacement 3.9 is really -0.1 on the L=4 circle
    assert sigma_flat(FLAT, x, point(FLAT, 0.5, 3.9)) == pytest.approx(
        math.sqrt(0.24))


def test_sigma_flat_antisymmetry():
    rng = np.random.default_rng(11)
    for _ in range(200):
        x = point(FLAT, rng.uniform(-1, 1), rng.uniform(0, 4))
        y = point(FLAT, rng.uniform(-1, 1), rng.uniform(0, 4))
        assert sigma_flat(FLAT, x, y) == -sigma_flat(FLAT, y, x)


def test_sigma_flat_block_matches_scalar():
    rng = np.random.default_rng(12)
    pts = [point(FLAT, rng.uniform(-1, 1), rng.uniform(0, 4))
           for _ in range(20)]
    coords = np.array([(p.t,) + p.s for p in pts])
    block = sigma_flat_block(FLAT, coords, coords)
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            assert block[i, j] == pytest.approx(sigma_flat(FLAT, x, y),
                                                abs=1e-14)


def test_sigma_flat_requires_constant_warp():
    with pytest.raises(ValueError):
        sigma_flat(WARPED, point(WARPED, 0, 0), point(WARPED, 0.5, 0))


def test_chord_weight_fixture():
    assert chord_proper_time(FLAT, 0.0, 0.5, 0.3) == pytest.approx(0.4)
    assert chord_proper_time(FLAT, 0.0, 0.5, 0.6) == -np.inf


def test_chord_weight_warped_vs_quadrature():
    from scipy.integrate import quad
    t0, dt, d = -0.2, 0.5, 0.1
    want, _ = quad(lambda u: math.sqrt(dt * dt
                                       - (WARPED.warp(t0 + u * dt) * d) ** 2),
                   0.0, 1.0)
    got = chord_proper_time(WARPED, t0, dt, d)
    assert got == pytest.approx(want, abs=1e-8)
    # chord that turns spacelike near t=1, where f is largest
    assert chord_proper_time(WARPED, 0.5, 0.4, 0.35) == -np.inf


def test_causal_graph_edges_are_causal():
    g = grid_build(FLAT, 16, 16)
    dag = causal_graph(g, 3)
    for k in range(len(dag.offsets)):
        di, dj = dag.offsets[k]
        phys = math.hypot(0, dj * g.ds[0])
        for i in range(g.nt):
            if dag.wtable[i, k] != -np.inf:
                assert abs(dj * g.ds[0]) <= di * g.dt + 1e-12


def test_causal_graph_top_row_sink():
    g = grid_build(FLAT, 8, 8)
    dag = causal_graph(g, 3)
    for j in range(8):
        assert dag.out_degree(g.node_index(7, j)) == 0
    assert dag.out_degree(g.node_index(0, 0)) > 0


def test_causal_graph_edge_weight_example():
    # dt = 0.5, ds = 0.1, so offset (1, 3) is the chord (0.5, 0.3)
    g = grid_build(FLAT, 4, 40)
    dag = causal_graph(g, 3)
    k = next(i for i in range(len(dag.offsets))
             if tuple(dag.offsets[i]) == (1, 3))
    assert dag.wtable[0, k] == pytest.approx(0.4)


def test_causal_graph_radius_precondition():
    g = grid_build(FLAT, 8, 8)
    with pytest.raises(ValueError):
        causal_graph(g, 1)


def test_sigma_graph_close_to_flat():
    g = grid_build(FLAT, 64, 64)
    dag = causal_graph(g, 5)
    nx = g.nearest_index(point(FLAT, 0.0, 0.0))
    ny = g.nearest_index(point(FLAT, 0.5, 0.3))
    got = sigma_graph(dag, nx, ny)
    want = sigma_flat(FLAT, g.node_point(nx), g.node_point(ny))
    assert got == pytest.approx(want, rel=0.02)
    assert got <= want + 1e-12  # graph paths never beat the true sup


def test_sigma_graph_trivial_cases():
    g = grid_build(FLAT, 16, 16)
    dag = causal_graph(g, 3)
    n0 = g.nearest_index(point(FLAT, 0.0, 0.0))
    assert sigma_graph(dag, n0, n0) == 0.0
    far = g.nearest_index(point(FLAT, 0.1, 2.0))
    assert sigma_graph(dag, n0, far) == 0.0


def test_sigma_graph_monotone_in_radius():
    g = grid_build(FLAT, 32, 32)
    nx = g.nearest_index(point(FLAT, -0.8, 0.0))
    ny = g.nearest_index(point(FLAT, 0.8, 0.9))
    prev = -np.inf
    for R in (2, 3, 4, 5):
        val = sigma_graph(causal_graph(g, R), nx, ny)
        assert val >= prev - 1e-12
        prev = val


def test_sigma_graph_antisymmetric():
    g = grid_build(FLAT, 16, 16)
    dag = causal_graph(g, 3)
    rng = np.random.default_rng(4)
    nodes = rng.integers(0, g.n_nodes, size=(30, 2))
    for a, b in nodes:
        assert sigma_graph(dag, int(a), int(b)) == -sigma_graph(
            dag, int(b), int(a))


def test_sigma_graph_field_matches_pairwise():
    for spec in (FLAT, WARPED):
        g = grid_build(spec, 12, 12)
        dag = causal_graph(g, 3)
        node = g.node_index(6, 5)
        vals = sigma_graph_field(dag, node)
        rng = np.random.default_rng(5)
        for m in rng.integers(0, g.n_nodes, size=40):
            assert vals[m] == pytest.approx(
                sigma_graph(dag, node, int(m)), abs=1e-12)


def test_reverse_triangle_on_chains():
    g = grid_build(WARPED, 16, 16)
    dag = causal_graph(g, 3)
    rng = np.random.default_rng(6)
    checked = 0
    attempts = 0
    while checked < 25 and attempts < 400:
        attempts += 1
        x = int(rng.integers(0, g.n_nodes // 2))
        fx = kernels.longest_path_from(dag, x)
        ys = np.flatnonzero(fx != -np.inf)
        ys = ys[ys != x]
        if len(ys) == 0:
            continue
        y = int(rng.choice(ys))
        fy = kernels.longest_path_from(dag, y)
        zs = np.flatnonzero(fy != -np.inf)
        zs = zs[zs != y]
        if len(zs) == 0:
            continue
        z = int(rng.choice(zs))
        assert fx[z] >= fx[y] + fy[z] - 1e-12
        checked += 1
    assert checked == 25


def test_sigma_field_flat_uses_exact_point():
    g = grid_build(FLAT, 32, 32)
    sf = sigma_field(FLAT, g, point(FLAT, 0.0, 0.0))
    # max remaining proper time to the boundary is 1, up to one cell
    assert sf.max_abs() == pytest.approx(1.0, abs=g.dt)
    want = sigma_flat_block(FLAT, np.array([[0.0, 0.0]]), g.coords())[0]
    assert np.array_equal(sf.values, want)


def test_sigma_field_graph_support():
    g = grid_build(WARPED, 24, 24)
    dag = causal_graph(g, 4)
    x = point(WARPED, -0.3, 1.0)
    sf = sigma_field(WARPED, g, x, dag=dag)
    src = g.node_point(g.nearest_index(x))
    coords = g.coords()
    dtv = coords[:, 0] - src.t
    pos = sf.values > 0
    assert np.all(dtv[pos] > 0)  # positive part lies in the future
    neg = sf.values < 0
    assert np.all(dtv[neg] < 0)
    # f >= 1 everywhere, so any causal curve needs |dt| >= physical ds
    L = WARPED.circumferences[0]
    dsv = np.abs((coords[:, 1] - src.s[0] + L / 2) % L - L / 2)
    related = sf.values != 0
    assert np.all(np.abs(dtv[related]) >= dsv[related] - 1e-12)


def test_sigma_field_max_spec_example():
    # graph route on the flat slab: max of sigma_(0,0) is 1 up to a cell
    g = grid_build(FLAT, 32, 32)
    dag = causal_graph(g, 5)
    sf = sigma_field(FLAT, g, point(FLAT, 0.0, 0.0), dag=dag)
    vals = sigma_graph_field(dag, g.nearest_index(point(FLAT, 0.0, 0.0)))
    assert np.max(vals) == pytest.approx(1.0, abs=2 * g.dt)


def test_discrete_continuity_refines():
    jumps = []
    for n in (16, 32, 64):
        g = grid_build(FLAT, n, n)
        dag = causal_graph(g, 3)
        vals = sigma_graph_field(dag, g.nearest_index(point(FLAT, 0.0, 0.0)))
        arr = vals.reshape(n, n)
        jt = np.max(np.abs(np.diff(arr, axis=0)))
        js = np.max(np.abs(np.diff(arr, axis=1)))
        jumps.append(max(jt, js))
        # interior of the cone: bounded gradient, O(dt + ds) differences
        interior = (np.abs(arr[:-1]) >= 0.2) & (np.abs(arr[1:]) >= 0.2) \
            & (np.sign(arr[:-1]) == np.sign(arr[1:]))
        dt_int = np.abs(np.diff(arr, axis=0))[interior]
        assert np.max(dt_int) <= 12 * (g.dt + g.ds[0])
    assert jumps[2] < jumps[1] < jumps[0]


def test_kernel_routes_agree():
    for spec in (FLAT, WARPED):
        g = grid_build(spec, 16, 16)
        dag = causal_graph(g, 3)
        for src in (0, g.n_nodes // 3, g.n_nodes - 1):
            ref = csr_longest_path_py(dag.indptr, dag.indices, dag.weights,
                                      src)
            grid_route = grid_longest_path_np(dag.grid_shape, dag.offsets,
                                              dag.wtable, src)
            assert np.array_equal(ref, grid_route)
            if kernels.HAVE_COMPILED:
                ext = kernels.csr_longest_path_compiled(
                    dag.indptr, dag.indices, dag.weights, src)
                assert np.array_equal(ref, ext)


def test_relation_fixtures():
    x = point(FLAT, 0.0, 0.0)
    assert relation(FLAT, x, point(FLAT, 0.5, 0.3)) == ("chronological", 1)
    assert relation(FLAT, point(FLAT, 0.5, 0.3), x) == ("chronological", -1)
    assert relation(FLAT, x, point(FLAT, 0.3, 0.3)) == ("causal", 1)
    assert relation(FLAT, x, point(FLAT, 0.1, 0.9)) == ("unrelated", 0)


def test_relation_graph_route():
    g = grid_build(WARPED, 24, 24)
    dag = causal_graph(g, 4)
    a = point(WARPED, -0.5, 0.0)
    b = point(WARPED, 0.5, 0.0)
    assert relation(WARPED, a, b, dag=dag) == ("chronological", 1)
    assert relation(WARPED, b, a, dag=dag) == ("chronological", -1)
    far = point(WARPED, -0.4, 2.0)
    assert relation(WARPED, a, far, dag=dag) == ("unrelated", 0)


def test_mixing_envelope_values():
    g = grid_build(FLAT, 64, 64)
    env5 = sg.mixing_envelope(g, R=5)
    assert env5 == pytest.approx(0.0220125, abs=2e-6)
    env7 = sg.mixing_envelope(g, R=7)
    env9 = sg.mixing_envelope(g, R=9)
    assert env9 < env7 < env5


def test_mixing_envelope_validation():
    with pytest.raises(ValueError):
        sg.mixing_envelope(grid_build(WARPED, 16, 16))
    g = grid_build(FLAT, 16, 16)
    with pytest.raises(ValueError):
        sg.mixing_envelope(g, v_cap=0.0)
    with pytest.raises(ValueError):
        sg.mixing_envelope(g, v_cap=1.0)
