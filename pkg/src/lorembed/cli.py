"""Command-line experiment driver.

Subcommands compute fields and matrices, run the verification pipelines,
and write JSON reports plus CSV exports.  Exit status: 0 when every check
passes, 1 on a numerical failure (diagnostic on stderr, report still
written), 2 on a config schema violation (nothing written).
"""

import argparse
import math
import sys
import time

import numpy as np

from . import __version__
from . import embedding as emb
from . import hilbert as hb
from . import invariants as inv
from . import lengths as lg
from . import reconstruction as rec
from . import sigma as sg
from .config import (ConfigError, default_config, load_config)
from .kernels import backend_name
from .reports import CheckResult, VerificationReport, export_field
from .spacetime import SpacetimeSpec, grid_build, point, tangent

_MATRIX_NODE_LIMIT = 2048


def _config_for(args):
    cfg = load_config(args.config) if args.config else default_config()
    wanted = getattr(args, "experiment_name", None)
    if cfg.experiment is not None and wanted is not None \
            and cfg.experiment != wanted:
        raise ConfigError(f"config is for experiment {cfg.experiment!r}, "
                          f"not {wanted!r}")
    return cfg


def _grid(cfg):
    spec = cfg.spacetime
    ns = cfg.n_s if spec.dimension == 2 \
        else (cfg.n_s,) * (spec.dimension - 1)
    return grid_build(spec, cfg.n_t, ns)


def _grid_dict(grid):
    return {"n_t": grid.nt, "n_s": list(grid.ns), "dt": grid.dt,
            "ds": list(grid.ds), "n_nodes": grid.n_nodes}


def _parse_point(spec, text):
    try:
        vals = [float(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad point {text!r}: {exc}") from exc
    if len(vals) != spec.dimension:
        raise ConfigError(f"point needs {spec.dimension} coordinates")
    try:
        return point(spec, vals[0], *vals[1:])
    except ValueError as exc:
        raise ConfigError(f"bad point {text!r}: {exc}") from exc


def _require_flat(spec):
    flat = spec.dimension == 2 and spec.is_constant_warp \
        and spec.warp_coeffs[0] == 1.0 and spec.t_min == -1.0 \
        and spec.t_max == 1.0 and spec.circumferences == (4.0,)
    if not flat:
        raise ConfigError("this pipeline pins its oracles to the flat slab "
                          "(dimension 2, t in [-1, 1], circumference 4, "
                          "warp 1)")


def _wrapped_offsets(spec, coords, src_row):
    dt = coords[:, 0] - src_row[0]
    d2 = np.zeros_like(dt)
    for a, L in enumerate(spec.circumferences):
        raw = np.abs(coords[:, 1 + a] - src_row[1 + a]) % L
        d2 += np.minimum(raw, L - raw) ** 2
    return dt, np.sqrt(d2)


def _finalize(name, checks, cfg, grid, args, t0):
    report = VerificationReport(
        experiment=name,
        checks=checks,
        grid=_grid_dict(grid) if grid is not None else {},
        version=__version__,
        config=cfg.to_dict(),
        runtime_s=time.perf_counter() - t0,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    )
    out = getattr(args, "out", None) or cfg.outputs.get("report")
    if out:
        report.write(out)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        brief = ", ".join(f"{k}={v}" for k, v in list(c.measured.items())[:4])
        print(f"[{status}] {name}/{c.name}: {brief}")
    if not report.all_passed:
        for line in report.failures():
            print(f"check failed: {line}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# field and matrix commands

def cmd_describe(cfg, args):
    t0 = time.perf_counter()
    spec, grid = cfg.spacetime, _grid(cfg)
    t_dense = np.linspace(spec.t_min, spec.t_max, 257)
    warps = spec.warp(t_dense)
    measured = {
        "dimension": spec.dimension,
        "t_min": spec.t_min, "t_max": spec.t_max,
        "circumferences": list(spec.circumferences),
        "constant_warp": bool(spec.is_constant_warp),
        "warp_min": float(np.min(warps)), "warp_max": float(np.max(warps)),
        "volume_grid": float(np.sum(grid.weights)),
        "volume_continuum": spec.volume(),
        "backend": backend_name(),
        "fspec": cfg.fspec,
    }
    for k, v in measured.items():
        print(f"{k}: {v}")
    checks = [CheckResult("describe", True, measured)]
    return _finalize("describe", checks, cfg, grid, args, t0)


def cmd_sigma_field(cfg, args):
    t0 = time.perf_counter()
    spec, grid = cfg.spacetime, _grid(cfg)
    mid = 0.5 * (spec.t_min + spec.t_max)
    x = _parse_point(spec, args.at) if args.at else \
        point(spec, mid, *([0.0] * (spec.dimension - 1)))
    checks = []
    if args.check:
        if not spec.is_constant_warp:
            raise ConfigError("the sigma oracle check needs a constant warp")
        checks = _sigma_oracle_checks(cfg, spec, grid, t0)
    field = sg.sigma_field(spec, grid, x, R=cfg.radius)
    out_csv = getattr(args, "field_out", None) or cfg.outputs.get("field")
    if out_csv:
        export_field(field.values, out_csv, grid=grid)
    print(f"sigma field from ({x.t}, {', '.join(str(v) for v in x.s)}): "
          f"max |sigma| = {field.max_abs():.6g}")
    return _finalize("sigma-field", checks, cfg, grid, args, t0)


def _sigma_oracle_checks(cfg, spec, grid, t0):
    """Graph estimator against the closed form.

    The binding check restricts to chords with velocity at most 0.8 and
    gates on the stencil's step-mixing envelope; the unrestricted
    maximum over all pairs with |sigma| >= 0.1 is measured and reported
    alongside (near-null chords keep a finite deficit at any fixed
    neighbor radius, so no fixed tolerance is attainable there)."""
    dag = sg.causal_graph(grid, R=cfg.radius)
    coords = grid.coords()
    stride = max(1, grid.n_nodes // 64)
    sources = np.arange(0, grid.n_nodes, stride)
    worst_windowed = 0.0
    worst_all = 0.0
    for i in sources:
        g = sg.sigma_graph_field(dag, int(i))
        f = sg.sigma_flat_block(spec, coords[i:i + 1], coords)[0]
        dt, ds = _wrapped_offsets(spec, coords, coords[i])
        base = np.abs(f) >= 0.1
        rel = np.zeros_like(f)
        np.divide(np.abs(g - f), np.abs(f), out=rel, where=base)
        if np.any(base):
            worst_all = max(worst_all, float(np.max(rel[base])))
        window = base & (spec.warp_coeffs[0] * ds <= 0.8 * np.abs(dt))
        if np.any(window):
            worst_windowed = max(worst_windowed,
                                 float(np.max(rel[window])))
    elapsed = time.perf_counter() - t0
    envelope = sg.mixing_envelope(grid, R=cfg.radius, v_cap=0.8)
    tol_rel = cfg.tolerance("sigma_rel_err", 1.1 * envelope)
    tol_run = cfg.tolerance("sigma_runtime_s", 60.0)
    return [
        CheckResult("sigma_oracle_windowed", worst_windowed <= tol_rel,
                    {"max_rel_err": worst_windowed,
                     "mixing_envelope": envelope,
                     "max_rel_err_all_pairs": worst_all,
                     "sources": int(sources.size)},
                    {"sigma_rel_err": tol_rel}),
        CheckResult("sigma_runtime", elapsed <= tol_run,
                    {"runtime_s": elapsed}, {"sigma_runtime_s": tol_run}),
    ]


def cmd_distance_matrix(cfg, args):
    t0 = time.perf_counter()
    spec, grid = cfg.spacetime, _grid(cfg)
    if grid.n_nodes > _MATRIX_NODE_LIMIT:
        raise ConfigError(f"all-pairs export is limited to "
                          f"{_MATRIX_NODE_LIMIT} nodes; shrink the grid")
    fspec = emb.FSpec.parse(args.f or cfg.fspec)
    p = args.p
    if p != "inf":
        try:
            p = int(p)
        except ValueError as exc:
            raise ConfigError(f"bad exponent {args.p!r}") from exc
        if p < 1:
            raise ConfigError("exponent must be >= 1 or 'inf'")
    fields = emb.phi_block(spec, grid, grid.coords(), fspec)
    if p == 2:
        D = emb.d2_matrix(fields, grid)
    else:
        n = fields.shape[0]
        D = np.empty((n, n))
        for lo in range(0, n, 128):
            hi = min(lo + 128, n)
            diff = np.abs(fields[lo:hi, None, :] - fields[None, :, :])
            if p == "inf":
                D[lo:hi] = np.max(diff, axis=2)
            else:
                D[lo:hi] = (diff ** p @ grid.weights) ** (1.0 / p)
    out_csv = getattr(args, "field_out", None) or cfg.outputs.get("field")
    if out_csv:
        export_field(D, out_csv)
    off = D + np.diag(np.full(D.shape[0], np.inf))
    print(f"distance matrix {D.shape[0]}x{D.shape[0]} (f={fspec.variant}, "
          f"p={p}): min offdiag {float(np.min(off)):.6g}, "
          f"max {float(np.max(D)):.6g}")
    return _finalize("distance-matrix", [], cfg, grid, args, t0)


def cmd_pullback_metric(cfg, args):
    t0 = time.perf_counter()
    spec, grid = cfg.spacetime, _grid(cfg)
    mid = 0.5 * (spec.t_min + spec.t_max)
    x = _parse_point(spec, args.at) if args.at else \
        point(spec, mid, *([0.0] * (spec.dimension - 1)))
    G = emb.pullback_metric(spec, grid, x, emb.FSpec.parse(cfg.fspec),
                            route=args.route)
    comps = G.components
    eig = np.linalg.eigvalsh(comps)
    measured = {"base": [x.t] + list(x.s),
                "components": comps.tolist(),
                "eigenvalues": eig.tolist()}
    checks = [CheckResult("pullback_positive", bool(np.all(eig > 0)),
                          measured)]
    print(f"pullback metric at ({x.t}, {', '.join(str(v) for v in x.s)}):")
    for row in comps:
        print("  " + "  ".join(f"{v: .9e}" for v in row))
    return _finalize("pullback-metric", checks, cfg, grid, args, t0)


# ---------------------------------------------------------------------------
# reconstruction

def _reconstruction_checks(cfg, spec, grid, want_roundtrip):
    checks = []
    if want_roundtrip:
        rng = np.random.default_rng(cfg.seed)
        w = rng.uniform(0.05, 1.0, size=(200, 24))
        u = rng.uniform(0.0, 2.0, size=(200, 24))
        v = rng.uniform(0.0, 2.0, size=(200, 24))
        A = np.sum(w * u * u, axis=1)
        B = np.sum(w * v * v, axis=1)
        C = -np.sum(w * u * v, axis=1)
        direct = rec.Gram(A, B, C)
        back = rec.gram_recover(rec.triple_from_gram(direct))
        scale = float(np.max(A))
        err = max(float(np.max(np.abs(back.A - A))),
                  float(np.max(np.abs(back.B - B))),
                  float(np.max(np.abs(back.C - C)))) / scale
        tol = cfg.tolerance("gram_roundtrip_err", 1e-10)
        checks.append(CheckResult("gram_roundtrip", err <= tol,
                                  {"max_rel_err": err, "triples": 200},
                                  {"gram_roundtrip_err": tol}))
    gram = rec.gram_matrices(spec, grid)
    plus, minus = rec.boundary_detect(gram)
    per_row = grid.n_nodes // grid.nt
    top = np.arange(grid.n_nodes - per_row, grid.n_nodes)
    bottom = np.arange(0, per_row)
    exact = np.array_equal(np.sort(plus), top) \
        and np.array_equal(np.sort(minus), bottom)
    checks.append(CheckResult("boundary_exact", bool(exact),
                              {"n_future": int(plus.size),
                               "n_past": int(minus.size),
                               "per_row": int(per_row)}))
    R = rec.chron_reconstruct(gram, int(np.sort(plus)[0]))
    truth = rec.chron_truth_matrix(spec, grid)
    interior = np.arange(per_row, grid.n_nodes - per_row)
    sub = np.ix_(interior, interior)
    Ri, Ti = R[sub], truth[sub]
    n = interior.size
    agree = (int(np.sum(Ri == Ti)) - n) / (n * n - n)
    tol_acc = cfg.tolerance("chron_accuracy", 0.99)
    checks.append(CheckResult("chron_accuracy", agree >= tol_acc,
                              {"accuracy": agree, "interior_nodes": int(n)},
                              {"chron_accuracy": tol_acc}))
    related = truth | truth.T
    detected = R & related
    good = int(np.sum(detected & truth))
    total = int(np.sum(detected))
    frac = 1.0 if total == 0 else good / total
    tol_orient = cfg.tolerance("orientation_accuracy", 1.0)
    checks.append(CheckResult("orientation_accuracy", frac >= tol_orient,
                              {"fraction": frac, "detected_pairs": total},
                              {"orientation_accuracy": tol_orient}))
    return checks, R


def cmd_reconstruct(cfg, args):
    t0 = time.perf_counter()
    spec, grid = cfg.spacetime, _grid(cfg)
    if not spec.is_constant_warp:
        raise ConfigError("reconstruction ground truth needs a constant "
                          "warp")
    out_csv = getattr(args, "field_out", None) or cfg.outputs.get("field")
    if out_csv and grid.n_nodes > _MATRIX_NODE_LIMIT:
        raise ConfigError(f"relation-matrix export is limited to "
                          f"{_MATRIX_NODE_LIMIT} nodes")
    checks, R = _reconstruction_checks(cfg, spec, grid,
                                       want_roundtrip=False)
    if out_csv:
        export_field(R.astype(float), out_csv)
    return _finalize("reconstruct", checks, cfg, grid, args, t0)


# ---------------------------------------------------------------------------
# verify pipelines

def cmd_verify(cfg, args):
    t0 = time.perf_counter()
    target = args.target
    if target == "noldus":
        grid = None
        checks = _verify_noldus(cfg)
    elif target == "beem":
        _require_flat(cfg.spacetime)
        grid = _grid(cfg)
        checks = _verify_beem(cfg, grid)
    elif target == "embedding":
        _require_flat(cfg.spacetime)
        grid = _grid(cfg)
        checks = _verify_embedding(cfg)
    else:
        if not cfg.spacetime.is_constant_warp:
            raise ConfigError("reconstruction ground truth needs a "
                              "constant warp")
        grid = _grid(cfg)
        checks, _ = _reconstruction_checks(cfg, cfg.spacetime, grid,
                                           want_roundtrip=True)
    return _finalize(f"verify-{target}", checks, cfg, grid, args, t0)


def _verify_noldus(cfg):
    a, t = 0.5, 0.25
    n_list = (1, 2, 4, 8, 16, 32, 64)
    record = lg.noldus_divergence(a, t, n_list, grid_n=cfg.n_t)
    closed, grid_vals = record.closed, record.grid
    err_point = abs(float(grid_vals[0]) - float(closed[0]))
    tol_point = cfg.tolerance("noldus_pointwise", 1e-2)
    ratio = float(grid_vals[-1] / grid_vals[0])
    ratio_closed = float(closed[-1] / closed[0])
    tol_ratio = cfg.tolerance("noldus_ratio", 0.05)
    increasing = bool(np.all(np.diff(grid_vals) > 0))
    table = {f"S({n})": float(v) for n, v in zip(n_list, grid_vals)}
    return [
        CheckResult("noldus_pointwise", err_point <= tol_point,
                    {"grid": float(grid_vals[0]), "closed": float(closed[0]),
                     "abs_err": err_point}, {"noldus_pointwise": tol_point}),
        CheckResult("noldus_monotone", increasing, table),
        CheckResult("noldus_ratio", abs(ratio - ratio_closed) <= tol_ratio,
                    {"ratio": ratio, "closed": ratio_closed},
                    {"noldus_ratio": tol_ratio}),
    ]


def _verify_beem(cfg, grid):
    spec = cfg.spacetime
    L = spec.circumferences[0]
    fixture = emb.beem_distance(spec, grid, point(spec, 0.0, 0.0),
                                point(spec, 0.2, 0.0))
    tol_fix = cfg.tolerance("beem_fixture_rel", 0.03)
    err_fix = abs(fixture - 0.8) / 0.8
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    chains = 0
    while chains < 20:
        tp = rng.uniform(-0.85, -0.25)
        d1, d2 = rng.uniform(0.15, 0.5, size=2)
        if tp + d1 + d2 > 0.9:
            continue
        s0 = rng.uniform(0.0, L)
        u1, u2 = rng.uniform(-0.85, 0.85, size=2)
        p = point(spec, tp, s0)
        q = point(spec, tp + d1, s0 + u1 * d1)
        r = point(spec, tp + d1 + d2, s0 + u1 * d1 + u2 * d2)
        residual = lg.beem_geodesic_check(spec, grid, p, q, r)
        d_pr = emb.beem_distance(spec, grid, p, r)
        worst = max(worst, residual / d_pr)
        chains += 1
    tol_res = cfg.tolerance("beem_residual_rel", 0.03)
    return [
        CheckResult("beem_fixture", err_fix <= tol_fix,
                    {"measured": float(fixture), "expected": 0.8,
                     "rel_err": err_fix}, {"beem_fixture_rel": tol_fix}),
        CheckResult("beem_additivity", worst <= tol_res,
                    {"max_residual_over_d": worst, "chains": chains},
                    {"beem_residual_rel": tol_res}),
    ]


def _fd_order(spec, kind):
    eps_list = [0.04, 0.02, 0.01, 0.005]
    grid = grid_build(spec, 48, 48)
    x = point(spec, 0.0, 0.0)
    v = tangent(spec, x, 0.3, 0.2)
    sig0 = sg.sigma_field(spec, grid, x).values
    e = max(eps_list)
    sp = sg.sigma_field(spec, grid,
                        point(spec, 0.3 * e, 0.2 * e)).values
    sm = sg.sigma_field(spec, grid,
                        point(spec, -0.3 * e, -0.2 * e)).values
    mask = (np.abs(sig0) >= 0.3) & (np.abs(sp) >= 0.3) & (np.abs(sm) >= 0.3)
    mask &= (np.sign(sig0) == np.sign(sp)) & (np.sign(sig0) == np.sign(sm))

    def masked_l2(f):
        return math.sqrt(float(np.sum(grid.weights[mask] * f[mask] ** 2)))

    exact = emb.dphi(spec, grid, x, v, emb.H) if kind == "gradient" \
        else emb.hessian(spec, grid, x, v, emb.H)
    f0 = emb.phi(spec, grid, x, emb.H).values
    scale = masked_l2(exact)
    errs = []
    for e in eps_list:
        fp = emb.phi(spec, grid, point(spec, 0.3 * e, 0.2 * e), emb.H).values
        fm = emb.phi(spec, grid, point(spec, -0.3 * e, -0.2 * e),
                     emb.H).values
        fd = (fp - fm) / (2 * e) if kind == "gradient" \
            else (fp - 2 * f0 + fm) / e ** 2
        errs.append(masked_l2(fd - exact) / scale)
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    return min(orders), errs[-1]


def _verify_embedding(cfg):
    spec = cfg.spacetime
    checks = []
    for kind, tol_name in (("gradient", "gradient_order"),
                           ("hessian", "hessian_order")):
        tol = cfg.tolerance(tol_name, 1.9)
        order, last = _fd_order(spec, kind)
        checks.append(CheckResult(f"{kind}_order", order >= tol,
                                  {"min_order": order, "finest_err": last},
                                  {tol_name: tol}))

    grid64 = grid_build(spec, 64, 64)
    tol_gram = cfg.tolerance("pullback_gram_err", 1e-12)
    worst = 0.0
    for xy in ((0.0, 0.0), (-0.3, 1.7)):
        for fs in (emb.H, emb.f_r(0.4)):
            x = point(spec, *xy)
            G1 = emb.pullback_metric(spec, grid64, x, fs, route="gram")
            G2 = emb.pullback_metric(spec, grid64, x, fs, route="integrand")
            scale = float(np.max(np.abs(G1.components)))
            worst = max(worst, float(np.max(np.abs(
                G1.components - G2.components))) / scale)
    checks.append(CheckResult("pullback_gram", worst <= tol_gram,
                              {"max_rel_err": worst},
                              {"pullback_gram_err": tol_gram}))

    grid32 = grid_build(spec, 32, 32)
    x = point(spec, float(grid32.t_nodes[8]), float(grid32.s_nodes[0][5]))
    node = grid32.node_index(20, 5)
    w = float(grid32.t_nodes[20]) - x.t
    h_time = emb.hessian(spec, grid32, x, tangent(spec, x, 1.0, 0.0), emb.H)
    h_space = emb.hessian(spec, grid32, x, tangent(spec, x, 0.0, 1.0), emb.H)
    tol_flat = cfg.tolerance("hessian_flat_rel", 0.01)
    err_t = abs(h_time[node] - 12.0 * w * w) / (12.0 * w * w)
    err_s = abs(h_space[node] + 4.0 * w * w) / (4.0 * w * w)
    checks.append(CheckResult(
        "hessian_flat_values", max(err_t, err_s) <= tol_flat,
        {"tangential": float(h_time[node]), "expected_tangential": 12 * w * w,
         "orthogonal": float(h_space[node]),
         "expected_orthogonal": -4 * w * w},
        {"hessian_flat_rel": tol_flat}))

    grid24 = grid_build(spec, 12, 24)
    ds = spec.circumferences[0] / 24
    tol_eq = cfg.tolerance("equivariance_err", 1e-9)
    worst_eq = 0.0
    for (xt, xs), (yt, ys) in (((-0.1, 0.4), (0.4, 1.3)),
                               ((0.3, 2.8), (-0.5, 0.2))):
        for p in (1, 2, "inf"):
            d0 = emb.dist_p(spec, grid24, point(spec, xt, xs),
                            point(spec, yt, ys), emb.H, p)
            d1 = emb.dist_p(spec, grid24, point(spec, xt, xs + ds),
                            point(spec, yt, ys + ds), emb.H, p)
            worst_eq = max(worst_eq, abs(d0 - d1) / d0)
    checks.append(CheckResult("rotation_equivariance", worst_eq <= tol_eq,
                              {"max_rel_change": worst_eq},
                              {"equivariance_err": tol_eq}))

    grid12 = grid_build(spec, 12, 12)
    fields = emb.phi_block(spec, grid12, grid12.coords(), emb.H)
    D = emb.d2_matrix(fields, grid12)
    off = float(np.min(D + np.diag(np.full(grid12.n_nodes, np.inf))))
    checks.append(CheckResult("injectivity_witness", off > 0.0,
                              {"min_offdiag": off}))
    return checks


# ---------------------------------------------------------------------------
# invariants

def cmd_invariants(cfg, args):
    t0 = time.perf_counter()
    if args.family:
        return _invariants_family(cfg, args, t0)
    spec, grid = cfg.spacetime, _grid(cfg)
    b = None
    if args.bounds:
        try:
            b = [float(tok) for tok in args.bounds.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad bounds: {exc}") from exc
        if len(b) != 7:
            raise ConfigError("bounds must be 7 comma-separated numbers")
    rep = inv.invariant_report(spec, grid, b=b)
    measured = {
        "csec_min": rep.csec_min, "k2_sup": rep.k2_sup, "vol": rep.vol,
        "cdiam": rep.cdiam, "jvol_sup": rep.jvol_sup,
        "jvol_boundary_sup": rep.jvol_boundary_sup,
        "gamma": rep.gamma,
        "injrad_plus_range": [float(np.min(rep.injrad_plus)),
                              float(np.max(rep.injrad_plus))],
        "injrad_minus_range": [float(np.min(rep.injrad_minus)),
                               float(np.max(rep.injrad_minus))],
    }
    checks = [CheckResult("invariant_report", True, measured)]
    if b is not None:
        m = rep.membership
        checks.append(CheckResult("membership_bounds", bool(m.all_ok),
                                  {"flags": [bool(f) for f in m.flags],
                                   "bounds": list(b)}))
    if args.sweep:
        checks.append(_membership_sweep_check(rep))
    if args.check_flat:
        _require_flat(spec)
        checks.extend(_flat_value_checks(cfg, spec, grid, rep))
    return _finalize("invariants", checks, cfg, grid, args, t0)


def _membership_sweep_check(rep):
    vals = (max(rep.k2_sup, 1e-300), rep.cdiam, 1.0 / rep.vol,
            max(rep.jvol_sup, 1e-300), 1.0 / rep.gamma,
            max(rep.jvol_boundary_sup, 1e-300))
    base = np.array([-rep.csec_min] + [math.log(v) for v in vals])
    offsets = np.linspace(-3.0, 4.0, 20)
    oks = [inv.membership(rep, base + c).all_ok for c in offsets]
    monotone = all(oks[i] <= oks[i + 1] for i in range(len(oks) - 1))
    passed = monotone and oks[-1]
    return CheckResult("membership_monotone", bool(passed),
                       {"pass_count": int(sum(oks)),
                        "first_pass_offset":
                            float(offsets[oks.index(True)]) if any(oks)
                            else None})


def _flat_value_checks(cfg, spec, grid, rep):
    tol = cfg.tolerances.get("flat_value_rel")
    dt = grid.dt
    extent = spec.t_extent
    half = 0.5 * extent
    center = point(spec, 0.5 * (spec.t_min + spec.t_max),
                   *([0.0] * (spec.dimension - 1)))
    jc = inv.jvol(spec, grid, center)
    jc_exp = 2.0 * half * half
    vol_exp = extent * float(np.prod(spec.circumferences))
    rows = [
        ("cdiam_flat", abs(rep.cdiam - extent), tol if tol else dt,
         {"measured": rep.cdiam, "expected": extent}),
        ("gamma_flat", abs(rep.gamma - half), tol if tol else dt,
         {"measured": rep.gamma, "expected": half}),
        ("vol_flat", abs(rep.vol - vol_exp), tol if tol else 1e-6,
         {"measured": rep.vol, "expected": vol_exp}),
        ("csec_flat", abs(rep.csec_min), tol if tol else 1e-6,
         {"measured": rep.csec_min}),
        ("k2_flat", abs(rep.k2_sup), tol if tol else 1e-6,
         {"measured": rep.k2_sup}),
        ("jvol_center", abs(jc - jc_exp), tol if tol else 0.03 * jc_exp,
         {"measured": jc, "expected": jc_exp,
          "jvol_sup_measured": rep.jvol_sup}),
    ]
    return [CheckResult(name, err <= bound, dict(meas, abs_err=err),
                        {"abs": bound})
            for name, err, bound, meas in rows]


def _invariants_family(cfg, args, t0):
    if args.family != "cylinders":
        raise ConfigError(f"unknown family {args.family!r}")
    eps_list = (1.0, 0.5, 0.1)
    fspec = emb.FSpec.parse(cfg.fspec)
    comps, gammas, vols = [], [], []
    grid = None
    for eps in eps_list:
        spec_e = SpacetimeSpec(2, 0.0, 1.0, (0.6,), (eps,))
        grid = grid_build(spec_e, 64, 16)
        G = emb.pullback_metric(spec_e, grid, point(spec_e, 0.5, 0.0),
                                fspec)
        rep = inv.invariant_report(spec_e, grid)
        comps.append(float(G.components[1, 1]))
        gammas.append(rep.gamma)
        vols.append(rep.vol)
    def decreasing(seq):
        return bool(all(seq[i] > seq[i + 1] for i in range(len(seq) - 1)))
    checks = [
        CheckResult("pullback_spatial_decreasing", decreasing(comps),
                    {"eps": list(eps_list), "component": comps}),
        CheckResult("gamma_decreasing", decreasing(gammas),
                    {"eps": list(eps_list), "gamma": gammas}),
        CheckResult("vol_decreasing", decreasing(vols),
                    {"eps": list(eps_list), "vol": vols}),
    ]
    return _finalize("invariants", checks, cfg, grid, args, t0)


# ---------------------------------------------------------------------------
# hilbert experiments

def cmd_hilbert(cfg, args):
    t0 = time.perf_counter()
    trials = args.trials or cfg.trials
    rng = np.random.default_rng(cfg.seed)
    if args.experiment == "thm5":
        checks = _hilbert_thm5(cfg, rng, trials)
    elif args.experiment == "thm6":
        checks = _hilbert_thm6(cfg)
    else:
        checks = _hilbert_counterexamples(cfg)
    return _finalize("hilbert", checks, cfg, None, args, t0)


def _hilbert_thm5(cfg, rng, trials):
    factor = cfg.tolerance("curve_bound_factor", 1.5)
    tol_trig = cfg.tolerance("trig_violation", 1e-3)
    admissible = True
    max_len = 0.0
    max_trig = 0.0
    per_n = {}
    for n in (2, 10, 50):
        curves = hb.random_admissible_batch(rng, n, r=1.0, trials=trials)
        lens = []
        for c in curves:
            v = hb.thm5_check(c, 1.0)
            admissible = admissible and v.hypotheses_met
            lens.append(v.length)
            max_trig = max(max_trig, hb.trig_inequality_check(c))
        per_n[f"n={n}"] = {"max_length": float(np.max(lens)),
                           "mean_length": float(np.mean(lens))}
        max_len = max(max_len, float(np.max(lens)))
    return [
        CheckResult("curves_admissible", admissible,
                    {"trials_per_dim": trials, **per_n}),
        CheckResult("length_bound", max_len < factor,
                    {"max_length": max_len},
                    {"curve_bound_factor": factor}),
        CheckResult("trig_inequality", max_trig <= tol_trig,
                    {"max_violation": max_trig},
                    {"trig_violation": tol_trig}),
    ]


def _hilbert_thm6(cfg):
    cone = hb.OrthantCone(2)
    lengths = []
    met = True
    e_ratio = math.inf
    for delta in (0.02, 0.05, 0.1, 0.2):
        curve = hb.box_arc_curve(delta=delta)
        v = hb.thm6_check(curve, cone, np.array([1.0, 0.5]),
                          math.sqrt(2.0))
        met = met and v.hypotheses_met
        lengths.append(v.length)
        e_ratio = min(e_ratio, v.stats["E_ratio"])
    return [
        CheckResult("box_hypotheses", met,
                    {"lengths": lengths, "E_ratio": e_ratio}),
        CheckResult("box_lengths_bounded",
                    max(lengths) < math.pi / 2,
                    {"max_length": max(lengths),
                     "family_bound": math.pi / 2}),
    ]


def _hilbert_counterexamples(cfg):
    hyper = hb.hyperbola_experiment(Ts=(10.0, 100.0))
    hyper_ok = all(v.hypotheses_met for v in hyper) \
        and hyper[0].length < hyper[1].length \
        and all(v.length > 2.0 * (v.stats["T"] - 1.0) for v in hyper)
    half = hb.halfspace_circle_experiment(laps=(1, 2, 3, 4))
    hl = [v.length for v in half]
    half_ok = all(v.hypotheses_met for v in half) \
        and all(hl[i] < hl[i + 1] for i in range(len(hl) - 1))
    return [
        CheckResult("hyperbola_unbounded", bool(hyper_ok),
                    {"T": [v.stats["T"] for v in hyper],
                     "length": [v.length for v in hyper],
                     "lower": [2.0 * (v.stats["T"] - 1.0) for v in hyper]}),
        CheckResult("halfspace_unbounded", bool(half_ok),
                    {"laps": [v.stats["laps"] for v in half],
                     "length": hl}),
    ]


# ---------------------------------------------------------------------------
# parser

def _build_parser():
    ap = argparse.ArgumentParser(
        prog="lorembed",
        description="Distance fields, embeddings, causal reconstruction "
                    "and invariants on discretized Cauchy slabs.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, experiment=None, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="report JSON path")
        p.set_defaults(func=fn, experiment_name=experiment or name)
        return p

    add("describe", cmd_describe, help="print the configured geometry")

    p = add("sigma-field", cmd_sigma_field,
            help="signed distance field from one point")
    p.add_argument("--at", help="base point 't,s[,s2]'")
    p.add_argument("--field-out", dest="field_out", help="CSV output path")
    p.add_argument("--check", action="store_true",
                   help="compare the graph estimator with the closed form")

    p = add("distance-matrix", cmd_distance_matrix,
            help="all-pairs embedded distances")
    p.add_argument("--f", help="embedding function token (default: config)")
    p.add_argument("--p", default="2", help="exponent (integer or 'inf')")
    p.add_argument("--field-out", dest="field_out", help="CSV output path")

    p = add("pullback-metric", cmd_pullback_metric,
            help="pullback metric components at a point")
    p.add_argument("--at", help="base point 't,s[,s2]'")
    p.add_argument("--route", default="gram", choices=("gram", "integrand"))

    p = add("reconstruct", cmd_reconstruct,
            help="recover the chronological relation from three distances")
    p.add_argument("--field-out", dest="field_out",
                   help="relation matrix CSV path")

    p = add("invariants", cmd_invariants,
            help="geometric invariant report and membership checks")
    p.add_argument("--bounds", help="7 comma-separated bound values")
    p.add_argument("--sweep", action="store_true",
                   help="20-point membership monotonicity sweep")
    p.add_argument("--check-flat", dest="check_flat", action="store_true",
                   help="compare against flat-slab closed forms")
    p.add_argument("--family", choices=("cylinders",),
                   help="run a fixed degeneracy family instead")

    p = sub.add_parser("verify", help="run a named verification pipeline")
    p.add_argument("target",
                   choices=("noldus", "beem", "embedding", "reconstruction"))
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_verify)

    p = add("hilbert", cmd_hilbert, experiment="hilbert",
            help="curve-length bound experiments")
    p.add_argument("--experiment", required=True,
                   choices=("thm5", "thm6", "counterexamples"))
    p.add_argument("--trials", type=int,
                   help="random curves per dimension (default: config)")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "experiment_name", None) is None:
        args.experiment_name = f"verify-{args.target}" \
            if args.command == "verify" else args.command
    try:
        cfg = _config_for(args)
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
