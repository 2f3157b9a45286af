import math

import numpy as np
import pytest

from lorembed.hilbert import (
    HCurve,
    HVector,
    OrthantCone,
    box_arc_curve,
    chord_profile,
    chord_profile_peak,
    circular_arc_curve,
    cone_project,
    halfspace_circle_experiment,
    hyperbola_curve,
    hyperbola_experiment,
    random_admissible_batch,
    straight_curve,
    thm5_check,
    thm6_check,
    trig_inequality_check,
)


# ---------------------------------------------------------------------------
# vectors and the orthant cone

def test_hvector_norm_and_validation():
    v = HVector([3.0, 4.0])
    assert v.norm == 5.0
    with pytest.raises(ValueError):
        HVector([1.0, np.nan])
    with pytest.raises(ValueError):
        HVector([[1.0, 2.0], [3.0, 4.0]])


def test_cone_project_examples():
    plus, minus = cone_project(np.array([3.0, -2.0]))
    assert np.array_equal(plus, [3.0, 0.0])
    assert np.array_equal(minus, [0.0, 2.0])
    w = np.array([1.5, 0.0, 2.0])
    plus, minus = cone_project(w)
    assert np.array_equal(plus, w)
    assert np.array_equal(minus, np.zeros(3))


def test_cone_project_decomposition_sweep():
    rng = np.random.default_rng(11)
    cone = OrthantCone(37)
    for _ in range(1000):
        w = rng.normal(size=37) * 10.0 ** rng.uniform(-3, 3)
        plus, minus = cone_project(w)
        # exact decomposition: disjoint supports, no rounding
        assert np.array_equal(plus - minus, w)
        assert float(np.dot(plus, minus)) == 0.0
        assert cone.contains(plus) and cone.contains(minus)


def test_orthant_self_duality_samples():
    rng = np.random.default_rng(3)
    cone = OrthantCone(8)
    for _ in range(200):
        a = np.abs(rng.normal(size=8))
        b = np.abs(rng.normal(size=8))
        assert cone.contains(a)
        assert float(np.dot(a, b)) >= 0.0
    with pytest.raises(ValueError):
        cone.contains(np.ones(5))
    with pytest.raises(ValueError):
        OrthantCone(0)


# ---------------------------------------------------------------------------
# sampled curves

def test_hcurve_validation():
    with pytest.raises(ValueError):
        HCurve(0.1, np.zeros((2, 3)))
    with pytest.raises(ValueError):
        HCurve(0.0, np.zeros((5, 3)))
    with pytest.raises(ValueError):
        HCurve(0.1, np.full((5, 3), np.inf))


def test_hcurve_derivatives_on_straight_line():
    c = straight_curve(2.0, n=3, m=201)
    v = c.velocities()
    assert v.shape == (199, 3)
    assert np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) < 1e-12
    assert np.max(np.abs(c.accelerations())) < 1e-9
    assert abs(c.length() - 2.0) < 1e-8
    assert c.arclength_defect() < 1e-12


def test_hcurve_coarsening_consistency():
    # second-difference estimates must agree across a step doubling
    arc = circular_arc_curve(1.2, 1.0, m=4001)
    coarse = arc.coarsened()
    assert coarse.n_samples == 2001
    a_fine = np.linalg.norm(arc.accelerations(), axis=1)
    a_coarse = np.linalg.norm(coarse.accelerations(), axis=1)
    assert abs(np.max(a_fine) - np.max(a_coarse)) < 1e-6
    assert abs(arc.length() - coarse.length()) < 1e-6
    with pytest.raises(ValueError):
        HCurve(0.1, np.zeros((5, 2))).coarsened()


# ---------------------------------------------------------------------------
# extrinsic-to-intrinsic bound

def test_thm5_straight_segment():
    v = thm5_check(straight_curve(1.0), 1.0)
    assert v.hypotheses_met
    assert v.reasons == ()
    assert abs(v.length - 1.0) < 1e-6
    assert v.bound == 1.5
    assert abs(v.margin - 0.5) < 1e-6
    assert v.stats["s_max"] < 1e-9


def test_thm5_arc_fixture():
    # radius 1.2 arc truncated at chord 1: length 2.4 asin(1/2.4)
    arc = circular_arc_curve(1.2, 1.0)
    v = thm5_check(arc, 1.0)
    assert v.hypotheses_met
    l_exact = 2.4 * math.asin(1.0 / 2.4)
    assert abs(v.length - l_exact) < 1e-6
    assert abs(v.stats["s_max"] - 1.0 / 1.2) < 1e-6
    assert v.stats["s_max"] < 0.95 * v.stats["rho"]
    assert v.length < v.bound


def test_thm5_reports_unmet_hypotheses():
    # radius 0.9 arc has |c''| = 1.11 above the admissibility threshold
    arc = circular_arc_curve(0.9, 1.0)
    v = thm5_check(arc, 1.0)
    assert not v.hypotheses_met
    assert "curvature above threshold" in v.reasons
    # a curve escaping the ball is reported, not raised
    c = HCurve(0.01, np.stack([np.linspace(0, 2, 201), np.zeros(201)], 1))
    v2 = thm5_check(c, 1.0)
    assert "leaves the extrinsic ball" in v2.reasons
    with pytest.raises(ValueError):
        thm5_check(arc, 0.0)


def test_thm5_random_sweep():
    rng = np.random.default_rng(20260819)
    for n in (2, 10, 50):
        curves = random_admissible_batch(rng, n, r=1.0, trials=60)
        for c in curves:
            v = thm5_check(c, 1.0)
            assert v.hypotheses_met, v.reasons
            assert v.length < 1.5
            assert trig_inequality_check(c) <= 1e-3


def test_chord_profile_peak():
    for r in (0.3, 1.0, 7.5):
        rho = 2.0 * math.sqrt(2.0) / (3.0 * r)
        b0, peak = chord_profile_peak(rho)
        assert abs(chord_profile(b0, rho) - peak) < 1e-12
        assert abs(peak - r) < 1e-12
        # interior maximum: the profile is lower on both sides
        assert chord_profile(b0 * 0.99, rho) < peak
        assert chord_profile(b0 * 1.01, rho) < peak


def test_trig_inequality_values():
    assert trig_inequality_check(straight_curve(1.0)) < 1e-9
    arc = circular_arc_curve(1.2, 1.0)
    assert trig_inequality_check(arc) < 1e-7
    # margin of the inequality on an arc of radius R is t^4 / (24 R^4)
    R = 1.2
    vel = arc.velocities()
    rho = float(np.max(np.linalg.norm(arc.accelerations(), axis=1)))
    t = arc.h * np.arange(vel.shape[0])
    margin = vel @ vel[0] - (1.0 - 0.5 * rho * rho * t * t)
    i = int(np.argmin(np.abs(t - 0.5)))
    assert abs(margin[i] - t[i] ** 4 / (24.0 * R ** 4)) < 2e-5


# ---------------------------------------------------------------------------
# self-dual-cone bound

def test_thm6_box_arc_fixture():
    box = box_arc_curve(delta=0.05)
    v = thm6_check(box, OrthantCone(2), np.array([1.0, 0.0]), math.sqrt(2.0))
    assert v.hypotheses_met
    assert v.reasons == ()
    assert abs(v.length - (math.pi / 2 - 0.1)) < 1e-6
    assert v.stats["acc_min"] > 0.0
    assert v.stats["container_margin"] > 0.0


def test_thm6_validation():
    box = box_arc_curve()
    with pytest.raises(ValueError):
        thm6_check(box, "orthant", np.array([1.0, 0.0]), 2.0)
    with pytest.raises(ValueError):
        thm6_check(box, OrthantCone(2), np.array([-1.0, 0.0]), 2.0)


def test_thm6_reports_unmet_hypotheses():
    cone = OrthantCone(2)
    # derivative outside v - K
    v = thm6_check(straight_curve(1.0), cone, np.array([0.5, 0.5]), 2.0)
    assert "derivative leaves v - K" in v.reasons
    # second derivative outside K: concave decreasing arc
    s = np.linspace(0.05, math.pi / 2 - 0.05, 1001)
    concave = HCurve(float(s[1] - s[0]),
                     np.stack([np.sin(s), np.cos(s)], axis=1))
    v2 = thm6_check(concave, cone, np.array([1.0, 0.0]), 2.0)
    assert "second derivative leaves K" in v2.reasons
    # container too small
    v3 = thm6_check(box_arc_curve(), cone, np.array([1.0, 0.0]), 0.1)
    assert "leaves the container" in v3.reasons


def test_hyperbola_family_unbounded():
    out = hyperbola_experiment(Ts=(2.0, 5.0, 10.0))
    lengths = [v.length for v in out]
    for v, T in zip(out, (2.0, 5.0, 10.0)):
        assert v.hypotheses_met, v.reasons
        assert v.length > 2.0 * (T - 1.0)
    assert lengths[0] < lengths[1] < lengths[2]
    # length oracle: integral of sqrt(1 + t^-4) over [1/T, T]
    from scipy.integrate import quad
    l_exact = quad(lambda t: math.sqrt(1.0 + t ** -4), 0.1, 10.0,
                   limit=200)[0]
    assert abs(lengths[2] - l_exact) / l_exact < 1e-4


def test_hyperbola_arclength_sampling():
    c = hyperbola_curve(5.0)
    assert c.arclength_defect() < 1e-3
    # resampled points sit on the curve exactly
    assert np.max(np.abs(c.points[:, 0] * c.points[:, 1] - 1.0)) < 1e-12
    with pytest.raises(ValueError):
        hyperbola_curve(1.0)


def test_halfspace_circle_family_unbounded():
    out = halfspace_circle_experiment(laps=(1, 2, 3))
    lengths = [v.length for v in out]
    for v, k in zip(out, (1, 2, 3)):
        assert v.hypotheses_met, v.reasons
        assert abs(v.length - 2.0 * math.pi * k) < 1e-4
    assert lengths[0] < lengths[1] < lengths[2]


def test_random_batch_structure():
    rng = np.random.default_rng(5)
    curves = random_admissible_batch(rng, 3, r=0.5, trials=20)
    assert len(curves) == 20
    for c in curves:
        d = np.linalg.norm(c.points - c.points[0], axis=1)
        assert float(np.max(d)) < 0.5
        assert c.arclength_defect() < 1e-3


def test_thm6_e_ratio_mixed_direction():
    # v = (1, 1/2): the worst cone part is the pure second coordinate,
    # giving E = inf <u, v>/|u| = 1/2 exactly
    box = box_arc_curve(delta=0.05)
    v = thm6_check(box, OrthantCone(2), np.array([1.0, 0.5]),
                   math.sqrt(2.0))
    assert v.hypotheses_met
    assert v.stats["E_ratio"] == pytest.approx(0.5, abs=1e-9)
