"""Curve-length bounds in finite-dimensional Hilbert space.

Sampled C^2 curves with second-difference derivative estimates, the
orthant cone with its exact positive-part projection, the
extrinsic-to-intrinsic length bound (thm5), the self-dual-cone length
bound (thm6), and the two counterexample families showing that
self-duality and container compactness are both indispensable.
"""

import math
from dataclasses import dataclass, field

import numpy as np

RHO_COEFF = 2.0 * math.sqrt(2.0) / 3.0    # rho = RHO_COEFF / r
HEADROOM = 0.95                           # curvature admissibility margin


def _coords(w) -> np.ndarray:
    a = w.coords if isinstance(w, HVector) else np.asarray(w, dtype=float)
    return np.atleast_1d(a.astype(float))


@dataclass
class HVector:
    """A point of l2(n): a finite real coordinate vector."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coords, dtype=float))
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise ValueError("coordinates must be a finite 1-d sequence")
        self.coords = c

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


def cone_project(w):
    """Orthogonal projection onto the closed nonnegative orthant.

    Returns (w_plus, w_minus) with w = w_plus - w_minus, both parts in
    the orthant and <w_plus, w_minus> = 0, all exactly (the parts have
    disjoint supports).
    """
    a = _coords(w)
    plus = np.where(a > 0.0, a, 0.0)
    minus = plus - a
    return plus, minus


@dataclass
class OrthantCone:
    """The closed nonnegative orthant in l2(n); self-dual."""

    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")

    def contains(self, w, tol: float = 0.0) -> bool:
        a = _coords(w)
        if a.size != self.dimension:
            raise ValueError("dimension mismatch")
        return bool(np.min(a) >= -tol)

    def project(self, w):
        a = _coords(w)
        if a.size != self.dimension:
            raise ValueError("dimension mismatch")
        return cone_project(a)


@dataclass
class HCurve:
    """Sampled curve in l2(n): uniform parameter step and a point array.

    Derivatives are central differences on interior samples; the helpers
    never touch the endpoints.
    """

    h: float
    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[0] < 3:
            raise ValueError("need at least three samples of a 1-d curve")
        if not np.all(np.isfinite(p)) or not self.h > 0:
            raise ValueError("finite points and a positive step required")
        self.points = p

    @property
    def n_samples(self) -> int:
        return self.points.shape[0]

    def velocities(self) -> np.ndarray:
        p = self.points
        return (p[2:] - p[:-2]) / (2.0 * self.h)

    def accelerations(self) -> np.ndarray:
        p = self.points
        return (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (self.h * self.h)

    def arclength_defect(self) -> float:
        """Max deviation of the sampled speed from 1."""
        return float(np.max(np.abs(
            np.linalg.norm(self.velocities(), axis=1) - 1.0)))

    def length(self) -> float:
        """Polygonal length of the sample chain."""
        return float(np.sum(np.linalg.norm(np.diff(self.points, axis=0),
                                           axis=1)))

    def coarsened(self) -> "HCurve":
        """Every second sample at twice the step, for consistency checks."""
        if self.n_samples < 7:
            raise ValueError("too few samples to coarsen")
        return HCurve(2.0 * self.h, self.points[::2])


@dataclass
class CurveVerdict:
    """Outcome of a hypothesis check: measured quantities and the bound."""

    hypotheses_met: bool
    reasons: tuple
    length: float
    bound: float
    margin: float
    stats: dict = field(default_factory=dict)


def thm5_check(curve: HCurve, r: float) -> CurveVerdict:
    """Extrinsic-to-intrinsic bound: an arc-length curve staying within
    extrinsic distance r of its start, with |c''| below 2 sqrt(2) / (3 r),
    has length below 1.5 r.

    Hypotheses are measured from the samples; curvature admissibility
    demands 5 percent headroom below the threshold to absorb the
    second-difference noise.  Unmet hypotheses are reported, not failed.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    rho = RHO_COEFF / r
    reasons = []
    defect = curve.arclength_defect()
    if defect > 1e-3:
        reasons.append("not arc-length")
    s_max = float(np.max(np.linalg.norm(curve.accelerations(), axis=1)))
    if s_max > HEADROOM * rho:
        reasons.append("curvature above threshold")
    d = np.linalg.norm(curve.points - curve.points[0], axis=1)
    d_max = float(np.max(d))
    if d_max >= r:
        reasons.append("leaves the extrinsic ball")
    length = curve.length()
    bound = 1.5 * r
    return CurveVerdict(
        hypotheses_met=not reasons,
        reasons=tuple(reasons),
        length=length,
        bound=bound,
        margin=bound - length,
        stats={"s_max": s_max, "rho": rho, "d_max": d_max,
               "speed_defect": defect, "r": float(r)},
    )


def chord_profile(t, rho: float):
    """Lower bound t - rho^2 t^3 / 6 on the chord |c(t) - c(0)| of an
    arc-length curve with |c''| below rho."""
    return t - rho * rho * np.asarray(t, dtype=float) ** 3 / 6.0


def chord_profile_peak(rho: float):
    """Argmax and maximum of the chord profile: the profile peaks at
    sqrt(2)/rho with value 2 sqrt(2) / (3 rho), which ties the curvature
    threshold to the ball radius."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return math.sqrt(2.0) / rho, RHO_COEFF / rho


def trig_inequality_check(curve: HCurve) -> float:
    """Max clipped violation of <c'(t), c'(0)> >= 1 - rho^2 t^2 / 2.

    rho is the measured sup of |c''|; t runs from the first interior
    sample.  Nonpositive return means the inequality holds everywhere.
    """
    v = curve.velocities()
    acc = curve.accelerations()
    rho = float(np.max(np.linalg.norm(acc, axis=1)))
    t = curve.h * np.arange(v.shape[0])
    dots = v @ v[0]
    lower = 1.0 - 0.5 * rho * rho * t * t
    return float(np.max(np.clip(lower - dots, 0.0, None)))


def thm6_check(curve: HCurve, cone: OrthantCone, v, L_radius: float,
               tol: float = None) -> CurveVerdict:
    """Self-dual-cone bound hypotheses: the curve lies in the container
    ball, its derivative stays in v - K and its second derivative in K.

    Per-sample checks with rounding-aware slack on the cone memberships
    (second differences inherit cancellation noise of order
    eps |c| / h^2).  Reports the measured length; the bound itself is a
    family-level statement, so no per-curve numeric bound is claimed.
    """
    if not isinstance(cone, OrthantCone):
        raise ValueError("the self-dual cone here is the orthant")
    vv = _coords(v)
    if not cone.contains(vv):
        raise ValueError("v must lie in the cone")
    if tol is None:
        scale = float(np.max(np.abs(curve.points)))
        tol = 64.0 * np.finfo(float).eps * max(scale, 1.0) \
            / (curve.h * curve.h)
    reasons = []
    if curve.arclength_defect() > 1e-3:
        reasons.append("not arc-length")
    vel = curve.velocities()
    acc = curve.accelerations()
    if float(np.min(vv[None, :] - vel)) < -1e-9:
        reasons.append("derivative leaves v - K")
    if float(np.min(acc)) < -tol:
        reasons.append("second derivative leaves K")
    norms = np.linalg.norm(curve.points, axis=1)
    if float(np.max(norms)) > L_radius * (1.0 + 1e-12):
        reasons.append("leaves the container")
    length = curve.length()
    # E = inf <u, v>/|u| over the cone-decomposed velocity parts; strictly
    # positive E gives the quantitative length bound, E = 0 is the edge case
    plus = np.clip(vel, 0.0, None)
    minus = plus - vel
    e_ratio = math.inf
    for part in (plus, minus):
        pn = np.linalg.norm(part, axis=1)
        live = pn > 1e-12 * max(float(np.max(pn, initial=0.0)), 1.0)
        if np.any(live):
            ratios = (part[live] @ vv) / pn[live]
            e_ratio = min(e_ratio, float(np.min(ratios)))
    return CurveVerdict(
        hypotheses_met=not reasons,
        reasons=tuple(reasons),
        length=length,
        bound=math.inf,
        margin=math.inf,
        stats={"acc_min": float(np.min(acc)),
               "deriv_margin": float(np.min(vv[None, :] - vel)),
               "container_margin": L_radius - float(np.max(norms)),
               "cone_tol": float(tol),
               "E_ratio": e_ratio},
    )


# ---------------------------------------------------------------------------
# fixtures and experiment families

def straight_curve(r: float, n: int = 2, m: int = 101) -> HCurve:
    """Unit-speed segment along the first axis, ending just inside the
    extrinsic r-ball."""
    end = r * (1.0 - 1e-9)
    pts = np.zeros((m, n))
    pts[:, 0] = np.linspace(0.0, end, m)
    return HCurve(end / (m - 1), pts)


def circular_arc_curve(radius: float, r_trunc: float,
                       m: int = 4001) -> HCurve:
    """Planar arc of the given radius, truncated where the chord from the
    start reaches r_trunc (the last sample stays strictly inside)."""
    if not 0 < r_trunc < 2.0 * radius:
        raise ValueError("chord must be shorter than the diameter")
    theta_end = 2.0 * math.asin(r_trunc / (2.0 * radius)) * (1.0 - 1e-9)
    theta = np.linspace(0.0, theta_end, m)
    pts = radius * np.stack([np.sin(theta), 1.0 - np.cos(theta)], axis=1)
    return HCurve(radius * theta_end / (m - 1), pts)


def box_arc_curve(delta: float = 0.05, m: int = 2001) -> HCurve:
    """Convex decreasing quarter-circle arc inside the unit box.

    c(s) = (1 - cos s, 1 - sin s) on [delta, pi/2 - delta]: unit speed,
    c'' = (cos s, sin s) in the orthant, c' below v = (1, 0).
    """
    s = np.linspace(delta, math.pi / 2 - delta, m)
    pts = np.stack([1.0 - np.cos(s), 1.0 - np.sin(s)], axis=1)
    return HCurve(float(s[1] - s[0]), pts)


def random_admissible_batch(rng, n: int, r: float = 1.0, trials: int = 500,
                            steps_per_r: int = 250,
                            s_frac: float = 0.92) -> list:
    """Random unit-speed bounded-curvature curves, truncated inside the
    r-ball around their start.

    Each step advances along an exact circular arc whose curvature vector
    is an AR(1)-smoothed random direction orthogonal to the tangent, with
    magnitude capped at s_frac * HEADROOM * rho.  Vectorized across
    trials; returns a list of HCurve.
    """
    rho = RHO_COEFF / r
    cap = s_frac * HEADROOM * rho
    h = r / steps_per_r
    max_steps = int(round(2.0 * r / h))
    u = rng.normal(size=(trials, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    raw = rng.normal(size=(trials, n))
    amp_state = rng.uniform(0.3, 0.9, size=trials)
    p = np.zeros((trials, n))
    traj = [p.copy()]
    stop = np.full(trials, max_steps, dtype=int)
    for k in range(max_steps):
        raw = 0.9 * raw + 0.435 * rng.normal(size=(trials, n))
        khat = raw - np.sum(raw * u, axis=1, keepdims=True) * u
        nk = np.linalg.norm(khat, axis=1, keepdims=True)
        khat = khat / np.maximum(nk, 1e-300)
        amp_state = np.clip(amp_state + 0.08 * rng.normal(size=trials),
                            0.05, 0.97)
        amp = cap * amp_state
        theta = (amp * h)[:, None]
        a2 = amp[:, None]
        p = p + np.sin(theta) / a2 * u + (1.0 - np.cos(theta)) / a2 * khat
        u = np.cos(theta) * u + np.sin(theta) * khat
        traj.append(p.copy())
        crossed = (np.linalg.norm(p - traj[0], axis=1) >= r) \
            & (stop == max_steps)
        stop[crossed] = k + 1
    stack = np.stack(traj, axis=1)
    return [HCurve(h, stack[i, :stop[i]]) if stop[i] >= 3
            else HCurve(h, stack[i, :3]) for i in range(trials)]


def hyperbola_curve(T: float, m: int = None) -> HCurve:
    """Arc-length resampling of (t, 1/t) over [1/T, T].

    The arclength map is inverted with a cubic spline: resampled points
    then sit exactly on the curve with smoothly varying spacing, keeping
    second-difference noise below the rounding floor even where the
    curvature components are tiny.
    """
    if T <= 1.0:
        raise ValueError("need T > 1")
    from scipy.interpolate import CubicSpline
    fine = np.geomspace(1.0 / T, T, max(200000, int(4000 * T)))
    pts = np.stack([fine, 1.0 / fine], axis=1)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = float(cum[-1])
    if m is None:
        m = max(4001, int(total * 150))
    s = np.linspace(0.0, total, m)
    t_at = CubicSpline(cum, fine)(s)
    out = np.stack([t_at, 1.0 / t_at], axis=1)
    return HCurve(total / (m - 1), out)


def hyperbola_experiment(Ts=(2.0, 5.0, 10.0, 20.0, 50.0, 100.0)) -> list:
    """Cone hypotheses hold with fixed v, but the container must grow with
    T and the lengths grow without bound; l(T) > 2 (T - 1)."""
    cone = OrthantCone(2)
    out = []
    for T in Ts:
        curve = hyperbola_curve(float(T))
        L_radius = math.hypot(T, 1.0 / T) * (1.0 + 1e-9)
        verdict = thm6_check(curve, cone, np.array([1.0, 1.0]), L_radius)
        verdict.stats["T"] = float(T)
        out.append(verdict)
    return out


def halfspace_circle_experiment(laps=(1, 2, 3, 4), radius: float = 1.0,
                                m_per_lap: int = 4000) -> list:
    """Repeated traversals of a circle in the affine hyperplane
    <u, v> = <v, v> / 2 with the half-space cone {u : <u, v> >= 0}.

    Every hypothesis of the cone bound holds (the cone is convex but not
    self-dual) and the container is a fixed ball, yet the lengths grow
    linearly in the lap count.
    """
    v = np.array([1.0, 0.0, 0.0])
    out = []
    for k in laps:
        m = int(m_per_lap * k) + 1
        s = np.linspace(0.0, 2.0 * math.pi * radius * k, m)
        ang = s / radius
        pts = np.stack([np.full(m, 0.5),
                        radius * np.cos(ang), radius * np.sin(ang)], axis=1)
        curve = HCurve(float(s[1] - s[0]), pts)
        reasons = []
        if curve.arclength_defect() > 1e-3:
            reasons.append("not arc-length")
        vel = curve.velocities()
        acc = curve.accelerations()
        # half-space membership is a single inner product per sample
        if float(np.min((v[None, :] - vel) @ v)) < -1e-9:
            reasons.append("derivative leaves v - K")
        if float(np.min(acc @ v)) < -1e-9:
            reasons.append("second derivative leaves K")
        if float(np.max(np.linalg.norm(pts, axis=1))) \
                > math.hypot(0.5, radius) * (1.0 + 1e-12):
            reasons.append("leaves the container")
        verdict = CurveVerdict(
            hypotheses_met=not reasons,
            reasons=tuple(reasons),
            length=curve.length(),
            bound=math.inf,
            margin=math.inf,
            stats={"laps": int(k)},
        )
        out.append(verdict)
    return out
