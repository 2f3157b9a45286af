"""Experiment configuration: a strict schema over a small JSON document.

One config file per experiment; every field has a documented default,
unknown keys are rejected, and randomized sweeps take explicit seeds.
"""

import json
import math
from dataclasses import dataclass, field

from .embedding import FSpec
from .spacetime import SpacetimeSpec


class ConfigError(ValueError):
    """A configuration document violates the schema."""


_TOP_KEYS = frozenset({"spacetime", "grid", "fspec", "radius", "tolerances",
                       "experiment", "seed", "trials", "outputs"})
_SPACETIME_KEYS = frozenset({"dimension", "t_min", "t_max", "circumferences",
                             "warp_coeffs"})
_GRID_KEYS = frozenset({"n_t", "n_s"})
_OUTPUT_KEYS = frozenset({"report", "field"})

EXPERIMENTS = ("describe", "sigma-field", "distance-matrix",
               "pullback-metric", "reconstruct", "invariants",
               "verify-noldus", "verify-beem", "verify-embedding",
               "verify-reconstruction", "hilbert")

# named tolerances a config may override; defaults live with the checks
TOLERANCE_NAMES = frozenset({
    "sigma_rel_err", "sigma_runtime_s",
    "noldus_pointwise", "noldus_ratio",
    "beem_residual_rel", "beem_fixture_rel",
    "gradient_order", "hessian_order", "pullback_gram_err",
    "hessian_flat_rel", "equivariance_err",
    "gram_roundtrip_err", "chron_accuracy", "orientation_accuracy",
    "curve_bound_factor", "trig_violation",
    "flat_value_rel",
})


def _real(doc, key, default):
    v = doc.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) \
            or not math.isfinite(v):
        raise ConfigError(f"{key} must be a finite number")
    return float(v)


def _integer(doc, key, default, minimum):
    v = doc.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer")
    if v < minimum:
        raise ConfigError(f"{key} must be >= {minimum}")
    return v


def _reject_unknown(doc, allowed, where):
    for k in doc:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r} in {where}")


@dataclass
class ExperimentConfig:
    """Validated experiment parameters.

    Defaults: flat slab [-1, 1] x S^1 of circumference 4, 64 x 64 grid,
    fspec "h", neighbor radius 5, seed 0, 500 trials, no tolerance
    overrides, no output paths.
    """

    spacetime: SpacetimeSpec
    n_t: int = 64
    n_s: int = 64
    fspec: str = "h"
    radius: int = 5
    tolerances: dict = field(default_factory=dict)
    experiment: str = None
    seed: int = 0
    trials: int = 500
    outputs: dict = field(default_factory=dict)

    def tolerance(self, name: str, default: float) -> float:
        if name not in TOLERANCE_NAMES:
            raise KeyError(f"unregistered tolerance {name!r}")
        return float(self.tolerances.get(name, default))

    def to_dict(self) -> dict:
        sp = self.spacetime
        return {
            "spacetime": {
                "dimension": sp.dimension,
                "t_min": sp.t_min,
                "t_max": sp.t_max,
                "circumferences": list(sp.circumferences),
                "warp_coeffs": list(sp.warp_coeffs),
            },
            "grid": {"n_t": self.n_t, "n_s": self.n_s},
            "fspec": self.fspec,
            "radius": self.radius,
            "tolerances": dict(sorted(self.tolerances.items())),
            "experiment": self.experiment,
            "seed": self.seed,
            "trials": self.trials,
            "outputs": dict(sorted(self.outputs.items())),
        }


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Validate a parsed document against the schema."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "config")

    sp_doc = doc.get("spacetime", {})
    if not isinstance(sp_doc, dict):
        raise ConfigError("spacetime must be an object")
    _reject_unknown(sp_doc, _SPACETIME_KEYS, "spacetime")
    dim = _integer(sp_doc, "dimension", 2, 2)
    t_min = _real(sp_doc, "t_min", -1.0)
    t_max = _real(sp_doc, "t_max", 1.0)
    circ = sp_doc.get("circumferences", [4.0] * (dim - 1))
    warp = sp_doc.get("warp_coeffs", [1.0])
    for name, seq in (("circumferences", circ), ("warp_coeffs", warp)):
        if not isinstance(seq, (list, tuple)) or not seq or any(
                isinstance(v, bool) or not isinstance(v, (int, float))
                or not math.isfinite(v) for v in seq):
            raise ConfigError(f"{name} must be a nonempty list of finite "
                              "numbers")
    try:
        spec = SpacetimeSpec(dim, t_min, t_max, tuple(float(c) for c in circ),
                             tuple(float(w) for w in warp))
    except ValueError as exc:
        raise ConfigError(f"invalid spacetime: {exc}") from exc

    grid_doc = doc.get("grid", {})
    if not isinstance(grid_doc, dict):
        raise ConfigError("grid must be an object")
    _reject_unknown(grid_doc, _GRID_KEYS, "grid")
    n_t = _integer(grid_doc, "n_t", 64, 4)
    n_s = _integer(grid_doc, "n_s", 64, 4)

    fspec = doc.get("fspec", "h")
    if not isinstance(fspec, str):
        raise ConfigError("fspec must be a string")
    try:
        FSpec.parse(fspec)
    except ValueError as exc:
        raise ConfigError(f"invalid fspec: {exc}") from exc

    radius = _integer(doc, "radius", 5, 1)
    seed = _integer(doc, "seed", 0, 0)
    trials = _integer(doc, "trials", 500, 1)

    tols = doc.get("tolerances", {})
    if not isinstance(tols, dict):
        raise ConfigError("tolerances must be an object")
    for k, v in tols.items():
        if k not in TOLERANCE_NAMES:
            raise ConfigError(f"unknown tolerance {k!r}")
        if isinstance(v, bool) or not isinstance(v, (int, float)) \
                or not math.isfinite(v) or v < 0:
            raise ConfigError(f"tolerance {k!r} must be a finite "
                              "nonnegative number")
    tols = {k: float(v) for k, v in tols.items()}

    experiment = doc.get("experiment")
    if experiment is not None:
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}")

    outputs = doc.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("outputs must be an object")
    _reject_unknown(outputs, _OUTPUT_KEYS, "outputs")
    for k, v in outputs.items():
        if not isinstance(v, str) or not v:
            raise ConfigError(f"output path {k!r} must be a nonempty string")

    return ExperimentConfig(spacetime=spec, n_t=n_t, n_s=n_s, fspec=fspec,
                            radius=radius, tolerances=tols,
                            experiment=experiment, seed=seed, trials=trials,
                            outputs=dict(outputs))


def load_config(path: str) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") \
            from exc
    return config_from_dict(doc)


def default_config() -> ExperimentConfig:
    return config_from_dict({})
