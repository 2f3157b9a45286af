"""Lorentzian distance fields, L2 distance-function embeddings, causal
reconstruction, and curve-length bounds on discretized Cauchy slabs."""

__version__ = "0.1.0"

from lorembed.spacetime import (
    Grid,
    Point,
    SpacetimeSpec,
    Tangent,
    causal_character,
    flat_slab,
    geodesic_shoot,
    grid_build,
    metric_eval,
    point,
    tangent,
)
from lorembed.sigma import (
    CausalDAG,
    SigmaField,
    causal_graph,
    chord_proper_time,
    mixing_envelope,
    relation,
    sigma_field,
    sigma_flat,
    sigma_flat_block,
    sigma_graph,
    sigma_graph_field,
)
from lorembed.embedding import (
    ABS,
    CHI_MINUS,
    CHI_PLUS,
    FSpec,
    H,
    beem_distance,
    d2_matrix,
    dist_p,
    dphi,
    f_r,
    hessian,
    phi,
    phi_block,
    pullback_metric,
)
from lorembed.lengths import (
    SampledCurve,
    beem_geodesic_check,
    length_metric,
    noldus_closed_form,
    noldus_divergence,
    partition_length,
    sup_length,
)
from lorembed.reconstruction import (
    DistanceTriple,
    Gram,
    boundary_detect,
    causal_closure,
    chron_reconstruct,
    chron_truth_matrix,
    gram_matrices,
    gram_recover,
    triple_from_fields,
    triple_from_gram,
)
from lorembed.invariants import (
    InvariantReport,
    MembershipResult,
    invariant_report,
    membership,
)
from lorembed.hilbert import (
    HCurve,
    OrthantCone,
    box_arc_curve,
    halfspace_circle_experiment,
    hyperbola_experiment,
    random_admissible_batch,
    thm5_check,
    thm6_check,
    trig_inequality_check,
)

__all__ = [
    "Grid",
    "Point",
    "SpacetimeSpec",
    "Tangent",
    "causal_character",
    "flat_slab",
    "geodesic_shoot",
    "grid_build",
    "metric_eval",
    "point",
    "tangent",
    "CausalDAG",
    "SigmaField",
    "causal_graph",
    "chord_proper_time",
    "mixing_envelope",
    "relation",
    "sigma_field",
    "sigma_flat",
    "sigma_flat_block",
    "sigma_graph",
    "sigma_graph_field",
    "ABS",
    "CHI_MINUS",
    "CHI_PLUS",
    "FSpec",
    "H",
    "beem_distance",
    "d2_matrix",
    "dist_p",
    "dphi",
    "f_r",
    "hessian",
    "phi",
    "phi_block",
    "pullback_metric",
    "SampledCurve",
    "beem_geodesic_check",
    "length_metric",
    "noldus_closed_form",
    "noldus_divergence",
    "partition_length",
    "sup_length",
    "DistanceTriple",
    "Gram",
    "boundary_detect",
    "causal_closure",
    "chron_reconstruct",
    "chron_truth_matrix",
    "gram_matrices",
    "gram_recover",
    "triple_from_fields",
    "triple_from_gram",
    "InvariantReport",
    "MembershipResult",
    "invariant_report",
    "membership",
    "HCurve",
    "OrthantCone",
    "box_arc_curve",
    "halfspace_circle_experiment",
    "hyperbola_experiment",
    "random_admissible_batch",
    "thm5_check",
    "thm6_check",
    "trig_inequality_check",
    "__version__",
]
