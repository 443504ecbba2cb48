"""Geometry of the softmax interface: dual potentials, seam distance,
screen forms with rank diagnostics, and replicator flows on the simplex.

The library models the logits-to-probabilities step as a geometric
interface.  Negative entropy and log-sum-exp are convex conjugates; their
Fenchel-Young gap equals KL(y || softmax(z)) and measures the distance to
the seam where the two potential-generated descriptions agree.  On the
screen (open simplex paired with logit classes) the 1-form
``alpha = sum_i z_i dy_i`` and the collar 2-form
``omega_q = dr ^ alpha + r^2 d(alpha)`` are evaluated pointwise, with
numerical rank and kernel diagnostics at and away from the fold r = 0.
Replicator flow with fitness ``z - log y`` descends the gap to the
softmax equilibrium.

Command-line front end: ``softseam figure two-class``,
``softseam figure three-class``, ``softseam verify``, ``softseam flow``.
"""

from .dual_core import (
    SEAM_TOL_DEFAULT,
    GapReport,
    LogitClass,
    Logits,
    Probabilities,
    fenchel_young_gap,
    grad_potential,
    log_sum_exp,
    neg_entropy,
    softmax,
    temperature_softmax,
    two_class_delta,
    two_class_sigmoid,
)
from .errors import DimensionError, DomainError, SoftseamError, StepRejection
from .flows import (
    FlowState,
    FlowTrace,
    bias_shift_flow,
    flow_to_equilibrium,
    replicator_step,
)
from .screen_geometry import (
    CollarPoint,
    CollarTangent,
    RankReport,
    SeamDiagnostics,
    alpha_pair,
    dalpha_pair,
    lagrangian_graph_point,
    omega_q_matrix,
    omega_q_pair,
    seam_diagnostics,
    softmax_jacobian,
    validate_dalpha_by_finite_differences,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SEAM_TOL_DEFAULT",
    "SoftseamError",
    "DomainError",
    "DimensionError",
    "StepRejection",
    "Probabilities",
    "Logits",
    "LogitClass",
    "GapReport",
    "log_sum_exp",
    "neg_entropy",
    "softmax",
    "grad_potential",
    "fenchel_young_gap",
    "temperature_softmax",
    "two_class_delta",
    "two_class_sigmoid",
    "CollarPoint",
    "CollarTangent",
    "RankReport",
    "SeamDiagnostics",
    "alpha_pair",
    "dalpha_pair",
    "omega_q_pair",
    "omega_q_matrix",
    "softmax_jacobian",
    "seam_diagnostics",
    "lagrangian_graph_point",
    "validate_dalpha_by_finite_differences",
    "FlowState",
    "FlowTrace",
    "bias_shift_flow",
    "replicator_step",
    "flow_to_equilibrium",
]
