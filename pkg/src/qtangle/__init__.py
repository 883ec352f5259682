"""Entanglement of tangent vectors along multi-particle state trajectories.

A product state moving under independent local dynamics generically has an
entangled velocity: the sum-rule tangent psi1 x dpsi2 + dpsi1 x psi2 does
not factor.  This package computes those tangents for pure product,
register, pseudo-pure, and separable-mixed trajectories, quantifies their
entanglement (Schmidt/entropy, Bell components, CHSH, PPT negativity),
measures projective-space geometry, and certifies the mixed-state cases
through partial-trace witnesses.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateInputError,
    ParameterRangeError,
    ToleranceBreachError,
    UnsupportedMethodError,
    ValidationError,
)
from .statespace import (
    Cut,
    HermitianOp,
    Ket,
    apply_local_unitaries,
    inner,
    partial_trace,
    tensor_product,
)
from .trajectories import (
    BlochCurve,
    Ensemble,
    FactorCurve,
    LocalHamiltonianCurve,
    PhaseCurve,
    ProductTrajectory,
    RegisterProgram,
    SampledCurve,
    TangentVector,
    UnitaryCurve,
    curve_through,
    differentiate,
    eval_curve,
    factor_tangents,
    horizontal_tangent,
    infinitesimal_composition,
    product_tangent,
    projector_differential,
    propagator,
    pseudo_pure_differential,
    register_state,
    register_tangent,
    separable_mixed_differential,
    with_global_phase,
)
from .entanglement import (
    BELL_LABELS,
    MeasurementSetting,
    SchmidtData,
    bell_decompose,
    chsh_value,
    correlation,
    correlation_expansion,
    correlation_matrix,
    entanglement_entropy,
    ppt_negativity,
    schmidt,
)
from .geometry import (
    GeodesicSample,
    TrajectoryProfile,
    fs_distance,
    fs_speed,
    profile,
)
from .channels import (
    BilocalCheck,
    ChannelReport,
    bilocal_inner_check,
    reduced_tangent_channel,
)
from .mixed_witness import (
    VERDICT_EXCLUDED,
    VERDICT_INCONCLUSIVE,
    WitnessReport,
    base_state_separability,
    differential_trace_witness,
    ensemble_witness,
    operator_form_gap,
    product_differential,
)
from .config import RunConfig, parse_config
from .cli import TraceReport, emit, run, verify

__all__ = [
    "__version__",
    "BELL_LABELS",
    "BilocalCheck",
    "BlochCurve",
    "ChannelReport",
    "ConfigError",
    "Cut",
    "DegenerateInputError",
    "Ensemble",
    "FactorCurve",
    "GeodesicSample",
    "HermitianOp",
    "Ket",
    "LocalHamiltonianCurve",
    "MeasurementSetting",
    "ParameterRangeError",
    "PhaseCurve",
    "ProductTrajectory",
    "RegisterProgram",
    "RunConfig",
    "SampledCurve",
    "SchmidtData",
    "TangentVector",
    "ToleranceBreachError",
    "TraceReport",
    "TrajectoryProfile",
    "UnitaryCurve",
    "UnsupportedMethodError",
    "VERDICT_EXCLUDED",
    "VERDICT_INCONCLUSIVE",
    "ValidationError",
    "WitnessReport",
    "apply_local_unitaries",
    "base_state_separability",
    "bell_decompose",
    "bilocal_inner_check",
    "chsh_value",
    "correlation",
    "correlation_expansion",
    "correlation_matrix",
    "curve_through",
    "differential_trace_witness",
    "differentiate",
    "emit",
    "ensemble_witness",
    "entanglement_entropy",
    "eval_curve",
    "factor_tangents",
    "fs_distance",
    "fs_speed",
    "horizontal_tangent",
    "infinitesimal_composition",
    "inner",
    "operator_form_gap",
    "parse_config",
    "partial_trace",
    "ppt_negativity",
    "product_differential",
    "product_tangent",
    "profile",
    "projector_differential",
    "propagator",
    "pseudo_pure_differential",
    "reduced_tangent_channel",
    "register_state",
    "register_tangent",
    "run",
    "schmidt",
    "separable_mixed_differential",
    "tensor_product",
    "verify",
    "with_global_phase",
]
