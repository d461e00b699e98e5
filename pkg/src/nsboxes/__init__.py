"""Toolkit for two-input/two-output non-signalling correlation boxes.

Builds and validates boxes, evaluates the CHSH / Landau / quadratic
criterion stack, sweeps mixture slices of the polytope, quantifies where
the quantumness and information-causality boundaries merge, and simulates
the index-guessing game both exactly and by Monte Carlo.
"""

__version__ = "0.1.0"

from .boxes import (
    CorrelatorVector,
    JointBox,
    LocalLabel,
    Marginals,
    NegativeWeight,
    NonlocalLabel,
    SignallingBox,
    ValidationReport,
    WeightSumMismatch,
    box_from_correlators,
    box_from_dict,
    box_to_dict,
    correlators_of,
    enumerate_vertices,
    isotropic_box,
    make_local,
    make_nonlocal,
    marginals_of,
    maximally_mixed,
    mix,
    pr_box,
    sample,
    sample_many,
    validate,
    vertex_box,
    vertex_names,
)
from .criteria import (
    ChshReport,
    CriteriaReport,
    GapReport,
    GeometryReport,
    OutOfRangeCorrelator,
    QuadraticReport,
    SignConventionViolated,
    TlmReport,
    amgm_gap,
    chsh,
    full_report,
    geometry,
    merge_condition,
    quadratics,
    tlm,
)
from .game import (
    BiasPair,
    GameConfig,
    GameResult,
    PathClass,
    Transcript,
    binary_entropy,
    exact_total_information,
    ic_threshold_scan,
    level1_protocol,
    monte_carlo_game,
    total_information_by_level,
)
from .slices import (
    BoundaryCurve,
    InvalidWeights,
    MergeReport,
    MixtureFamily,
    MixtureSpec,
    NonMonotoneAlongRay,
    SliceGrid,
    boundary_along_ray,
    boundary_curves,
    case_a_correlators,
    case_b_correlators,
    merge_report,
    sweep,
)
from .symmetry import (
    SymmetryElement,
    all_elements,
    apply_symmetry,
    canonicalize,
    compose,
    correlator_action,
    inverse,
)

__all__ = [
    "__version__",
    # boxes
    "CorrelatorVector", "JointBox", "LocalLabel", "Marginals", "NegativeWeight",
    "NonlocalLabel", "SignallingBox", "ValidationReport", "WeightSumMismatch",
    "box_from_correlators", "box_from_dict", "box_to_dict", "correlators_of",
    "enumerate_vertices", "isotropic_box", "make_local", "make_nonlocal",
    "marginals_of", "maximally_mixed", "mix", "pr_box", "sample", "sample_many",
    "validate", "vertex_box", "vertex_names",
    # criteria
    "ChshReport", "CriteriaReport", "GapReport", "GeometryReport",
    "OutOfRangeCorrelator", "QuadraticReport", "SignConventionViolated",
    "TlmReport", "amgm_gap", "chsh", "full_report", "geometry",
    "merge_condition", "quadratics", "tlm",
    # game
    "BiasPair", "GameConfig", "GameResult", "PathClass", "Transcript",
    "binary_entropy", "exact_total_information", "ic_threshold_scan",
    "level1_protocol", "monte_carlo_game", "total_information_by_level",
    # slices
    "BoundaryCurve", "InvalidWeights", "MergeReport", "MixtureFamily",
    "MixtureSpec", "NonMonotoneAlongRay", "SliceGrid", "boundary_along_ray",
    "boundary_curves", "case_a_correlators", "case_b_correlators",
    "merge_report", "sweep",
    # symmetry
    "SymmetryElement", "all_elements", "apply_symmetry", "canonicalize",
    "compose", "correlator_action", "inverse",
]
