"""Linear difference equations as first-order systems.

Split the solution of an order-N linear recurrence into N components tied
together by gauge sequences, propagate the components exactly for any
admissible gauge, or keep only the diagonal of the one-step matrix under the
characteristic power gauge (the WKB approximation for slowly varying
coefficients).  Everything is validated against the plain scalar recursion.
"""

from .core import (
    MAX_ORDER,
    MIN_ORDER,
    CoefficientModel,
    CompanionState,
    Constant,
    PolynomialInEpsK,
    RecurrenceSpec,
    ScalarTrajectory,
    SinusoidalInEpsK,
    Tabulated,
    companion_matrix,
    companion_propagate,
    direct_solve,
    eval_coeffs,
)
from .decomposition import (
    ComponentVector,
    GaugeSet,
    StepMatrices,
    build_H,
    build_M,
    decompose_initial,
    propagate,
    reconstruct,
    step,
    step_matrices,
    transfer_matrix,
)
from .errors import (
    AmbiguousTracking,
    Breakdown,
    DegenerateRoots,
    IndexOutOfWindow,
    NoConvergence,
    RecurrenceError,
    SingularGauge,
    ZeroCoefficient,
)
from .roots import (
    RootFrame,
    SigmaTable,
    characteristic_roots,
    min_separation,
    power_gauge,
    root_frames,
    root_residuals,
    sigma_excluding,
    sigma_table,
    track_branches,
    vandermonde_inverse,
)
from .scenario import (
    Scenario,
    ScenarioError,
    load_scenario,
    parse_complex,
    resolved_dict,
    scenario_from_dict,
    validate_scenario_dict,
)
from .third_order import (
    RiccatiBranch,
    XTerms,
    decoupled_step,
    explicit_step,
    oracle_ratio_branch,
    product_solution,
    riccati_forward,
    riccati_gauge,
    riccati_residual,
    wkb3_step,
    x_terms,
)
from .wkb import (
    ComparisonTable,
    SweepResult,
    WkbStepReport,
    compare_methods,
    epsilon_sweep,
    exact_step_general,
    wkb_diagonal_gain,
    wkb_step_general,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousTracking",
    "Breakdown",
    "CoefficientModel",
    "CompanionState",
    "ComparisonTable",
    "ComponentVector",
    "Constant",
    "DegenerateRoots",
    "GaugeSet",
    "IndexOutOfWindow",
    "MAX_ORDER",
    "MIN_ORDER",
    "NoConvergence",
    "PolynomialInEpsK",
    "RecurrenceError",
    "RecurrenceSpec",
    "RiccatiBranch",
    "RootFrame",
    "ScalarTrajectory",
    "Scenario",
    "ScenarioError",
    "SigmaTable",
    "SingularGauge",
    "SinusoidalInEpsK",
    "StepMatrices",
    "SweepResult",
    "Tabulated",
    "WkbStepReport",
    "XTerms",
    "ZeroCoefficient",
    "build_H",
    "build_M",
    "characteristic_roots",
    "companion_matrix",
    "companion_propagate",
    "compare_methods",
    "decompose_initial",
    "decoupled_step",
    "direct_solve",
    "epsilon_sweep",
    "eval_coeffs",
    "exact_step_general",
    "explicit_step",
    "load_scenario",
    "min_separation",
    "oracle_ratio_branch",
    "parse_complex",
    "power_gauge",
    "product_solution",
    "propagate",
    "reconstruct",
    "resolved_dict",
    "riccati_forward",
    "riccati_gauge",
    "riccati_residual",
    "root_frames",
    "root_residuals",
    "scenario_from_dict",
    "sigma_excluding",
    "sigma_table",
    "step",
    "step_matrices",
    "track_branches",
    "transfer_matrix",
    "validate_scenario_dict",
    "vandermonde_inverse",
    "wkb3_step",
    "wkb_diagonal_gain",
    "wkb_step_general",
    "x_terms",
]
