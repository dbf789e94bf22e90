"""Numerical verification engine for the geometry of almost complex
manifolds with Norden metric: the four-parameter family of almost complex
connections, the basic structure classes, and the curvature identities of
the trace-class connection family on coordinate charts.
"""

from .config import DEFAULT_TOLS, Tolerances
from .connections import (
    CANONICAL_PARAMS,
    ConnectionFamily,
    ConnectionParams,
    THREE_FORM_PARAMS,
    YANO_PARAMS,
    almost_complex_residual,
    difference_tensor,
    metric_derivatives,
    special_residuals,
    table1_matrix,
    torsion_tensor,
)
from .errors import (
    ConfigError,
    DomainError,
    GenerationError,
    InternalConsistencyError,
    NordenError,
    NumericError,
    ParseError,
    PreconditionError,
    StructuralError,
)
from .expr import Expr, differentiate, evaluate, parse, to_string
from .manifold import (
    BUILTIN_CHARTS,
    Chart,
    ChartFrame,
    builtin_chart,
    chart_from_json,
    chart_to_json,
    christoffel,
    conformal_kahler_chart,
    curvature_report,
    field_F_theta,
    flat_chart,
    levi_civita_curvature,
    prime_connection_coeffs,
    prime_curvature,
    psi_pi_tensors,
    tau_checks,
    validate_chart,
    verify_w1_theorems,
)
from .pointwise import (
    ClassificationResult,
    NordenPoint,
    class_projector,
    classify,
    generate_in_class,
    lie_forms,
    make_point,
    nabla_J,
    nijenhuis_pair,
    point_from_json,
    point_to_json,
    random_point,
    standard_pair,
    standard_point,
    w1_from_theta,
)
from .report import Check, Report, emit_report
from .suite import SuiteConfig, run_suite
from .tensor import (
    Tensor,
    component_norm,
    contract,
    identity_tensor,
    project_F_symmetries,
    raise_lower,
    tensor,
)

__version__ = "0.1.0"
