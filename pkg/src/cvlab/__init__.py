"""cvlab: total-curvature and Gauss-Bonnet checks for complete surfaces
with cylindrical ends ``dt^2 + G(t, theta) dtheta^2``."""

from .curvature import (
    CurvatureSample,
    curvature_split,
    gauss_curvature,
    geodesic_curvature,
    geodesic_curvature_from_g,
    sample_curvature,
)
from .dsl import DomainError, MetricExpr, ParseError, UnknownIdentifier, eval_jet, parse_metric, serialize
from .jets import Jet2, Overflow
from .model import (
    AnalyticCore,
    EndChart,
    ModelInvalid,
    PolarCap,
    SurfaceModel,
    Topology,
    chart_from_expression,
    euler_char,
    validate_surface,
)
from .quadrature import (
    DEFAULT_TOL,
    ImproperResult,
    NotMonotone,
    QuadResult,
    TailLimit,
    Tolerance,
    estimate_tail_limit,
    integrate_annulus,
    integrate_circle,
    integrate_improper,
)
from .sweep import (
    NonPositiveMu,
    SweepReport,
    TruncationSample,
    Verdict,
    check_gauss_bonnet_truncated,
    check_lambda_is_mu_prime,
    compute_sample,
    detect_h1,
    geometric_schedule,
    lambda_total,
    measure_mu_prime_order,
    mu,
    sampled_curvature_range,
    run_sweep,
    total_curvature_direct,
    truncated_total_curvature,
)
from .zoo import InvalidParameter, Oracle, ZooEntry, all_entries, zoo_entry, zoo_names

__version__ = "0.1.0"
