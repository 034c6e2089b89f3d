"""Finsler geometry of the positive-definite cone under Schatten-p norms."""

__version__ = "0.1.0"

from .cone import (
    Geodesic,
    TangentAt,
    congruence,
    distance,
    exp_point,
    geodesic,
    log_point,
    midpoint,
    transport,
)
from .convexopt import (
    ConvexSubmanifold,
    MinimizerResult,
    best_approximation,
    circumcenter,
    minimize_along_geodesic,
    moreau_yoshida_resolvent,
    tangent_basis,
)
from .errors import *  # noqa: F401,F403
from .linalg import SchattenP, eigh, expm, logm, powm, schatten_norm, sqrtm
from .metricprops import (
    GapReport,
    bch_distance_remainder,
    birkhoff_gap,
    convexity_constant_estimate,
    curvature_estimate,
    curvature_limit,
    emi_gap,
    geodesic_convexity_gap,
    loewner_heinz_gap,
    pparallelogram_gap,
)
from .splitting import (
    BlockPartition,
    conditional_expectation,
    cpr_factorize,
    expectation_norm_estimate,
    is_lie_triple,
    is_reductive,
)
from .suites import SuiteConfig, run_suite
