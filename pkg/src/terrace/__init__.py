"""Spreading speeds for three-species competition-diffusion fronts.

Three independent routes to the speed of the slowest invader: explicit
formulas, an obstacle Hamilton-Jacobi problem in speed space, and direct
simulation of the reaction-diffusion system with front tracking.
"""

from .closed_form import (
    ThmCIntermediates,
    rho_nlp_closed,
    s_nlp_closed,
    thmC_intermediates,
)
from .hj import (
    Beta3Result,
    RateProfile,
    Segment,
    SpeedFunction,
    beta3,
    build_rate,
    build_underline_rate,
    default_s_max,
    free_boundary,
    piecewise_rate,
    reference_solutions,
    single_rate_profile,
    solve_rho_grid,
    solve_rho_oracle,
    underline_beta3,
)
from .model import (
    INFINITE,
    CheckResult,
    CllwBracket,
    CorollaryCheck,
    DecayRate,
    HypothesisContext,
    ModelParams,
    SpeedReport,
    alpha3,
    c_llw,
    check_corollary_113,
    check_theorem12,
    hat_s_nlp,
    kanon_speed_bound,
    lambda_llw,
    sigma3,
    validate_hierarchy,
)

__version__ = "0.1.0"
