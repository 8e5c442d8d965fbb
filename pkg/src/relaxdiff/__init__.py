"""Relaxed finite-volume schemes for degenerate parabolic equations with
optimal SSP Runge-Kutta time integration and a stability toolkit."""

from .tableaux import (
    ButcherTableau,
    ShuOsherForm,
    OrderCheck,
    CATALOG_PAIRS,
    ssp_tableau,
    shu_osher_to_butcher,
    lambda_ssp,
    validate_order,
)
from .stability import (
    StabilityPolynomial,
    StabilityReport,
    CflModel,
    stability_polynomial,
    shu_osher_polynomial,
    real_stability_interval,
    lambda_opt,
    boundary_locus,
    von_neumann_c1,
    stability_report,
)
from .relaxation import (
    PWC,
    PWL,
    WENO5,
    PWL_LINEAR,
    WENO5_LINEAR,
    RECONSTRUCTIONS,
    Grid1D,
    DiffusionProblem,
    SchemeConfig,
    FluxCounter,
    DivergenceError,
    reconstruct,
    apply_L,
    space_symbol,
)
from .integrator import RunStats, timestep, rk_step, evolve
from .problems import (
    ConvergenceReport,
    heat_problem,
    heat_grid,
    barenblatt_problem,
    barenblatt_support_radius,
    barenblatt_grid,
    error_norms,
    observed_orders,
    convergence_study,
    DEFAULT_HEAT_T_END,
)

__version__ = "0.1.0"
