"""Explore-before-talk uplink allocation: rates, Chernoff outage bounds, optimizer, simulator."""

from ._core import (  # noqa: F401
    ConvSolution,
    EbtPlan,
    EbtSolution,
    PsiResult,
    SimMetrics,
    SystemParams,
    TrafficRates,
    __version__,
    admitted_pmf,
    chernoff_outage_bound,
    derive_traffic_rates,
    equivalent_conventional_width,
    exp_integral_e1,
    feasibility_check,
    mean_rate_conventional,
    mean_rate_ebt,
    mean_rate_ebt_approx,
    mean_rate_ebt_exact,
    mean_rate_ebt_lower_bound,
    mean_rate_ebt_quadrature,
    min_psi_conventional,
    minimize_psi,
    optimal_wbar_for_w,
    optimize_conventional,
    optimize_ebt,
    order_stat_mean,
    order_stat_pdf,
    preset_config,
    psi,
    run_experiment,
    simulate,
)
