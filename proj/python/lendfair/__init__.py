"""Pricing of overcollateralized crypto loans as down-and-out barrier options.

The heavy lifting lives in the compiled ``_lendfair`` extension; this package
re-exports it and adds a few conveniences.
"""

from ._lendfair import (
    BorrowerBehavior,
    ComparisonReport,
    ExercisePolicy,
    FairRateOptions,
    FairRateResult,
    FixedTermFairRate,
    FixedTermQuote,
    LinearFit,
    LoanTerms,
    MarketParams,
    MonthlyRecord,
    NoSolutionReason,
    ProbeReport,
    RateSolution,
    SimConfig,
    ValuationResult,
    bridge_knockout_prob,
    calibrate_and_value,
    calibrate_threshold,
    compare_rates,
    compare_rates_fixed_term,
    compare_rates_perpetual,
    default_s_star_grid,
    impossibility_probe,
    incomplete_beta,
    linreg,
    load_monthly_csv,
    norm_cdf,
    p_value_two_sided,
    pearson,
    price_fixed_term,
    replicating_premium,
    simulate_path,
    solve_fair_rate,
    solve_fixed_term_fair_rate,
    students_t_cdf,
    value_option,
)

__version__ = "0.1.0"


def fair_value_target(market, c):
    """Option value at which the loan is fair: s0 * (1 - 1/c)."""
    return market.s0 * (1.0 - 1.0 / c)


def report_to_rows(report):
    """Flatten a ComparisonReport into dicts, one per month."""
    rows = []
    for m in report.months:
        rows.append(
            {
                "month": m.record.month,
                "risk_free": m.record.risk_free,
                "volatility": m.record.volatility,
                "observed_rate": m.record.observed_rate,
                "model_rate": m.solution.alpha if m.solution.found else None,
                "status": "ok" if m.solution.found else "no_solution",
            }
        )
    return rows
