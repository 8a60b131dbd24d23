#pragma once

#include <string>

#include "lendfair/types.hpp"

namespace lendfair {

/// Standard normal CDF, accurate to ~1e-16 absolute.
double norm_cdf(double x);

/*!
 * Closed-form value of the fixed-term loan's down-and-out call.
 *
 * Exercise price E = exp(alpha T) s0 / c and barrier B = c0 E, monitored
 * continuously over [0, T]. `eta1`/`eta2` are the arguments of the normal CDF
 * terms; with zero carry they reduce to log(c/(e^{aT}c0))/sigma_T + sigma_T/2
 * and its mirror.
 */
struct FixedTermQuote
{
    double value = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double sigma_T = 0.0;
    double carry = 0.0;
    bool knocked_out_at_inception = false;
};

/// Prices under the model's risk-neutral drift (carry = r).
FixedTermQuote price_fixed_term(MarketParams const& market, LoanTerms const& terms, double T);

/// Same with an explicit cost of carry for the underlying's drift.
FixedTermQuote price_fixed_term(MarketParams const& market, LoanTerms const& terms, double T,
                                double carry);

enum class NoSolutionReason
{
    None,
    ValueBelowTargetAtZero,   ///< even alpha = 0 leaves the borrower short of fair value
    ValueAboveTargetAtMax,    ///< the bracket's upper rate still favors the borrower
    NotConverged,             ///< iteration budget exhausted inside the tolerance band
};

std::string to_string(NoSolutionReason reason);

struct FixedTermFairRate
{
    bool found = false;
    double alpha = 0.0;
    double residual = 0.0;  ///< value/s0 - (1 - 1/c) at alpha
    int iterations = 0;
    NoSolutionReason reason = NoSolutionReason::None;
    std::string diagnostic;
};

/*!
 * Solves value(alpha)/s0 = 1 - 1/c for alpha in [0, alpha_max] by bisection.
 *
 * The normalized value is strictly decreasing in alpha on the live region and
 * pinned at 0 once the barrier starts at or above spot, so the bracket is
 * well posed whenever f(0) >= 0 >= f(alpha_max).
 */
FixedTermFairRate solve_fixed_term_fair_rate(MarketParams const& market, double c, double c0,
                                             double T, double alpha_max = 5.0);

FixedTermFairRate solve_fixed_term_fair_rate(MarketParams const& market, double c, double c0,
                                             double T, double alpha_max, double carry);

}  // namespace lendfair
