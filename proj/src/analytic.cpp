#include "lendfair/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lendfair {

double norm_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

std::string to_string(NoSolutionReason reason)
{
    switch (reason)
    {
        case NoSolutionReason::None:
            return "none";
        case NoSolutionReason::ValueBelowTargetAtZero:
            return "value_below_target_at_zero";
        case NoSolutionReason::ValueAboveTargetAtMax:
            return "value_above_target_at_max";
        case NoSolutionReason::NotConverged:
            return "not_converged";
    }
    return "unknown";
}

FixedTermQuote price_fixed_term(MarketParams const& market, LoanTerms const& terms, double T)
{
    return price_fixed_term(market, terms, T, market.r);
}

FixedTermQuote price_fixed_term(MarketParams const& market, LoanTerms const& terms, double T,
                                double carry)
{
    market.validate();
    terms.validate();
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("fixed-term pricing needs T > 0");
    if (!(market.sigma > 0.0))
        throw std::invalid_argument("fixed-term pricing needs sigma > 0");
    if (terms.beta != 0.0)
        throw std::invalid_argument("fixed-term loans carry no fee (beta must be 0)");

    FixedTermQuote q;
    q.carry = carry;
    q.sigma_T = market.sigma * std::sqrt(T);

    // barrier / spot and strike / spot
    double const log_h = terms.alpha * T + std::log(terms.c0 / terms.c);
    double const k = std::exp(terms.alpha * T) / terms.c;
    double const mu = carry / (market.sigma * market.sigma) - 0.5;
    q.eta1 = -log_h / q.sigma_T + (1.0 + mu) * q.sigma_T;
    q.eta2 = log_h / q.sigma_T + (1.0 + mu) * q.sigma_T;

    // a few ulps below zero is the boundary itself: the value there is rounding noise
    if (log_h >= -64.0 * std::numeric_limits<double>::epsilon())
    {
        q.knocked_out_at_inception = true;
        q.value = 0.0;
        return q;
    }

    double const df = std::exp(-market.r * T);
    double const carry_df = std::exp((carry - market.r) * T);
    double const vanilla = carry_df * norm_cdf(q.eta1) - k * df * norm_cdf(q.eta1 - q.sigma_T);
    double const reflected = carry_df * std::exp(2.0 * (mu + 1.0) * log_h) * norm_cdf(q.eta2)
                             - k * df * std::exp(2.0 * mu * log_h) * norm_cdf(q.eta2 - q.sigma_T);
    q.value = market.s0 * std::max(0.0, vanilla - reflected);
    return q;
}

FixedTermFairRate solve_fixed_term_fair_rate(MarketParams const& market, double c, double c0,
                                             double T, double alpha_max)
{
    return solve_fixed_term_fair_rate(market, c, c0, T, alpha_max, market.r);
}

FixedTermFairRate solve_fixed_term_fair_rate(MarketParams const& market, double c, double c0,
                                             double T, double alpha_max, double carry)
{
    if (!(c > c0 && c0 > 1.0))
        throw std::invalid_argument("fair rate needs c > c0 > 1");
    if (!(alpha_max > 0.0))
        throw std::invalid_argument("fair rate needs alpha_max > 0");

    constexpr double kTol = 1e-9;
    double const target = 1.0 - 1.0 / c;
    auto residual = [&](double alpha) {
        LoanTerms const terms{alpha, c, c0, 0.0};
        return price_fixed_term(market, terms, T, carry).value / market.s0 - target;
    };

    FixedTermFairRate out;
    double lo = 0.0;
    double hi = alpha_max;
    double const f_lo = residual(lo);
    if (std::abs(f_lo) <= kTol)
    {
        out.found = true;
        out.alpha = lo;
        out.residual = f_lo;
        return out;
    }
    if (f_lo < 0.0)
    {
        std::ostringstream msg;
        msg << "value/s0 at alpha=0 is " << f_lo + target << ", below the fair level " << target
            << "; zero interest already favors the lender";
        out.reason = NoSolutionReason::ValueBelowTargetAtZero;
        out.residual = f_lo;
        out.diagnostic = msg.str();
        return out;
    }
    double const f_hi = residual(hi);
    if (f_hi > kTol)
    {
        std::ostringstream msg;
        msg << "value/s0 at alpha=" << alpha_max << " is " << f_hi + target
            << ", still above the fair level " << target;
        out.reason = NoSolutionReason::ValueAboveTargetAtMax;
        out.residual = f_hi;
        out.diagnostic = msg.str();
        return out;
    }

    double mid = hi;
    double f_mid = f_hi;
    for (int it = 1; it <= 200; ++it)
    {
        mid = 0.5 * (lo + hi);
        f_mid = residual(mid);
        out.iterations = it;
        if (std::abs(f_mid) <= kTol)
        {
            break;
        }
        (f_mid > 0.0 ? lo : hi) = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
        {
            break;
        }
    }
    out.alpha = mid;
    out.residual = f_mid;
    out.found = std::abs(f_mid) <= kTol;
    if (!out.found)
    {
        out.reason = NoSolutionReason::NotConverged;
        out.diagnostic = "bisection bracket collapsed before reaching tolerance";
    }
    return out;
}

}  // namespace lendfair
