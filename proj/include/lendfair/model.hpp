#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lendfair/path_engine.hpp"
#include "lendfair/types.hpp"

namespace lendfair {

//---------------------------------------------------------------------------//
// Loan schedule
//---------------------------------------------------------------------------//

/// Repayment amount exp(alpha t) s0 / c + beta.
double exercise_price(LoanTerms const& terms, MarketParams const& market, double t);

/// Liquidation price c0 * exercise_price(t) / D for the current collateral D.
double barrier(LoanTerms const& terms, MarketParams const& market, double t,
               LoanState const& state);

/// Collateral value over amount owed; liquidation when below c0.
double health_factor(double spot, LoanTerms const& terms, MarketParams const& market, double t,
                     LoanState const& state);

//---------------------------------------------------------------------------//
// Fixed-term loans
//---------------------------------------------------------------------------//

/// First step at or before T where the path is below the fixed-term barrier.
std::optional<std::size_t> fixed_term_liquidation_step(PricePath const& path,
                                                       LoanTerms const& terms,
                                                       MarketParams const& market, double T);

double borrower_utility_fixed_term(PricePath const& path, LoanTerms const& terms,
                                   MarketParams const& market, double T);

double lender_utility_fixed_term(PricePath const& path, LoanTerms const& terms,
                                 MarketParams const& market, double T);

//---------------------------------------------------------------------------//
// Perpetual loans with fixed fee and top-ups
//---------------------------------------------------------------------------//

/*!
 * Per-step tables shared by every path of one valuation.
 *
 * Everything the event loop needs that depends only on time is evaluated
 * once here; the loop itself touches only the path.
 */
class LoanSchedule
{
  public:
    LoanSchedule(MarketParams const& market, LoanTerms const& terms,
                 BorrowerBehavior const& behavior, TimeGrid const& grid);

    std::size_t n_steps() const noexcept { return grid_.n_steps(); }
    std::size_t monitor_stride() const noexcept { return stride_; }
    bool is_monitor_step(std::size_t k) const noexcept { return k % stride_ == 0; }

    TimeGrid const& grid() const noexcept { return grid_; }
    MarketParams const& market() const noexcept { return market_; }
    LoanTerms const& terms() const noexcept { return terms_; }
    BorrowerBehavior const& behavior() const noexcept { return behavior_; }

    double exercise(std::size_t k) const noexcept { return exercise_[k]; }
    double log_growth(std::size_t k) const noexcept { return log_growth_[k]; }
    double log_liquidation(std::size_t k) const noexcept { return log_liquidation_[k]; }
    double log_topup_level(std::size_t k) const noexcept { return log_topup_level_[k]; }
    double buyer_discount(std::size_t k) const noexcept { return buyer_discount_[k]; }
    double lender_discount(std::size_t k) const noexcept { return lender_discount_[k]; }
    double loan_amount() const noexcept { return market_.s0 / terms_.c; }

  private:
    MarketParams market_;
    LoanTerms terms_;
    BorrowerBehavior behavior_;
    TimeGrid grid_;
    std::size_t stride_;
    std::vector<double> exercise_;
    std::vector<double> log_growth_;
    std::vector<double> log_liquidation_;
    std::vector<double> log_topup_level_;
    std::vector<double> buyer_discount_;
    std::vector<double> lender_discount_;
};

namespace detail {

struct Collateral
{
    double units = 1.0;
    double log_units = 0.0;
    double cost = 0.0;
    int n_topups = 0;
};

inline double spot_at(LoanSchedule const& s, std::size_t k, double log_price)
{
    return k == 0 ? s.market().s0 : std::exp(log_price);
}

inline double repay_value(LoanSchedule const& s, std::size_t k, double spot,
                          Collateral const& col)
{
    return s.buyer_discount(k) * (col.units * spot - s.exercise(k)) - col.cost;
}

inline void settle(LoanSchedule const& s, std::size_t k, Collateral const& col,
                   StopReason reason, PathOutcome& out)
{
    out.stop_reason = reason;
    out.stop_step = k;
    out.stop_time = s.grid().time(k);
    out.n_topups = col.n_topups;
    out.topup_cost = col.cost;
    out.total_collateral = col.units;
}

inline void settle_repaid(LoanSchedule const& s, std::size_t k, double spot,
                          Collateral const& col, StopReason reason, PathOutcome& out)
{
    settle(s, k, col, reason, out);
    out.exercised = true;
    out.buyer_value = repay_value(s, k, spot, col);
    out.lender_value = s.lender_discount(k) * s.exercise(k) - s.loan_amount();
}

inline void settle_liquidated(LoanSchedule const& s, std::size_t k, Collateral const& col,
                              StopReason reason, PathOutcome& out)
{
    // all D units are sold at the barrier c0 E_t / D
    settle(s, k, col, reason, out);
    out.buyer_value = -col.cost;
    out.lender_value = s.lender_discount(k) * s.terms().c0 * s.exercise(k) - s.loan_amount();
}

/// spot * D > exp(alpha t) s_star, compared in logs.
inline bool wants_repay(LoanSchedule const& s, std::size_t k, double log_price,
                        Collateral const& col, double log_s_star)
{
    return log_price + col.log_units > s.log_growth(k) + log_s_star;
}

/// spot < (1 + trigger) c0 E_t / D, compared in logs.
inline void maybe_top_up(LoanSchedule const& s, std::size_t k, double log_price,
                         Collateral& col)
{
    auto const& b = s.behavior();
    if (b.allow_topups && log_price + col.log_units < s.log_topup_level(k))
    {
        double const spot = spot_at(s, k, log_price);
        col.units += b.topup_size;
        col.log_units = std::log(col.units);
        col.cost += s.buyer_discount(k) * b.topup_size * spot;
        ++col.n_topups;
    }
}

}  // namespace detail

/*!
 * Runs one path through the perpetual loan event loop.
 *
 * next_log_price() yields log prices for steps 1..n in order. At each step a
 * breach of the barrier c0 E_t / D liquidates; at monitoring steps the
 * borrower first repays if spot > exp(alpha t) s_star / D and otherwise tops
 * up when spot is within the trigger distance of the barrier. The horizon is
 * a forced final decision. Price comparisons run on logs so the exponential
 * is only taken when an event fires.
 */
template<class NextLogPrice>
PathOutcome run_perpetual_loan(LoanSchedule const& s, ExercisePolicy policy,
                               NextLogPrice&& next_log_price)
{
    PathOutcome out;
    detail::Collateral col;
    std::size_t const n = s.n_steps();
    double const log_s_star = std::log(policy.s_star);
    double log_price = std::log(s.market().s0);
    for (std::size_t k = 0;; ++k)
    {
        if (k > 0)
        {
            log_price = next_log_price();
        }
        if (log_price + col.log_units < s.log_liquidation(k))
        {
            detail::settle_liquidated(s, k, col, StopReason::Liquidated, out);
            return out;
        }
        bool const monitor = s.is_monitor_step(k);
        if (!monitor && k < n)
        {
            continue;
        }
        if (monitor && detail::wants_repay(s, k, log_price, col, log_s_star))
        {
            detail::settle_repaid(s, k, detail::spot_at(s, k, log_price), col,
                                  StopReason::Repaid, out);
            return out;
        }
        if (k == n)
        {
            double const spot = detail::spot_at(s, k, log_price);
            if (col.units * spot > s.exercise(k))
            {
                detail::settle_repaid(s, k, spot, col, StopReason::HorizonExpired, out);
            }
            else
            {
                detail::settle_liquidated(s, k, col, StopReason::HorizonExpired, out);
            }
            return out;
        }
        detail::maybe_top_up(s, k, log_price, col);
    }
}

/*!
 * Evaluates many exercise thresholds on one path in a single pass.
 *
 * log_s_star must be ascending (log of the candidate thresholds; -inf for 0).
 * Until a candidate exercises, its state is identical to every other live
 * candidate's, and the exercise test is monotone in s_star, so candidates
 * leave in ascending order. Produces the same buyer values as
 * run_perpetual_loan applied per candidate.
 */
template<class NextLogPrice>
void run_perpetual_loan_multi(LoanSchedule const& s, std::span<double const> log_s_star,
                              std::span<double> buyer_values, NextLogPrice&& next_log_price)
{
    detail::Collateral col;
    std::size_t const n = s.n_steps();
    std::size_t const n_cand = log_s_star.size();
    std::size_t live = 0;  // candidates [0, live) have already exercised
    double log_price = std::log(s.market().s0);
    for (std::size_t k = 0;; ++k)
    {
        if (k > 0)
        {
            log_price = next_log_price();
        }
        if (log_price + col.log_units < s.log_liquidation(k))
        {
            for (; live < n_cand; ++live)
            {
                buyer_values[live] = -col.cost;
            }
            return;
        }
        bool const monitor = s.is_monitor_step(k);
        if (!monitor && k < n)
        {
            continue;
        }
        if (monitor && detail::wants_repay(s, k, log_price, col, log_s_star[live]))
        {
            double const payoff =
                detail::repay_value(s, k, detail::spot_at(s, k, log_price), col);
            while (live < n_cand && detail::wants_repay(s, k, log_price, col, log_s_star[live]))
            {
                buyer_values[live++] = payoff;
            }
            if (live == n_cand)
            {
                return;
            }
        }
        if (k == n)
        {
            double const spot = detail::spot_at(s, k, log_price);
            double const payoff = col.units * spot > s.exercise(k)
                                      ? detail::repay_value(s, k, spot, col)
                                      : -col.cost;
            for (; live < n_cand; ++live)
            {
                buyer_values[live] = payoff;
            }
            return;
        }
        detail::maybe_top_up(s, k, log_price, col);
    }
}

/// Event loop over a materialized path; the grid must resolve the monitoring frequency.
PathOutcome loan_outcome_perpetual(PricePath const& path, LoanTerms const& terms,
                                   MarketParams const& market, BorrowerBehavior const& behavior,
                                   ExercisePolicy const& policy);

}  // namespace lendfair
