#include "lendfair/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lendfair {

namespace {

[[noreturn]] void invalid(std::string const& what)
{
    throw std::invalid_argument(what);
}

bool finite(double x)
{
    return std::isfinite(x);
}

}  // namespace

//---------------------------------------------------------------------------//
// Parameter validation
//---------------------------------------------------------------------------//

void MarketParams::validate() const
{
    if (!(s0 > 0.0) || !finite(s0))
        invalid("market: s0 must be positive and finite");
    if (!finite(r))
        invalid("market: r must be finite");
    if (!(sigma >= 0.0) || !finite(sigma))
        invalid("market: sigma must be non-negative and finite");
}

void LoanTerms::validate() const
{
    if (!(alpha >= 0.0) || !finite(alpha))
        invalid("terms: alpha must be non-negative");
    if (!(c0 > 1.0) || !finite(c0))
        invalid("terms: c0 must exceed 1");
    if (!(c > c0) || !finite(c))
        invalid("terms: c must exceed c0");
    if (!(beta >= 0.0) || !finite(beta))
        invalid("terms: beta must be non-negative");
}

void BorrowerBehavior::validate() const
{
    if (!(delta >= 0.0) || !finite(delta))
        invalid("behavior: delta must be non-negative");
    if (monitor_freq < 1)
        invalid("behavior: monitor_freq must be at least 1 per day");
    if (!(topup_trigger > 0.0 && topup_trigger < 1.0))
        invalid("behavior: topup_trigger must lie in (0, 1)");
    if (!(topup_size > 0.0) || !finite(topup_size))
        invalid("behavior: topup_size must be positive");
}

void LoanState::add_topup(double time, double amount)
{
    if (!(amount > 0.0))
        invalid("top-up amount must be positive");
    topup_ledger.push_back({time, amount});
    total_collateral += amount;
    t = time;
}

std::string_view to_string(StopReason reason)
{
    switch (reason)
    {
        case StopReason::Repaid:
            return "repaid";
        case StopReason::Liquidated:
            return "liquidated";
        case StopReason::HorizonExpired:
            return "horizon_expired";
    }
    return "unknown";
}

//---------------------------------------------------------------------------//
// Loan schedule
//---------------------------------------------------------------------------//

double exercise_price(LoanTerms const& terms, MarketParams const& market, double t)
{
    return std::exp(terms.alpha * t) * market.s0 / terms.c + terms.beta;
}

double barrier(LoanTerms const& terms, MarketParams const& market, double t,
               LoanState const& state)
{
    if (!(state.total_collateral >= 1.0))
        invalid("loan state: total collateral must be at least 1");
    return terms.c0 * exercise_price(terms, market, t) / state.total_collateral;
}

double health_factor(double spot, LoanTerms const& terms, MarketParams const& market, double t,
                     LoanState const& state)
{
    if (!(spot > 0.0))
        invalid("health factor: spot must be positive");
    return spot * state.total_collateral / exercise_price(terms, market, t);
}

//---------------------------------------------------------------------------//
// Fixed-term loans
//---------------------------------------------------------------------------//

namespace {

std::size_t maturity_step(PricePath const& path, double T)
{
    if (!(T > 0.0))
        invalid("fixed-term: T must be positive");
    if (path.prices.size() != path.grid.n_steps() + 1)
        invalid("fixed-term: path length does not match its grid");
    double const steps = T / path.grid.dt();
    auto const k = static_cast<std::size_t>(std::llround(steps));
    if (k > path.grid.n_steps() || std::abs(steps - static_cast<double>(k)) > 1e-6)
        invalid("fixed-term: path does not cover the loan term on a grid point");
    return k;
}

void require_fee_free(LoanTerms const& terms)
{
    if (terms.beta != 0.0)
        invalid("fixed-term loans carry no fee (beta must be 0)");
}

double fixed_term_barrier(LoanTerms const& terms, MarketParams const& market, double T)
{
    return std::exp(terms.alpha * T) * market.s0 * terms.c0 / terms.c;
}

}  // namespace

std::optional<std::size_t> fixed_term_liquidation_step(PricePath const& path,
                                                       LoanTerms const& terms,
                                                       MarketParams const& market, double T)
{
    std::size_t const k_end = maturity_step(path, T);
    double const b = fixed_term_barrier(terms, market, T);
    for (std::size_t k = 0; k <= k_end; ++k)
    {
        if (path.prices[k] < b)
        {
            return k;
        }
    }
    return std::nullopt;
}

double borrower_utility_fixed_term(PricePath const& path, LoanTerms const& terms,
                                   MarketParams const& market, double T)
{
    require_fee_free(terms);
    double const loan = market.s0 / terms.c;
    if (fixed_term_liquidation_step(path, terms, market, T))
    {
        return loan;
    }
    double const s_T = path.prices[maturity_step(path, T)];
    return loan + std::exp(-market.r * T) * (s_T - std::exp(terms.alpha * T) * loan);
}

double lender_utility_fixed_term(PricePath const& path, LoanTerms const& terms,
                                 MarketParams const& market, double T)
{
    require_fee_free(terms);
    double const loan = market.s0 / terms.c;
    if (auto const k = fixed_term_liquidation_step(path, terms, market, T))
    {
        double const t = path.grid.time(*k);
        return std::exp(-market.r * t) * fixed_term_barrier(terms, market, T) - loan;
    }
    return std::exp(-market.r * T) * std::exp(terms.alpha * T) * loan - loan;
}

//---------------------------------------------------------------------------//
// Perpetual loans
//---------------------------------------------------------------------------//

LoanSchedule::LoanSchedule(MarketParams const& market, LoanTerms const& terms,
                           BorrowerBehavior const& behavior, TimeGrid const& grid)
    : market_{market}, terms_{terms}, behavior_{behavior}, grid_{grid}, stride_{1}
{
    market.validate();
    terms.validate();
    behavior.validate();
    if (grid.steps_per_day() % behavior.monitor_freq != 0)
        invalid("simulation grid must resolve the monitoring frequency (steps_per_day = "
                + std::to_string(grid.steps_per_day()) + ", monitor_freq = "
                + std::to_string(behavior.monitor_freq) + ")");
    stride_ = static_cast<std::size_t>(grid.steps_per_day() / behavior.monitor_freq);

    std::size_t const n = grid.n_steps();
    exercise_.resize(n + 1);
    log_growth_.resize(n + 1);
    log_liquidation_.resize(n + 1);
    log_topup_level_.resize(n + 1);
    buyer_discount_.resize(n + 1);
    lender_discount_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
    {
        double const t = grid.time(k);
        exercise_[k] = exercise_price(terms, market, t);
        log_growth_[k] = terms.alpha * t;
        log_liquidation_[k] = std::log(terms.c0 * exercise_[k]);
        log_topup_level_[k] = std::log((1.0 + behavior.topup_trigger) * terms.c0 * exercise_[k]);
        buyer_discount_[k] = std::exp(-(market.r + behavior.delta) * t);
        lender_discount_[k] = std::exp(-market.r * t);
    }
}

PathOutcome loan_outcome_perpetual(PricePath const& path, LoanTerms const& terms,
                                   MarketParams const& market, BorrowerBehavior const& behavior,
                                   ExercisePolicy const& policy)
{
    if (path.prices.empty())
        invalid("perpetual loan: empty price path");
    if (path.prices.size() != path.grid.n_steps() + 1)
        invalid("perpetual loan: path length does not match its grid");
    if (!(policy.s_star >= 0.0) || !finite(policy.s_star))
        invalid("perpetual loan: s_star must be non-negative");

    LoanSchedule const schedule{market, terms, behavior, path.grid};
    std::vector<double> logs = path.log_prices;
    if (logs.size() != path.prices.size())
    {
        logs.resize(path.prices.size());
        for (std::size_t k = 0; k < logs.size(); ++k)
        {
            logs[k] = std::log(path.prices[k]);
        }
    }
    std::size_t k = 0;
    return run_perpetual_loan(schedule, policy, [&] { return logs[++k]; });
}

}  // namespace lendfair
