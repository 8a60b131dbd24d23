#include "lendfair/replication.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lendfair/model.hpp"
#include "lendfair/parallel.hpp"

namespace lendfair {

double replicating_premium(MarketParams const& market, LoanTerms const& terms)
{
    return market.s0 * (1.0 - 1.0 / terms.c);
}

PartyUtilities fixed_term_loan(PricePath const& path, LoanTerms const& terms,
                               MarketParams const& market, double T)
{
    PartyUtilities u;
    u.first = borrower_utility_fixed_term(path, terms, market, T);
    u.second = lender_utility_fixed_term(path, terms, market, T);
    if (auto k = fixed_term_liquidation_step(path, terms, market, T))
    {
        u.stop_reason = StopReason::Liquidated;
        u.stop_time = path.grid.time(*k);
    }
    else
    {
        u.stop_reason = StopReason::Repaid;
        u.stop_time = T;
    }
    return u;
}

PartyUtilities fixed_term_option(PricePath const& path, LoanTerms const& terms,
                                 MarketParams const& market, double T)
{
    if (terms.beta != 0.0)
        throw std::invalid_argument("fixed-term loans carry no fee (beta must be 0)");
    double const strike = std::exp(terms.alpha * T) * market.s0 / terms.c;
    double const knock = strike * terms.c0;
    double const premium = replicating_premium(market, terms);
    double const dt = path.grid.dt();
    auto const n = static_cast<std::size_t>(std::llround(T / dt));
    if (n > path.grid.n_steps())
        throw std::invalid_argument("fixed-term: path shorter than the loan term");

    // buyer: +s0 for the collateral, -premium; seller: +premium, -s0 for one unit
    PartyUtilities u;
    u.first = market.s0 - premium;
    u.second = premium - market.s0;
    for (std::size_t k = 0; k <= n; ++k)
    {
        if (path.prices[k] < knock)
        {
            double const t = k * dt;
            u.second += std::exp(-market.r * t) * knock;
            u.stop_reason = StopReason::Liquidated;
            u.stop_time = t;
            return u;
        }
    }
    double const df = std::exp(-market.r * T);
    double const s_T = path.prices[n];
    if (s_T > strike)
    {
        u.first += df * (s_T - strike);
        u.second += df * strike;
    }
    else
    {
        u.second += df * s_T;
    }
    u.stop_reason = StopReason::Repaid;
    u.stop_time = T;
    return u;
}

PartyUtilities perpetual_loan(PricePath const& path, LoanTerms const& terms,
                              MarketParams const& market, BorrowerBehavior const& behavior,
                              ExercisePolicy const& policy)
{
    if (path.prices.empty())
        throw std::invalid_argument("perpetual loan: empty price path");
    behavior.validate();
    int const spd = path.grid.steps_per_day();
    if (spd % behavior.monitor_freq != 0)
        throw std::invalid_argument("simulation grid must resolve the monitoring frequency");
    std::size_t const stride = static_cast<std::size_t>(spd / behavior.monitor_freq);

    double const loan = market.s0 / terms.c;
    LoanState state;
    double topups_paid = 0.0;   // discounted at r + delta
    PartyUtilities u;
    u.first = loan;
    u.second = -loan;

    std::size_t const n = path.grid.n_steps();
    for (std::size_t k = 0; k <= n; ++k)
    {
        double const t = path.grid.time(k);
        double const spot = path.prices[k];
        state.t = t;
        double const owed = exercise_price(terms, market, t);
        double const h = health_factor(spot, terms, market, t, state);
        double const d_borrower = std::exp(-(market.r + behavior.delta) * t);
        double const d_lender = std::exp(-market.r * t);
        bool const monitor = k % stride == 0;
        bool const wants_out =
            monitor && spot * state.total_collateral > std::exp(terms.alpha * t) * policy.s_star;

        auto liquidate = [&](StopReason reason) {
            // the lender sells every unit held at the liquidation threshold
            u.first -= topups_paid;
            u.second += d_lender * state.total_collateral * barrier(terms, market, t, state);
            u.stop_reason = reason;
            u.stop_time = t;
            return u;
        };
        auto repay = [&](StopReason reason) {
            u.first += d_borrower * (state.total_collateral * spot - owed) - topups_paid;
            u.second += d_lender * owed;
            u.stop_reason = reason;
            u.stop_time = t;
            return u;
        };

        if (h < terms.c0)
            return liquidate(StopReason::Liquidated);
        if (wants_out)
            return repay(StopReason::Repaid);
        if (k == n)
        {
            return state.total_collateral * spot > owed ? repay(StopReason::HorizonExpired)
                                                        : liquidate(StopReason::HorizonExpired);
        }
        if (monitor && behavior.allow_topups && h < (1.0 + behavior.topup_trigger) * terms.c0)
        {
            state.add_topup(t, behavior.topup_size);
            topups_paid += d_borrower * behavior.topup_size * spot;
        }
    }
    throw std::logic_error("perpetual loan: loop ended without a decision");
}

PartyUtilities perpetual_option(PricePath const& path, LoanTerms const& terms,
                                MarketParams const& market, BorrowerBehavior const& behavior,
                                ExercisePolicy const& policy)
{
    PathOutcome const out = loan_outcome_perpetual(path, terms, market, behavior, policy);
    double const premium = replicating_premium(market, terms);
    double const t = out.stop_time;
    PartyUtilities u;
    u.first = market.s0 - premium + out.buyer_value;
    // seller: premium plus s0/c buys one unit; top-up units are returned on
    // exercise and sold with the rest at the barrier on knock-out
    u.second = premium - market.s0;
    if (out.exercised)
    {
        u.second += std::exp(-market.r * t) * exercise_price(terms, market, t);
    }
    else
    {
        LoanState held;
        held.total_collateral = out.total_collateral;
        u.second += std::exp(-market.r * t) * out.total_collateral
                    * barrier(terms, market, t, held);
    }
    u.stop_reason = out.stop_reason;
    u.stop_time = t;
    return u;
}

namespace {

struct ModelSetup
{
    std::string name;
    MarketParams market;
    LoanTerms terms;
    BorrowerBehavior behavior;
    ExercisePolicy policy;
    TimeGrid grid;
    bool fixed_term = false;
    double T = 0.0;
};

}  // namespace

std::vector<ReplicationCase> run_replication(std::size_t n_paths, std::uint64_t seed)
{
    if (n_paths < 1)
        throw std::invalid_argument("replication needs at least one path");

    std::vector<ModelSetup> setups;
    {
        ModelSetup s{"fixed-term", {100.0, 0.05, 0.6}, {0.03, 1.5, 1.2, 0.0}, {}, {}, TimeGrid{1.0, 1}};
        s.fixed_term = true;
        s.T = 1.0;
        setups.push_back(s);
    }
    {
        // continuous-monitoring proxy: every substep is a decision point
        BorrowerBehavior b;
        b.delta = 0.0;
        b.monitor_freq = 4;
        b.allow_topups = false;
        setups.push_back({"perpetual", {100.0, 0.04, 0.7}, {0.05, 1.5, 1.2, 0.0}, b, {160.0},
                          TimeGrid{2.0, 4}});
    }
    {
        BorrowerBehavior b;
        b.delta = 0.01;
        b.monitor_freq = 2;
        setups.push_back({"fixed-fee-topup", {100.0, 0.03746, 0.7},
                          {0.0283, 1.0 / 0.805, 1.0 / 0.83, 0.5}, b, {165.0}, TimeGrid{2.0, 8}});
    }

    std::vector<ReplicationCase> cases;
    for (std::size_t m = 0; m < setups.size(); ++m)
    {
        auto const& s = setups[m];
        std::vector<PartyUtilities> loan(n_paths), option(n_paths);
        parallel_for(n_paths, [&](std::size_t i) {
            PricePath const path = simulate_path(s.market, s.grid, seed + m, StreamId::Paths,
                                                 static_cast<std::uint32_t>(i));
            if (s.fixed_term)
            {
                loan[i] = fixed_term_loan(path, s.terms, s.market, s.T);
                option[i] = fixed_term_option(path, s.terms, s.market, s.T);
            }
            else
            {
                loan[i] = perpetual_loan(path, s.terms, s.market, s.behavior, s.policy);
                option[i] = perpetual_option(path, s.terms, s.market, s.behavior, s.policy);
            }
        });
        ReplicationCase rc;
        rc.model = s.name;
        rc.n_paths = n_paths;
        for (std::size_t i = 0; i < n_paths; ++i)
        {
            rc.max_borrower_gap = std::max(rc.max_borrower_gap, std::abs(loan[i].first - option[i].first));
            rc.max_lender_gap = std::max(rc.max_lender_gap, std::abs(loan[i].second - option[i].second));
            rc.n_liquidated += loan[i].stop_reason == StopReason::Liquidated;
            rc.n_repaid += loan[i].stop_reason == StopReason::Repaid;
            rc.n_event_mismatch += loan[i].stop_reason != option[i].stop_reason
                                   || loan[i].stop_time != option[i].stop_time;
        }
        cases.push_back(rc);
    }
    return cases;
}

}  // namespace lendfair
