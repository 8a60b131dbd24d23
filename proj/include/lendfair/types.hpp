#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace lendfair {

/// Market for the collateral asset, priced in the loan currency.
struct MarketParams
{
    double s0 = 100.0;    ///< spot price at origination
    double r = 0.03746;   ///< continuously compounded risk-free rate
    double sigma = 0.46;  ///< annual log-return volatility

    void validate() const;
};

/// Lending-pool loan parameters per unit of collateral.
struct LoanTerms
{
    double alpha = 0.0283;       ///< continuously compounded APR
    double c = 1.0 / 0.805;      ///< overcollateralization
    double c0 = 1.0 / 0.83;      ///< liquidation health-factor threshold
    double beta = 0.5;           ///< fixed repayment fee

    void validate() const;
};

struct BorrowerBehavior
{
    double delta = 0.005;        ///< extra annual discount beyond r
    int monitor_freq = 10;       ///< monitoring events per day
    double topup_trigger = 0.05; ///< top up within this relative distance of the barrier
    double topup_size = 0.1;     ///< collateral units added per top-up
    bool allow_topups = true;

    void validate() const;
};

struct TopUpEvent
{
    double t = 0.0;
    double amount = 0.0;
};

/// Collateral bookkeeping of a live loan; the initial unit is included.
struct LoanState
{
    double t = 0.0;
    double total_collateral = 1.0;
    std::vector<TopUpEvent> topup_ledger;

    void add_topup(double time, double amount);
};

/// Parametric exercise rule: repay when spot > exp(alpha t) * s_star / D.
struct ExercisePolicy
{
    double s_star = 0.0;
};

enum class StopReason
{
    Repaid,
    Liquidated,
    HorizonExpired,
};

std::string_view to_string(StopReason reason);

struct PathOutcome
{
    double stop_time = 0.0;
    StopReason stop_reason = StopReason::HorizonExpired;
    double buyer_value = 0.0;   ///< discounted at r + delta, net of top-ups
    double lender_value = 0.0;  ///< discounted at r, net of the amount lent
    int n_topups = 0;
    double topup_cost = 0.0;
    std::size_t stop_step = 0;
    double total_collateral = 1.0;
    bool exercised = false;     ///< repaid, voluntarily or at the horizon
};

}  // namespace lendfair
