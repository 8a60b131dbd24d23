#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lendfair/path_engine.hpp"
#include "lendfair/types.hpp"

namespace lendfair {

/// Utilities of both parties, in loan currency at time 0.
struct PartyUtilities
{
    double first = 0.0;    ///< borrower or option buyer
    double second = 0.0;   ///< lender or option seller
    StopReason stop_reason = StopReason::HorizonExpired;
    double stop_time = 0.0;
};

/// Option premium s0 (1 - 1/c) paid by the buyer.
double replicating_premium(MarketParams const& market, LoanTerms const& terms);

/// Loan side of the fixed-term loan (borrower, lender).
PartyUtilities fixed_term_loan(PricePath const& path, LoanTerms const& terms,
                               MarketParams const& market, double T);

/*!
 * Option side of the fixed-term loan: the buyer sells its unit of collateral
 * for s0 and buys a European down-and-out call (strike e^{aT} s0/c, barrier
 * e^{aT} s0 c0/c); the seller holds one unit funded by the premium and s0/c.
 */
PartyUtilities fixed_term_option(PricePath const& path, LoanTerms const& terms,
                                 MarketParams const& market, double T);

/*!
 * Loan side of the perpetual loan, written in terms of the health factor and
 * an explicit top-up ledger. The borrower discounts at r + delta, the lender
 * at r.
 */
PartyUtilities perpetual_loan(PricePath const& path, LoanTerms const& terms,
                              MarketParams const& market, BorrowerBehavior const& behavior,
                              ExercisePolicy const& policy);

/// Option side of the perpetual loan, priced with the top-up option engine.
PartyUtilities perpetual_option(PricePath const& path, LoanTerms const& terms,
                                MarketParams const& market, BorrowerBehavior const& behavior,
                                ExercisePolicy const& policy);

struct ReplicationCase
{
    std::string model;   ///< fixed-term, perpetual or fixed-fee-topup
    std::size_t n_paths = 0;
    double max_borrower_gap = 0.0;
    double max_lender_gap = 0.0;
    std::size_t n_liquidated = 0;
    std::size_t n_repaid = 0;
    std::size_t n_event_mismatch = 0;
};

/// Max pathwise gap between loan and option utilities for the three loan models.
std::vector<ReplicationCase> run_replication(std::size_t n_paths, std::uint64_t seed);

}  // namespace lendfair
