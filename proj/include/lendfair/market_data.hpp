#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lendfair/mc_pricer.hpp"
#include "lendfair/stats.hpp"
#include "lendfair/types.hpp"

namespace lendfair {

struct MonthlyRecord
{
    std::string month;   ///< YYYY-MM
    double risk_free = 0.0;
    double volatility = 0.0;
    std::optional<double> observed_rate;
};

/*!
 * Reads month,risk_free,volatility[,observed_rate] (any column order, header
 * required). Errors name the 1-based file line. An empty observed_rate field
 * leaves that month's observation unset.
 */
std::vector<MonthlyRecord> load_monthly_csv(std::filesystem::path const& file);

/// Outcome of one month's fair-rate solve.
struct RateSolution
{
    bool found = false;
    double alpha = 0.0;
    std::string diagnostic;
};

/// Maps a month's market to its fair rate.
using RateSolver = std::function<RateSolution(MarketParams const&)>;

struct MonthResult
{
    MonthlyRecord record;
    RateSolution solution;
};

struct NamedFit
{
    std::string series;      ///< model_rate or observed_rate
    std::string regressor;   ///< risk_free or volatility
    LinearFit fit;
};

struct ComparisonReport
{
    std::vector<MonthResult> months;
    std::size_t n_used = 0;             ///< months solved, entering the statistics
    std::size_t n_paired = 0;           ///< of those, months with an observed rate
    std::optional<double> pearson_r;    ///< model vs observed
    std::optional<double> p_value;
    std::vector<NamedFit> regressions;
};

/// Solves every month with solver; unsolved months are flagged and left out of the statistics.
ComparisonReport compare_rates(std::vector<MonthlyRecord> const& records, RateSolver const& solver,
                               double s0 = 100.0);

/// Perpetual Monte Carlo fair rate per month.
ComparisonReport compare_rates(std::vector<MonthlyRecord> const& records, double c, double c0,
                               double beta, BorrowerBehavior const& behavior,
                               SimConfig const& config, FairRateOptions const& options = {},
                               double s0 = 100.0);

/// Columns: month,risk_free,volatility,observed_rate,model_rate,status.
void write_rates_csv(std::filesystem::path const& file, ComparisonReport const& report);

/// Columns: metric,value.
void write_stats_csv(std::filesystem::path const& file, ComparisonReport const& report);

}  // namespace lendfair
