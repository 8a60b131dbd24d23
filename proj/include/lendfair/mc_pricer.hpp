#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lendfair/analytic.hpp"
#include "lendfair/model.hpp"
#include "lendfair/path_engine.hpp"
#include "lendfair/types.hpp"

namespace lendfair {

struct SimConfig
{
    std::size_t n_train = 40000;
    std::size_t n_test = 200000;
    double horizon = 5.0;                 ///< truncation of the perpetual loan, years
    int oversample = 4;                   ///< simulation substeps per monitoring interval
    std::optional<std::vector<double>> s_star_grid;  ///< unset: default_s_star_grid()
    std::uint64_t base_seed = 20230201;
    bool monitor_every_substep = false;   ///< continuous-monitoring proxy

    void validate() const;
};

struct ValuationResult
{
    double value = 0.0;
    double std_error = 0.0;
    double mean_duration = 0.0;
    double liquidation_rate = 0.0;
    double mean_topups = 0.0;
    ExercisePolicy policy;
    std::size_t n_paths = 0;
};

/// Grid with monitor_freq * oversample substeps per day over the horizon.
TimeGrid simulation_grid(BorrowerBehavior const& behavior, SimConfig const& config);

/// Behavior actually simulated: every substep becomes a monitoring point when requested.
BorrowerBehavior effective_behavior(BorrowerBehavior const& behavior, SimConfig const& config);

/// 0 followed by 60 thresholds geometrically spaced over [E_0, 6 s0].
std::vector<double> default_s_star_grid(MarketParams const& market, LoanTerms const& terms);

struct Calibration
{
    ExercisePolicy policy;
    std::vector<double> s_star;          ///< ascending candidates
    std::vector<double> train_value;     ///< mean buyer value per candidate
    std::vector<double> train_std_error;
    std::size_t best_index = 0;
};

/// Linear search over the threshold grid on shared training paths.
Calibration calibrate_threshold_detailed(MarketParams const& market, LoanTerms const& terms,
                                         BorrowerBehavior const& behavior,
                                         SimConfig const& config);

ExercisePolicy calibrate_threshold(MarketParams const& market, LoanTerms const& terms,
                                   BorrowerBehavior const& behavior, SimConfig const& config);

/// Mean discounted buyer value over n_test paths of the given stream.
ValuationResult value_option(MarketParams const& market, LoanTerms const& terms,
                             BorrowerBehavior const& behavior, ExercisePolicy const& policy,
                             SimConfig const& config, StreamId stream = StreamId::Test);

/// Calibrates on the training stream, then values on the test stream.
ValuationResult calibrate_and_value(MarketParams const& market, LoanTerms const& terms,
                                    BorrowerBehavior const& behavior, SimConfig const& config);

struct FairRateStep
{
    double alpha = 0.0;
    ValuationResult valuation;
};

struct FairRateResult
{
    bool found = false;
    double alpha = 0.0;
    double target = 0.0;            ///< s0 (1 - 1/c)
    ValuationResult valuation;      ///< test-stream valuation at alpha
    ValuationResult confirmation;   ///< fresh-seed valuation at alpha
    int iterations = 0;             ///< bisection midpoints evaluated
    NoSolutionReason reason = NoSolutionReason::None;
    std::string diagnostic;
    std::vector<FairRateStep> trace;
};

struct FairRateOptions
{
    double tol_rel = 0.005;
    double alpha_lo = 0.0;
    double alpha_hi = 2.0;
    int max_iterations = 14;
};

/*!
 * Bisection on alpha until the calibrated option value is within tol_rel of
 * s0 (1 - 1/c).
 *
 * Every candidate alpha re-calibrates the threshold; training and test paths
 * are shared across candidates, so the objective is a smooth-ish function of
 * alpha rather than fresh noise at each step.
 */
FairRateResult solve_fair_rate(MarketParams const& market, double c, double c0, double beta,
                               BorrowerBehavior const& behavior, SimConfig const& config,
                               FairRateOptions const& options = {});

struct ProbePoint
{
    double alpha = 0.0;
    ValuationResult valuation;
    double floor = 0.0;
    bool floor_holds = false;        ///< value >= floor - 3 se
    bool unfair_to_lender = false;   ///< value > floor + 3 se while the loan is held
};

struct ProbeReport
{
    double floor = 0.0;
    bool floor_holds = true;
    std::vector<ProbePoint> points;
};

/// Borrower behavior used by the probe: no discount, no top-ups, daily base frequency.
BorrowerBehavior probe_behavior();

/*!
 * Checks the immediate-exercise floor s0 (1 - 1/c) across an alpha grid with
 * beta = 0 and delta = 0, monitoring at every substep.
 */
ProbeReport impossibility_probe(MarketParams const& market, double c, double c0,
                                std::span<double const> alpha_grid, SimConfig config,
                                BorrowerBehavior behavior = probe_behavior());

enum class SweepParam
{
    Alpha,
    R,
    Sigma,
    Delta,
    MonitorFreq,
};

SweepParam parse_sweep_param(std::string const& name);
std::string to_string(SweepParam param);

struct SweepRow
{
    std::string parameter_name;
    double parameter_value = 0.0;
    double alpha = 0.0;
    ValuationResult result;
};

/// Calibrated valuation at each grid value; seeds are shared across points.
std::vector<SweepRow> run_sweep(SweepParam param, std::span<double const> values,
                                MarketParams const& market, LoanTerms const& terms,
                                BorrowerBehavior const& behavior, SimConfig const& config);

/// Columns: parameter_name,parameter_value,alpha,value,std_error,mean_duration,
/// liquidation_rate,mean_topups,s_star.
void write_sweep_csv(std::filesystem::path const& file, std::span<SweepRow const> rows);

}  // namespace lendfair
