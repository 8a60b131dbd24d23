#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lendfair/rng.hpp"
#include "lendfair/types.hpp"

namespace lendfair {

inline constexpr double kDaysPerYear = 365.0;

/// Uniform simulation grid over [0, horizon] with day-based resolution.
class TimeGrid
{
  public:
    TimeGrid(double horizon, int steps_per_day);

    double horizon() const noexcept { return horizon_; }
    int steps_per_day() const noexcept { return steps_per_day_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    double dt() const noexcept { return horizon_ / static_cast<double>(n_steps_); }
    double time(std::size_t step) const noexcept
    {
        return static_cast<double>(step) * dt();
    }

    friend bool operator==(TimeGrid const&, TimeGrid const&) = default;

  private:
    double horizon_;
    int steps_per_day_;
    std::size_t n_steps_;
};

/// Discretized GBM trajectory; log_prices[k] = log(prices[k]).
struct PricePath
{
    TimeGrid grid;
    std::vector<double> prices;
    std::vector<double> log_prices;
};

struct PathBatchSpec
{
    std::size_t n_paths = 1;
    std::uint64_t base_seed = 0;
    MarketParams market;
    TimeGrid grid{1.0, 1};
    StreamId stream = StreamId::Paths;
};

/*!
 * Exact log-Euler stepping of risk-neutral GBM on a fixed grid.
 *
 * Path generation is lazy so event loops that stop early never pay for the
 * unused tail. simulate_path() drives the same stepper, so a materialized
 * path and a streamed one are bit-identical.
 */
class GbmStepper
{
  public:
    GbmStepper(MarketParams const& market, TimeGrid const& grid, std::uint64_t seed,
               StreamId stream, std::uint32_t path_index)
        : log_price_{std::log(market.s0)}
        , drift_dt_{(market.r - 0.5 * market.sigma * market.sigma) * grid.dt()}
        , vol_sdt_{market.sigma * std::sqrt(grid.dt())}
        , normals_{seed, static_cast<std::uint32_t>(stream), path_index}
    {
    }

    double log_price() const noexcept { return log_price_; }

    /// Advances one step and returns the new log price.
    double advance()
    {
        log_price_ += drift_dt_ + vol_sdt_ * normals_();
        return log_price_;
    }

  private:
    double log_price_;
    double drift_dt_;
    double vol_sdt_;
    NormalStream normals_;
};

PricePath simulate_path(MarketParams const& market, TimeGrid const& grid, std::uint64_t seed,
                        StreamId stream = StreamId::Paths, std::uint32_t path_index = 0);

/// Path i of the batch is keyed by (base_seed, stream, i).
std::vector<PricePath> simulate_batch(PathBatchSpec const& spec);

/// Terminal prices only; cheaper than simulate_batch for moment checks.
std::vector<double> simulate_terminal_prices(PathBatchSpec const& spec);

/*!
 * Probability that a GBM bridge from s_a to s_b over dt touches the barrier.
 *
 * Returns 1 when either endpoint is at or below the barrier.
 */
double bridge_knockout_prob(double s_a, double s_b, double barrier, double sigma, double dt);

/// Debug dump with columns path_id,step,time_years,price.
void write_paths_csv(std::filesystem::path const& file, std::span<PricePath const> paths);

}  // namespace lendfair
