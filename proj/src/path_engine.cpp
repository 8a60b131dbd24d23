#include "lendfair/path_engine.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "lendfair/csv.hpp"
#include "lendfair/parallel.hpp"

namespace lendfair {

TimeGrid::TimeGrid(double horizon, int steps_per_day)
    : horizon_{horizon}, steps_per_day_{steps_per_day}, n_steps_{0}
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
    {
        throw std::invalid_argument("time grid horizon must be positive");
    }
    if (steps_per_day < 1)
    {
        throw std::invalid_argument("steps_per_day must be at least 1");
    }
    double const steps = std::round(horizon * kDaysPerYear * steps_per_day);
    n_steps_ = static_cast<std::size_t>(std::max(1.0, steps));
}

PricePath simulate_path(MarketParams const& market, TimeGrid const& grid, std::uint64_t seed,
                        StreamId stream, std::uint32_t path_index)
{
    market.validate();
    PricePath path{grid, {}, {}};
    std::size_t const n = grid.n_steps();
    path.prices.resize(n + 1);
    path.log_prices.resize(n + 1);

    GbmStepper stepper{market, grid, seed, stream, path_index};
    path.log_prices[0] = stepper.log_price();
    path.prices[0] = market.s0;
    for (std::size_t k = 1; k <= n; ++k)
    {
        path.log_prices[k] = stepper.advance();
        path.prices[k] = std::exp(path.log_prices[k]);
    }
    return path;
}

std::vector<PricePath> simulate_batch(PathBatchSpec const& spec)
{
    if (spec.n_paths < 1)
    {
        throw std::invalid_argument("path batch needs at least one path");
    }
    std::vector<PricePath> paths(spec.n_paths, PricePath{spec.grid, {}, {}});
    parallel_for(
        spec.n_paths,
        [&](std::size_t i) {
            paths[i] = simulate_path(spec.market, spec.grid, spec.base_seed, spec.stream,
                                     static_cast<std::uint32_t>(i));
        },
        8);
    return paths;
}

std::vector<double> simulate_terminal_prices(PathBatchSpec const& spec)
{
    if (spec.n_paths < 1)
    {
        throw std::invalid_argument("path batch needs at least one path");
    }
    spec.market.validate();
    std::vector<double> terminal(spec.n_paths);
    std::size_t const n = spec.grid.n_steps();
    parallel_for(spec.n_paths, [&](std::size_t i) {
        GbmStepper stepper{spec.market, spec.grid, spec.base_seed, spec.stream,
                           static_cast<std::uint32_t>(i)};
        double log_price = stepper.log_price();
        for (std::size_t k = 1; k <= n; ++k)
        {
            log_price = stepper.advance();
        }
        terminal[i] = n == 0 ? spec.market.s0 : std::exp(log_price);
    });
    return terminal;
}

double bridge_knockout_prob(double s_a, double s_b, double barrier, double sigma, double dt)
{
    if (!(dt > 0.0) || !(sigma > 0.0))
    {
        throw std::invalid_argument("bridge_knockout_prob needs dt > 0 and sigma > 0");
    }
    if (s_a <= barrier || s_b <= barrier)
    {
        return 1.0;
    }
    double const a = std::log(s_a / barrier);
    double const b = std::log(s_b / barrier);
    return std::exp(-2.0 * a * b / (sigma * sigma * dt));
}

void write_paths_csv(std::filesystem::path const& file, std::span<PricePath const> paths)
{
    std::ofstream out{file};
    if (!out)
    {
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    }
    out << "path_id,step,time_years,price\n";
    for (std::size_t id = 0; id < paths.size(); ++id)
    {
        auto const& path = paths[id];
        for (std::size_t k = 0; k < path.prices.size(); ++k)
        {
            out << id << ',' << k << ',' << format_sig10(path.grid.time(k)) << ','
                << format_sig10(path.prices[k]) << '\n';
        }
    }
}

}  // namespace lendfair
