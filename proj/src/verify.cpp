#include "lendfair/verify.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "lendfair/mc_pricer.hpp"
#include "lendfair/replication.hpp"

namespace lendfair {

namespace {

constexpr double kReplicationTol = 1e-9;

std::string fmt(double x)
{
    std::ostringstream s;
    s << x;
    return s.str();
}

Check at_most(std::string suite, std::string name, double value, double limit)
{
    return {std::move(suite), std::move(name), value, limit, limit - value, value <= limit};
}

Check at_least(std::string suite, std::string name, double value, double limit)
{
    return {std::move(suite), std::move(name), value, limit, value - limit, value >= limit};
}

}  // namespace

std::vector<Check> verify_replication(std::size_t n_paths, std::uint64_t seed)
{
    std::vector<Check> checks;
    for (auto const& rc : run_replication(n_paths, seed))
    {
        checks.push_back(at_most("replication", rc.model + "/borrower_gap", rc.max_borrower_gap,
                                 kReplicationTol));
        checks.push_back(at_most("replication", rc.model + "/lender_gap", rc.max_lender_gap,
                                 kReplicationTol));
        checks.push_back(at_most("replication", rc.model + "/event_mismatches",
                                 static_cast<double>(rc.n_event_mismatch), 0.0));
    }
    return checks;
}

std::vector<Check> verify_floor(std::size_t n_train, std::size_t n_test, std::uint64_t seed)
{
    MarketParams const market{100.0, 0.05, 0.2};
    double const c = 1.7;
    double const c0 = 1.2;
    std::array<double, 7> const alphas{0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};

    SimConfig config;
    config.n_train = n_train;
    config.n_test = n_test;
    config.oversample = 8;
    config.base_seed = seed;
    auto const report = impossibility_probe(market, c, c0, alphas, config);

    std::vector<Check> checks;
    for (auto const& p : report.points)
    {
        std::string const tag = "alpha=" + fmt(p.alpha);
        double const se3 = 3.0 * p.valuation.std_error;
        checks.push_back(at_least("floor", tag + "/value_above_floor", p.valuation.value,
                                  p.floor - se3));
        if (p.alpha == 0.0)
        {
            checks.push_back(at_least("floor", tag + "/holding_beats_floor", p.valuation.value,
                                      p.floor + se3));
        }
        if (p.alpha >= 1.0)
        {
            checks.push_back(at_most("floor", tag + "/distance_to_floor",
                                     std::abs(p.valuation.value - p.floor), se3));
            checks.push_back(at_most("floor", tag + "/mean_duration", p.valuation.mean_duration,
                                     0.05));
        }
    }
    return checks;
}

std::vector<Check> verify_trends(std::size_t n_train, std::size_t n_test, std::uint64_t seed)
{
    MarketParams const market;
    LoanTerms const terms;
    BorrowerBehavior const behavior;
    SimConfig config;
    config.n_train = n_train;
    config.n_test = n_test;
    config.base_seed = seed;

    struct Trend
    {
        SweepParam param;
        double lo;
        double hi;
        double sign;   ///< +1 increasing, -1 decreasing
    };
    std::array<Trend, 4> const trends{{
        {SweepParam::R, 0.005, 0.05, 1.0},
        {SweepParam::Sigma, 0.2, 0.5, -1.0},
        {SweepParam::Delta, 0.0, 0.02, -1.0},
        {SweepParam::MonitorFreq, 1.0, 8.0, 1.0},
    }};

    std::vector<Check> checks;
    for (auto const& tr : trends)
    {
        std::array<double, 2> const ends{tr.lo, tr.hi};
        auto const rows = run_sweep(tr.param, ends, market, terms, behavior, config);
        auto const& a = rows[0].result;
        auto const& b = rows[1].result;
        double const diff = tr.sign * (b.value - a.value);
        double const se = std::hypot(a.std_error, b.std_error);
        checks.push_back(at_least("trends",
                                  to_string(tr.param) + (tr.sign > 0 ? "/increasing" : "/decreasing"),
                                  diff, 2.0 * se));
    }
    return checks;
}

}  // namespace lendfair
