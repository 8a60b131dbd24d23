#include "lendfair/mc_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lendfair/csv.hpp"
#include "lendfair/parallel.hpp"

namespace lendfair {

void SimConfig::validate() const
{
    if (n_train < 1 || n_test < 1)
        throw std::invalid_argument("sim config: n_train and n_test must be at least 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("sim config: horizon must be positive");
    if (oversample < 1)
        throw std::invalid_argument("sim config: oversample must be at least 1");
    if (n_train > 0xFFFFFFFFull || n_test > 0xFFFFFFFFull)
        throw std::invalid_argument("sim config: path counts must fit the 32-bit path index");
}

TimeGrid simulation_grid(BorrowerBehavior const& behavior, SimConfig const& config)
{
    behavior.validate();
    config.validate();
    return TimeGrid{config.horizon, behavior.monitor_freq * config.oversample};
}

BorrowerBehavior effective_behavior(BorrowerBehavior const& behavior, SimConfig const& config)
{
    BorrowerBehavior out = behavior;
    if (config.monitor_every_substep)
    {
        out.monitor_freq = behavior.monitor_freq * config.oversample;
    }
    return out;
}

std::vector<double> default_s_star_grid(MarketParams const& market, LoanTerms const& terms)
{
    constexpr int kPoints = 60;
    double const lo = exercise_price(terms, market, 0.0);
    double const hi = 6.0 * market.s0;
    std::vector<double> grid;
    grid.reserve(kPoints + 1);
    grid.push_back(0.0);
    double const ratio = std::log(hi / lo) / (kPoints - 1);
    for (int i = 0; i < kPoints; ++i)
    {
        grid.push_back(lo * std::exp(ratio * i));
    }
    grid.back() = hi;
    return grid;
}

namespace {

std::vector<double> sorted_candidates(MarketParams const& market, LoanTerms const& terms,
                                      SimConfig const& config)
{
    std::vector<double> grid =
        config.s_star_grid ? *config.s_star_grid : default_s_star_grid(market, terms);
    if (grid.empty())
        throw std::invalid_argument("s_star grid is empty");
    for (double s : grid)
    {
        if (!(s >= 0.0) || !std::isfinite(s))
            throw std::invalid_argument("s_star grid values must be finite and non-negative");
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace

Calibration calibrate_threshold_detailed(MarketParams const& market, LoanTerms const& terms,
                                         BorrowerBehavior const& behavior,
                                         SimConfig const& config)
{
    TimeGrid const grid = simulation_grid(behavior, config);
    LoanSchedule const schedule{market, terms, effective_behavior(behavior, config), grid};

    Calibration cal;
    cal.s_star = sorted_candidates(market, terms, config);
    std::size_t const n_cand = cal.s_star.size();
    std::size_t const n_paths = config.n_train;

    std::vector<double> log_s_star(n_cand);
    std::transform(cal.s_star.begin(), cal.s_star.end(), log_s_star.begin(),
                   [](double x) { return std::log(x); });

    std::vector<double> values(n_paths * n_cand);
    parallel_for(
        n_paths,
        [&](std::size_t i) {
            GbmStepper stepper{market, grid, config.base_seed, StreamId::Train,
                               static_cast<std::uint32_t>(i)};
            run_perpetual_loan_multi(schedule, log_s_star,
                                     std::span<double>{values}.subspan(i * n_cand, n_cand),
                                     [&] { return stepper.advance(); });
        },
        8);

    cal.train_value.resize(n_cand);
    cal.train_std_error.resize(n_cand);
    std::vector<double> column(n_paths);
    for (std::size_t j = 0; j < n_cand; ++j)
    {
        for (std::size_t i = 0; i < n_paths; ++i)
        {
            column[i] = values[i * n_cand + j];
        }
        auto const stats = sample_stats(column);
        cal.train_value[j] = stats.mean;
        cal.train_std_error[j] = stats.std_error;
        if (cal.train_value[j] > cal.train_value[cal.best_index])
        {
            cal.best_index = j;
        }
    }
    cal.policy.s_star = cal.s_star[cal.best_index];
    return cal;
}

ExercisePolicy calibrate_threshold(MarketParams const& market, LoanTerms const& terms,
                                   BorrowerBehavior const& behavior, SimConfig const& config)
{
    return calibrate_threshold_detailed(market, terms, behavior, config).policy;
}

ValuationResult value_option(MarketParams const& market, LoanTerms const& terms,
                             BorrowerBehavior const& behavior, ExercisePolicy const& policy,
                             SimConfig const& config, StreamId stream)
{
    if (!(policy.s_star >= 0.0) || !std::isfinite(policy.s_star))
        throw std::invalid_argument("exercise policy s_star must be non-negative");
    TimeGrid const grid = simulation_grid(behavior, config);
    LoanSchedule const schedule{market, terms, effective_behavior(behavior, config), grid};

    std::size_t const n = config.n_test;
    std::vector<double> value(n);
    std::vector<double> duration(n);
    std::vector<double> liquidated(n);
    std::vector<double> topups(n);
    parallel_for(n, [&](std::size_t i) {
        GbmStepper stepper{market, grid, config.base_seed, stream, static_cast<std::uint32_t>(i)};
        PathOutcome const out =
            run_perpetual_loan(schedule, policy, [&] { return stepper.advance(); });
        value[i] = out.buyer_value;
        duration[i] = out.stop_time;
        liquidated[i] = out.stop_reason == StopReason::Liquidated ? 1.0 : 0.0;
        topups[i] = out.n_topups;
    });

    ValuationResult res;
    auto const stats = sample_stats(value);
    res.value = stats.mean;
    res.std_error = stats.std_error;
    res.mean_duration = sample_stats(duration).mean;
    res.liquidation_rate = sample_stats(liquidated).mean;
    res.mean_topups = sample_stats(topups).mean;
    res.policy = policy;
    res.n_paths = n;
    return res;
}

ValuationResult calibrate_and_value(MarketParams const& market, LoanTerms const& terms,
                                    BorrowerBehavior const& behavior, SimConfig const& config)
{
    auto const policy = calibrate_threshold(market, terms, behavior, config);
    return value_option(market, terms, behavior, policy, config, StreamId::Test);
}

//---------------------------------------------------------------------------//
// Fair rate
//---------------------------------------------------------------------------//

FairRateResult solve_fair_rate(MarketParams const& market, double c, double c0, double beta,
                               BorrowerBehavior const& behavior, SimConfig const& config,
                               FairRateOptions const& options)
{
    if (!(c > c0 && c0 > 1.0))
        throw std::invalid_argument("fair rate needs c > c0 > 1");
    if (!(options.alpha_hi > options.alpha_lo) || options.alpha_lo < 0.0)
        throw std::invalid_argument("fair rate needs 0 <= alpha_lo < alpha_hi");
    if (!(options.tol_rel > 0.0))
        throw std::invalid_argument("fair rate needs a positive tolerance");

    FairRateResult out;
    out.target = market.s0 * (1.0 - 1.0 / c);
    double const band = options.tol_rel * out.target;

    auto evaluate = [&](double alpha) {
        LoanTerms const terms{alpha, c, c0, beta};
        FairRateStep step{alpha, calibrate_and_value(market, terms, behavior, config)};
        out.trace.push_back(step);
        return step.valuation;
    };
    auto accept = [&](double alpha, ValuationResult const& v) {
        out.found = true;
        out.alpha = alpha;
        out.valuation = v;
        LoanTerms const terms{alpha, c, c0, beta};
        out.confirmation =
            value_option(market, terms, behavior, v.policy, config, StreamId::Confirm);
        return out;
    };
    auto within = [&](ValuationResult const& v) { return std::abs(v.value - out.target) <= band; };

    double lo = options.alpha_lo;
    double hi = options.alpha_hi;
    auto const v_lo = evaluate(lo);
    if (within(v_lo))
        return accept(lo, v_lo);
    if (v_lo.value < out.target)
    {
        std::ostringstream msg;
        msg << "value " << v_lo.value << " at alpha=" << lo << " is already below the fair value "
            << out.target << "; no non-negative rate is fair";
        out.reason = NoSolutionReason::ValueBelowTargetAtZero;
        out.diagnostic = msg.str();
        out.alpha = lo;
        out.valuation = v_lo;
        return out;
    }
    auto const v_hi = evaluate(hi);
    if (within(v_hi))
        return accept(hi, v_hi);
    if (v_hi.value > out.target)
    {
        std::ostringstream msg;
        msg << "value " << v_hi.value << " at alpha=" << hi << " still exceeds the fair value "
            << out.target << "; widen the bracket";
        out.reason = NoSolutionReason::ValueAboveTargetAtMax;
        out.diagnostic = msg.str();
        out.alpha = hi;
        out.valuation = v_hi;
        return out;
    }

    double best_alpha = hi;
    ValuationResult best = v_hi;
    for (int it = 1; it <= options.max_iterations; ++it)
    {
        double const mid = 0.5 * (lo + hi);
        auto const v = evaluate(mid);
        out.iterations = it;
        if (within(v))
            return accept(mid, v);
        if (std::abs(v.value - out.target) < std::abs(best.value - out.target))
        {
            best_alpha = mid;
            best = v;
        }
        (v.value > out.target ? lo : hi) = mid;
    }
    std::ostringstream msg;
    msg << "no alpha within " << options.tol_rel * 100.0 << "% of " << out.target << " after "
        << options.max_iterations << " bisection steps; closest value " << best.value
        << " at alpha=" << best_alpha;
    out.reason = NoSolutionReason::NotConverged;
    out.diagnostic = msg.str();
    out.alpha = best_alpha;
    out.valuation = best;
    return out;
}

//---------------------------------------------------------------------------//
// Impossibility probe
//---------------------------------------------------------------------------//

BorrowerBehavior probe_behavior()
{
    BorrowerBehavior b;
    b.delta = 0.0;
    b.monitor_freq = 1;
    b.allow_topups = false;
    return b;
}

ProbeReport impossibility_probe(MarketParams const& market, double c, double c0,
                                std::span<double const> alpha_grid, SimConfig config,
                                BorrowerBehavior behavior)
{
    if (config.oversample < 8)
        throw std::invalid_argument("impossibility probe needs oversample >= 8");
    config.monitor_every_substep = true;
    behavior.delta = 0.0;

    ProbeReport report;
    for (double alpha : alpha_grid)
    {
        LoanTerms const terms{alpha, c, c0, 0.0};
        ProbePoint p;
        p.alpha = alpha;
        // immediate exercise pays s0 - E_0 = s0 (1 - 1/c)
        p.floor = market.s0 - exercise_price(terms, market, 0.0);
        p.valuation = calibrate_and_value(market, terms, behavior, config);
        double const se3 = 3.0 * p.valuation.std_error;
        p.floor_holds = p.valuation.value >= p.floor - se3;
        p.unfair_to_lender = p.valuation.value > p.floor + se3 && p.valuation.mean_duration > 0.0;
        report.floor = p.floor;
        report.floor_holds = report.floor_holds && p.floor_holds;
        report.points.push_back(p);
    }
    return report;
}

//---------------------------------------------------------------------------//
// Parameter sweeps
//---------------------------------------------------------------------------//

SweepParam parse_sweep_param(std::string const& name)
{
    if (name == "alpha")
        return SweepParam::Alpha;
    if (name == "r")
        return SweepParam::R;
    if (name == "sigma")
        return SweepParam::Sigma;
    if (name == "delta")
        return SweepParam::Delta;
    if (name == "monitor-freq" || name == "monitor_freq")
        return SweepParam::MonitorFreq;
    throw std::invalid_argument("unknown sweep parameter '" + name
                                + "' (expected alpha, r, sigma, delta or monitor-freq)");
}

std::string to_string(SweepParam param)
{
    switch (param)
    {
        case SweepParam::Alpha:
            return "alpha";
        case SweepParam::R:
            return "r";
        case SweepParam::Sigma:
            return "sigma";
        case SweepParam::Delta:
            return "delta";
        case SweepParam::MonitorFreq:
            return "monitor-freq";
    }
    return "unknown";
}

std::vector<SweepRow> run_sweep(SweepParam param, std::span<double const> values,
                                MarketParams const& market, LoanTerms const& terms,
                                BorrowerBehavior const& behavior, SimConfig const& config)
{
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double x : values)
    {
        MarketParams m = market;
        LoanTerms t = terms;
        BorrowerBehavior b = behavior;
        switch (param)
        {
            case SweepParam::Alpha:
                t.alpha = x;
                break;
            case SweepParam::R:
                m.r = x;
                break;
            case SweepParam::Sigma:
                m.sigma = x;
                break;
            case SweepParam::Delta:
                b.delta = x;
                break;
            case SweepParam::MonitorFreq:
                if (x < 1.0 || x != std::round(x))
                    throw std::invalid_argument("monitor-freq sweep values must be whole numbers >= 1");
                b.monitor_freq = static_cast<int>(x);
                break;
        }
        SweepRow row;
        row.parameter_name = to_string(param);
        row.parameter_value = x;
        row.alpha = t.alpha;
        row.result = calibrate_and_value(m, t, b, config);
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::filesystem::path const& file, std::span<SweepRow const> rows)
{
    std::ofstream out{file};
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out << "parameter_name,parameter_value,alpha,value,std_error,mean_duration,"
           "liquidation_rate,mean_topups,s_star\n";
    for (auto const& row : rows)
    {
        auto const& r = row.result;
        out << row.parameter_name << ',' << format_sig10(row.parameter_value) << ','
            << format_sig10(row.alpha) << ',' << format_sig10(r.value) << ','
            << format_sig10(r.std_error) << ',' << format_sig10(r.mean_duration) << ','
            << format_sig10(r.liquidation_rate) << ',' << format_sig10(r.mean_topups) << ','
            << format_sig10(r.policy.s_star) << '\n';
    }
}

}  // namespace lendfair
