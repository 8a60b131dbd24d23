#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "json.hpp"
#include "lendfair/analytic.hpp"
#include "lendfair/csv.hpp"
#include "lendfair/market_data.hpp"
#include "lendfair/mc_pricer.hpp"
#include "lendfair/path_engine.hpp"
#include "lendfair/verify.hpp"

namespace fs = std::filesystem;
using namespace lendfair;
using namespace lendfair::cli;

namespace {

/// Raised by a command to end with exit code 3.
struct NoSolution : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Inputs
{
    MarketParams market;
    LoanTerms terms;
    BorrowerBehavior behavior;
    bool no_topups = false;
    SimConfig sim;
    std::vector<double> s_star_grid;
    double term = 1.0;
    std::optional<double> carry;
};

void add_market(ParamSet& p, Inputs& in)
{
    p.add("s0", in.market.s0, "collateral spot price");
    p.add("r", in.market.r, "risk-free rate, continuously compounded");
    p.add("sigma", in.market.sigma, "annual volatility");
}

void add_loan(ParamSet& p, Inputs& in, bool with_alpha, bool with_beta)
{
    if (with_alpha)
        p.add("alpha", in.terms.alpha, "loan interest rate");
    p.add("c", in.terms.c, "overcollateralization ratio");
    p.add("c0", in.terms.c0, "liquidation ratio");
    if (with_beta)
        p.add("beta", in.terms.beta, "fixed repayment fee");
}

void add_behavior(ParamSet& p, Inputs& in)
{
    p.add("delta", in.behavior.delta, "borrower's extra discount rate");
    p.add("monitor-freq", in.behavior.monitor_freq, "borrower decisions per day");
    p.add("topup-trigger", in.behavior.topup_trigger, "top up within this fraction of the barrier");
    p.add("topup-size", in.behavior.topup_size, "collateral units per top-up");
    p.flag("no-topups", in.no_topups, "disable top-ups");
}

void add_sim(ParamSet& p, Inputs& in)
{
    p.add("seed", in.sim.base_seed, "base seed");
    p.add("n-train", in.sim.n_train, "threshold calibration paths");
    p.add("n-test", in.sim.n_test, "valuation paths");
    p.add("horizon", in.sim.horizon, "simulation horizon, years");
    p.add("oversample", in.sim.oversample, "simulation substeps per monitoring interval");
    p.add("s-star-grid", in.s_star_grid, "comma-separated exercise thresholds to search");
    p.flag("monitor-every-substep", in.sim.monitor_every_substep,
           "let the borrower act at every substep");
}

void finalize(Inputs& in)
{
    in.behavior.allow_topups = !in.no_topups;
    if (!in.s_star_grid.empty())
        in.sim.s_star_grid = in.s_star_grid;
}

std::vector<double> linspace(double from, double to, int points)
{
    if (points < 1)
        throw std::invalid_argument("--points must be at least 1");
    if (points == 1)
    {
        if (from != to)
            throw std::invalid_argument("a single-point sweep needs --from equal to --to");
        return {from};
    }
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        v[static_cast<std::size_t>(i)] = from + (to - from) * i / (points - 1);
    v.back() = to;
    return v;
}

void print_valuation(ValuationResult const& v)
{
    std::cout << "value            " << round_trip(v.value) << "\n"
              << "std_error        " << round_trip(v.std_error) << "\n"
              << "s_star           " << round_trip(v.policy.s_star) << "\n"
              << "mean_duration    " << round_trip(v.mean_duration) << "\n"
              << "liquidation_rate " << round_trip(v.liquidation_rate) << "\n"
              << "mean_topups      " << round_trip(v.mean_topups) << "\n";
}

class Timer
{
  public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit_manifest(fs::path const& output, std::string const& command, ParamSet const& params,
                   Timer const& timer)
{
    write_manifest(manifest_path_for(output), {command, params.resolved(), timer.seconds()});
}

//---------------------------------------------------------------------------//

int run_price_fixed(Inputs& in, bool json)
{
    double const carry = in.carry ? *in.carry : in.market.r;
    auto const q = price_fixed_term(in.market, in.terms, in.term, carry);
    if (json)
    {
        nlohmann::ordered_json j;
        j["value"] = q.value;
        j["eta1"] = q.eta1;
        j["eta2"] = q.eta2;
        j["sigma_T"] = q.sigma_T;
        j["carry"] = q.carry;
        j["knocked_out_at_inception"] = q.knocked_out_at_inception;
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::cout << "value     " << round_trip(q.value) << "\n"
              << "eta1      " << round_trip(q.eta1) << "\n"
              << "eta2      " << round_trip(q.eta2) << "\n"
              << "sigma_T   " << round_trip(q.sigma_T) << "\n"
              << "carry     " << round_trip(q.carry) << "\n";
    if (q.knocked_out_at_inception)
        std::cout << "note: the barrier is at or above spot at inception; the option is knocked out\n";
    return kOk;
}

int run_fair_rate(Inputs& in, std::string const& mode, FairRateOptions const& opts,
                  double alpha_max, fs::path const& out, ParamSet const& params,
                  Timer const& timer)
{
    if (mode == "fixed-term")
    {
        double const carry = in.carry ? *in.carry : in.market.r;
        auto const res = solve_fixed_term_fair_rate(in.market, in.terms.c, in.terms.c0, in.term,
                                                    alpha_max, carry);
        if (!res.found)
            throw NoSolution(to_string(res.reason) + ": " + res.diagnostic);
        LoanTerms t = in.terms;
        t.alpha = res.alpha;
        t.beta = 0.0;
        double const value = price_fixed_term(in.market, t, in.term, carry).value;
        std::cout << "alpha       " << round_trip(res.alpha) << "\n"
                  << "value       " << round_trip(value) << "\n"
                  << "target      " << round_trip(in.market.s0 * (1.0 - 1.0 / in.terms.c)) << "\n"
                  << "iterations  " << res.iterations << "\n";
        return kOk;
    }
    if (mode != "perpetual")
        throw CLI::ValidationError("--mode", "expected fixed-term or perpetual");

    auto const res = solve_fair_rate(in.market, in.terms.c, in.terms.c0, in.terms.beta,
                                     in.behavior, in.sim, opts);
    if (!out.empty())
    {
        std::ofstream csv{out};
        if (!csv)
            throw std::runtime_error("cannot open " + out.string() + " for writing");
        csv << "step,alpha,value,std_error,mean_duration,liquidation_rate,mean_topups,s_star\n";
        for (std::size_t i = 0; i < res.trace.size(); ++i)
        {
            auto const& s = res.trace[i];
            auto const& v = s.valuation;
            csv << i << ',' << format_sig10(s.alpha) << ',' << format_sig10(v.value) << ','
                << format_sig10(v.std_error) << ',' << format_sig10(v.mean_duration) << ','
                << format_sig10(v.liquidation_rate) << ',' << format_sig10(v.mean_topups) << ','
                << format_sig10(v.policy.s_star) << '\n';
        }
        csv.close();
        emit_manifest(out, "fair-rate", params, timer);
    }
    if (!res.found)
        throw NoSolution(to_string(res.reason) + ": " + res.diagnostic);

    double const gap = std::abs(res.valuation.value - res.target);
    std::cout << "alpha            " << round_trip(res.alpha) << "\n"
              << "target           " << round_trip(res.target) << "\n";
    print_valuation(res.valuation);
    std::cout << "relative_gap     " << round_trip(gap / res.target) << "\n"
              << "within_tolerance " << (gap <= opts.tol_rel * res.target ? "yes" : "no") << "\n"
              << "iterations       " << res.iterations << "\n"
              << "confirm_value    " << round_trip(res.confirmation.value) << " +- "
              << round_trip(res.confirmation.std_error) << "\n";
    if (res.valuation.mean_duration < 0.05)
        std::cerr << "warning: mean loan duration " << res.valuation.mean_duration
                  << " years; at this rate borrowers repay almost immediately\n";
    return kOk;
}

int run_sweep_cmd(Inputs& in, std::string const& param, double from, double to, int points,
                  fs::path const& out, ParamSet const& params, Timer const& timer)
{
    SweepParam const p = parse_sweep_param(param);
    auto const values = linspace(from, to, points);
    auto const rows = run_sweep(p, values, in.market, in.terms, in.behavior, in.sim);
    write_sweep_csv(out, rows);
    emit_manifest(out, "sweep", params, timer);
    for (auto const& row : rows)
    {
        std::cout << row.parameter_name << "=" << round_trip(row.parameter_value)
                  << " value=" << round_trip(row.result.value)
                  << " se=" << round_trip(row.result.std_error) << "\n";
    }
    std::cout << "wrote " << out.string() << "\n";
    return kOk;
}

int run_verify(std::string const& suite, std::uint64_t seed, std::size_t n_paths,
               fs::path const& out, ParamSet const& params, Timer const& timer)
{
    bool const all = suite == "all";
    if (!all && suite != "replication" && suite != "floor" && suite != "trends")
        throw CLI::ValidationError("--suite", "expected replication, floor, trends or all");

    std::vector<Check> checks;
    auto append = [&](std::vector<Check> more) {
        checks.insert(checks.end(), more.begin(), more.end());
    };
    // Suite defaults: 1000 replication paths; 20k/50k paths for the statistical suites.
    std::size_t const n_test = n_paths ? n_paths : 50000;
    std::size_t const n_train = n_paths ? std::max<std::size_t>(1, n_paths * 2 / 5) : 20000;
    if (all || suite == "replication")
        append(verify_replication(n_paths ? n_paths : 1000, seed));
    if (all || suite == "floor")
        append(verify_floor(n_train, n_test, seed));
    if (all || suite == "trends")
        append(verify_trends(n_train, n_test, seed));

    bool ok = true;
    for (auto const& c : checks)
    {
        ok = ok && c.passed;
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << "/" << c.name
                  << " value=" << round_trip(c.value) << " threshold=" << round_trip(c.threshold)
                  << " margin=" << round_trip(c.margin) << "\n";
    }
    if (!out.empty())
    {
        std::ofstream csv{out};
        if (!csv)
            throw std::runtime_error("cannot open " + out.string() + " for writing");
        csv << "suite,check,value,threshold,margin,passed\n";
        for (auto const& c : checks)
        {
            csv << c.suite << ',' << c.name << ',' << format_sig10(c.value) << ','
                << format_sig10(c.threshold) << ',' << format_sig10(c.margin) << ','
                << (c.passed ? 1 : 0) << '\n';
        }
        csv.close();
        emit_manifest(out, "verify", params, timer);
    }
    std::cout << (ok ? "all checks passed\n" : "some checks failed\n");
    return ok ? kOk : kDomainError;
}

int run_compare(Inputs& in, std::string const& mode, fs::path const& input,
                fs::path const& out_dir, FairRateOptions const& opts, double alpha_max,
                ParamSet const& params, Timer const& timer)
{
    auto const records = load_monthly_csv(input);
    ComparisonReport report;
    if (mode == "fixed-term")
    {
        double const c = in.terms.c;
        double const c0 = in.terms.c0;
        double const term = in.term;
        auto const carry = in.carry;
        RateSolver solver = [&](MarketParams const& m) {
            auto const res = solve_fixed_term_fair_rate(m, c, c0, term, alpha_max,
                                                        carry ? *carry : m.r);
            return RateSolution{res.found, res.alpha, res.diagnostic};
        };
        report = compare_rates(records, solver, in.market.s0);
    }
    else if (mode == "perpetual")
    {
        report = compare_rates(records, in.terms.c, in.terms.c0, in.terms.beta, in.behavior,
                               in.sim, opts, in.market.s0);
    }
    else
    {
        throw CLI::ValidationError("--mode", "expected fixed-term or perpetual");
    }

    fs::create_directories(out_dir);
    fs::path const rates = out_dir / "rates.csv";
    fs::path const stats = out_dir / "stats.csv";
    write_rates_csv(rates, report);
    write_stats_csv(stats, report);
    write_manifest(out_dir / "compare.manifest", {"compare", params.resolved(), timer.seconds()});

    for (auto const& m : report.months)
    {
        if (!m.solution.found)
            std::cerr << "warning: " << m.record.month << " has no fair rate ("
                      << m.solution.diagnostic << "); excluded from statistics\n";
    }
    std::cout << "months           " << report.months.size() << "\n"
              << "solved           " << report.n_used << "\n";
    if (report.pearson_r)
    {
        std::cout << "pearson_r        " << format_sig10(*report.pearson_r) << "\n"
                  << "p_value          " << format_sig10(*report.p_value) << "\n";
    }
    else
    {
        std::cout << "pearson_r        n/a (needs >= 3 months with observed rates)\n";
    }
    std::cout << "wrote " << rates.string() << " and " << stats.string() << "\n";
    return kOk;
}

int run_paths(Inputs& in, std::size_t n_paths, int steps_per_day, fs::path const& out,
              ParamSet const& params, Timer const& timer)
{
    PathBatchSpec spec;
    spec.n_paths = n_paths;
    spec.base_seed = in.sim.base_seed;
    spec.market = in.market;
    spec.grid = TimeGrid{in.sim.horizon, steps_per_day};
    auto const paths = simulate_batch(spec);
    write_paths_csv(out, paths);
    emit_manifest(out, "paths", params, timer);
    std::cout << "wrote " << paths.size() << " paths to " << out.string() << "\n";
    return kOk;
}

int run_probe(Inputs& in, std::vector<double> const& alphas, fs::path const& out,
              ParamSet const& params, Timer const& timer)
{
    auto const report =
        impossibility_probe(in.market, in.terms.c, in.terms.c0, alphas, in.sim, in.behavior);
    std::ofstream csv{out};
    if (!csv)
        throw std::runtime_error("cannot open " + out.string() + " for writing");
    csv << "alpha,value,std_error,floor,mean_duration,s_star,floor_holds,unfair_to_lender\n";
    for (auto const& p : report.points)
    {
        auto const& v = p.valuation;
        csv << format_sig10(p.alpha) << ',' << format_sig10(v.value) << ','
            << format_sig10(v.std_error) << ',' << format_sig10(p.floor) << ','
            << format_sig10(v.mean_duration) << ',' << format_sig10(v.policy.s_star) << ','
            << (p.floor_holds ? 1 : 0) << ',' << (p.unfair_to_lender ? 1 : 0) << '\n';
        std::cout << "alpha=" << round_trip(p.alpha) << " value=" << round_trip(v.value)
                  << " se=" << round_trip(v.std_error) << " duration=" << round_trip(v.mean_duration)
                  << (p.unfair_to_lender ? " unfair-to-lender" : "") << "\n";
    }
    csv.close();
    emit_manifest(out, "probe", params, timer);
    std::cout << "floor " << round_trip(report.floor)
              << (report.floor_holds ? " holds" : " VIOLATED") << " on every grid point\n";
    return report.floor_holds ? kOk : kDomainError;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fair interest rates for overcollateralized lending-pool loans"};
    app.set_version_flag("--version", LENDFAIR_VERSION);
    app.require_subcommand(1);
    app.footer("Every subcommand accepts --config FILE (key=value lines); flags override the file.\n"
               "LENDFAIR_THREADS caps the worker count; results never depend on it.");

    Inputs in;
    Timer const timer;
    std::vector<std::unique_ptr<ParamSet>> sets;
    auto make = [&](char const* name, char const* desc) {
        sets.push_back(std::make_unique<ParamSet>(app.add_subcommand(name, desc)));
        return sets.back().get();
    };

    // price-fixed
    bool json = false;
    auto* price = make("price-fixed", "closed-form value of the fixed-term loan option");
    in.terms.beta = 0.0;
    add_market(*price, in);
    add_loan(*price, in, true, false);
    price->add("term", in.term, "loan term, years");
    price->add("carry", in.carry, "cost of carry in the closed form (defaults to r)");
    price->app()->add_flag("--json", json, "print a JSON record");

    // The commands below share one Inputs; their defaults are the base fee model.
    Inputs base;

    // fair-rate
    std::string fr_mode = "perpetual";
    FairRateOptions fr_opts;
    double alpha_max = 5.0;
    std::string fr_out;
    auto* fair = make("fair-rate", "solve for the fair interest rate");
    fair->add("mode", fr_mode, "fixed-term (closed form) or perpetual (Monte Carlo)")
        ->check(CLI::IsMember({"fixed-term", "perpetual"}));
    add_market(*fair, base);
    add_loan(*fair, base, false, true);
    add_behavior(*fair, base);
    add_sim(*fair, base);
    fair->add("term", base.term, "loan term for fixed-term mode, years");
    fair->add("carry", base.carry, "fixed-term mode: cost of carry (defaults to r)");
    fair->add("alpha-max", alpha_max, "fixed-term mode: upper end of the rate bracket");
    fair->add("tol", fr_opts.tol_rel, "perpetual mode: relative tolerance on the fair value");
    fair->add("alpha-lo", fr_opts.alpha_lo, "perpetual mode: lower end of the rate bracket");
    fair->add("alpha-hi", fr_opts.alpha_hi, "perpetual mode: upper end of the rate bracket");
    fair->add("max-iter", fr_opts.max_iterations, "perpetual mode: bisection steps");
    fair->add("out", fr_out, "optional CSV of the bisection trace");

    // sweep
    std::string sw_param;
    double sw_from = 0.0;
    double sw_to = 0.0;
    int sw_points = 1;
    std::string sw_out;
    auto* sweep = make("sweep", "calibrated option value across one parameter");
    sweep->add("param", sw_param, "alpha, r, sigma, delta or monitor-freq")->required();
    sweep->add("from", sw_from, "first grid value")->required();
    sweep->add("to", sw_to, "last grid value")->required();
    sweep->add("points", sw_points, "number of grid points");
    add_market(*sweep, base);
    add_loan(*sweep, base, true, true);
    add_behavior(*sweep, base);
    add_sim(*sweep, base);
    sweep->add("out", sw_out, "output CSV")->required();

    // verify
    std::string v_suite = "all";
    std::uint64_t v_seed = SimConfig{}.base_seed;
    std::size_t v_paths = 0;
    std::string v_out;
    auto* verify = make("verify", "run the replication, floor and trend property suites");
    verify->add("suite", v_suite, "replication, floor, trends or all");
    verify->add("seed", v_seed, "base seed");
    verify->add("n-paths", v_paths,
                "paths per check (0: 1000 for replication, 20k/50k for floor and trends)");
    verify->add("out", v_out, "optional CSV of check results");

    // compare
    std::string cmp_mode = "perpetual";
    std::string cmp_input;
    std::string cmp_out_dir;
    auto* compare = make("compare", "model fair rates against observed monthly rates");
    compare->add("input", cmp_input, "monthly CSV: month,risk_free,volatility[,observed_rate]")
        ->required();
    compare->add("mode", cmp_mode, "fixed-term or perpetual")
        ->check(CLI::IsMember({"fixed-term", "perpetual"}));
    compare->add("s0", base.market.s0, "collateral spot price");
    add_loan(*compare, base, false, true);
    add_behavior(*compare, base);
    add_sim(*compare, base);
    compare->add("term", base.term, "loan term for fixed-term mode, years");
    compare->add("carry", base.carry, "fixed-term mode: cost of carry (defaults to r)");
    compare->add("alpha-max", alpha_max, "fixed-term mode: upper end of the rate bracket");
    compare->add("tol", fr_opts.tol_rel, "perpetual mode: relative tolerance on the fair value");
    compare->add("alpha-hi", fr_opts.alpha_hi, "perpetual mode: upper end of the rate bracket");
    compare->add("out-dir", cmp_out_dir, "output directory")->required();

    // paths
    std::size_t p_paths = 10;
    int p_spd = 1;
    std::string p_out;
    auto* paths = make("paths", "dump simulated price paths");
    add_market(*paths, base);
    paths->add("seed", base.sim.base_seed, "base seed");
    paths->add("horizon", base.sim.horizon, "years");
    paths->add("n-paths", p_paths, "number of paths");
    paths->add("steps-per-day", p_spd, "grid resolution");
    paths->add("out", p_out, "output CSV")->required();

    // probe
    std::vector<double> pr_alphas{0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
    std::string pr_out;
    Inputs probe_in;
    probe_in.terms.c = 1.7;
    probe_in.terms.c0 = 1.2;
    probe_in.market.r = 0.05;
    probe_in.market.sigma = 0.2;
    probe_in.sim.oversample = 8;
    probe_in.behavior = probe_behavior();
    auto* probe = make("probe", "check the immediate-exercise floor with no fee and no discount");
    add_market(*probe, probe_in);
    add_loan(*probe, probe_in, false, false);
    probe->add("monitor-freq", probe_in.behavior.monitor_freq, "base decisions per day");
    probe->add("seed", probe_in.sim.base_seed, "base seed");
    probe->add("n-train", probe_in.sim.n_train, "threshold calibration paths");
    probe->add("n-test", probe_in.sim.n_test, "valuation paths");
    probe->add("horizon", probe_in.sim.horizon, "simulation horizon, years");
    probe->add("oversample", probe_in.sim.oversample, "substeps per base interval (>= 8)");
    probe->add("alphas", pr_alphas, "comma-separated rate grid");
    probe->add("out", pr_out, "output CSV")->required();

    std::vector<std::string> names;
    for (auto const& s : sets)
        names.push_back(s->app()->get_name());

    try
    {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config(std::move(args), names);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    try
    {
        if (price->app()->parsed())
            return run_price_fixed(in, json);

        finalize(base);
        if (fair->app()->parsed())
            return run_fair_rate(base, fr_mode, fr_opts, alpha_max, fr_out, *fair, timer);
        if (sweep->app()->parsed())
            return run_sweep_cmd(base, sw_param, sw_from, sw_to, sw_points, sw_out, *sweep,
                                 timer);
        if (verify->app()->parsed())
            return run_verify(v_suite, v_seed, v_paths, v_out, *verify, timer);
        if (compare->app()->parsed())
            return run_compare(base, cmp_mode, cmp_input, cmp_out_dir, fr_opts, alpha_max,
                               *compare, timer);
        if (paths->app()->parsed())
            return run_paths(base, p_paths, p_spd, p_out, *paths, timer);
        if (probe->app()->parsed())
        {
            probe_in.behavior.allow_topups = false;
            return run_probe(probe_in, pr_alphas, pr_out, *probe, timer);
        }
    }
    catch (CLI::ValidationError const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
    catch (NoSolution const& e)
    {
        std::cerr << "no solution: " << e.what() << "\n";
        return kNoSolution;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    }
    return kOk;
}
