#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lendfair/analytic.hpp"
#include "lendfair/market_data.hpp"
#include "lendfair/mc_pricer.hpp"
#include "lendfair/path_engine.hpp"
#include "lendfair/replication.hpp"
#include "lendfair/stats.hpp"

namespace py = pybind11;
using namespace lendfair;

namespace {

// Field-for-field repr so results print usefully in a REPL.
std::string repr_valuation(ValuationResult const& v)
{
    return "ValuationResult(value=" + std::to_string(v.value)
           + ", std_error=" + std::to_string(v.std_error)
           + ", s_star=" + std::to_string(v.policy.s_star) + ")";
}

py::array_t<double> to_array(std::vector<double> const& v)
{
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

}  // namespace

PYBIND11_MODULE(_lendfair, m)
{
    m.doc() = "Overcollateralized loan pricing: closed form, Monte Carlo and rate comparison";

    py::class_<MarketParams>(m, "MarketParams")
        .def(py::init([](double s0, double r, double sigma) { return MarketParams{s0, r, sigma}; }),
             py::arg("s0") = 100.0, py::arg("r") = 0.03746, py::arg("sigma") = 0.46)
        .def_readwrite("s0", &MarketParams::s0)
        .def_readwrite("r", &MarketParams::r)
        .def_readwrite("sigma", &MarketParams::sigma)
        .def("validate", &MarketParams::validate);

    py::class_<LoanTerms>(m, "LoanTerms")
        .def(py::init([](double alpha, double c, double c0, double beta) {
                 return LoanTerms{alpha, c, c0, beta};
             }),
             py::arg("alpha") = 0.0283, py::arg("c") = 1.0 / 0.805, py::arg("c0") = 1.0 / 0.83,
             py::arg("beta") = 0.5)
        .def_readwrite("alpha", &LoanTerms::alpha)
        .def_readwrite("c", &LoanTerms::c)
        .def_readwrite("c0", &LoanTerms::c0)
        .def_readwrite("beta", &LoanTerms::beta)
        .def("validate", &LoanTerms::validate);

    py::class_<BorrowerBehavior>(m, "BorrowerBehavior")
        .def(py::init([](double delta, int monitor_freq, double topup_trigger, double topup_size,
                         bool allow_topups) {
                 return BorrowerBehavior{delta, monitor_freq, topup_trigger, topup_size,
                                         allow_topups};
             }),
             py::arg("delta") = 0.005, py::arg("monitor_freq") = 10,
             py::arg("topup_trigger") = 0.05, py::arg("topup_size") = 0.1,
             py::arg("allow_topups") = true)
        .def_readwrite("delta", &BorrowerBehavior::delta)
        .def_readwrite("monitor_freq", &BorrowerBehavior::monitor_freq)
        .def_readwrite("topup_trigger", &BorrowerBehavior::topup_trigger)
        .def_readwrite("topup_size", &BorrowerBehavior::topup_size)
        .def_readwrite("allow_topups", &BorrowerBehavior::allow_topups)
        .def("validate", &BorrowerBehavior::validate);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init([](std::size_t n_train, std::size_t n_test, double horizon, int oversample,
                         std::optional<std::vector<double>> s_star_grid, std::uint64_t base_seed,
                         bool monitor_every_substep) {
                 return SimConfig{n_train,   n_test,    horizon, oversample,
                                  s_star_grid, base_seed, monitor_every_substep};
             }),
             py::arg("n_train") = 40000, py::arg("n_test") = 200000, py::arg("horizon") = 5.0,
             py::arg("oversample") = 4, py::arg("s_star_grid") = py::none(),
             py::arg("base_seed") = 20230201, py::arg("monitor_every_substep") = false)
        .def_readwrite("n_train", &SimConfig::n_train)
        .def_readwrite("n_test", &SimConfig::n_test)
        .def_readwrite("horizon", &SimConfig::horizon)
        .def_readwrite("oversample", &SimConfig::oversample)
        .def_readwrite("s_star_grid", &SimConfig::s_star_grid)
        .def_readwrite("base_seed", &SimConfig::base_seed)
        .def_readwrite("monitor_every_substep", &SimConfig::monitor_every_substep)
        .def("validate", &SimConfig::validate);

    py::class_<FairRateOptions>(m, "FairRateOptions")
        .def(py::init([](double tol_rel, double alpha_lo, double alpha_hi, int max_iterations) {
                 return FairRateOptions{tol_rel, alpha_lo, alpha_hi, max_iterations};
             }),
             py::arg("tol_rel") = 0.005, py::arg("alpha_lo") = 0.0, py::arg("alpha_hi") = 2.0,
             py::arg("max_iterations") = 14)
        .def_readwrite("tol_rel", &FairRateOptions::tol_rel)
        .def_readwrite("alpha_lo", &FairRateOptions::alpha_lo)
        .def_readwrite("alpha_hi", &FairRateOptions::alpha_hi)
        .def_readwrite("max_iterations", &FairRateOptions::max_iterations);

    py::enum_<NoSolutionReason>(m, "NoSolutionReason")
        .value("NONE", NoSolutionReason::None)
        .value("VALUE_BELOW_TARGET_AT_ZERO", NoSolutionReason::ValueBelowTargetAtZero)
        .value("VALUE_ABOVE_TARGET_AT_MAX", NoSolutionReason::ValueAboveTargetAtMax)
        .value("NOT_CONVERGED", NoSolutionReason::NotConverged);

    py::class_<FixedTermQuote>(m, "FixedTermQuote")
        .def_readonly("value", &FixedTermQuote::value)
        .def_readonly("eta1", &FixedTermQuote::eta1)
        .def_readonly("eta2", &FixedTermQuote::eta2)
        .def_readonly("sigma_T", &FixedTermQuote::sigma_T)
        .def_readonly("carry", &FixedTermQuote::carry)
        .def_readonly("knocked_out_at_inception", &FixedTermQuote::knocked_out_at_inception);

    py::class_<FixedTermFairRate>(m, "FixedTermFairRate")
        .def_readonly("found", &FixedTermFairRate::found)
        .def_readonly("alpha", &FixedTermFairRate::alpha)
        .def_readonly("residual", &FixedTermFairRate::residual)
        .def_readonly("iterations", &FixedTermFairRate::iterations)
        .def_readonly("reason", &FixedTermFairRate::reason)
        .def_readonly("diagnostic", &FixedTermFairRate::diagnostic);

    py::class_<ExercisePolicy>(m, "ExercisePolicy")
        .def(py::init([](double s_star) { return ExercisePolicy{s_star}; }), py::arg("s_star"))
        .def_readwrite("s_star", &ExercisePolicy::s_star);

    py::class_<ValuationResult>(m, "ValuationResult")
        .def_readonly("value", &ValuationResult::value)
        .def_readonly("std_error", &ValuationResult::std_error)
        .def_readonly("mean_duration", &ValuationResult::mean_duration)
        .def_readonly("liquidation_rate", &ValuationResult::liquidation_rate)
        .def_readonly("mean_topups", &ValuationResult::mean_topups)
        .def_readonly("policy", &ValuationResult::policy)
        .def_readonly("n_paths", &ValuationResult::n_paths)
        .def("__repr__", &repr_valuation);

    py::class_<FairRateStep>(m, "FairRateStep")
        .def_readonly("alpha", &FairRateStep::alpha)
        .def_readonly("valuation", &FairRateStep::valuation);

    py::class_<FairRateResult>(m, "FairRateResult")
        .def_readonly("found", &FairRateResult::found)
        .def_readonly("alpha", &FairRateResult::alpha)
        .def_readonly("target", &FairRateResult::target)
        .def_readonly("valuation", &FairRateResult::valuation)
        .def_readonly("confirmation", &FairRateResult::confirmation)
        .def_readonly("iterations", &FairRateResult::iterations)
        .def_readonly("reason", &FairRateResult::reason)
        .def_readonly("diagnostic", &FairRateResult::diagnostic)
        .def_readonly("trace", &FairRateResult::trace);

    py::class_<ProbePoint>(m, "ProbePoint")
        .def_readonly("alpha", &ProbePoint::alpha)
        .def_readonly("valuation", &ProbePoint::valuation)
        .def_readonly("floor", &ProbePoint::floor)
        .def_readonly("floor_holds", &ProbePoint::floor_holds)
        .def_readonly("unfair_to_lender", &ProbePoint::unfair_to_lender);

    py::class_<ProbeReport>(m, "ProbeReport")
        .def_readonly("floor", &ProbeReport::floor)
        .def_readonly("floor_holds", &ProbeReport::floor_holds)
        .def_readonly("points", &ProbeReport::points);

    py::class_<LinearFit>(m, "LinearFit")
        .def_readonly("slope", &LinearFit::slope)
        .def_readonly("intercept", &LinearFit::intercept)
        .def_readonly("r_squared", &LinearFit::r_squared);

    py::class_<MonthlyRecord>(m, "MonthlyRecord")
        .def(py::init([](std::string month, double risk_free, double volatility,
                         std::optional<double> observed_rate) {
                 return MonthlyRecord{std::move(month), risk_free, volatility, observed_rate};
             }),
             py::arg("month"), py::arg("risk_free"), py::arg("volatility"),
             py::arg("observed_rate") = py::none())
        .def_readwrite("month", &MonthlyRecord::month)
        .def_readwrite("risk_free", &MonthlyRecord::risk_free)
        .def_readwrite("volatility", &MonthlyRecord::volatility)
        .def_readwrite("observed_rate", &MonthlyRecord::observed_rate);

    py::class_<RateSolution>(m, "RateSolution")
        .def(py::init([](bool found, double alpha, std::string diagnostic) {
                 return RateSolution{found, alpha, std::move(diagnostic)};
             }),
             py::arg("found"), py::arg("alpha") = 0.0, py::arg("diagnostic") = "")
        .def_readonly("found", &RateSolution::found)
        .def_readonly("alpha", &RateSolution::alpha)
        .def_readonly("diagnostic", &RateSolution::diagnostic);

    py::class_<MonthResult>(m, "MonthResult")
        .def_readonly("record", &MonthResult::record)
        .def_readonly("solution", &MonthResult::solution);

    py::class_<NamedFit>(m, "NamedFit")
        .def_readonly("series", &NamedFit::series)
        .def_readonly("regressor", &NamedFit::regressor)
        .def_readonly("fit", &NamedFit::fit);

    py::class_<ComparisonReport>(m, "ComparisonReport")
        .def_readonly("months", &ComparisonReport::months)
        .def_readonly("n_used", &ComparisonReport::n_used)
        .def_readonly("n_paired", &ComparisonReport::n_paired)
        .def_readonly("pearson_r", &ComparisonReport::pearson_r)
        .def_readonly("p_value", &ComparisonReport::p_value)
        .def_readonly("regressions", &ComparisonReport::regressions);

    // closed form
    m.def("norm_cdf", &norm_cdf, py::arg("x"));
    m.def("price_fixed_term",
          py::overload_cast<MarketParams const&, LoanTerms const&, double, double>(
              &price_fixed_term),
          py::arg("market"), py::arg("terms"), py::arg("T"), py::arg("carry"));
    m.def("price_fixed_term",
          py::overload_cast<MarketParams const&, LoanTerms const&, double>(&price_fixed_term),
          py::arg("market"), py::arg("terms"), py::arg("T"));
    m.def("solve_fixed_term_fair_rate",
          py::overload_cast<MarketParams const&, double, double, double, double>(
              &solve_fixed_term_fair_rate),
          py::arg("market"), py::arg("c"), py::arg("c0"), py::arg("T"),
          py::arg("alpha_max") = 5.0);

    // paths
    m.def(
        "simulate_path",
        [](MarketParams const& market, double horizon, int steps_per_day, std::uint64_t seed,
           std::uint32_t path_index) {
            PricePath const p =
                simulate_path(market, TimeGrid{horizon, steps_per_day}, seed, StreamId::Paths,
                              path_index);
            std::vector<double> times(p.prices.size());
            for (std::size_t k = 0; k < times.size(); ++k)
                times[k] = p.grid.time(k);
            return py::make_tuple(to_array(times), to_array(p.prices));
        },
        py::arg("market"), py::arg("horizon"), py::arg("steps_per_day"), py::arg("seed"),
        py::arg("path_index") = 0, "Returns (times, prices) for one path of the Paths stream.");
    m.def("bridge_knockout_prob", &bridge_knockout_prob, py::arg("s_a"), py::arg("s_b"),
          py::arg("barrier"), py::arg("sigma"), py::arg("dt"));

    // Monte Carlo; the worker pool never touches Python objects
    auto const release = py::call_guard<py::gil_scoped_release>();
    m.def("default_s_star_grid", &default_s_star_grid, py::arg("market"), py::arg("terms"));
    m.def("value_option",
          [](MarketParams const& market, LoanTerms const& terms, BorrowerBehavior const& behavior,
             ExercisePolicy const& policy, SimConfig const& config) {
              return value_option(market, terms, behavior, policy, config);
          },
          py::arg("market"), py::arg("terms"), py::arg("behavior"), py::arg("policy"),
          py::arg("config"), release);
    m.def("calibrate_threshold", &calibrate_threshold, py::arg("market"), py::arg("terms"),
          py::arg("behavior"), py::arg("config"), release);
    m.def("calibrate_and_value", &calibrate_and_value, py::arg("market"), py::arg("terms"),
          py::arg("behavior"), py::arg("config"), release);
    m.def("solve_fair_rate", &solve_fair_rate, py::arg("market"), py::arg("c"), py::arg("c0"),
          py::arg("beta"), py::arg("behavior"), py::arg("config"),
          py::arg("options") = FairRateOptions{}, release);
    m.def("impossibility_probe",
          [](MarketParams const& market, double c, double c0, std::vector<double> const& alphas,
             SimConfig const& config) {
              return impossibility_probe(market, c, c0, alphas, config);
          },
          py::arg("market"), py::arg("c"), py::arg("c0"), py::arg("alpha_grid"),
          py::arg("config"), release);
    m.def("replicating_premium", &replicating_premium, py::arg("market"), py::arg("terms"));

    // statistics
    m.def("pearson",
          [](std::vector<double> const& x, std::vector<double> const& y) { return pearson(x, y); },
          py::arg("x"), py::arg("y"));
    m.def("linreg",
          [](std::vector<double> const& x, std::vector<double> const& y) { return linreg(x, y); },
          py::arg("x"), py::arg("y"));
    m.def("p_value_two_sided", &p_value_two_sided, py::arg("r"), py::arg("n"));
    m.def("students_t_cdf", &students_t_cdf, py::arg("t"), py::arg("nu"));
    m.def("incomplete_beta", &incomplete_beta, py::arg("a"), py::arg("b"), py::arg("x"));

    // market data
    m.def("load_monthly_csv", &load_monthly_csv, py::arg("path"));
    m.def("compare_rates",
          py::overload_cast<std::vector<MonthlyRecord> const&, RateSolver const&, double>(
              &compare_rates),
          py::arg("records"), py::arg("solver"), py::arg("s0") = 100.0,
          "solver(market) -> RateSolution; return found=False for months without a rate.");
    m.def("compare_rates_fixed_term",
          [](std::vector<MonthlyRecord> const& records, double c, double c0, double T, double s0) {
              RateSolver solver = [=](MarketParams const& market) {
                  auto const res = solve_fixed_term_fair_rate(market, c, c0, T);
                  return RateSolution{res.found, res.alpha, res.diagnostic};
              };
              return compare_rates(records, solver, s0);
          },
          py::arg("records"), py::arg("c"), py::arg("c0"), py::arg("T") = 1.0,
          py::arg("s0") = 100.0, release);
    m.def("compare_rates_perpetual",
          py::overload_cast<std::vector<MonthlyRecord> const&, double, double, double,
                            BorrowerBehavior const&, SimConfig const&, FairRateOptions const&,
                            double>(&compare_rates),
          py::arg("records"), py::arg("c"), py::arg("c0"), py::arg("beta"), py::arg("behavior"),
          py::arg("config"), py::arg("options") = FairRateOptions{}, py::arg("s0") = 100.0,
          release);
}
