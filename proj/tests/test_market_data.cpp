#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

#include "lendfair/analytic.hpp"
#include "lendfair/market_data.hpp"

using namespace lendfair;
namespace fs = std::filesystem;

namespace {

class TempFile
{
  public:
    explicit TempFile(std::string const& content)
        : path_{fs::temp_directory_path()
                / ("lendfair_md_" + std::to_string(counter_++) + "_"
                   + std::to_string(::getpid()) + ".csv")}
    {
        std::ofstream{path_} << content;
    }
    ~TempFile() { fs::remove(path_); }
    fs::path const& path() const { return path_; }

  private:
    static inline int counter_ = 0;
    fs::path path_;
};

std::string twelve_months()
{
    std::ostringstream s;
    s << "month,risk_free,volatility,observed_rate\n";
    for (int m = 1; m <= 12; ++m)
    {
        s << "2023-" << (m < 10 ? "0" : "") << m << ',' << 0.03 + 0.001 * m << ','
          << 0.3 + 0.01 * m << ',' << 0.02 + 0.002 * m << '\n';
    }
    return s.str();
}

std::string load_error(std::string const& content)
{
    TempFile f{content};
    try
    {
        load_monthly_csv(f.path());
    }
    catch (std::exception const& e)
    {
        return e.what();
    }
    return {};
}

std::vector<MonthlyRecord> months(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 gen{seed};
    std::uniform_real_distribution<double> rf(0.01, 0.05);
    std::uniform_real_distribution<double> vol(0.2, 0.5);
    std::vector<MonthlyRecord> out;
    for (std::size_t i = 0; i < n; ++i)
    {
        char label[8];
        std::snprintf(label, sizeof label, "%04zu-%02zu", 2015 + i / 12, 1 + i % 12);
        out.push_back({label, rf(gen), vol(gen), std::nullopt});
    }
    return out;
}

// Closed-form fixed-term fair rate: cheap and deterministic.
RateSolution fixed_term(MarketParams const& m)
{
    auto const r = solve_fixed_term_fair_rate(m, 2.0, 1.02, 1.0);
    return {r.found, r.alpha, r.diagnostic};
}

}  // namespace

TEST(LoadMonthlyCsv, WellFormed)
{
    TempFile f{twelve_months()};
    auto const recs = load_monthly_csv(f.path());
    ASSERT_EQ(recs.size(), 12u);
    EXPECT_EQ(recs.front().month, "2023-01");
    EXPECT_EQ(recs.back().month, "2023-12");
    EXPECT_DOUBLE_EQ(recs[2].risk_free, 0.033);
    EXPECT_DOUBLE_EQ(recs[2].volatility, 0.33);
    ASSERT_TRUE(recs[2].observed_rate);
    EXPECT_DOUBLE_EQ(*recs[2].observed_rate, 0.026);
}

TEST(LoadMonthlyCsv, OptionalColumnAndOrder)
{
    TempFile f{"volatility,month,risk_free\r\n0.4,2023-01,0.03\r\n0.5,2023-02,0.04\r\n\n"};
    auto const recs = load_monthly_csv(f.path());
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[1].month, "2023-02");
    EXPECT_DOUBLE_EQ(recs[1].volatility, 0.5);
    EXPECT_FALSE(recs[0].observed_rate);

    TempFile g{"month,risk_free,volatility,observed_rate\n2023-01,0.03,0.4,\n2023-02,0.03,0.4,0.05\n"};
    auto const partial = load_monthly_csv(g.path());
    EXPECT_FALSE(partial[0].observed_rate);
    EXPECT_TRUE(partial[1].observed_rate);
}

TEST(LoadMonthlyCsv, ErrorsNameTheLine)
{
    std::string const head = "month,risk_free,volatility\n";
    EXPECT_NE(load_error(head + "2023-01,0.03,0.4\n2023-02,0.03,0\n").find(":3: volatility"),
              std::string::npos);
    EXPECT_NE(load_error(head + "2023-01,0.03,-0.1\n").find(":2:"), std::string::npos);
    EXPECT_NE(load_error(head + "2023-01,abc,0.4\n").find(":2: column risk_free"),
              std::string::npos);
    EXPECT_NE(load_error(head + "2023-01,0.03,0.4\n2023-01,0.03,0.4\n").find(":3: duplicate month"),
              std::string::npos);
    EXPECT_NE(load_error(head + "2023-13,0.03,0.4\n").find("YYYY-MM"), std::string::npos);
    EXPECT_NE(load_error(head + "2023-01,0.03\n").find(":2: expected 3 fields"),
              std::string::npos);
    EXPECT_NE(load_error("month,volatility\n2023-01,0.4\n").find("risk_free"), std::string::npos);
    EXPECT_NE(load_error("").find("missing header"), std::string::npos);
    EXPECT_THROW(load_monthly_csv("/nonexistent/lendfair.csv"), std::runtime_error);
}

TEST(CompareRates, SelfComparisonIsPerfect)
{
    auto recs = months(12, 1);
    for (auto& r : recs)
        r.observed_rate = fixed_term({100.0, r.risk_free, r.volatility}).alpha;
    auto const rep = compare_rates(recs, fixed_term);
    ASSERT_EQ(rep.n_used, 12u);
    ASSERT_EQ(rep.n_paired, 12u);
    ASSERT_TRUE(rep.pearson_r);
    EXPECT_NEAR(*rep.pearson_r, 1.0, 1e-12);
    EXPECT_NEAR(*rep.p_value, 0.0, 1e-12);
    EXPECT_EQ(rep.regressions.size(), 4u);
}

TEST(CompareRates, NoSolutionMonthIsExcluded)
{
    auto recs = months(12, 2);
    for (auto& r : recs)
        r.observed_rate = 0.05;
    recs[4].observed_rate = 0.02;
    recs[7].observed_rate = 0.09;
    RateSolver solver = [&](MarketParams const& m) {
        if (m.r == recs[4].risk_free)
            return RateSolution{false, 0.0, "no root"};
        return fixed_term(m);
    };
    auto const rep = compare_rates(recs, solver);
    EXPECT_EQ(rep.months.size(), 12u);
    EXPECT_FALSE(rep.months[4].solution.found);
    EXPECT_EQ(rep.n_used, 11u);
    EXPECT_EQ(rep.n_paired, 11u);

    // the statistics equal those computed on the other eleven months alone
    std::vector<double> model, observed;
    for (std::size_t i = 0; i < recs.size(); ++i)
    {
        if (i == 4)
            continue;
        model.push_back(rep.months[i].solution.alpha);
        observed.push_back(*recs[i].observed_rate);
    }
    EXPECT_DOUBLE_EQ(*rep.pearson_r, pearson(model, observed));
    EXPECT_DOUBLE_EQ(*rep.p_value, p_value_two_sided(pearson(model, observed), 11));
}

TEST(CompareRates, SolverDomainErrorsBecomeFlags)
{
    auto recs = months(5, 3);
    RateSolver solver = [](MarketParams const& m) -> RateSolution {
        if (m.r < 0.03)
            throw std::invalid_argument("bad month");
        return fixed_term(m);
    };
    auto const rep = compare_rates(recs, solver);
    for (auto const& m : rep.months)
        EXPECT_EQ(m.solution.found, m.record.risk_free >= 0.03);
}

TEST(CompareRates, NoObservedColumnMeansNoCorrelation)
{
    auto const rep = compare_rates(months(12, 4), fixed_term);
    EXPECT_EQ(rep.n_paired, 0u);
    EXPECT_FALSE(rep.pearson_r);
    EXPECT_FALSE(rep.p_value);
    ASSERT_EQ(rep.regressions.size(), 2u);
    for (auto const& f : rep.regressions)
        EXPECT_EQ(f.series, "model_rate");
}

TEST(CompareRates, NoisyObservationsFallInTheExpectedBand)
{
    // observed = model + N(0, tau^2): the population correlation is
    // sd_model / sqrt(sd_model^2 + tau^2); atanh(r) is approximately normal
    // with standard deviation 1/sqrt(n - 3).
    std::size_t const n = 120;
    auto recs = months(n, 5);
    std::vector<double> model(n);
    for (std::size_t i = 0; i < n; ++i)
        model[i] = fixed_term({100.0, recs[i].risk_free, recs[i].volatility}).alpha;
    double const mm = std::accumulate(model.begin(), model.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : model)
        ss += (x - mm) * (x - mm);
    double const sd = std::sqrt(ss / (n - 1));
    double const tau = sd;   // rho = 1/sqrt(2)
    double const rho = sd / std::hypot(sd, tau);

    std::mt19937_64 gen{6};
    std::normal_distribution<double> noise(0.0, tau);
    for (std::size_t i = 0; i < n; ++i)
        recs[i].observed_rate = model[i] + noise(gen);
    auto const rep = compare_rates(recs, fixed_term);
    ASSERT_EQ(rep.n_used, n);
    ASSERT_TRUE(rep.pearson_r);
    EXPECT_NEAR(std::atanh(*rep.pearson_r), std::atanh(rho), 3.0 / std::sqrt(n - 3.0));
}

TEST(CompareRates, NeedsThreeMonths)
{
    EXPECT_THROW(compare_rates(months(2, 7), fixed_term), std::invalid_argument);
}

TEST(CompareRates, CsvOutputs)
{
    auto recs = months(4, 8);
    recs[0].observed_rate = 0.04;
    RateSolver solver = [](MarketParams const& m) {
        return m.r > 0.0 ? RateSolution{true, 0.123456789012345, {}} : RateSolution{};
    };
    auto rep = compare_rates(recs, solver);
    rep.months[1].solution.found = false;

    TempFile rates{""}, stats{""};
    write_rates_csv(rates.path(), rep);
    write_stats_csv(stats.path(), rep);

    std::ifstream in{rates.path()};
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "month,risk_free,volatility,observed_rate,model_rate,status");
    std::getline(in, line);
    EXPECT_NE(line.find(",0.04,0.123456789,ok"), std::string::npos) << line;
    std::getline(in, line);
    EXPECT_TRUE(line.ends_with(",,,no_solution")) << line;

    std::ifstream st{stats.path()};
    std::getline(st, line);
    EXPECT_EQ(line, "metric,value");
    std::getline(st, line);
    EXPECT_EQ(line, "n_months,4");
}
