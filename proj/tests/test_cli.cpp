#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "lendfair/analytic.hpp"
#include "lendfair/mc_pricer.hpp"

using namespace lendfair;
namespace fs = std::filesystem;

namespace {

struct Run
{
    int exit_code = -1;
    std::string out;   ///< stdout and stderr interleaved
};

Run run(std::string const& args, std::string const& env = {})
{
    std::string const cmd = env + " " LENDFAIR_CLI " " + args + " 2>&1";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), n);
    int const status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in{p, std::ios::binary};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Value printed after `key` in the aligned key/value text output.
double field(std::string const& text, std::string const& key)
{
    std::istringstream in{text};
    std::string line;
    while (std::getline(in, line))
    {
        std::istringstream ls{line};
        std::string k;
        double v;
        if (ls >> k && k == key && ls >> v)
            return v;
    }
    ADD_FAILURE() << "no field " << key << " in:\n" << text;
    return 0.0;
}

class Cli : public ::testing::Test
{
  protected:
    void SetUp() override
    {
        auto const* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string{"lendfair_cli_"} + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path path(std::string const& name) const { return dir_ / name; }

    fs::path dir_;
};

std::string const kFixed = "--s0 100 --r 0.05 --sigma 0.3 --alpha 0.02 --c 1.5 --c0 1.2 --term 1";
std::string const kSmallSim = "--n-train 300 --n-test 600 --horizon 1";

}  // namespace

TEST_F(Cli, PriceFixedMatchesLibrary)
{
    auto const r = run("price-fixed " + kFixed);
    ASSERT_EQ(r.exit_code, 0) << r.out;
    auto const q = price_fixed_term({100.0, 0.05, 0.3}, {0.02, 1.5, 1.2, 0.0}, 1.0);
    EXPECT_EQ(field(r.out, "value"), q.value);
    EXPECT_EQ(field(r.out, "eta1"), q.eta1);
    EXPECT_EQ(field(r.out, "eta2"), q.eta2);

    auto const carry0 = run("price-fixed " + kFixed + " --carry 0");
    EXPECT_EQ(field(carry0.out, "value"), price_fixed_term({100.0, 0.05, 0.3}, {0.02, 1.5, 1.2, 0.0}, 1.0, 0.0).value);
}

TEST_F(Cli, PriceFixedJsonHasIdenticalNumbers)
{
    auto const text = run("price-fixed " + kFixed);
    auto const js = run("price-fixed " + kFixed + " --json");
    ASSERT_EQ(js.exit_code, 0);
    auto const j = nlohmann::json::parse(js.out);
    EXPECT_EQ(j.at("value").get<double>(), field(text.out, "value"));
    EXPECT_EQ(j.at("eta1").get<double>(), field(text.out, "eta1"));
    EXPECT_EQ(j.at("eta2").get<double>(), field(text.out, "eta2"));
    EXPECT_EQ(j.at("sigma_T").get<double>(), field(text.out, "sigma_T"));
    EXPECT_FALSE(j.at("knocked_out_at_inception").get<bool>());
}

TEST_F(Cli, PriceFixedKnockout)
{
    auto const r = run("price-fixed --s0 100 --r 0.05 --sigma 0.3 --alpha 0.3 --c 1.5 --c0 1.2");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(field(r.out, "value"), 0.0);
    EXPECT_NE(r.out.find("knock"), std::string::npos) << r.out;
}

TEST_F(Cli, ExitCodes)
{
    EXPECT_EQ(run("price-fixed --bogus 1").exit_code, 2);
    EXPECT_EQ(run("no-such-command").exit_code, 2);
    EXPECT_EQ(run("price-fixed --sigma abc").exit_code, 2);
    EXPECT_EQ(run("price-fixed --sigma 0").exit_code, 1);
    EXPECT_EQ(run("price-fixed --c 1.1 --c0 1.2").exit_code, 1);
    auto const none = run("fair-rate --mode fixed-term --r 0.05 --sigma 0.3 --c 1.5 --c0 1.2");
    EXPECT_EQ(none.exit_code, 3);
    EXPECT_NE(none.out.find("value_below_target_at_zero"), std::string::npos);
    EXPECT_EQ(run("sweep --param beta --from 0 --to 1 --points 2 --out " + path("x.csv").string())
                  .exit_code,
              1);
}

TEST_F(Cli, FixedTermFairRateReprices)
{
    auto const r = run("fair-rate --mode fixed-term --r 0.05 --sigma 0.3 --c 1.5 --c0 1.05");
    ASSERT_EQ(r.exit_code, 0) << r.out;
    double const alpha = field(r.out, "alpha");
    double const v = price_fixed_term({100.0, 0.05, 0.3}, {alpha, 1.5, 1.05, 0.0}, 1.0).value;
    EXPECT_NEAR(v / 100.0, 1.0 - 1.0 / 1.5, 1e-9);
}

TEST_F(Cli, PerpetualNoFeeDenseMonitoring)
{
    auto const r = run("fair-rate --r 0.05 --sigma 0.46 --c 1.7 --c0 1.2 --beta 0 --delta 0 "
                       "--monitor-freq 1 --oversample 8 --monitor-every-substep --no-topups "
                       + kSmallSim);
    if (r.exit_code == 0)
        EXPECT_NE(r.out.find("warning"), std::string::npos) << r.out;
    else
        EXPECT_EQ(r.exit_code, 3) << r.out;
}

TEST_F(Cli, SweepIsByteIdenticalAcrossThreadCounts)
{
    std::string const args = "sweep --param r --from 0.005 --to 0.05 --points 3 " + kSmallSim;
    auto const a = run(args + " --out " + path("a.csv").string(), "LENDFAIR_THREADS=1");
    auto const b = run(args + " --out " + path("b.csv").string(), "LENDFAIR_THREADS=8");
    ASSERT_EQ(a.exit_code, 0) << a.out;
    ASSERT_EQ(b.exit_code, 0) << b.out;
    std::string const csv = slurp(path("a.csv"));
    EXPECT_EQ(csv, slurp(path("b.csv")));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    EXPECT_TRUE(fs::exists(path("a.manifest")));
}

TEST_F(Cli, ManifestReplayReproducesTheCsv)
{
    auto const a = run("sweep --param delta --from 0 --to 0.02 --points 2 --seed 7 " + kSmallSim
                       + " --out " + path("a.csv").string());
    ASSERT_EQ(a.exit_code, 0) << a.out;
    std::string const manifest = slurp(path("a.manifest"));
    EXPECT_NE(manifest.find("command=sweep"), std::string::npos);
    EXPECT_NE(manifest.find("seed=7"), std::string::npos);
    EXPECT_NE(manifest.find("wall_clock_seconds"), std::string::npos);

    auto const b = run("--config " + path("a.manifest").string() + " --out " + path("b.csv").string(),
                       "LENDFAIR_THREADS=3");
    ASSERT_EQ(b.exit_code, 0) << b.out;
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, ConfigPrecedence)
{
    std::ofstream{path("run.cfg")} << "# comment\ncommand=sweep\nparam=alpha\nfrom=0.1\nto=0.1\n"
                                      "points=1\nn-train=200\nn-test=400\nhorizon=1\n";
    auto const r = run("--config " + path("run.cfg").string() + " --n-test 500 --out "
                       + path("s.csv").string());
    ASSERT_EQ(r.exit_code, 0) << r.out;
    std::string const manifest = slurp(path("s.manifest"));
    EXPECT_NE(manifest.find("n-test=500"), std::string::npos) << manifest;   // flag beats file
    EXPECT_NE(manifest.find("n-train=200"), std::string::npos);             // file beats default
    EXPECT_NE(manifest.find("oversample=4"), std::string::npos);            // default
}

TEST_F(Cli, ZeroWidthSweepEqualsSingleValuation)
{
    auto const r = run("sweep --param alpha --from 0.04 --to 0.04 --points 1 " + kSmallSim
                       + " --out " + path("z.csv").string());
    ASSERT_EQ(r.exit_code, 0) << r.out;
    std::istringstream in{slurp(path("z.csv"))};
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_FALSE(std::getline(in, extra));

    SimConfig c;
    c.n_train = 300;
    c.n_test = 600;
    c.horizon = 1.0;
    LoanTerms t;
    t.alpha = 0.04;
    auto const v = calibrate_and_value({}, t, {}, c);
    std::vector<std::string> cells;
    std::istringstream rs{row};
    for (std::string cell; std::getline(rs, cell, ',');)
        cells.push_back(cell);
    ASSERT_EQ(cells.size(), 9u);
    EXPECT_NEAR(std::stod(cells[3]), v.value, 1e-9 * std::abs(v.value));
    EXPECT_NEAR(std::stod(cells[4]), v.std_error, 1e-9 * v.std_error);
    EXPECT_NEAR(std::stod(cells[8]), v.policy.s_star, 1e-9 * v.policy.s_star);
}

TEST_F(Cli, CompareSyntheticFixture)
{
    auto const r = run("compare --input " LENDFAIR_DATA_DIR "/synthetic_monthly.csv --mode fixed-term "
                       "--c 2 --c0 1.02 --out-dir " + dir_.string());
    ASSERT_EQ(r.exit_code, 0) << r.out;
    EXPECT_TRUE(fs::exists(path("rates.csv")));
    EXPECT_TRUE(fs::exists(path("stats.csv")));
    EXPECT_TRUE(fs::exists(path("compare.manifest")));
    double const p = field(r.out, "p_value");
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
}

TEST_F(Cli, CompareReproducesPublishedPValue)
{
    auto const r = run("compare --input " LENDFAIR_DATA_DIR "/correlated_p050.csv --mode fixed-term "
                       "--c 2 --c0 1.02 --out-dir " + dir_.string());
    ASSERT_EQ(r.exit_code, 0) << r.out;
    EXPECT_NEAR(field(r.out, "pearson_r"), 0.575, 1e-6);
    EXPECT_NEAR(field(r.out, "p_value"), 0.050, 0.002);
}

TEST_F(Cli, CompareSelfComparison)
{
    auto const first = run("compare --input " LENDFAIR_DATA_DIR "/synthetic_monthly.csv --mode fixed-term "
                           "--c 2 --c0 1.02 --out-dir " + dir_.string());
    ASSERT_EQ(first.exit_code, 0);
    // feed the model rates back in as the observations
    std::istringstream in{slurp(path("rates.csv"))};
    std::ofstream self{path("self.csv")};
    std::string line;
    std::getline(in, line);
    self << "month,risk_free,volatility,observed_rate\n";
    while (std::getline(in, line))
    {
        std::vector<std::string> c;
        std::istringstream ls{line};
        for (std::string cell; std::getline(ls, cell, ',');)
            c.push_back(cell);
        self << c[0] << ',' << c[1] << ',' << c[2] << ',' << c[4] << '\n';
    }
    self.close();
    fs::create_directories(path("self"));
    auto const r = run("compare --input " + path("self.csv").string()
                       + " --mode fixed-term --c 2 --c0 1.02 --out-dir " + path("self").string());
    ASSERT_EQ(r.exit_code, 0) << r.out;
    EXPECT_NEAR(field(r.out, "pearson_r"), 1.0, 1e-9);
}

TEST_F(Cli, CompareIngestionErrorsNameTheRow)
{
    std::ofstream{path("bad.csv")} << "month,risk_free,volatility\n2023-01,0.03,0.4\n2023-02,0.03,-1\n";
    auto const r = run("compare --input " + path("bad.csv").string() + " --mode fixed-term --out-dir "
                       + dir_.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.out.find(":3:"), std::string::npos) << r.out;
}

TEST_F(Cli, VerifyReplication)
{
    auto const r = run("verify --suite replication --out " + path("v.csv").string());
    EXPECT_EQ(r.exit_code, 0) << r.out;
    EXPECT_NE(slurp(path("v.csv")).find("replication"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("v.manifest")));
}

TEST_F(Cli, PathsCsv)
{
    auto const r = run("paths --n-paths 3 --horizon 0.01 --out " + path("p.csv").string());
    ASSERT_EQ(r.exit_code, 0) << r.out;
    std::string const csv = slurp(path("p.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "path_id,step,time_years,price");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 5);
}
