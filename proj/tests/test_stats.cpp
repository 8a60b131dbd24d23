#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "lendfair/stats.hpp"

using namespace lendfair;

namespace {

// Twelve months of made-up (x, y) pairs.
std::vector<double> const kX{0.0351, 0.0392, 0.0348, 0.0357, 0.0364, 0.0381,
                             0.0396, 0.0417, 0.0459, 0.0480, 0.0447, 0.0402};
std::vector<double> const kY{0.0412, 0.0455, 0.0398, 0.0441, 0.0389, 0.0467,
                             0.0433, 0.0502, 0.0521, 0.0488, 0.0539, 0.0459};

long double mean(std::vector<double> const& v)
{
    long double s = 0.0L;
    for (double x : v)
        s += x;
    return s / v.size();
}

}  // namespace

TEST(Pearson, Anchors)
{
    std::vector<double> neg(kX.size());
    for (std::size_t i = 0; i < kX.size(); ++i)
        neg[i] = -kX[i];
    EXPECT_NEAR(pearson(kX, kX), 1.0, 1e-15);
    EXPECT_NEAR(pearson(kX, neg), -1.0, 1e-15);
}

TEST(Pearson, DirectFormulaRecomputation)
{
    long double const mx = mean(kX);
    long double const my = mean(kY);
    long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
    for (std::size_t i = 0; i < kX.size(); ++i)
    {
        sxy += (kX[i] - mx) * (kY[i] - my);
        sxx += (kX[i] - mx) * (kX[i] - mx);
        syy += (kY[i] - my) * (kY[i] - my);
    }
    double const ref = static_cast<double>(sxy / std::sqrt(sxx * syy));
    EXPECT_NEAR(pearson(kX, kY), ref, 1e-13);
}

TEST(Pearson, AffineInvariance)
{
    std::mt19937_64 gen{3};
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    double const r = pearson(kX, kY);
    for (int k = 0; k < 200; ++k)
    {
        double const a = scale(gen), b = u(gen), c = scale(gen), d = u(gen);
        std::vector<double> x(kX.size()), y(kY.size());
        for (std::size_t i = 0; i < kX.size(); ++i)
        {
            x[i] = a * kX[i] + b;
            y[i] = c * kY[i] + d;
        }
        EXPECT_NEAR(pearson(x, y), r, 1e-12);
    }
}

TEST(Pearson, Errors)
{
    std::vector<double> two{1.0, 2.0};
    std::vector<double> flat(kX.size(), 0.3);
    std::vector<double> shorter(kX.begin(), kX.end() - 1);
    EXPECT_THROW(pearson(two, two), std::invalid_argument);
    EXPECT_THROW(pearson(kX, flat), std::invalid_argument);
    EXPECT_THROW(pearson(flat, kY), std::invalid_argument);
    EXPECT_THROW(pearson(kX, shorter), std::invalid_argument);
}

TEST(IncompleteBeta, MatchesBoost)
{
    for (double a : {0.5, 1.0, 2.5, 5.0, 20.0})
    {
        for (double b : {0.5, 1.0, 3.0, 10.0})
        {
            for (double x = 0.0; x <= 1.0; x += 0.03125)
                EXPECT_NEAR(incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12)
                    << a << " " << b << " " << x;
        }
    }
    EXPECT_THROW(incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
    EXPECT_THROW(incomplete_beta(1.0, 1.0, 1.5), std::invalid_argument);
}

TEST(StudentsT, MatchesBoost)
{
    for (double nu : {1.0, 2.0, 5.0, 10.0, 30.0, 200.0})
    {
        boost::math::students_t_distribution<double> dist{nu};
        for (double t = -12.0; t <= 12.0; t += 0.25)
            EXPECT_NEAR(students_t_cdf(t, nu), boost::math::cdf(dist, t), 1e-10) << nu << " " << t;
    }
}

TEST(PValue, PublishedAnchors)
{
    EXPECT_NEAR(p_value_two_sided(0.575, 12), 0.050, 0.002);
    EXPECT_NEAR(p_value_two_sided(0.623, 12), 0.030, 0.002);
    EXPECT_EQ(p_value_two_sided(0.0, 12), 1.0);
    EXPECT_EQ(p_value_two_sided(1.0, 12), 0.0);
    EXPECT_EQ(p_value_two_sided(-1.0, 12), 0.0);
}

TEST(PValue, MatchesTTestThroughBoost)
{
    for (int n : {3, 5, 12, 40})
    {
        boost::math::students_t_distribution<double> dist{double(n - 2)};
        for (double r = -0.95; r <= 0.95; r += 0.05)
        {
            double const t = r * std::sqrt((n - 2) / (1.0 - r * r));
            double const ref = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
            EXPECT_NEAR(p_value_two_sided(r, n), ref, 1e-8) << r << " " << n;
        }
    }
}

TEST(PValue, Monotone)
{
    double prev = 1.0 + 1e-12;
    for (double r = 0.0; r < 0.99; r += 0.01)
    {
        double const p = p_value_two_sided(r, 12);
        EXPECT_LT(p, prev) << r;
        EXPECT_EQ(p, p_value_two_sided(-r, 12));
        prev = p;
    }
    prev = 1.0;
    for (int n = 3; n < 60; ++n)
    {
        double const p = p_value_two_sided(0.4, n);
        EXPECT_LT(p, prev) << n;
        prev = p;
    }
    EXPECT_THROW(p_value_two_sided(0.5, 2), std::invalid_argument);
    EXPECT_THROW(p_value_two_sided(1.5, 12), std::invalid_argument);
}

TEST(Linreg, ExactLineAndFlat)
{
    std::vector<double> y(kX.size()), flat(kX.size(), 7.0);
    for (std::size_t i = 0; i < kX.size(); ++i)
        y[i] = 2.0 * kX[i] + 1.0;
    auto const fit = linreg(kX, y);
    EXPECT_NEAR(fit.slope, 2.0, 1e-12);
    EXPECT_NEAR(fit.intercept, 1.0, 1e-12);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    auto const f = linreg(kX, flat);
    EXPECT_EQ(f.slope, 0.0);
    EXPECT_EQ(f.r_squared, 0.0);
    EXPECT_NEAR(f.intercept, 7.0, 1e-12);
}

TEST(Linreg, NormalEquations)
{
    // solve [n sx; sx sxx] [b; m] = [sy; sxy] directly
    long double n = kX.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < kX.size(); ++i)
    {
        sx += kX[i];
        sy += kY[i];
        sxx += (long double)kX[i] * kX[i];
        sxy += (long double)kX[i] * kY[i];
    }
    long double const det = n * sxx - sx * sx;
    double const slope = static_cast<double>((n * sxy - sx * sy) / det);
    double const intercept = static_cast<double>((sxx * sy - sx * sxy) / det);
    auto const fit = linreg(kX, kY);
    EXPECT_NEAR(fit.slope, slope, 1e-10);
    EXPECT_NEAR(fit.intercept, intercept, 1e-10);
    double const r = pearson(kX, kY);
    EXPECT_NEAR(fit.r_squared, r * r, 1e-12);
}

TEST(Linreg, Errors)
{
    std::vector<double> one{1.0};
    std::vector<double> flat(kX.size(), 0.3);
    EXPECT_THROW(linreg(one, one), std::invalid_argument);
    EXPECT_THROW(linreg(flat, kY), std::invalid_argument);
}
