#include "lendfair/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace lendfair {

namespace {

struct Moments
{
    double mean_x = 0.0;
    double mean_y = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
};

// Two-pass centered sums; the naive one-pass formula loses digits on
// series with a large common offset.
Moments centered_moments(std::span<double const> xs, std::span<double const> ys)
{
    Moments m;
    double const n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        m.mean_x += xs[i];
        m.mean_y += ys[i];
    }
    m.mean_x /= n;
    m.mean_y /= n;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        double const dx = xs[i] - m.mean_x;
        double const dy = ys[i] - m.mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

// Modified Lentz evaluation of the incomplete beta continued fraction;
// converges quickly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x)
{
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    double const qab = a + b;
    double const qap = a + 1.0;
    double const qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m)
    {
        double const m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        double const del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h;
    }
    throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

// Exact test: the centered sum of a constant series is rounding noise, not zero.
bool constant(std::span<double const> v)
{
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>{}) == v.end();
}

}  // namespace

double pearson(std::span<double const> xs, std::span<double const> ys)
{
    if (xs.size() != ys.size())
        throw std::invalid_argument("pearson: series lengths differ");
    if (xs.size() < 3)
        throw std::invalid_argument("pearson: need at least 3 points");
    if (constant(xs) || constant(ys))
        throw std::invalid_argument("pearson: degenerate variance");
    Moments const m = centered_moments(xs, ys);
    double const r = m.sxy / std::sqrt(m.sxx * m.syy);
    return std::clamp(r, -1.0, 1.0);
}

double incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("incomplete beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("incomplete beta: x must lie in [0, 1]");
    if (x == 0.0 || x == 1.0)
        return x;
    double const log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                             + a * std::log(x) + b * std::log1p(-x);
    double const front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double students_t_cdf(double t, double nu)
{
    if (!(nu > 0.0))
        throw std::invalid_argument("t distribution: degrees of freedom must be positive");
    if (std::isinf(t))
        return t > 0.0 ? 1.0 : 0.0;
    double const tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
    return t > 0.0 ? 1.0 - tail : tail;
}

double p_value_two_sided(double r, int n)
{
    if (n < 3)
        throw std::invalid_argument("p-value: need n >= 3");
    if (!(std::abs(r) <= 1.0))
        throw std::invalid_argument("p-value: |r| must not exceed 1");
    if (std::abs(r) == 1.0)
        return 0.0;
    if (r == 0.0)
        return 1.0;
    double const nu = n - 2.0;
    double const t = r * std::sqrt(nu / (1.0 - r * r));
    return incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
}

LinearFit linreg(std::span<double const> xs, std::span<double const> ys)
{
    if (xs.size() != ys.size())
        throw std::invalid_argument("linreg: series lengths differ");
    if (xs.size() < 2)
        throw std::invalid_argument("linreg: need at least 2 points");
    if (constant(xs))
        throw std::invalid_argument("linreg: degenerate x");
    Moments const m = centered_moments(xs, ys);
    LinearFit fit;
    if (constant(ys))
    {
        fit.intercept = ys.front();
        return fit;
    }
    fit.slope = m.sxy / m.sxx;
    fit.intercept = m.mean_y - fit.slope * m.mean_x;
    fit.r_squared = (m.sxy * m.sxy) / (m.sxx * m.syy);
    return fit;
}

}  // namespace lendfair
