#pragma once

#include <span>

namespace lendfair {

/// Sample Pearson correlation. Requires equal lengths >= 3 and nonzero variances.
double pearson(std::span<double const> xs, std::span<double const> ys);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with nu degrees of freedom.
double students_t_cdf(double t, double nu);

/// Two-sided p-value of the t-test for a Pearson r on n samples.
double p_value_two_sided(double r, int n);

struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
LinearFit linreg(std::span<double const> xs, std::span<double const> ys);

}  // namespace lendfair
