#pragma once

#include <Eigen/Dense>
#include <span>

#include "uptake/errors.hpp"

namespace uptake {

struct CorrelationResult {
    double r = 0.0;
    int n = 0;
    double p_value = 1.0;
};

enum class TailKind { two_sided, one_sided };

// Pearson correlation with significance from t = r * sqrt(df / (1 - r^2))
// against Student-t with df = n - 2. The one-sided p is half the two-sided
// value, testing in the direction of the observed sign.
CorrelationResult pearson_r(std::span<const double> x, std::span<const double> y,
                            TailKind tail = TailKind::two_sided);

// Two-sided tail probability P(|T| >= |t|) for Student-t with df degrees of
// freedom. Monotone decreasing in |t|, exact 1.0 at t = 0.
double t_sf(double t, int df);

// Inverse of t_sf: the t >= 0 with t_sf(t, df) = alpha (two-sided).
double t_critical(double alpha, int df);

struct RegressionFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;
    double r_squared = 0.0;
    int n = 0;
};

// Least squares of y on the columns of X (caller supplies the intercept
// column). Solved by column-pivoted QR; standard errors from
// sigma2 * (X^T X)^-1 with sigma2 = RSS / (n - k); p-values against
// Student-t with n - k degrees of freedom.
RegressionFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

namespace detail {
// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double ibeta(double a, double b, double x);
}  // namespace detail

}  // namespace uptake
