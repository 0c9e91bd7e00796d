#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "uptake/errors.hpp"

namespace uptake {

// Matern nu=3/2: sigma2 * (1 + sqrt(3) |r| / l) * exp(-sqrt(3) |r| / l).
double matern32(double r, double length_scale, double sigma2);

struct MaternKernel {
    double length_scale = 1.0;
    double variance = 1.0;
};

// Zero-mean GP with a sum of Matern-3/2 kernels plus observation noise.
// The Cholesky factor of K + sigma_n^2 I (+ jitter when needed) is cached
// for prediction.
struct GPModel {
    std::vector<MaternKernel> kernels;
    double noise_variance = 0.0;
    Eigen::VectorXd train_x;
    Eigen::VectorXd train_y;
    double log_marginal = 0.0;
    double jitter = 0.0;

    Eigen::MatrixXd chol_lower;
    Eigen::VectorXd weights;  // (K + sigma_n^2 I)^-1 y
};

struct GPFitOptions {
    int n_starts = 8;
    int max_iters = 300;  // simplex iterations per start
    std::uint64_t seed = 0;
};

// log p(y | x, hyperparameters) for the summed-kernel model. Escalates
// jitter when the covariance fails to factor and throws NotPositiveDefinite
// if that never succeeds.
double gp_log_marginal(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const std::vector<MaternKernel>& kernels, double noise_variance);

// Maximize the log marginal likelihood over per-kernel (l, sigma2) and the
// noise variance with multi-start Nelder-Mead in log-parameter space.
// Deterministic given the seed.
GPModel gp_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n_kernels,
               const GPFitOptions& options = {});

// Rebuild the cached factorization from stored hyperparameters (after
// deserialization).
void gp_refresh(GPModel& model);

// Posterior mean and variance at x_star. The variance is the latent-function
// posterior (observation noise excluded) and never exceeds the prior
// variance sum.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gp_predict(const GPModel& model,
                                                       const Eigen::VectorXd& x_star);

}  // namespace uptake
