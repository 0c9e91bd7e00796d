#include "uptake/nowcast/gp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>

namespace uptake {

double matern32(double r, double length_scale, double sigma2) {
    const double s = std::numbers::sqrt3 * std::fabs(r) / length_scale;
    return sigma2 * (1.0 + s) * std::exp(-s);
}

namespace {

Eigen::MatrixXd gram(const Eigen::VectorXd& x, const std::vector<MaternKernel>& kernels,
                     double diagonal_add) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double r = std::fabs(x[i] - x[j]);
            double v = 0.0;
            for (const auto& k : kernels) v += matern32(r, k.length_scale, k.variance);
            K(i, j) = v;
            K(j, i) = v;
        }
        K(i, i) += diagonal_add;
    }
    return K;
}

struct Factorization {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
};

// LLT with jitter escalation; empty when even the largest jitter fails.
std::optional<Factorization> factor(const Eigen::VectorXd& x,
                                    const std::vector<MaternKernel>& kernels, double noise) {
    double diag_scale = noise;
    for (const auto& k : kernels) diag_scale += k.variance;
    if (diag_scale <= 0.0) diag_scale = 1.0;

    double jitter = 0.0;
    for (int attempt = 0; attempt < 10; ++attempt) {
        const Eigen::MatrixXd K = gram(x, kernels, noise + jitter);
        Eigen::LLT<Eigen::MatrixXd> llt(K);
        if (llt.info() == Eigen::Success) return Factorization{llt.matrixL(), jitter};
        jitter = jitter == 0.0 ? 1e-12 * diag_scale : jitter * 10.0;
        if (jitter > 1e-4 * diag_scale) break;
    }
    return std::nullopt;
}

double log_marginal_from_factor(const Factorization& f, const Eigen::VectorXd& y,
                                Eigen::VectorXd* weights_out = nullptr) {
    const Eigen::Index n = y.size();
    const auto L = f.lower.triangularView<Eigen::Lower>();
    const Eigen::VectorXd v = L.solve(y);
    if (weights_out) *weights_out = L.transpose().solve(v);
    double log_det_half = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det_half += std::log(f.lower(i, i));
    return -0.5 * v.squaredNorm() - log_det_half -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

// --- Nelder-Mead in R^d over a bounded-log parameterization ---------------

struct SimplexResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
};

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                          const Eigen::VectorXd& start, double step, int max_iters) {
    const Eigen::Index d = start.size();
    std::vector<SimplexResult> simplex(static_cast<std::size_t>(d) + 1);
    simplex[0] = {start, objective(start)};
    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXd v = start;
        v[i] += step;
        simplex[static_cast<std::size_t>(i) + 1] = {v, objective(v)};
    }
    auto by_value = [](const SimplexResult& a, const SimplexResult& b) { return a.f < b.f; };

    for (int iter = 0; iter < max_iters; ++iter) {
        std::stable_sort(simplex.begin(), simplex.end(), by_value);
        const double best = simplex.front().f;
        const double worst = simplex.back().f;
        if (std::isfinite(best) && worst - best < 1e-10 * (1.0 + std::fabs(best))) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i].x;
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex.back().x);
        const double fr = objective(reflected);
        if (fr < simplex.front().f) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex.back().x);
            const double fe = objective(expanded);
            simplex.back() = fe < fr ? SimplexResult{expanded, fe} : SimplexResult{reflected, fr};
            continue;
        }
        if (fr < simplex[simplex.size() - 2].f) {
            simplex.back() = {reflected, fr};
            continue;
        }
        const Eigen::VectorXd contracted = centroid + 0.5 * (simplex.back().x - centroid);
        const double fc = objective(contracted);
        if (fc < simplex.back().f) {
            simplex.back() = {contracted, fc};
            continue;
        }
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            simplex[i].x = simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x);
            simplex[i].f = objective(simplex[i].x);
        }
    }
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    return simplex.front();
}

std::vector<MaternKernel> unpack_kernels(const Eigen::VectorXd& log_params, int m) {
    std::vector<MaternKernel> kernels(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        kernels[static_cast<std::size_t>(j)].length_scale = std::exp(log_params[j]);
        kernels[static_cast<std::size_t>(j)].variance = std::exp(log_params[m + j]);
    }
    return kernels;
}

}  // namespace

double gp_log_marginal(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const std::vector<MaternKernel>& kernels, double noise_variance) {
    if (x.size() != y.size())
        throw LengthMismatch("gp_log_marginal: " + std::to_string(x.size()) + " inputs vs " +
                             std::to_string(y.size()) + " targets");
    if (kernels.empty()) throw PreconditionError("gp_log_marginal requires at least one kernel");
    for (const auto& k : kernels)
        if (!(k.length_scale > 0.0) || !(k.variance > 0.0))
            throw PreconditionError("kernel hyperparameters must be positive");
    if (noise_variance < 0.0) throw PreconditionError("noise variance must be >= 0");
    const auto f = factor(x, kernels, noise_variance);
    if (!f)
        throw NotPositiveDefinite("covariance not positive definite after jitter escalation");
    return log_marginal_from_factor(*f, y);
}

GPModel gp_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n_kernels,
               const GPFitOptions& options) {
    if (x.size() != y.size())
        throw LengthMismatch("gp_fit: " + std::to_string(x.size()) + " inputs vs " +
                             std::to_string(y.size()) + " targets");
    const int n = static_cast<int>(x.size());
    if (n < 3) throw TooShort("gp_fit needs n >= 3, got " + std::to_string(n));
    if (n_kernels < 1) throw PreconditionError("gp_fit requires n_kernels >= 1");
    if (options.n_starts < 1) throw PreconditionError("gp_fit requires n_starts >= 1");

    // Data scales anchor the start distribution.
    const double x_min = x.minCoeff();
    const double x_max = x.maxCoeff();
    double x_range = x_max - x_min;
    if (x_range <= 0.0) x_range = 1.0;
    std::vector<double> xs(x.data(), x.data() + n);
    std::sort(xs.begin(), xs.end());
    double dx_min = x_range;
    for (int i = 1; i < n; ++i) {
        const double gap = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(i) - 1];
        if (gap > 0.0) dx_min = std::min(dx_min, gap);
    }
    double y_var = (y.array() - y.mean()).square().sum() / n;
    if (y_var <= 0.0) y_var = 1e-8;

    const int m = n_kernels;
    const int d = 2 * m + 1;
    auto objective = [&](const Eigen::VectorXd& log_params) -> double {
        for (Eigen::Index i = 0; i < log_params.size(); ++i)
            if (!(log_params[i] > -40.0) || !(log_params[i] < 40.0))
                return std::numeric_limits<double>::infinity();
        const auto kernels = unpack_kernels(log_params, m);
        const double noise = std::exp(log_params[2 * m]);
        const auto f = factor(x, kernels, noise);
        if (!f) return std::numeric_limits<double>::infinity();
        return -log_marginal_from_factor(*f, y);
    };

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) {
        return std::log(lo) + unit(rng) * (std::log(hi) - std::log(lo));
    };

    SimplexResult best;
    for (int s = 0; s < options.n_starts; ++s) {
        Eigen::VectorXd start(d);
        if (s == 0) {
            // Deterministic anchor: geometrically spread length scales,
            // variance split across kernels, a tenth of it in the noise.
            for (int j = 0; j < m; ++j) {
                start[j] = std::log(x_range / std::pow(2.0, j + 1));
                start[m + j] = std::log(y_var / m);
            }
            start[2 * m] = std::log(0.1 * y_var);
        } else {
            const double l_lo = std::max(dx_min, x_range / 50.0);
            for (int j = 0; j < m; ++j) {
                start[j] = log_uniform(l_lo, 2.0 * x_range);
                start[m + j] = log_uniform(0.05 * y_var / m, 4.0 * y_var / m);
            }
            start[2 * m] = log_uniform(1e-4 * y_var, 0.5 * y_var);
        }
        const SimplexResult run = nelder_mead(objective, start, 0.4, options.max_iters);
        if (run.f < best.f) best = run;
    }
    if (!std::isfinite(best.f))
        throw NotPositiveDefinite("no start produced a positive definite covariance");

    GPModel model;
    model.kernels = unpack_kernels(best.x, m);
    model.noise_variance = std::exp(best.x[2 * m]);
    model.train_x = x;
    model.train_y = y;
    gp_refresh(model);
    return model;
}

void gp_refresh(GPModel& model) {
    const auto f = factor(model.train_x, model.kernels, model.noise_variance);
    if (!f)
        throw NotPositiveDefinite("covariance not positive definite after jitter escalation");
    model.chol_lower = f->lower;
    model.jitter = f->jitter;
    model.log_marginal = log_marginal_from_factor(*f, model.train_y, &model.weights);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gp_predict(const GPModel& model,
                                                       const Eigen::VectorXd& x_star) {
    if (model.chol_lower.rows() != model.train_x.size())
        throw PreconditionError("model not fitted (call gp_fit or gp_refresh)");
    const Eigen::Index n = model.train_x.size();
    const Eigen::Index q = x_star.size();
    double prior = 0.0;
    for (const auto& k : model.kernels) prior += k.variance;

    Eigen::VectorXd mean(q), variance(q);
    const auto L = model.chol_lower.triangularView<Eigen::Lower>();
    Eigen::VectorXd kx(n);
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = std::fabs(x_star[i] - model.train_x[j]);
            double v = 0.0;
            for (const auto& k : model.kernels) v += matern32(r, k.length_scale, k.variance);
            kx[j] = v;
        }
        mean[i] = kx.dot(model.weights);
        const Eigen::VectorXd v = L.solve(kx);
        variance[i] = std::max(0.0, prior - v.squaredNorm());
    }
    return {std::move(mean), std::move(variance)};
}

}  // namespace uptake
