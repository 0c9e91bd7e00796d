#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "uptake/model_json.hpp"
#include "uptake/nowcast/gp.hpp"

using namespace uptake;

namespace {

Eigen::VectorXd linspace(int n, double step = 1.0) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = i * step;
    return x;
}

// Draw y ~ N(0, K + noise I) through the model's own gram construction kept
// out of the loop: build K directly from the kernel formula.
Eigen::VectorXd sample_gp(std::uint64_t seed, const Eigen::VectorXd& x, double l, double s2,
                          double noise) {
    const auto n = x.size();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            K(i, j) = oracles::matern32_direct(x[i] - x[j], l, s2) + (i == j ? noise : 0.0);
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(K).matrixL();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = unit(rng);
    return L * z;
}

}  // namespace

TEST_CASE("matern kernel value and limits") {
    CHECK(matern32(0.0, 5.0, 2.5) == doctest::Approx(2.5));
    CHECK(matern32(-3.0, 5.0, 2.5) == doctest::Approx(matern32(3.0, 5.0, 2.5)));
    CHECK(matern32(1e6, 5.0, 2.5) < 1e-10);
    const double s = std::sqrt(3.0) * 2.0 / 5.0;
    CHECK(matern32(2.0, 5.0, 2.5) == doctest::Approx(2.5 * (1 + s) * std::exp(-s)).epsilon(1e-14));
}

TEST_CASE("log marginal matches the dense oracle") {
    const auto x = linspace(20, 1.7);
    const auto y = sample_gp(11, x, 6.0, 2.0, 0.1);
    std::vector<double> xs(x.data(), x.data() + x.size());
    std::vector<double> ys(y.data(), y.data() + y.size());

    const std::vector<MaternKernel> kernels{{6.0, 2.0}};
    const double got = gp_log_marginal(x, y, kernels, 0.1);
    const double expected = oracles::gp_lml_dense(xs, ys, {{6.0, 2.0}}, 0.1);
    CHECK(got == doctest::Approx(expected).epsilon(1e-10));

    const std::vector<MaternKernel> two{{3.0, 1.0}, {40.0, 5.0}};
    const double got2 = gp_log_marginal(x, y, two, 0.05);
    const double expected2 = oracles::gp_lml_dense(xs, ys, {{3.0, 1.0}, {40.0, 5.0}}, 0.05);
    CHECK(got2 == doctest::Approx(expected2).epsilon(1e-10));

    CHECK_THROWS_AS(gp_log_marginal(x, y, {{-1.0, 2.0}}, 0.1), PreconditionError);
    CHECK_THROWS_AS(gp_log_marginal(x, y, {{1.0, -2.0}}, 0.1), PreconditionError);
    CHECK_THROWS_AS(gp_log_marginal(x, y, {}, 0.1), PreconditionError);
}

TEST_CASE("noise-free posterior interpolates the training targets") {
    const auto x = linspace(15, 2.0);
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) y[i] = std::sin(0.3 * x[i]) + 0.1 * x[i];

    GPModel model;
    model.kernels = {{4.0, 1.5}};
    model.noise_variance = 0.0;
    model.train_x = x;
    model.train_y = y;
    gp_refresh(model);

    const auto [mean, variance] = gp_predict(model, x);
    for (int i = 0; i < 15; ++i) {
        CHECK(std::fabs(mean[i] - (y[i])) <= 1e-8);
        CHECK(variance[i] >= 0.0);
        CHECK(variance[i] < 1e-6);
    }

    // Away from the data the variance approaches the prior.
    Eigen::VectorXd far(1);
    far[0] = 1e4;
    const auto [far_mean, far_var] = gp_predict(model, far);
    CHECK(std::fabs(far_mean[0] - (0.0)) <= 1e-6);
    CHECK(far_var[0] == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("fit is deterministic in the seed and finds a good optimum") {
    const auto x = linspace(40, 1.0);
    const auto y = sample_gp(29, x, 8.0, 4.0, 0.05);

    GPFitOptions opts;
    opts.seed = 123;
    const auto a = gp_fit(x, y, 1, opts);
    const auto b = gp_fit(x, y, 1, opts);
    CHECK(a.kernels[0].length_scale == b.kernels[0].length_scale);
    CHECK(a.kernels[0].variance == b.kernels[0].variance);
    CHECK(a.noise_variance == b.noise_variance);
    CHECK(a.log_marginal == b.log_marginal);

    // The optimum should be at least as good as the generating parameters.
    const double truth_lml = gp_log_marginal(x, y, {{8.0, 4.0}}, 0.05);
    CHECK(a.log_marginal >= truth_lml - 1e-6);
}

TEST_CASE("posterior variance shrinks near observations") {
    const auto x = linspace(12, 3.0);
    const auto y = sample_gp(31, x, 5.0, 2.0, 0.1);
    GPModel model;
    model.kernels = {{5.0, 2.0}};
    model.noise_variance = 0.1;
    model.train_x = x;
    model.train_y = y;
    gp_refresh(model);

    Eigen::VectorXd probe(2);
    probe[0] = x[5];         // on a training point
    probe[1] = x[11] + 40.0;  // far extrapolation
    const auto [mean, variance] = gp_predict(model, probe);
    CHECK(variance[0] < variance[1]);
    CHECK(variance[1] <= 2.0 + 1e-9);
}

TEST_CASE("serialized model predicts identically after reload") {
    const auto x = linspace(25, 1.3);
    const auto y = sample_gp(37, x, 7.0, 3.0, 0.2);
    GPFitOptions opts;
    opts.seed = 9;
    opts.n_starts = 4;
    const auto model = gp_fit(x, y, 2, opts);

    const auto reloaded = parse_gp_model(serialize_model(model));
    CHECK(reloaded.kernels.size() == model.kernels.size());
    CHECK(reloaded.log_marginal == model.log_marginal);

    Eigen::VectorXd probe = linspace(50, 0.7);
    const auto [m1, v1] = gp_predict(model, probe);
    const auto [m2, v2] = gp_predict(reloaded, probe);
    for (int i = 0; i < 50; ++i) {
        CHECK(m1[i] == m2[i]);
        CHECK(v1[i] == v2[i]);
    }
}
