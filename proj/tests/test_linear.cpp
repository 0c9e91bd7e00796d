#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "uptake/nowcast.hpp"

using namespace uptake;

namespace {

ExogPanel one_series_panel(const char* name, const MonthlyTimeSeries& s) {
    return ExogPanel::make({name}, {s});
}

struct Problem {
    MonthlyTimeSeries y;
    ExogPanel exog;
};

// y_t = 1.5 + 0.5 y_{t-1} + 2 q_t + noise
Problem ar_with_exog(std::uint64_t seed, int n, double noise_sd) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> q(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    double prev = 3.0;
    for (int t = 0; t < n; ++t) {
        q[static_cast<std::size_t>(t)] = unit(rng);
        prev = 1.5 + 0.5 * prev + 2.0 * q[static_cast<std::size_t>(t)] + noise_sd * unit(rng);
        y[static_cast<std::size_t>(t)] = prev;
    }
    const YearMonth start{2010, 1};
    return Problem{MonthlyTimeSeries(start, y),
                   one_series_panel("q", MonthlyTimeSeries(start, q))};
}

}  // namespace

TEST_CASE("lag design lays out lags then exogenous columns") {
    const MonthlyTimeSeries y(YearMonth{2010, 1}, {1, 2, 3, 4, 5, 6});
    const MonthlyTimeSeries q(YearMonth{2010, 1}, {10, 20, 30, 40, 50, 60});
    const auto design = lag_design(y, one_series_panel("media", q), 2);

    CHECK(design.feature_names == std::vector<std::string>{"lag1", "lag2", "media"});
    CHECK(design.X.rows() == 4);
    CHECK(design.first_target == YearMonth{2010, 3});
    CHECK(design.X(0, 0) == 2.0);  // lag1 of t=2
    CHECK(design.X(0, 1) == 1.0);  // lag2 of t=2
    CHECK(design.X(0, 2) == 30.0);
    CHECK(design.y[0] == 3.0);
    CHECK(design.aligned_window.str() == "2010-01..2010-06");
}

TEST_CASE("simple linear fit recovers exact coefficients") {
    std::vector<double> qv, yv, yt;
    for (int t = 0; t < 24; ++t) {
        const double q = std::sin(t * 0.9) + 0.02 * t;
        qv.push_back(q);
        yv.push_back(3.0 + 2.0 * q);
        yt.push_back(3.0 + 2.0 * q + 0.5 * t);
    }
    const YearMonth start{2011, 1};
    const MonthlyTimeSeries q(start, qv);

    const auto flat = fit_linear_simple(MonthlyTimeSeries(start, yv), q, false);
    CHECK(flat.mu == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(flat.alpha[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_FALSE(flat.trend_beta.has_value());
    CHECK(flat.p() == 0);
    CHECK(flat.exog_names == std::vector<std::string>{"q"});
    CHECK(flat.train_window.str() == "2011-01..2012-12");

    const auto trended = fit_linear_simple(MonthlyTimeSeries(start, yt), q, true);
    CHECK(trended.mu == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(trended.alpha[0] == doctest::Approx(2.0).epsilon(1e-9));
    REQUIRE(trended.trend_beta.has_value());
    CHECK(*trended.trend_beta == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("unregularized ar fit equals the regression oracle") {
    const auto problem = ar_with_exog(41, 60, 0.3);
    const auto model = fit_ar_exog(problem.y, problem.exog, 2, Regularization::none());

    const auto design = lag_design(problem.y, problem.exog, 2);
    Eigen::MatrixXd X(design.X.rows(), design.X.cols() + 1);
    X.col(0).setOnes();
    X.rightCols(design.X.cols()) = design.X;
    const auto expected = oracles::ols_normal_equations(X, design.y);

    CHECK(model.mu == doctest::Approx(expected.coefficients[0]).epsilon(1e-9));
    CHECK(model.theta[0] == doctest::Approx(expected.coefficients[1]).epsilon(1e-9));
    CHECK(model.theta[1] == doctest::Approx(expected.coefficients[2]).epsilon(1e-9));
    CHECK(model.alpha[0] == doctest::Approx(expected.coefficients[3]).epsilon(1e-9));
    CHECK(model.exog_names == std::vector<std::string>{"q"});
    CHECK_FALSE(model.descent.has_value());
}

TEST_CASE("coordinate descent at zero penalties matches least squares") {
    const auto problem = ar_with_exog(42, 72, 0.4);
    const auto exact = fit_ar_exog(problem.y, problem.exog, 3, Regularization::none());
    const auto descent = fit_ar_exog(problem.y, problem.exog, 3,
                                     Regularization::elastic_net(0.0, 0.0));
    CHECK(std::fabs(descent.mu - (exact.mu)) <= 1e-6);
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(descent.theta[i] - (exact.theta[i])) <= 1e-6);
    CHECK(std::fabs(descent.alpha[0] - (exact.alpha[0])) <= 1e-6);
    REQUIRE(descent.descent.has_value());
    CHECK(descent.descent->sweeps >= 1);
}

TEST_CASE("penalties above the threshold zero every slope") {
    const auto problem = ar_with_exog(43, 48, 0.5);
    const int p = 2;
    const auto design = lag_design(problem.y, problem.exog, p);

    // Threshold on the standardized scale the solver works on.
    const auto n = design.y.size();
    const Eigen::VectorXd yc = design.y.array() - design.y.mean();
    double lambda0 = 0.0;
    for (Eigen::Index j = 0; j < design.X.cols(); ++j) {
        const Eigen::VectorXd col = design.X.col(j);
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().sum() / n);
        const Eigen::VectorXd z = (col.array() - mean) / sd;
        lambda0 = std::max(lambda0, 2.0 * std::fabs(z.dot(yc)));
    }

    const auto shrunk =
        fit_ar_exog(problem.y, problem.exog, p, Regularization::lasso(lambda0 * 1.001));
    for (int i = 0; i < p; ++i) CHECK(shrunk.theta[i] == 0.0);
    CHECK(shrunk.alpha[0] == 0.0);
    CHECK(shrunk.mu == doctest::Approx(design.y.mean()).epsilon(1e-12));

    const auto alive =
        fit_ar_exog(problem.y, problem.exog, p, Regularization::lasso(lambda0 * 0.5));
    double live = 0.0;
    for (int i = 0; i < p; ++i) live += std::fabs(alive.theta[i]);
    live += std::fabs(alive.alpha[0]);
    CHECK(live > 0.0);
}

TEST_CASE("elastic net groups duplicated features") {
    const auto problem = ar_with_exog(44, 60, 0.3);
    const auto panel = ExogPanel::make({"a", "b"}, {problem.exog.at(0), problem.exog.at(0)});
    const auto model =
        fit_ar_exog(problem.y, panel, 1, Regularization::elastic_net(0.2, 0.5));
    CHECK(std::fabs(model.alpha[0] - model.alpha[1]) < 1e-6);
}

TEST_CASE("prediction applies lags, exogenous terms and the trend") {
    const auto problem = ar_with_exog(45, 40, 0.2);
    const auto model = fit_ar_exog(problem.y, problem.exog, 1, Regularization::none());

    const YearMonth target{2013, 1};  // within history: lag available
    const auto out =
        predict_linear(model, problem.y, problem.exog, SeriesWindow(target, target));
    const double expected = model.mu + model.theta[0] * problem.y.at(target.plus(-1)) +
                            model.alpha[0] * problem.exog.at(0).at(target);
    CHECK(out.at(target) == doctest::Approx(expected).epsilon(1e-12));

    const auto missing = ExogPanel::make({"other"}, {problem.exog.at(0)});
    CHECK_THROWS_AS(predict_linear(model, problem.y, missing, SeriesWindow(target, target)),
                    DimensionMismatch);
}

TEST_CASE("rolling refits produce one-step predictions per month") {
    const auto problem = ar_with_exog(46, 36, 0.3);
    const int window = 20, p = 1;
    const auto rolling =
        refit_rolling(problem.y, problem.exog, p, Regularization::none(), window);

    REQUIRE(rolling.models.size() == static_cast<std::size_t>(36 - window + 1));
    REQUIRE(rolling.predictions.has_value());
    CHECK(rolling.predictions->start() == problem.y.start().plus(window));
    CHECK(rolling.predictions->size() == 36 - window);

    // Each prediction comes from the model fitted on the trailing window.
    for (std::size_t i = 0; i + 1 < rolling.models.size(); i += 5) {
        const auto& model = rolling.models[i];
        const YearMonth target = problem.y.start().plus(window + static_cast<int>(i));
        CHECK(model.train_window.str() ==
              SeriesWindow(target.plus(-window), target.plus(-1)).str());
        const auto expected =
            predict_linear(model, problem.y, problem.exog, SeriesWindow(target, target));
        CHECK(rolling.predictions->at(target) == doctest::Approx(expected.at(target)));
    }

    // Full-history window: single model, nothing to predict.
    const auto single =
        refit_rolling(problem.y, problem.exog, p, Regularization::none(), 36);
    CHECK(single.models.size() == 1);
    CHECK_FALSE(single.predictions.has_value());
    const auto direct = fit_ar_exog(problem.y, problem.exog, p, Regularization::none());
    CHECK(single.models[0].mu == doctest::Approx(direct.mu));
    CHECK(single.models[0].theta[0] == doctest::Approx(direct.theta[0]));

    CHECK_THROWS_AS(refit_rolling(problem.y, problem.exog, p, Regularization::none(), 10),
                    TooShort);
    CHECK_THROWS_AS(refit_rolling(problem.y, problem.exog, p, Regularization::none(), 37),
                    TooShort);
}

TEST_CASE("degenerate specifications are rejected") {
    const auto problem = ar_with_exog(47, 30, 0.3);
    CHECK_THROWS_AS(fit_ar_exog(problem.y, ExogPanel{}, 0, Regularization::none()),
                    PreconditionError);
    CHECK_THROWS_AS(
        fit_ar_exog(MonthlyTimeSeries(YearMonth{2010, 1}, std::vector<double>(8, 1.0)),
                    ExogPanel{}, 2, Regularization::none()),
        TooShort);
    CHECK_THROWS_AS(Regularization::lasso(-1.0), PreconditionError);
    CHECK_THROWS_AS(Regularization::elastic_net(0.1, -0.5), PreconditionError);
}
