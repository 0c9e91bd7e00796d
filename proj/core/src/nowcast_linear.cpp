#include "uptake/nowcast/linear.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uptake/stats.hpp"

namespace uptake {

Regularization Regularization::lasso(double lambda) {
    if (lambda < 0.0) throw PreconditionError("lasso requires lambda >= 0");
    return {Kind::lasso, lambda, 0.0};
}

Regularization Regularization::elastic_net(double lambda, double eta) {
    if (lambda < 0.0 || eta < 0.0)
        throw PreconditionError("elastic_net requires lambda, eta >= 0");
    return {Kind::elastic_net, lambda, eta};
}

namespace {

struct AlignedProblem {
    MonthlyTimeSeries y;
    ExogPanel exog;
};

AlignedProblem align_problem(const MonthlyTimeSeries& y, const ExogPanel& exog) {
    if (exog.empty()) return {y, exog};
    const YearMonth from = std::max(y.start(), exog.window().from);
    const YearMonth to = std::min(y.end(), exog.window().to);
    if (to < from)
        throw EmptyOverlap("target " + y.window().str() + " and panel " +
                           exog.window().str() + " share no months");
    const SeriesWindow w(from, to);
    return {slice(y, w), exog.sliced(w)};
}

double soft_threshold(double value, double threshold) {
    if (value > threshold) return value - threshold;
    if (value < -threshold) return value + threshold;
    return 0.0;
}

// Cyclic coordinate descent on centered target and standardized columns.
// Zero-variance columns keep coefficient 0. Returns standardized-scale
// coefficients.
Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& Z, const Eigen::VectorXd& yc,
                                   const Eigen::VectorXd& col_sq, double lambda, double eta,
                                   DescentInfo& info) {
    const Eigen::Index m = Z.cols();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd residual = yc;

    const int max_sweeps = 10000;
    const double scale = std::max(1.0, std::sqrt(yc.squaredNorm() / std::max<double>(1, yc.size())));
    const double tol = 1e-11 * scale;
    double prev_objective = residual.squaredNorm();

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (col_sq[j] <= 0.0) continue;
            const double rho = Z.col(j).dot(residual) + beta[j] * col_sq[j];
            const double updated = soft_threshold(rho, lambda / 2.0) / (col_sq[j] + eta);
            const double change = updated - beta[j];
            if (change != 0.0) {
                residual -= change * Z.col(j);
                beta[j] = updated;
                max_change = std::max(max_change, std::fabs(change));
            }
        }
        const double objective = residual.squaredNorm() + lambda * beta.lpNorm<1>() +
                                 eta * beta.squaredNorm();
        if (objective > prev_objective + 1e-9 * std::max(1.0, std::fabs(prev_objective)))
            throw NumericError("coordinate descent objective increased from " +
                               std::to_string(prev_objective) + " to " +
                               std::to_string(objective));
        prev_objective = objective;
        if (max_change < tol) {
            info.sweeps = sweep;
            info.final_change = max_change;
            info.objective = objective;
            return beta;
        }
        info.sweeps = sweep;
        info.final_change = max_change;
        info.objective = objective;
    }
    throw NotConverged("coordinate descent: " + std::to_string(max_sweeps) +
                       " sweeps, last max coefficient change " +
                       std::to_string(info.final_change));
}

}  // namespace

LagDesign lag_design(const MonthlyTimeSeries& y, const ExogPanel& exog, int p) {
    if (p < 0) throw PreconditionError("lag_design requires p >= 0");
    const AlignedProblem problem = align_problem(y, exog);
    const int n = problem.y.size();
    const int k = problem.exog.k();
    if (n - p < 1)
        throw TooShort("lag order " + std::to_string(p) + " leaves no rows in " +
                       std::to_string(n) + " months");

    LagDesign design;
    design.aligned_window = problem.y.window();
    design.first_target = problem.y.start().plus(p);
    const int rows = n - p;
    design.X.resize(rows, p + k);
    design.y.resize(rows);
    for (int t = p; t < n; ++t) {
        const int row = t - p;
        for (int i = 1; i <= p; ++i) design.X(row, i - 1) = problem.y[t - i];
        for (int j = 0; j < k; ++j) design.X(row, p + j) = problem.exog.at(j)[t];
        design.y[row] = problem.y[t];
    }
    design.feature_names.reserve(static_cast<std::size_t>(p + k));
    for (int i = 1; i <= p; ++i) design.feature_names.push_back("lag" + std::to_string(i));
    for (int j = 0; j < k; ++j) design.feature_names.push_back(problem.exog.name(j));
    return design;
}

LinearNowcastModel fit_linear_simple(const MonthlyTimeSeries& y, const MonthlyTimeSeries& q,
                                     bool with_trend) {
    const auto [ay, aq] = align(y, q);
    const int n = ay.size();
    const int need = with_trend ? 5 : 4;
    if (n < need)
        throw TooFewRows("fit_linear_simple needs " + std::to_string(need) + " months, got " +
                         std::to_string(n));

    const int cols = with_trend ? 3 : 2;
    Eigen::MatrixXd X(n, cols);
    Eigen::VectorXd target(n);
    for (int t = 0; t < n; ++t) {
        X(t, 0) = 1.0;
        X(t, 1) = aq[t];
        if (with_trend) X(t, 2) = t;
        target[t] = ay[t];
    }
    const RegressionFit fit = ols(X, target);

    LinearNowcastModel model;
    model.mu = fit.coefficients[0];
    model.theta.resize(0);
    model.alpha = fit.coefficients.segment(1, 1);
    if (with_trend) model.trend_beta = fit.coefficients[2];
    model.exog_names = {"q"};
    model.train_window = ay.window();
    return model;
}

LinearNowcastModel fit_ar_exog(const MonthlyTimeSeries& y, const ExogPanel& exog, int p,
                               const Regularization& reg) {
    if (p < 0) throw PreconditionError("fit_ar_exog requires p >= 0");
    if (p == 0 && exog.empty()) throw PreconditionError("fit_ar_exog needs lags or exogenous series");
    LagDesign design = lag_design(y, exog, p);
    const int n = static_cast<int>(design.y.size()) + p;
    if (n - p < 10)
        throw TooShort("fit_ar_exog(p=" + std::to_string(p) + ") needs " +
                       std::to_string(p + 10) + " months, got " + std::to_string(n));

    Eigen::MatrixXd& X = design.X;
    Eigen::VectorXd& target = design.y;
    const int k = static_cast<int>(X.cols()) - p;

    LinearNowcastModel model;
    model.regularization = reg;
    model.exog_names = std::vector<std::string>(design.feature_names.begin() + p,
                                                design.feature_names.end());
    model.train_window = design.aligned_window;

    if (reg.kind == Regularization::Kind::none) {
        Eigen::MatrixXd Xi(X.rows(), X.cols() + 1);
        Xi.col(0).setOnes();
        Xi.rightCols(X.cols()) = X;
        const RegressionFit fit = ols(Xi, target);
        model.mu = fit.coefficients[0];
        model.theta = fit.coefficients.segment(1, p);
        model.alpha = fit.coefficients.segment(1 + p, k);
        return model;
    }

    // Standardize to zero mean, unit population variance per column.
    const Eigen::Index rows = X.rows();
    const Eigen::Index m = X.cols();
    Eigen::VectorXd mean(m), sd(m), col_sq(m);
    Eigen::MatrixXd Z(rows, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        mean[j] = X.col(j).mean();
        const Eigen::VectorXd centered = X.col(j).array() - mean[j];
        const double var = centered.squaredNorm() / static_cast<double>(rows);
        sd[j] = std::sqrt(var);
        if (sd[j] > 0.0) {
            Z.col(j) = centered / sd[j];
            col_sq[j] = static_cast<double>(rows);
        } else {
            Z.col(j).setZero();
            col_sq[j] = 0.0;
        }
    }
    const double ymean = target.mean();
    const Eigen::VectorXd yc = target.array() - ymean;

    DescentInfo info;
    const Eigen::VectorXd beta = coordinate_descent(Z, yc, col_sq, reg.lambda, reg.eta, info);

    Eigen::VectorXd original(m);
    double mu = ymean;
    for (Eigen::Index j = 0; j < m; ++j) {
        original[j] = sd[j] > 0.0 ? beta[j] / sd[j] : 0.0;
        mu -= original[j] * mean[j];
    }
    model.mu = mu;
    model.theta = original.head(p);
    model.alpha = original.tail(k);
    model.descent = info;
    return model;
}

MonthlyTimeSeries predict_linear(const LinearNowcastModel& model, const MonthlyTimeSeries& y,
                                 const ExogPanel& exog, const SeriesWindow& months) {
    std::vector<int> exog_index;
    exog_index.reserve(model.exog_names.size());
    for (const auto& name : model.exog_names) {
        const int idx = exog.index_of(name);
        if (idx < 0) throw DimensionMismatch("panel lacks series '" + name + "'");
        exog_index.push_back(idx);
    }

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(months.length()));
    for (YearMonth t = months.from; t <= months.to; t = t.plus(1)) {
        double v = model.mu;
        for (int i = 1; i <= model.p(); ++i) v += model.theta[i - 1] * y.at(t.plus(-i));
        for (std::size_t j = 0; j < exog_index.size(); ++j)
            v += model.alpha[static_cast<Eigen::Index>(j)] * exog.at(exog_index[j]).at(t);
        if (model.trend_beta)
            v += *model.trend_beta * months_between(model.train_window.from, t);
        values.push_back(v);
    }
    return MonthlyTimeSeries(months.from, std::move(values));
}

RollingResult refit_rolling(const MonthlyTimeSeries& y, const ExogPanel& exog, int p,
                            const Regularization& reg, int window) {
    const AlignedProblem problem = align_problem(y, exog);
    const int n = problem.y.size();
    if (window < p + 10)
        throw TooShort("rolling window " + std::to_string(window) + " below minimum " +
                       std::to_string(p + 10));
    if (window > n)
        throw TooShort("rolling window " + std::to_string(window) + " exceeds the " +
                       std::to_string(n) + "-month history");

    RollingResult result;
    std::vector<double> predictions;
    const YearMonth start = problem.y.start();
    for (int t = window; t <= n; ++t) {
        const SeriesWindow train(start.plus(t - window), start.plus(t - 1));
        LinearNowcastModel m =
            fit_ar_exog(slice(problem.y, train),
                        problem.exog.empty() ? problem.exog : problem.exog.sliced(train), p, reg);
        if (t < n) {
            const YearMonth target = start.plus(t);
            predictions.push_back(
                predict_linear(m, problem.y, problem.exog, SeriesWindow(target, target))[0]);
        }
        result.models.push_back(std::move(m));
    }
    if (!predictions.empty())
        result.predictions = MonthlyTimeSeries(start.plus(window), std::move(predictions));
    return result;
}

}  // namespace uptake
