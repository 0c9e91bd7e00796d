#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "uptake/nowcast/panel.hpp"
#include "uptake/timeseries.hpp"

namespace uptake {

struct Regularization {
    enum class Kind { none, lasso, elastic_net };

    Kind kind = Kind::none;
    double lambda = 0.0;  // L1 weight
    double eta = 0.0;     // L2 weight

    static Regularization none() { return {}; }
    static Regularization lasso(double lambda);
    static Regularization elastic_net(double lambda, double eta);
};

struct DescentInfo {
    int sweeps = 0;
    double final_change = 0.0;  // max coefficient move in the last sweep
    double objective = 0.0;     // penalized objective at the solution
};

// y_t = mu + sum_i theta_i y_{t-i} + sum_j alpha_j q_{j,t} [+ trend_beta t].
// The trend index t is 0-based from the first training month.
struct LinearNowcastModel {
    double mu = 0.0;
    Eigen::VectorXd theta;  // AR coefficients, lag 1..p
    Eigen::VectorXd alpha;  // exogenous coefficients
    std::optional<double> trend_beta;
    Regularization regularization;

    std::vector<std::string> exog_names;
    SeriesWindow train_window;
    std::optional<DescentInfo> descent;  // set for regularized fits

    int p() const { return static_cast<int>(theta.size()); }
    int k() const { return static_cast<int>(alpha.size()); }
};

// Feature rows [y lag 1..p | exog columns] for t = p..n-1 over the common
// window of y and the panel, with the matching targets. Shared by the AR
// fits and by tree-based models consuming the same design.
struct LagDesign {
    Eigen::MatrixXd X;  // no intercept column
    Eigen::VectorXd y;
    std::vector<std::string> feature_names;
    SeriesWindow aligned_window;
    YearMonth first_target;  // month of row 0
};

LagDesign lag_design(const MonthlyTimeSeries& y, const ExogPanel& exog, int p);

// Least squares of y on [1, q(, t)].
LinearNowcastModel fit_linear_simple(const MonthlyTimeSeries& y, const MonthlyTimeSeries& q,
                                     bool with_trend);

// AR(p) with exogenous regressors. reg = none solves by least squares;
// lasso / elastic_net minimize
//   RSS + lambda (|theta|_1 + |alpha|_1) + eta (|theta|_2^2 + |alpha|_2^2)
// by cyclic coordinate descent. Regressors are standardized internally
// (population standard deviation) and the penalty applies on that scale;
// reported coefficients are on the original scale and the intercept is never
// penalized. Handles p + k > n when regularized.
LinearNowcastModel fit_ar_exog(const MonthlyTimeSeries& y, const ExogPanel& exog, int p,
                               const Regularization& reg);

struct RollingResult {
    // One model per forecastable month, plus a final model trained on the
    // last window (the deployable one; it has no realized prediction yet).
    std::vector<LinearNowcastModel> models;
    std::optional<MonthlyTimeSeries> predictions;  // one-step-ahead
};

// Refit on a trailing window of fixed length before every prediction month.
// window equal to the full history degenerates to the single global fit.
RollingResult refit_rolling(const MonthlyTimeSeries& y, const ExogPanel& exog, int p,
                            const Regularization& reg, int window);

// One-step-ahead predictions over `months`, reading the needed lags of y and
// the exogenous values from the given series.
MonthlyTimeSeries predict_linear(const LinearNowcastModel& model, const MonthlyTimeSeries& y,
                                 const ExogPanel& exog, const SeriesWindow& months);

}  // namespace uptake
