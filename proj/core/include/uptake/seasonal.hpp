#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "uptake/stats.hpp"
#include "uptake/timeseries.hpp"

namespace uptake {

struct ARModel {
    int p = 0;
    double intercept = 0.0;
    Eigen::VectorXd coefficients;  // lag 1..p
    MonthlyTimeSeries residuals;   // starts p months after the fitted series
};

// Conditional least squares: regress s_t on [1, s_{t-1}, ..., s_{t-p}] over
// t = p..n-1. Keeps the PACF identity exact: pacf(k) is the last coefficient
// of fit_ar(s, k).
ARModel fit_ar(const MonthlyTimeSeries& s, int p);

// Entry k-1 holds pearson_r(s_t, s_{t+k}).r for k = 1..max_lag.
std::vector<double> acf(const MonthlyTimeSeries& s, int max_lag);

// Entry k-1 holds the lag-k coefficient of fit_ar(s, k) for k = 1..max_lag.
std::vector<double> pacf(const MonthlyTimeSeries& s, int max_lag);

// Residuals of fit_ar(s, p).
MonthlyTimeSeries deseasonalize(const MonthlyTimeSeries& s, int p);

// Degrees of freedom for lagged-correlation significance. The source method
// states n-1; the standard Pearson test uses n-2. Both are exposed and the
// n-1 form is the default for reproduction fidelity.
enum class DfConvention { n_minus_1, n_minus_2 };

struct CrossCorrelation {
    int max_lag = 0;
    std::vector<double> r_at_lag;  // lag -L..+L at index lag+L
    std::vector<double> p_at_lag;
    double ci99 = 0.0;  // |r| threshold for 99% two-sided significance

    double r(int lag) const { return r_at_lag[static_cast<std::size_t>(lag + max_lag)]; }
    double p(int lag) const { return p_at_lag[static_cast<std::size_t>(lag + max_lag)]; }
    bool significant99(int lag) const { return std::abs(r(lag)) > ci99; }
};

// r at lag k pairs x_t with y_{t+k} (positive lag: x leads y) over the
// n-|k| overlapping points. ci99 is computed at the lag-0 sample size.
CrossCorrelation cross_correlation(const MonthlyTimeSeries& x, const MonthlyTimeSeries& y,
                                   int max_lag, DfConvention df = DfConvention::n_minus_1);

// CSV: lag,r,p,significant99
void write_ccf_csv(const std::filesystem::path& path, const CrossCorrelation& ccf);

}  // namespace uptake
