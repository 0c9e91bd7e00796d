#include "uptake/seasonal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace uptake {

ARModel fit_ar(const MonthlyTimeSeries& s, int p) {
    if (p < 1) throw PreconditionError("fit_ar requires p >= 1");
    const int n = s.size();
    // p + max(p, 10) keeps estimation headroom; 2p + 2 keeps the lag matrix
    // taller than wide.
    const int needed = std::max(p + std::max(p, 10), 2 * p + 2);
    if (n < needed)
        throw TooShort("fit_ar(p=" + std::to_string(p) + ") needs " + std::to_string(needed) +
                       " months, got " + std::to_string(n));

    const int rows = n - p;
    Eigen::MatrixXd X(rows, p + 1);
    Eigen::VectorXd y(rows);
    for (int t = p; t < n; ++t) {
        const int row = t - p;
        X(row, 0) = 1.0;
        for (int i = 1; i <= p; ++i) X(row, i) = s[t - i];
        y[row] = s[t];
    }

    const RegressionFit fit = ols(X, y);
    const Eigen::VectorXd resid = y - X * fit.coefficients;
    return ARModel{
        p, fit.coefficients[0], fit.coefficients.tail(p),
        MonthlyTimeSeries(s.start().plus(p),
                          std::vector<double>(resid.data(), resid.data() + resid.size()))};
}

std::vector<double> acf(const MonthlyTimeSeries& s, int max_lag) {
    if (max_lag < 1) throw PreconditionError("acf requires max_lag >= 1");
    const int n = s.size();
    if (max_lag >= n - 2)
        throw TooShort("acf(max_lag=" + std::to_string(max_lag) + ") needs length > " +
                       std::to_string(max_lag + 2) + ", got " + std::to_string(n));
    const auto& v = s.values();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(max_lag));
    for (int k = 1; k <= max_lag; ++k) {
        const auto m = static_cast<std::size_t>(n - k);
        out.push_back(pearson_r({v.data(), m}, {v.data() + k, m}).r);
    }
    return out;
}

std::vector<double> pacf(const MonthlyTimeSeries& s, int max_lag) {
    if (max_lag < 1) throw PreconditionError("pacf requires max_lag >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(max_lag));
    for (int k = 1; k <= max_lag; ++k) out.push_back(fit_ar(s, k).coefficients[k - 1]);
    return out;
}

MonthlyTimeSeries deseasonalize(const MonthlyTimeSeries& s, int p) {
    return fit_ar(s, p).residuals;
}

CrossCorrelation cross_correlation(const MonthlyTimeSeries& x, const MonthlyTimeSeries& y,
                                   int max_lag, DfConvention df) {
    if (max_lag < 1) throw PreconditionError("cross_correlation requires max_lag >= 1");
    const auto [ax, ay] = align(x, y);
    const int n = ax.size();
    if (n - max_lag < 10)
        throw TooShort("cross_correlation(max_lag=" + std::to_string(max_lag) + ") needs " +
                       std::to_string(max_lag + 10) + " aligned months, got " +
                       std::to_string(n));

    const int sub = df == DfConvention::n_minus_1 ? 1 : 2;
    CrossCorrelation out;
    out.max_lag = max_lag;
    out.r_at_lag.reserve(static_cast<std::size_t>(2 * max_lag + 1));
    out.p_at_lag.reserve(static_cast<std::size_t>(2 * max_lag + 1));
    const auto& vx = ax.values();
    const auto& vy = ay.values();
    for (int k = -max_lag; k <= max_lag; ++k) {
        const auto m = static_cast<std::size_t>(n - std::abs(k));
        const double* px = vx.data() + std::max(0, -k);
        const double* py = vy.data() + std::max(0, k);
        const double r = pearson_r({px, m}, {py, m}).r;
        const int dof = static_cast<int>(m) - sub;
        double p;
        if (std::fabs(r) >= 1.0)
            p = 0.0;
        else
            p = t_sf(r * std::sqrt(dof / (1.0 - r * r)), dof);
        out.r_at_lag.push_back(r);
        out.p_at_lag.push_back(p);
    }

    const int dof0 = n - sub;
    const double tc = t_critical(0.01, dof0);
    out.ci99 = tc / std::sqrt(dof0 + tc * tc);
    return out;
}

void write_ccf_csv(const std::filesystem::path& path, const CrossCorrelation& ccf) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << "lag,r,p,significant99\n";
    char buf[96];
    for (int k = -ccf.max_lag; k <= ccf.max_lag; ++k) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d", k, ccf.r(k), ccf.p(k),
                      ccf.significant99(k) ? 1 : 0);
        out << buf << '\n';
    }
    if (!out) throw ParseError("write failed: " + path.string());
}

}  // namespace uptake
