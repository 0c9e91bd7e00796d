#include "uptake/changepoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace uptake {

TippingPointResult find_tipping_point(const MonthlyTimeSeries& x, const MonthlyTimeSeries& y,
                                      const SeriesWindow& candidates,
                                      const TippingOptions& options) {
    if (options.min_segment < 3) throw PreconditionError("min_segment must be >= 3");
    const auto [ax, ay] = align(x, y);
    const int n = ax.size();
    const YearMonth start = ax.start();

    TippingPointResult result{};
    result.scan.reserve(static_cast<std::size_t>(candidates.length()));
    bool found = false;
    for (YearMonth c = candidates.from; c <= candidates.to; c = c.plus(1)) {
        // b_len months belong to "before"; the candidate month itself opens
        // "after" unless the boundary flag moves it.
        int b_len = months_between(start, c);
        if (options.boundary == SplitBoundary::ends_before) b_len += 1;
        const int a_len = n - b_len;
        if (b_len < options.min_segment || a_len < options.min_segment)
            throw SegmentTooShort("candidate " + c.str() + " leaves segments of " +
                                  std::to_string(b_len) + " and " + std::to_string(a_len) +
                                  " months (min_segment " +
                                  std::to_string(options.min_segment) + ")");

        const auto& vx = ax.values();
        const auto& vy = ay.values();
        ScanPoint point;
        point.candidate = c;
        try {
            point.before =
                pearson_r({vx.data(), static_cast<std::size_t>(b_len)},
                          {vy.data(), static_cast<std::size_t>(b_len)}, options.tail);
            point.after =
                pearson_r({vx.data() + b_len, static_cast<std::size_t>(a_len)},
                          {vy.data() + b_len, static_cast<std::size_t>(a_len)}, options.tail);
        } catch (const ConstantInput& e) {
            throw ConstantSegment("candidate " + c.str() + ": " + e.what());
        }
        point.delta = std::fabs(point.after.r - point.before.r);
        result.scan.push_back(point);

        if (!found || point.delta > result.delta) {
            found = true;
            result.split =
                options.boundary == SplitBoundary::ends_before ? c.plus(1) : c;
            result.before = point.before;
            result.after = point.after;
            result.delta = point.delta;
        }
    }
    if (!found) throw PreconditionError("candidate window " + candidates.str() + " is empty");
    return result;
}

SplitRegressionReport split_regression(const MonthlyTimeSeries& x, const MonthlyTimeSeries& y,
                                       YearMonth split, const SeriesWindow& analysis) {
    const auto [ax0, ay0] = align(x, y);
    const auto ax = slice(ax0, analysis);
    const auto ay = slice(ay0, analysis);
    const YearMonth from = ax.start();
    const YearMonth to = ax.end();
    if (!(from < split && split <= to))
        throw SegmentTooShort("split " + split.str() + " does not divide " +
                              SeriesWindow(from, to).str());

    const int b_len = months_between(from, split);
    const int a_len = ax.size() - b_len;
    if (b_len < 4 || a_len < 4)
        throw SegmentTooShort("split " + split.str() + " leaves segments of " +
                              std::to_string(b_len) + " and " + std::to_string(a_len) +
                              " months (need 4)");

    auto fit_segment = [&](int offset, int len) {
        Eigen::MatrixXd X(len, 2);
        Eigen::VectorXd yv(len);
        for (int i = 0; i < len; ++i) {
            X(i, 0) = 1.0;
            X(i, 1) = ax[offset + i];
            yv[i] = ay[offset + i];
        }
        return ols(X, yv);
    };

    SplitRegressionReport report{fit_segment(0, b_len), fit_segment(b_len, a_len),
                                 SeriesWindow(from, split.plus(-1)), SeriesWindow(split, to)};
    return report;
}

double implied_response_change(double slope, double delta_x) { return slope * delta_x; }

std::string format_split_report(const SplitRegressionReport& report, double delta_x) {
    auto line = [&](const char* label, const RegressionFit& fit, const SeriesWindow& w) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "%-7s %s  slope=%.6g p=%.3g R2=%.3g  implied dy at dx=%g: %+.2f\n", label,
                      w.str().c_str(), fit.coefficients[1], fit.p_values[1], fit.r_squared,
                      delta_x, implied_response_change(fit.coefficients[1], delta_x));
        return std::string(buf);
    };
    return line("before", report.before, report.before_window) +
           line("after", report.after, report.after_window);
}

void write_scan_csv(const std::filesystem::path& path, const TippingPointResult& result) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << "split_month,r_before,p_before,r_after,p_after,delta\n";
    char buf[160];
    for (const auto& point : result.scan) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g",
                      point.candidate.str().c_str(), point.before.r, point.before.p_value,
                      point.after.r, point.after.p_value, point.delta);
        out << buf << '\n';
    }
    if (!out) throw ParseError("write failed: " + path.string());
}

}  // namespace uptake
