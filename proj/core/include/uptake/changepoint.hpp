#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uptake/stats.hpp"
#include "uptake/timeseries.hpp"

namespace uptake {

// Which segment the candidate month itself belongs to. Default: the split
// month opens the "after" period, so before = [start, c) and after = [c, end].
enum class SplitBoundary { starts_after, ends_before };

struct TippingOptions {
    int min_segment = 12;
    SplitBoundary boundary = SplitBoundary::starts_after;
    TailKind tail = TailKind::two_sided;
};

struct ScanPoint {
    YearMonth candidate;
    CorrelationResult before;
    CorrelationResult after;
    double delta = 0.0;
};

struct TippingPointResult {
    YearMonth split;  // first month of the "after" period
    CorrelationResult before;
    CorrelationResult after;
    double delta = 0.0;
    std::vector<ScanPoint> scan;
};

// Scan every candidate month, correlate the two segments, and return the
// candidate maximizing |r_after - r_before|. Ties go to the earliest month.
// Every candidate must leave min_segment months on both sides.
TippingPointResult find_tipping_point(const MonthlyTimeSeries& x, const MonthlyTimeSeries& y,
                                      const SeriesWindow& candidates,
                                      const TippingOptions& options = {});

struct SplitRegressionReport {
    RegressionFit before;
    RegressionFit after;
    SeriesWindow before_window;
    SeriesWindow after_window;
};

// Independent per-segment least squares of y on [1, x]; the split month
// opens the after segment. Both segments need >= 4 points.
SplitRegressionReport split_regression(const MonthlyTimeSeries& x, const MonthlyTimeSeries& y,
                                       YearMonth split, const SeriesWindow& analysis);

// slope * delta_x: the response change implied by moving the regressor by
// delta_x.
double implied_response_change(double slope, double delta_x);

// Plain-text report of the two fits, including the implied response change
// per segment for the given regressor move.
std::string format_split_report(const SplitRegressionReport& report, double delta_x);

// CSV: split_month,r_before,p_before,r_after,p_after,delta
void write_scan_csv(const std::filesystem::path& path, const TippingPointResult& result);

}  // namespace uptake
