#pragma once

#include <compare>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uptake/errors.hpp"

namespace uptake {

// Calendar month. month is 1-based; the linear index counts months since
// 0000-01 so that subtraction gives whole-month distances.
struct YearMonth {
    int year = 0;
    int month = 1;

    auto operator<=>(const YearMonth&) const = default;

    int index() const { return year * 12 + (month - 1); }
    static YearMonth from_index(int idx);

    YearMonth plus(int months) const { return from_index(index() + months); }

    // "YYYY-MM", zero-padded.
    std::string str() const;
    static YearMonth parse(std::string_view text);
};

inline int months_between(YearMonth from, YearMonth to) { return to.index() - from.index(); }

// Inclusive month range.
struct SeriesWindow {
    YearMonth from;
    YearMonth to;

    SeriesWindow() = default;
    SeriesWindow(YearMonth f, YearMonth t);

    int length() const { return months_between(from, to) + 1; }
    bool contains(YearMonth m) const { return from <= m && m <= to; }

    // "YYYY-MM..YYYY-MM"
    std::string str() const;
    static SeriesWindow parse(std::string_view text);
};

// Contiguous monthly series: one value per month, no gaps by construction.
class MonthlyTimeSeries {
public:
    MonthlyTimeSeries(YearMonth start, std::vector<double> values);

    YearMonth start() const { return start_; }
    YearMonth end() const { return start_.plus(size() - 1); }
    SeriesWindow window() const { return SeriesWindow(start(), end()); }
    int size() const { return static_cast<int>(values_.size()); }

    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    double at(YearMonth m) const;
    YearMonth month_at(int i) const { return start_.plus(i); }

    const std::vector<double>& values() const { return values_; }

private:
    YearMonth start_;
    std::vector<double> values_;
};

// Overlapping sub-series of a and b on their common window. Throws
// EmptyOverlap when the windows are disjoint.
std::pair<MonthlyTimeSeries, MonthlyTimeSeries> align(const MonthlyTimeSeries& a,
                                                      const MonthlyTimeSeries& b);

// Sub-series on w ∩ range(s). Throws EmptyOverlap when they are disjoint.
MonthlyTimeSeries slice(const MonthlyTimeSeries& s, const SeriesWindow& w);

// Centered moving average with half-width h: mean over [t-h, t+h]. The
// window is clipped at the series boundaries, so every output month is the
// mean of the points actually available.
MonthlyTimeSeries rolling_mean(const MonthlyTimeSeries& s, int half_width);

// CSV with header "month,value"; months strictly increasing and gap-free.
MonthlyTimeSeries read_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, const MonthlyTimeSeries& s);

}  // namespace uptake
