#pragma once

#include <string>
#include <vector>

#include "uptake/timeseries.hpp"

namespace uptake {

// Named exogenous regressor series sharing one index range. May be empty
// (pure AR fits).
class ExogPanel {
public:
    ExogPanel() = default;

    static ExogPanel make(std::vector<std::string> names, std::vector<MonthlyTimeSeries> series);

    int k() const { return static_cast<int>(series_.size()); }
    bool empty() const { return series_.empty(); }

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<MonthlyTimeSeries>& series() const { return series_; }
    const MonthlyTimeSeries& at(int j) const { return series_[static_cast<std::size_t>(j)]; }
    const std::string& name(int j) const { return names_[static_cast<std::size_t>(j)]; }

    // Index of the named series, -1 when absent.
    int index_of(const std::string& name) const;

    SeriesWindow window() const;  // requires a non-empty panel
    ExogPanel sliced(const SeriesWindow& w) const;

private:
    std::vector<std::string> names_;
    std::vector<MonthlyTimeSeries> series_;
};

}  // namespace uptake
