#include "uptake/nowcast/panel.hpp"

#include <set>

namespace uptake {

ExogPanel ExogPanel::make(std::vector<std::string> names, std::vector<MonthlyTimeSeries> series) {
    if (names.size() != series.size())
        throw LengthMismatch("panel has " + std::to_string(names.size()) + " names for " +
                             std::to_string(series.size()) + " series");
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw PreconditionError("panel names must be non-empty");
        if (!seen.insert(n).second) throw PreconditionError("duplicate panel name '" + n + "'");
    }
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].start() != series[0].start() || series[i].size() != series[0].size())
            throw LengthMismatch("panel series '" + names[i] + "' covers " +
                                 series[i].window().str() + ", expected " +
                                 series[0].window().str());
    }
    ExogPanel p;
    p.names_ = std::move(names);
    p.series_ = std::move(series);
    return p;
}

int ExogPanel::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

SeriesWindow ExogPanel::window() const {
    if (empty()) throw PreconditionError("empty panel has no window");
    return series_[0].window();
}

ExogPanel ExogPanel::sliced(const SeriesWindow& w) const {
    ExogPanel p;
    p.names_ = names_;
    p.series_.reserve(series_.size());
    for (const auto& s : series_) p.series_.push_back(slice(s, w));
    return p;
}

}  // namespace uptake
