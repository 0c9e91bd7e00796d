#pragma once

#include <string>
#include <vector>

#include "uptake/nowcast/panel.hpp"
#include "uptake/timeseries.hpp"

namespace uptake {

// How chosen queries enter the evaluation model: averaged into a single
// z-scored aggregate regressor, or kept as separate regressors.
enum class CombineMode { separate, aggregate };

struct QueryRank {
    std::string name;
    double abs_r = 0.0;
};

struct QuerySelection {
    std::vector<QueryRank> ranking;    // by |r| with y on the train window
    std::vector<std::string> chosen;   // prefix of the ranking kept
    std::vector<double> rmse_path;     // [0] = intercept-only baseline
    double baseline_rmse = 0.0;
    double best_rmse = 0.0;
    bool improved = false;
    CombineMode mode = CombineMode::separate;
};

// Rank queries by |pearson_r| with y on the train window, then add them in
// rank order while the validation RMSE keeps strictly decreasing; the first
// non-improvement stops the walk and the pre-drop subset is returned.
QuerySelection select_queries(const MonthlyTimeSeries& y, const ExogPanel& panel,
                              const SeriesWindow& train, const SeriesWindow& validate,
                              CombineMode mode = CombineMode::separate);

}  // namespace uptake
