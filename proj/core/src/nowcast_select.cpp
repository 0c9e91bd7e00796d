#include "uptake/nowcast/select.hpp"

#include <algorithm>
#include <cmath>

#include "uptake/stats.hpp"

namespace uptake {

namespace {

bool covers(const MonthlyTimeSeries& s, const SeriesWindow& w) {
    return s.window().contains(w.from) && s.window().contains(w.to);
}

double rmse(const Eigen::VectorXd& err) { return std::sqrt(err.squaredNorm() / err.size()); }

}  // namespace

QuerySelection select_queries(const MonthlyTimeSeries& y, const ExogPanel& panel,
                              const SeriesWindow& train, const SeriesWindow& validate,
                              CombineMode mode) {
    if (panel.empty()) throw PreconditionError("select_queries needs a non-empty panel");
    if (train.length() < 12 || validate.length() < 12)
        throw TooShort("select_queries needs >= 12 months per window, got " +
                       std::to_string(train.length()) + " and " +
                       std::to_string(validate.length()));
    if (!(train.to < validate.from || validate.to < train.from))
        throw PreconditionError("train " + train.str() + " and validation " + validate.str() +
                                " overlap");
    if (!covers(y, train) || !covers(y, validate))
        throw MissingMonth("target does not cover " + train.str() + " and " + validate.str());
    for (const auto& s : panel.series())
        if (!covers(s, train) || !covers(s, validate))
            throw MissingMonth("panel does not cover " + train.str() + " and " + validate.str());

    const MonthlyTimeSeries y_train = slice(y, train);
    const MonthlyTimeSeries y_val = slice(y, validate);
    const int n_train = y_train.size();
    const int n_val = y_val.size();

    QuerySelection out;
    out.mode = mode;
    out.ranking.reserve(static_cast<std::size_t>(panel.k()));
    std::vector<int> order(static_cast<std::size_t>(panel.k()));
    for (int j = 0; j < panel.k(); ++j) {
        const auto q_train = slice(panel.at(j), train);
        const double r = pearson_r(q_train.values(), y_train.values()).r;
        out.ranking.push_back({panel.name(j), std::fabs(r)});
        order[static_cast<std::size_t>(j)] = j;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ra = out.ranking[static_cast<std::size_t>(a)];
        const auto& rb = out.ranking[static_cast<std::size_t>(b)];
        if (ra.abs_r != rb.abs_r) return ra.abs_r > rb.abs_r;
        return ra.name < rb.name;
    });
    {
        std::vector<QueryRank> sorted;
        sorted.reserve(out.ranking.size());
        for (int j : order) sorted.push_back(out.ranking[static_cast<std::size_t>(j)]);
        out.ranking = std::move(sorted);
    }

    const double y_mean = Eigen::Map<const Eigen::VectorXd>(y_train.values().data(), n_train).mean();
    {
        Eigen::VectorXd err(n_val);
        for (int t = 0; t < n_val; ++t) err[t] = y_val[t] - y_mean;
        out.baseline_rmse = rmse(err);
    }
    out.rmse_path.push_back(out.baseline_rmse);

    // Regressor columns per candidate prefix, in both windows.
    auto query_values = [&](int rank_pos, const SeriesWindow& w) {
        const int j = panel.index_of(out.ranking[static_cast<std::size_t>(rank_pos)].name);
        return slice(panel.at(j), w);
    };

    double prev = out.baseline_rmse;
    for (int i = 1; i <= panel.k(); ++i) {
        Eigen::MatrixXd X_train, X_val;
        if (mode == CombineMode::separate) {
            if (n_train <= i + 1) break;  // no residual degrees of freedom left
            X_train.resize(n_train, i + 1);
            X_val.resize(n_val, i + 1);
            X_train.col(0).setOnes();
            X_val.col(0).setOnes();
            for (int c = 0; c < i; ++c) {
                const auto qt = query_values(c, train);
                const auto qv = query_values(c, validate);
                for (int t = 0; t < n_train; ++t) X_train(t, c + 1) = qt[t];
                for (int t = 0; t < n_val; ++t) X_val(t, c + 1) = qv[t];
            }
        } else {
            // Ginsberg-style aggregate: mean of the train-window z-scores.
            X_train = Eigen::MatrixXd::Zero(n_train, 2);
            X_val = Eigen::MatrixXd::Zero(n_val, 2);
            X_train.col(0).setOnes();
            X_val.col(0).setOnes();
            for (int c = 0; c < i; ++c) {
                const auto qt = query_values(c, train);
                const auto qv = query_values(c, validate);
                const auto map =
                    Eigen::Map<const Eigen::VectorXd>(qt.values().data(), n_train);
                const double m = map.mean();
                const double sd = std::sqrt((map.array() - m).square().sum() / n_train);
                for (int t = 0; t < n_train; ++t) X_train(t, 1) += (qt[t] - m) / sd / i;
                for (int t = 0; t < n_val; ++t) X_val(t, 1) += (qv[t] - m) / sd / i;
            }
        }

        Eigen::VectorXd target(n_train);
        for (int t = 0; t < n_train; ++t) target[t] = y_train[t];
        RegressionFit fit;
        try {
            fit = ols(X_train, target);
        } catch (const RankDeficient&) {
            break;  // adding this query made the design collinear; stop here
        }
        Eigen::VectorXd err = X_val * fit.coefficients;
        for (int t = 0; t < n_val; ++t) err[t] -= y_val[t];
        const double score = rmse(err);
        out.rmse_path.push_back(score);
        if (score >= prev) break;
        prev = score;
        out.chosen.push_back(out.ranking[static_cast<std::size_t>(i - 1)].name);
    }

    out.best_rmse = prev;
    out.improved = !out.chosen.empty() && out.best_rmse < out.baseline_rmse;
    return out;
}

}  // namespace uptake
