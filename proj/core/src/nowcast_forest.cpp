#include "uptake/nowcast/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace uptake {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    int min_leaf;
    int max_depth;
    int m_try;
    std::mt19937_64 rng;

    std::vector<TreeNode> nodes;
    std::vector<int> indices;
    std::vector<int> feature_pool;
    std::vector<std::pair<double, int>> sorted;  // (value, sample) scratch

    int build(int lo, int hi, int depth) {
        const int count = hi - lo;
        double sum = 0.0, sum_sq = 0.0;
        bool uniform = true;
        const double first = y[indices[static_cast<std::size_t>(lo)]];
        for (int i = lo; i < hi; ++i) {
            const double v = y[indices[static_cast<std::size_t>(i)]];
            sum += v;
            sum_sq += v * v;
            uniform = uniform && v == first;
        }
        const double mean = sum / count;
        const double sse_parent = sum_sq - sum * sum / count;

        const int node_id = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{-1, 0.0, -1, -1, mean});
        if (count < 2 * min_leaf || uniform || (max_depth > 0 && depth >= max_depth))
            return node_id;

        // Random feature subset, then ascending order so equal gains resolve
        // to the lowest feature index.
        const int d = static_cast<int>(X.cols());
        for (int f = 0; f < d; ++f) feature_pool[static_cast<std::size_t>(f)] = f;
        for (int i = 0; i < m_try; ++i) {
            std::uniform_int_distribution<int> pick(i, d - 1);
            std::swap(feature_pool[static_cast<std::size_t>(i)],
                      feature_pool[static_cast<std::size_t>(pick(rng))]);
        }
        std::sort(feature_pool.begin(), feature_pool.begin() + m_try);

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = 0.0;
        for (int fi = 0; fi < m_try; ++fi) {
            const int f = feature_pool[static_cast<std::size_t>(fi)];
            sorted.clear();
            for (int i = lo; i < hi; ++i) {
                const int idx = indices[static_cast<std::size_t>(i)];
                sorted.emplace_back(X(idx, f), idx);
            }
            std::sort(sorted.begin(), sorted.end());

            double left_sum = 0.0, left_sq = 0.0;
            for (int s = 1; s < count; ++s) {
                const double v = y[sorted[static_cast<std::size_t>(s) - 1].second];
                left_sum += v;
                left_sq += v * v;
                if (sorted[static_cast<std::size_t>(s) - 1].first ==
                    sorted[static_cast<std::size_t>(s)].first)
                    continue;
                if (s < min_leaf || count - s < min_leaf) continue;
                const double right_sum = sum - left_sum;
                const double right_sq = sum_sq - left_sq;
                const double sse_left = left_sq - left_sum * left_sum / s;
                const double sse_right = right_sq - right_sum * right_sum / (count - s);
                const double gain = sse_parent - sse_left - sse_right;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (sorted[static_cast<std::size_t>(s) - 1].first +
                                            sorted[static_cast<std::size_t>(s)].first);
                }
            }
        }
        if (best_feature < 0) return node_id;

        const auto begin = indices.begin() + lo;
        const auto end = indices.begin() + hi;
        const auto mid = std::stable_partition(begin, end, [&](int idx) {
            return X(idx, best_feature) <= best_threshold;
        });
        const int split_at = static_cast<int>(mid - indices.begin());

        nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
        nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
        const int left = build(lo, split_at, depth + 1);
        nodes[static_cast<std::size_t>(node_id)].left = left;
        const int right = build(split_at, hi, depth + 1);
        nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }
};

}  // namespace

double RegressionTree::predict(const double* row) const {
    const TreeNode* node = &nodes[0];
    while (!node->leaf())
        node = &nodes[static_cast<std::size_t>(row[node->feature] <= node->threshold
                                                   ? node->left
                                                   : node->right)];
    return node->value;
}

ForestModel forest_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ForestParams& params) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    if (y.size() != n)
        throw LengthMismatch("forest_fit: " + std::to_string(n) + " rows vs " +
                             std::to_string(y.size()) + " targets");
    if (d < 1) throw PreconditionError("forest_fit requires at least one feature");
    if (params.n_trees < 1) throw PreconditionError("forest_fit requires n_trees >= 1");
    if (params.min_leaf < 1) throw PreconditionError("forest_fit requires min_leaf >= 1");
    if (n < 2 * params.min_leaf)
        throw DegenerateTarget("forest_fit needs n >= 2*min_leaf, got n=" + std::to_string(n) +
                               " min_leaf=" + std::to_string(params.min_leaf));

    const int m_try =
        params.feature_subsample > 0
            ? std::min(params.feature_subsample, d)
            : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

    ForestModel model;
    model.params = params;
    model.n_features = d;
    model.trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        TreeBuilder builder{X, y, params.min_leaf, params.max_depth, m_try,
                            std::mt19937_64(mix(params.seed, static_cast<std::uint64_t>(t)))};
        builder.feature_pool.resize(static_cast<std::size_t>(d));
        builder.indices.resize(static_cast<std::size_t>(n));
        if (params.bootstrap) {
            std::uniform_int_distribution<int> pick(0, n - 1);
            for (int i = 0; i < n; ++i)
                builder.indices[static_cast<std::size_t>(i)] = pick(builder.rng);
        } else {
            std::iota(builder.indices.begin(), builder.indices.end(), 0);
        }
        builder.build(0, n, 0);
        model.trees.push_back(RegressionTree{std::move(builder.nodes)});
    }
    return model;
}

Eigen::VectorXd forest_predict(const ForestModel& model, const Eigen::MatrixXd& X) {
    if (static_cast<int>(X.cols()) != model.n_features)
        throw DimensionMismatch("forest_predict: " + std::to_string(X.cols()) +
                                " features, model trained on " +
                                std::to_string(model.n_features));
    const Eigen::Index n = X.rows();
    Eigen::VectorXd out(n);
    Eigen::RowVectorXd row(model.n_features);
    for (Eigen::Index i = 0; i < n; ++i) {
        row = X.row(i);
        double sum = 0.0;
        for (const auto& tree : model.trees) sum += tree.predict(row.data());
        out[i] = sum / static_cast<double>(model.trees.size());
    }
    return out;
}

}  // namespace uptake
