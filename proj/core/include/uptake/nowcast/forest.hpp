#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "uptake/errors.hpp"

namespace uptake {

struct ForestParams {
    int n_trees = 100;
    int max_depth = 0;  // 0 = unlimited
    int min_leaf = 2;
    int feature_subsample = 0;  // features tried per split; 0 = ceil(sqrt(d))
    bool bootstrap = false;
    std::uint64_t seed = 0;
};

// feature < 0 marks a leaf; value is then the mean of its training targets.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const double* row) const;
};

struct ForestModel {
    ForestParams params;
    int n_features = 0;
    std::vector<RegressionTree> trees;
};

// Variance-reduction regression forest: splits maximize the squared-error
// impurity decrease over a per-split random feature subset; both children
// must keep min_leaf samples. Trees are grown sequentially with per-tree
// generators keyed by (seed, tree index), so refits are bit-identical.
ForestModel forest_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ForestParams& params = {});

// Per-row mean of the trees' leaf values.
Eigen::VectorXd forest_predict(const ForestModel& model, const Eigen::MatrixXd& X);

}  // namespace uptake
