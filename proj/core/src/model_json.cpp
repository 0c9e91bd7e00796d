#include "uptake/model_json.hpp"

#include <json.hpp>

namespace uptake {

namespace {

using json = nlohmann::ordered_json;

json vec_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vec_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    Eigen::Index i = 0;
    for (const auto& x : arr) v[i++] = x.get<double>();
    return v;
}

const char* reg_kind_name(Regularization::Kind kind) {
    switch (kind) {
        case Regularization::Kind::none: return "none";
        case Regularization::Kind::lasso: return "lasso";
        case Regularization::Kind::elastic_net: return "elastic_net";
    }
    return "?";
}

Regularization::Kind reg_kind_parse(const std::string& name) {
    if (name == "none") return Regularization::Kind::none;
    if (name == "lasso") return Regularization::Kind::lasso;
    if (name == "elastic_net") return Regularization::Kind::elastic_net;
    throw ParseError("unknown regularization kind '" + name + "'");
}

json parse_or_throw(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed model JSON");
    return j;
}

void expect_family(const json& j, const std::string& family) {
    if (!j.contains("family") || j["family"] != family)
        throw ParseError("expected a " + family + " model");
}

}  // namespace

std::string serialize_model(const LinearNowcastModel& model) {
    json j;
    j["family"] = "linear";
    j["mu"] = model.mu;
    j["theta"] = vec_to_json(model.theta);
    j["alpha"] = vec_to_json(model.alpha);
    if (model.trend_beta)
        j["trend_beta"] = *model.trend_beta;
    else
        j["trend_beta"] = nullptr;
    j["regularization"] = {{"kind", reg_kind_name(model.regularization.kind)},
                           {"lambda", model.regularization.lambda},
                           {"eta", model.regularization.eta}};
    j["exog_names"] = model.exog_names;
    j["train_window"] = model.train_window.str();
    if (model.descent)
        j["descent"] = {{"sweeps", model.descent->sweeps},
                        {"final_change", model.descent->final_change},
                        {"objective", model.descent->objective}};
    else
        j["descent"] = nullptr;
    return j.dump(2);
}

std::string serialize_model(const GPModel& model) {
    json kernels = json::array();
    for (const auto& k : model.kernels)
        kernels.push_back({{"length_scale", k.length_scale}, {"variance", k.variance}});
    json j;
    j["family"] = "gp";
    j["kernels"] = std::move(kernels);
    j["noise_variance"] = model.noise_variance;
    j["x"] = vec_to_json(model.train_x);
    j["y"] = vec_to_json(model.train_y);
    j["log_marginal"] = model.log_marginal;
    j["jitter"] = model.jitter;
    return j.dump(2);
}

std::string serialize_model(const ForestModel& model) {
    json trees = json::array();
    for (const auto& tree : model.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
        trees.push_back(std::move(nodes));
    }
    json j;
    j["family"] = "forest";
    j["params"] = {{"n_trees", model.params.n_trees},
                   {"max_depth", model.params.max_depth},
                   {"min_leaf", model.params.min_leaf},
                   {"feature_subsample", model.params.feature_subsample},
                   {"bootstrap", model.params.bootstrap},
                   {"seed", model.params.seed}};
    j["n_features"] = model.n_features;
    j["trees"] = std::move(trees);
    return j.dump(2);
}

std::string model_family(const std::string& text) {
    const json j = parse_or_throw(text);
    if (!j.contains("family") || !j["family"].is_string())
        throw ParseError("model JSON lacks a family field");
    const std::string family = j["family"].get<std::string>();
    if (family != "linear" && family != "gp" && family != "forest")
        throw ParseError("unknown model family '" + family + "'");
    return family;
}

LinearNowcastModel parse_linear_model(const std::string& text) {
    const json j = parse_or_throw(text);
    expect_family(j, "linear");
    try {
        LinearNowcastModel m;
        m.mu = j.at("mu").get<double>();
        m.theta = vec_from_json(j.at("theta"));
        m.alpha = vec_from_json(j.at("alpha"));
        if (!j.at("trend_beta").is_null()) m.trend_beta = j["trend_beta"].get<double>();
        const auto& reg = j.at("regularization");
        m.regularization.kind = reg_kind_parse(reg.at("kind").get<std::string>());
        m.regularization.lambda = reg.at("lambda").get<double>();
        m.regularization.eta = reg.at("eta").get<double>();
        m.exog_names = j.at("exog_names").get<std::vector<std::string>>();
        m.train_window = SeriesWindow::parse(j.at("train_window").get<std::string>());
        if (j.contains("descent") && !j["descent"].is_null()) {
            DescentInfo info;
            info.sweeps = j["descent"].at("sweeps").get<int>();
            info.final_change = j["descent"].at("final_change").get<double>();
            info.objective = j["descent"].at("objective").get<double>();
            m.descent = info;
        }
        if (static_cast<std::size_t>(m.alpha.size()) != m.exog_names.size())
            throw ParseError("alpha length disagrees with exog_names");
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("linear model JSON: ") + e.what());
    }
}

GPModel parse_gp_model(const std::string& text) {
    const json j = parse_or_throw(text);
    expect_family(j, "gp");
    try {
        GPModel m;
        for (const auto& k : j.at("kernels"))
            m.kernels.push_back(
                {k.at("length_scale").get<double>(), k.at("variance").get<double>()});
        if (m.kernels.empty()) throw ParseError("gp model has no kernels");
        m.noise_variance = j.at("noise_variance").get<double>();
        m.train_x = vec_from_json(j.at("x"));
        m.train_y = vec_from_json(j.at("y"));
        if (m.train_x.size() != m.train_y.size())
            throw ParseError("gp model x and y lengths differ");
        gp_refresh(m);
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("gp model JSON: ") + e.what());
    }
}

ForestModel parse_forest_model(const std::string& text) {
    const json j = parse_or_throw(text);
    expect_family(j, "forest");
    try {
        ForestModel m;
        const auto& p = j.at("params");
        m.params.n_trees = p.at("n_trees").get<int>();
        m.params.max_depth = p.at("max_depth").get<int>();
        m.params.min_leaf = p.at("min_leaf").get<int>();
        m.params.feature_subsample = p.at("feature_subsample").get<int>();
        m.params.bootstrap = p.at("bootstrap").get<bool>();
        m.params.seed = p.at("seed").get<std::uint64_t>();
        m.n_features = j.at("n_features").get<int>();
        for (const auto& tree : j.at("trees")) {
            RegressionTree t;
            for (const auto& n : tree) {
                if (!n.is_array() || n.size() != 5)
                    throw ParseError("forest node must be [feature,threshold,left,right,value]");
                TreeNode node;
                node.feature = n[0].get<int>();
                node.threshold = n[1].get<double>();
                node.left = n[2].get<std::int32_t>();
                node.right = n[3].get<std::int32_t>();
                node.value = n[4].get<double>();
                t.nodes.push_back(node);
            }
            if (t.nodes.empty()) throw ParseError("forest tree has no nodes");
            m.trees.push_back(std::move(t));
        }
        if (m.trees.empty()) throw ParseError("forest model has no trees");
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("forest model JSON: ") + e.what());
    }
}

}  // namespace uptake
