#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"
#include "uptake/changepoint.hpp"
#include "uptake/model_json.hpp"
#include "uptake/nowcast.hpp"
#include "uptake/registry.hpp"
#include "uptake/seasonal.hpp"
#include "uptake/timeseries.hpp"

namespace fs = std::filesystem;
using uptake::cli::json;

namespace {

uptake::SeriesWindow parse_window(const std::string& text) {
    return uptake::SeriesWindow::parse(text);
}

int parse_int(const std::string& text) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw uptake::ParseError("'" + text + "' is not an integer");
    return v;
}

uptake::MonthlyTimeSeries load_series(const fs::path& path,
                                      const std::optional<std::string>& window) {
    auto s = uptake::read_series_csv(path);
    if (window) s = uptake::slice(s, parse_window(*window));
    return s;
}

// Panel from one series CSV per file, named by file stem, cut to the common
// window of all files.
uptake::ExogPanel load_panel(const std::vector<std::string>& files,
                             const std::optional<std::string>& window) {
    if (files.empty()) return {};
    std::vector<std::string> names;
    std::vector<uptake::MonthlyTimeSeries> series;
    for (const auto& f : files) {
        names.push_back(fs::path(f).stem().string());
        series.push_back(load_series(f, window));
    }
    uptake::YearMonth from = series[0].start();
    uptake::YearMonth to = series[0].end();
    for (const auto& s : series) {
        from = std::max(from, s.start());
        to = std::min(to, s.end());
    }
    if (to < from) throw uptake::EmptyOverlap("panel files share no months");
    const uptake::SeriesWindow w(from, to);
    for (auto& s : series) s = uptake::slice(s, w);
    return uptake::ExogPanel::make(std::move(names), std::move(series));
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

json corr_json(const uptake::CorrelationResult& c) {
    return {{"r", c.r}, {"n", c.n}, {"p_value", c.p_value}};
}

json vec_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

json fit_json(const uptake::RegressionFit& fit) {
    return {{"coefficients", vec_json(fit.coefficients)},
            {"std_errors", vec_json(fit.std_errors)},
            {"t_stats", vec_json(fit.t_stats)},
            {"p_values", vec_json(fit.p_values)},
            {"r_squared", fit.r_squared},
            {"n", fit.n}};
}

void write_report(const fs::path& path, json report) {
    uptake::cli::write_text(path, report.dump(2) + "\n");
}

// --- derive ----------------------------------------------------------------

struct DeriveOpts {
    std::string vaccination;
    std::string cohorts;
    std::string articles;
    std::string vaccine;
    int dose = 1;
    int target_age = -1;
    std::string window;
    std::optional<int> min_age;
    std::optional<int> max_age;
    std::vector<std::string> schedules;
    std::string out = ".";
};

uptake::ScheduleTimeline parse_timeline(const std::vector<std::string>& specs) {
    std::vector<std::pair<uptake::YearMonth, uptake::VaccineSchedule>> entries;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw uptake::ParseError("schedule '" + spec + "' lacks 'VALID-FROM=' prefix");
        const auto from = uptake::YearMonth::parse(spec.substr(0, eq));
        std::vector<std::pair<int, int>> targets;
        std::string rest = spec.substr(eq + 1);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            auto comma = rest.find(',', pos);
            if (comma == std::string::npos) comma = rest.size();
            const std::string item = rest.substr(pos, comma - pos);
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw uptake::ParseError("schedule item '" + item + "' is not dose:months");
            targets.emplace_back(parse_int(item.substr(0, colon)),
                                 parse_int(item.substr(colon + 1)));
            pos = comma + 1;
        }
        entries.emplace_back(from, uptake::VaccineSchedule::make(std::move(targets)));
    }
    return uptake::ScheduleTimeline::make(std::move(entries));
}

void run_derive(const DeriveOpts& opts) {
    const fs::path out = ensure_out_dir(opts.out);
    const auto window = parse_window(opts.window);

    std::vector<fs::path> inputs;
    json outputs = json::array();
    json warnings = json::array();

    auto records = uptake::read_vaccination_csv(opts.vaccination);
    inputs.emplace_back(opts.vaccination);
    if (!opts.vaccine.empty()) {
        std::erase_if(records, [&](const auto& r) { return r.vaccine != opts.vaccine; });
    }
    const auto cohorts = uptake::read_cohort_csv(opts.cohorts);
    inputs.emplace_back(opts.cohorts);

    for (const auto& id : uptake::dose_sequence_violations(records)) {
        warnings.push_back("dose sequence gap for person " + id);
        std::cerr << "warning: dose sequence gap for person " << id << "\n";
    }

    if (opts.target_age >= 0) {
        uptake::ActivityOptions activity_opts;
        activity_opts.min_age_months = opts.min_age;
        activity_opts.max_age_months = opts.max_age;
        const auto activity = uptake::vaccination_activity(records, cohorts, opts.dose,
                                                           opts.target_age, window, activity_opts);
        const fs::path p = out / "activity.csv";
        uptake::write_series_csv(p, activity);
        outputs.push_back(p.string());
    }

    {
        const auto uptake_map = uptake::uptake_by_cohort(records, cohorts, opts.dose);
        const fs::path p = out / "uptake_by_year.csv";
        std::string text = "birth_year,percentage\n";
        char buf[64];
        for (const auto& [year, pct] : uptake_map) {
            std::snprintf(buf, sizeof buf, "%d,%.17g\n", year, pct);
            text += buf;
        }
        uptake::cli::write_text(p, text);
        outputs.push_back(p.string());
    }

    if (!opts.schedules.empty()) {
        const auto timeline = parse_timeline(opts.schedules);
        const auto completion = uptake::completion_by_cohort(records, cohorts, timeline);
        const fs::path p = out / "completion_by_year.csv";
        std::string text = "birth_year,percentage\n";
        char buf[64];
        for (const auto& [year, pct] : completion) {
            std::snprintf(buf, sizeof buf, "%d,%.17g\n", year, pct);
            text += buf;
        }
        uptake::cli::write_text(p, text);
        outputs.push_back(p.string());
    }

    if (!opts.articles.empty()) {
        const auto counts = uptake::read_article_csv(opts.articles);
        inputs.emplace_back(opts.articles);
        const bool labeled = !counts.empty() && counts.front().stance.has_value();
        const auto aggregated = labeled ? uptake::aggregate_stances(counts) : counts;
        const auto pct = uptake::article_percentage(aggregated, window);
        const fs::path p = out / "article_percentage.csv";
        uptake::write_series_csv(p, pct);
        outputs.push_back(p.string());
        if (labeled) {
            for (const auto stance : {uptake::Stance::pro, uptake::Stance::anti,
                                      uptake::Stance::neutral, uptake::Stance::irrelevant}) {
                const auto series = uptake::stance_series(counts, stance, window);
                const fs::path sp =
                    out / ("stance_" + std::string(uptake::stance_name(stance)) + ".csv");
                uptake::write_series_csv(sp, series);
                outputs.push_back(sp.string());
            }
        }
    }

    json config{{"command", "derive"},
                {"vaccination", opts.vaccination},
                {"cohorts", opts.cohorts},
                {"articles", opts.articles},
                {"vaccine", opts.vaccine},
                {"dose", opts.dose},
                {"target_age", opts.target_age},
                {"window", opts.window},
                {"min_age", opts.min_age ? json(*opts.min_age) : json(nullptr)},
                {"max_age", opts.max_age ? json(*opts.max_age) : json(nullptr)},
                {"schedules", opts.schedules},
                {"out", opts.out}};
    write_report(out / "derive_report.json",
                 {{"command", "derive"},
                  {"config", config},
                  {"inputs", uptake::cli::checksum_inputs(inputs)},
                  {"warnings", warnings},
                  {"outputs", outputs}});
}

// --- tipping ---------------------------------------------------------------

struct TippingOpts {
    std::string x;
    std::string y;
    std::string candidates;
    std::string analysis;
    int min_segment = 12;
    std::string boundary = "after";
    bool one_sided = false;
    double delta_x = 1.0;
    std::string window;
    std::string out = ".";
};

void run_tipping(const TippingOpts& opts) {
    const fs::path out = ensure_out_dir(opts.out);
    const std::optional<std::string> window =
        opts.window.empty() ? std::nullopt : std::optional(opts.window);
    const auto x = load_series(opts.x, window);
    const auto y = load_series(opts.y, window);

    uptake::TippingOptions topts;
    topts.min_segment = opts.min_segment;
    if (opts.boundary == "after")
        topts.boundary = uptake::SplitBoundary::starts_after;
    else if (opts.boundary == "before")
        topts.boundary = uptake::SplitBoundary::ends_before;
    else
        throw uptake::ParseError("boundary must be 'after' or 'before'");
    topts.tail = opts.one_sided ? uptake::TailKind::one_sided : uptake::TailKind::two_sided;

    const auto result =
        uptake::find_tipping_point(x, y, parse_window(opts.candidates), topts);

    const auto [ax, ay] = uptake::align(x, y);
    const uptake::SeriesWindow analysis =
        opts.analysis.empty() ? ax.window() : parse_window(opts.analysis);
    const auto regression = uptake::split_regression(x, y, result.split, analysis);

    const fs::path scan_path = out / "tipping_scan.csv";
    uptake::write_scan_csv(scan_path, result);

    json config{{"command", "tipping"},
                {"x", opts.x},
                {"y", opts.y},
                {"candidates", opts.candidates},
                {"analysis", analysis.str()},
                {"min_segment", opts.min_segment},
                {"boundary", opts.boundary},
                {"one_sided", opts.one_sided},
                {"delta_x", opts.delta_x},
                {"window", opts.window},
                {"out", opts.out}};
    write_report(
        out / "tipping_report.json",
        {{"command", "tipping"},
         {"config", config},
         {"inputs", uptake::cli::checksum_inputs({opts.x, opts.y})},
         {"split", result.split.str()},
         {"delta", result.delta},
         {"before", corr_json(result.before)},
         {"after", corr_json(result.after)},
         {"regression",
          {{"before", fit_json(regression.before)},
           {"after", fit_json(regression.after)},
           {"before_window", regression.before_window.str()},
           {"after_window", regression.after_window.str()}}},
         {"text", uptake::format_split_report(regression, opts.delta_x)},
         {"outputs", json::array({scan_path.string()})}});
}

// --- ccf -------------------------------------------------------------------

struct CcfOpts {
    std::string x;
    std::string y;
    int max_lag = 12;
    std::string df = "n-1";
    std::string window;
    std::string out = ".";
};

void run_ccf(const CcfOpts& opts) {
    const fs::path out = ensure_out_dir(opts.out);
    const std::optional<std::string> window =
        opts.window.empty() ? std::nullopt : std::optional(opts.window);
    const auto x = load_series(opts.x, window);
    const auto y = load_series(opts.y, window);
    uptake::DfConvention convention;
    if (opts.df == "n-1")
        convention = uptake::DfConvention::n_minus_1;
    else if (opts.df == "n-2")
        convention = uptake::DfConvention::n_minus_2;
    else
        throw uptake::ParseError("df must be 'n-1' or 'n-2'");

    const auto ccf = uptake::cross_correlation(x, y, opts.max_lag, convention);
    const fs::path ccf_path = out / "ccf.csv";
    uptake::write_ccf_csv(ccf_path, ccf);

    json lags = json::array();
    for (int k = -ccf.max_lag; k <= ccf.max_lag; ++k)
        lags.push_back({{"lag", k},
                        {"r", ccf.r(k)},
                        {"p", ccf.p(k)},
                        {"significant99", ccf.significant99(k)}});

    json config{{"command", "ccf"}, {"x", opts.x},           {"y", opts.y},
                {"max_lag", opts.max_lag}, {"df", opts.df},  {"window", opts.window},
                {"out", opts.out}};
    write_report(out / "ccf_report.json",
                 {{"command", "ccf"},
                  {"config", config},
                  {"inputs", uptake::cli::checksum_inputs({opts.x, opts.y})},
                  {"ci99", ccf.ci99},
                  {"lags", lags},
                  {"outputs", json::array({ccf_path.string()})}});
}

// --- deseason ----------------------------------------------------------------

struct DeseasonOpts {
    std::string input;
    int p = 12;
    std::string window;
    std::string out = ".";
};

void run_deseason(const DeseasonOpts& opts) {
    const fs::path out = ensure_out_dir(opts.out);
    const std::optional<std::string> window =
        opts.window.empty() ? std::nullopt : std::optional(opts.window);
    const auto s = load_series(opts.input, window);
    const auto model = uptake::fit_ar(s, opts.p);

    const fs::path resid_path = out / "deseasonalized.csv";
    uptake::write_series_csv(resid_path, model.residuals);

    json config{{"command", "deseason"},
                {"input", opts.input},
                {"p", opts.p},
                {"window", opts.window},
                {"out", opts.out}};
    write_report(out / "deseason_report.json",
                 {{"command", "deseason"},
                  {"config", config},
                  {"inputs", uptake::cli::checksum_inputs({opts.input})},
                  {"intercept", model.intercept},
                  {"coefficients", vec_json(model.coefficients)},
                  {"residual_window", model.residuals.window().str()},
                  {"outputs", json::array({resid_path.string()})}});
}

// --- fit ---------------------------------------------------------------------

struct FitCommonOpts {
    std::string y;
    std::string window;
    std::string out = ".";
};

struct FitLinearOpts {
    FitCommonOpts common;
    std::string query;
    bool with_trend = false;
};

struct FitArOpts {
    FitCommonOpts common;
    std::vector<std::string> exog;
    int p = 12;
    std::string reg = "none";
    double lambda = 0.0;
    double eta = 0.0;
    int rolling_window = 0;
};

struct FitGpOpts {
    FitCommonOpts common;
    int kernels = 1;
    int starts = 8;
    int max_iters = 300;
    std::uint64_t seed = 0;
};

struct FitForestOpts {
    FitCommonOpts common;
    std::vector<std::string> exog;
    int p = 0;
    int trees = 100;
    int min_leaf = 2;
    int max_depth = 0;
    int mtry = 0;
    bool bootstrap = false;
    std::uint64_t seed = 0;
};

json linear_model_report(const uptake::LinearNowcastModel& model) {
    return json::parse(uptake::serialize_model(model));
}

void run_fit_linear(const FitLinearOpts& opts) {
    const fs::path out = ensure_out_dir(opts.common.out);
    const std::optional<std::string> window =
        opts.common.window.empty() ? std::nullopt : std::optional(opts.common.window);
    const auto y = load_series(opts.common.y, window);
    const auto q = load_series(opts.query, window);

    auto model = uptake::fit_linear_simple(y, q, opts.with_trend);
    model.exog_names = {fs::path(opts.query).stem().string()};

    json config{{"command", "fit linear"},
                {"y", opts.common.y},
                {"query", opts.query},
                {"with_trend", opts.with_trend},
                {"window", opts.common.window},
                {"out", opts.common.out}};
    write_report(out / "model.json",
                 {{"command", "fit"},
                  {"family", "linear"},
                  {"config", config},
                  {"inputs", uptake::cli::checksum_inputs({opts.common.y, opts.query})},
                  {"train_window", model.train_window.str()},
                  {"model", linear_model_report(model)}});
}

uptake::Regularization parse_reg(const std::string& kind, double lambda, double eta) {
    if (kind == "none") return uptake::Regularization::none();
    if (kind == "lasso") return uptake::Regularization::lasso(lambda);
    if (kind == "enet") return uptake::Regularization::elastic_net(lambda, eta);
    throw uptake::ParseError("reg must be 'none', 'lasso' or 'enet'");
}

void run_fit_ar(const FitArOpts& opts) {
    const fs::path out = ensure_out_dir(opts.common.out);
    const std::optional<std::string> window =
        opts.common.window.empty() ? std::nullopt : std::optional(opts.common.window);
    const auto y = load_series(opts.common.y, window);
    const auto panel = load_panel(opts.exog, window);
    const auto reg = parse_reg(opts.reg, opts.lambda, opts.eta);

    std::vector<fs::path> inputs{opts.common.y};
    for (const auto& f : opts.exog) inputs.emplace_back(f);

    json config{{"command", "fit ar"},
                {"y", opts.common.y},
                {"exog", opts.exog},
                {"p", opts.p},
                {"reg", opts.reg},
                {"lambda", opts.lambda},
                {"eta", opts.eta},
                {"rolling_window", opts.rolling_window},
                {"window", opts.common.window},
                {"out", opts.common.out}};

    json report{{"command", "fit"},
                {"family", "linear"},
                {"config", config},
                {"inputs", uptake::cli::checksum_inputs(inputs)}};
    json outputs = json::array();

    if (opts.rolling_window > 0) {
        const auto rolling =
            uptake::refit_rolling(y, panel, opts.p, reg, opts.rolling_window);
        const auto& final_model = rolling.models.back();
        report["train_window"] = final_model.train_window.str();
        report["model"] = linear_model_report(final_model);
        report["rolling"] = {{"window", opts.rolling_window},
                             {"n_models", rolling.models.size()}};
        if (rolling.predictions) {
            const fs::path pred_path = out / "predictions.csv";
            uptake::write_series_csv(pred_path, *rolling.predictions);
            outputs.push_back(pred_path.string());
        }
    } else {
        const auto model = uptake::fit_ar_exog(y, panel, opts.p, reg);
        report["train_window"] = model.train_window.str();
        report["model"] = linear_model_report(model);
    }
    report["outputs"] = outputs;
    write_report(out / "model.json", report);
}

void run_fit_gp(const FitGpOpts& opts) {
    const fs::path out = ensure_out_dir(opts.common.out);
    const std::optional<std::string> window =
        opts.common.window.empty() ? std::nullopt : std::optional(opts.common.window);
    const auto y = load_series(opts.common.y, window);

    Eigen::VectorXd x(y.size()), targets(y.size());
    for (int t = 0; t < y.size(); ++t) {
        x[t] = t;
        targets[t] = y[t];
    }
    uptake::GPFitOptions gp_opts;
    gp_opts.n_starts = opts.starts;
    gp_opts.max_iters = opts.max_iters;
    gp_opts.seed = opts.seed;
    const auto model = uptake::gp_fit(x, targets, opts.kernels, gp_opts);

    json config{{"command", "fit gp"},
                {"y", opts.common.y},
                {"kernels", opts.kernels},
                {"starts", opts.starts},
                {"max_iters", opts.max_iters},
                {"seed", opts.seed},
                {"window", opts.common.window},
                {"out", opts.common.out}};
    write_report(out / "model.json",
                 {{"command", "fit"},
                  {"family", "gp"},
                  {"config", config},
                  {"inputs", uptake::cli::checksum_inputs({opts.common.y})},
                  {"train_window", y.window().str()},
                  {"log_marginal", model.log_marginal},
                  {"model", json::parse(uptake::serialize_model(model))}});
}

void run_fit_forest(const FitForestOpts& opts) {
    const fs::path out = ensure_out_dir(opts.common.out);
    const std::optional<std::string> window =
        opts.common.window.empty() ? std::nullopt : std::optional(opts.common.window);
    const auto y = load_series(opts.common.y, window);
    const auto panel = load_panel(opts.exog, window);

    const auto design = uptake::lag_design(y, panel, opts.p);
    uptake::ForestParams params;
    params.n_trees = opts.trees;
    params.min_leaf = opts.min_leaf;
    params.max_depth = opts.max_depth;
    params.feature_subsample = opts.mtry;
    params.bootstrap = opts.bootstrap;
    params.seed = opts.seed;
    const auto model = uptake::forest_fit(design.X, design.y, params);

    std::vector<fs::path> inputs{opts.common.y};
    for (const auto& f : opts.exog) inputs.emplace_back(f);

    json config{{"command", "fit forest"},
                {"y", opts.common.y},
                {"exog", opts.exog},
                {"p", opts.p},
                {"trees", opts.trees},
                {"min_leaf", opts.min_leaf},
                {"max_depth", opts.max_depth},
                {"mtry", opts.mtry},
                {"bootstrap", opts.bootstrap},
                {"seed", opts.seed},
                {"window", opts.common.window},
                {"out", opts.common.out}};
    write_report(out / "model.json",
                 {{"command", "fit"},
                  {"family", "forest"},
                  {"config", config},
                  {"inputs", uptake::cli::checksum_inputs(inputs)},
                  {"train_window", design.aligned_window.str()},
                  {"design",
                   {{"p", opts.p},
                    {"exog_names", panel.names()},
                    {"feature_names", design.feature_names}}},
                  {"model", json::parse(uptake::serialize_model(model))}});
}

// --- predict -----------------------------------------------------------------

struct PredictOpts {
    std::string model;
    std::string y;
    std::vector<std::string> exog;
    std::string months;
    std::string out = ".";
};

void run_predict(const PredictOpts& opts) {
    const fs::path out = ensure_out_dir(opts.out);
    std::ifstream in(opts.model);
    if (!in) throw uptake::ParseError("cannot open " + opts.model);
    json report = json::parse(in, nullptr, false);
    if (report.is_discarded() || !report.contains("family") || !report.contains("model"))
        throw uptake::ParseError(opts.model + " is not a fit report");
    const std::string family = report["family"].get<std::string>();
    const auto months = parse_window(opts.months);

    std::vector<fs::path> inputs{opts.model};
    json config{{"command", "predict"}, {"model", opts.model},   {"y", opts.y},
                {"exog", opts.exog},    {"months", opts.months}, {"out", opts.out}};
    const fs::path pred_path = out / "predictions.csv";

    if (family == "linear") {
        const auto model = uptake::parse_linear_model(report["model"].dump());
        if (opts.y.empty() && model.p() > 0)
            throw uptake::ParseError("linear model with lags needs --y");
        const auto y = opts.y.empty()
                           ? uptake::MonthlyTimeSeries(months.from, {0.0})
                           : load_series(opts.y, std::nullopt);
        if (!opts.y.empty()) inputs.emplace_back(opts.y);
        const auto panel = load_panel(opts.exog, std::nullopt);
        for (const auto& f : opts.exog) inputs.emplace_back(f);
        const auto predictions = uptake::predict_linear(model, y, panel, months);
        uptake::write_series_csv(pred_path, predictions);
    } else if (family == "gp") {
        const auto model = uptake::parse_gp_model(report["model"].dump());
        const auto train_from =
            uptake::SeriesWindow::parse(report.at("train_window").get<std::string>()).from;
        Eigen::VectorXd x_star(months.length());
        for (int i = 0; i < months.length(); ++i)
            x_star[i] = uptake::months_between(train_from, months.from.plus(i));
        const auto [mean, variance] = uptake::gp_predict(model, x_star);
        std::string text = "month,prediction,variance\n";
        char buf[96];
        for (int i = 0; i < months.length(); ++i) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n",
                          months.from.plus(i).str().c_str(), mean[i], variance[i]);
            text += buf;
        }
        uptake::cli::write_text(pred_path, text);
    } else if (family == "forest") {
        const auto model = uptake::parse_forest_model(report["model"].dump());
        const auto& design = report.at("design");
        const int p = design.at("p").get<int>();
        const auto exog_names = design.at("exog_names").get<std::vector<std::string>>();
        if (opts.y.empty() && p > 0) throw uptake::ParseError("forest model with lags needs --y");
        std::optional<uptake::MonthlyTimeSeries> y;
        if (!opts.y.empty()) {
            y = load_series(opts.y, std::nullopt);
            inputs.emplace_back(opts.y);
        }
        const auto panel = load_panel(opts.exog, std::nullopt);
        for (const auto& f : opts.exog) inputs.emplace_back(f);

        Eigen::MatrixXd X(months.length(), p + static_cast<int>(exog_names.size()));
        for (int i = 0; i < months.length(); ++i) {
            const uptake::YearMonth t = months.from.plus(i);
            for (int lag = 1; lag <= p; ++lag) X(i, lag - 1) = y->at(t.plus(-lag));
            for (std::size_t j = 0; j < exog_names.size(); ++j) {
                const int idx = panel.index_of(exog_names[j]);
                if (idx < 0)
                    throw uptake::DimensionMismatch("panel lacks series '" + exog_names[j] + "'");
                X(i, p + static_cast<int>(j)) = panel.at(idx).at(t);
            }
        }
        const Eigen::VectorXd predictions = uptake::forest_predict(model, X);
        std::vector<double> values(predictions.data(), predictions.data() + predictions.size());
        uptake::write_series_csv(pred_path, uptake::MonthlyTimeSeries(months.from, values));
    } else {
        throw uptake::ParseError("unknown model family '" + family + "'");
    }

    write_report(out / "predict_report.json",
                 {{"command", "predict"},
                  {"config", config},
                  {"inputs", uptake::cli::checksum_inputs(inputs)},
                  {"outputs", json::array({pred_path.string()})}});
}

// --- select-queries ----------------------------------------------------------

struct SelectOpts {
    std::string y;
    std::vector<std::string> panel;
    std::string train;
    std::string validate;
    std::string mode = "separate";
    std::string out = ".";
};

void run_select(const SelectOpts& opts) {
    const fs::path out = ensure_out_dir(opts.out);
    const auto y = load_series(opts.y, std::nullopt);
    const auto panel = load_panel(opts.panel, std::nullopt);
    uptake::CombineMode mode;
    if (opts.mode == "separate")
        mode = uptake::CombineMode::separate;
    else if (opts.mode == "aggregate")
        mode = uptake::CombineMode::aggregate;
    else
        throw uptake::ParseError("mode must be 'separate' or 'aggregate'");

    const auto selection = uptake::select_queries(y, panel, parse_window(opts.train),
                                                  parse_window(opts.validate), mode);

    std::vector<fs::path> inputs{opts.y};
    for (const auto& f : opts.panel) inputs.emplace_back(f);

    json ranking = json::array();
    for (const auto& r : selection.ranking)
        ranking.push_back({{"name", r.name}, {"abs_r", r.abs_r}});

    json config{{"command", "select-queries"},
                {"y", opts.y},
                {"panel", opts.panel},
                {"train", opts.train},
                {"validate", opts.validate},
                {"mode", opts.mode},
                {"out", opts.out}};
    write_report(out / "selection.json",
                 {{"command", "select-queries"},
                  {"config", config},
                  {"inputs", uptake::cli::checksum_inputs(inputs)},
                  {"ranking", ranking},
                  {"chosen", selection.chosen},
                  {"rmse_path", selection.rmse_path},
                  {"baseline_rmse", selection.baseline_rmse},
                  {"best_rmse", selection.best_rmse},
                  {"improved", selection.improved}});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vaccination uptake and media attention analysis toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    DeriveOpts derive;
    auto* cmd_derive = app.add_subcommand("derive", "Derive signal CSVs from registry data");
    cmd_derive->add_option("--vaccination", derive.vaccination, "Vaccination records CSV")
        ->required();
    cmd_derive->add_option("--cohorts", derive.cohorts, "Birth cohort CSV")->required();
    cmd_derive->add_option("--articles", derive.articles, "Article counts CSV");
    cmd_derive->add_option("--vaccine", derive.vaccine, "Keep only this vaccine label");
    cmd_derive->add_option("--dose", derive.dose, "Dose number for activity/uptake");
    cmd_derive->add_option("--target-age", derive.target_age,
                           "Target age in months (enables activity.csv)");
    cmd_derive->add_option("--window", derive.window, "Analysis window FROM..TO")->required();
    cmd_derive->add_option("--min-age", derive.min_age, "Numerator age band lower bound, months");
    cmd_derive->add_option("--max-age", derive.max_age, "Numerator age band upper bound, months");
    cmd_derive->add_option("--schedule", derive.schedules,
                           "Schedule 'VALID-FROM=dose:months,...' (repeatable)");
    cmd_derive->add_option("--out", derive.out, "Output directory");
    cmd_derive->callback([&] { run_derive(derive); });

    TippingOpts tipping;
    auto* cmd_tipping = app.add_subcommand("tipping", "Find the correlation tipping point");
    cmd_tipping->add_option("--x", tipping.x, "Driver series CSV")->required();
    cmd_tipping->add_option("--y", tipping.y, "Response series CSV")->required();
    cmd_tipping->add_option("--candidates", tipping.candidates, "Candidate window FROM..TO")
        ->required();
    cmd_tipping->add_option("--analysis", tipping.analysis,
                            "Regression window (default: full overlap)");
    cmd_tipping->add_option("--min-segment", tipping.min_segment, "Minimum months per side");
    cmd_tipping->add_option("--boundary", tipping.boundary,
                            "Which side owns the split month: after|before");
    cmd_tipping->add_flag("--one-sided", tipping.one_sided, "One-sided correlation tests");
    cmd_tipping->add_option("--delta-x", tipping.delta_x,
                            "Regressor move for the implied-change line");
    cmd_tipping->add_option("--window", tipping.window, "Pre-slice both inputs FROM..TO");
    cmd_tipping->add_option("--out", tipping.out, "Output directory");
    cmd_tipping->callback([&] { run_tipping(tipping); });

    CcfOpts ccf;
    auto* cmd_ccf = app.add_subcommand("ccf", "Lagged cross-correlation with significance");
    cmd_ccf->add_option("--x", ccf.x, "Leading series CSV")->required();
    cmd_ccf->add_option("--y", ccf.y, "Following series CSV")->required();
    cmd_ccf->add_option("--max-lag", ccf.max_lag, "Largest lag to evaluate");
    cmd_ccf->add_option("--df", ccf.df, "Degrees-of-freedom convention: n-1|n-2");
    cmd_ccf->add_option("--window", ccf.window, "Pre-slice both inputs FROM..TO");
    cmd_ccf->add_option("--out", ccf.out, "Output directory");
    cmd_ccf->callback([&] { run_ccf(ccf); });

    DeseasonOpts deseason;
    auto* cmd_deseason = app.add_subcommand("deseason", "Remove seasonality via an AR fit");
    cmd_deseason->add_option("--input", deseason.input, "Series CSV")->required();
    cmd_deseason->add_option("--p", deseason.p, "Autoregressive order");
    cmd_deseason->add_option("--window", deseason.window, "Pre-slice input FROM..TO");
    cmd_deseason->add_option("--out", deseason.out, "Output directory");
    cmd_deseason->callback([&] { run_deseason(deseason); });

    auto* cmd_fit = app.add_subcommand("fit", "Fit a nowcasting model");
    cmd_fit->require_subcommand(1);

    FitLinearOpts fit_linear;
    auto* cmd_fit_linear = cmd_fit->add_subcommand("linear", "y = mu + alpha q (+ beta t)");
    cmd_fit_linear->add_option("--y", fit_linear.common.y, "Target series CSV")->required();
    cmd_fit_linear->add_option("--query", fit_linear.query, "Query series CSV")->required();
    cmd_fit_linear->add_flag("--with-trend", fit_linear.with_trend, "Add a linear trend term");
    cmd_fit_linear->add_option("--window", fit_linear.common.window, "Pre-slice FROM..TO");
    cmd_fit_linear->add_option("--out", fit_linear.common.out, "Output directory");
    cmd_fit_linear->callback([&] { run_fit_linear(fit_linear); });

    FitArOpts fit_ar;
    auto* cmd_fit_ar =
        cmd_fit->add_subcommand("ar", "AR(p) with exogenous regressors, optional shrinkage");
    cmd_fit_ar->add_option("--y", fit_ar.common.y, "Target series CSV")->required();
    cmd_fit_ar->add_option("--exog", fit_ar.exog, "Exogenous series CSV (repeatable)");
    cmd_fit_ar->add_option("--p", fit_ar.p, "Autoregressive order");
    cmd_fit_ar->add_option("--reg", fit_ar.reg, "Regularization: none|lasso|enet");
    cmd_fit_ar->add_option("--lambda", fit_ar.lambda, "L1 weight");
    cmd_fit_ar->add_option("--eta", fit_ar.eta, "L2 weight (enet)");
    cmd_fit_ar->add_option("--rolling-window", fit_ar.rolling_window,
                           "Refit on a trailing window of this many months");
    cmd_fit_ar->add_option("--window", fit_ar.common.window, "Pre-slice FROM..TO");
    cmd_fit_ar->add_option("--out", fit_ar.common.out, "Output directory");
    cmd_fit_ar->callback([&] { run_fit_ar(fit_ar); });

    FitGpOpts fit_gp;
    auto* cmd_fit_gp = cmd_fit->add_subcommand("gp", "Gaussian process over the month index");
    cmd_fit_gp->add_option("--y", fit_gp.common.y, "Target series CSV")->required();
    cmd_fit_gp->add_option("--kernels", fit_gp.kernels, "Number of summed kernels");
    cmd_fit_gp->add_option("--starts", fit_gp.starts, "Optimizer restarts");
    cmd_fit_gp->add_option("--max-iters", fit_gp.max_iters, "Simplex iterations per start");
    cmd_fit_gp->add_option("--seed", fit_gp.seed, "Random seed")->required();
    cmd_fit_gp->add_option("--window", fit_gp.common.window, "Pre-slice FROM..TO");
    cmd_fit_gp->add_option("--out", fit_gp.common.out, "Output directory");
    cmd_fit_gp->callback([&] { run_fit_gp(fit_gp); });

    FitForestOpts fit_forest;
    auto* cmd_fit_forest = cmd_fit->add_subcommand("forest", "Random regression forest");
    cmd_fit_forest->add_option("--y", fit_forest.common.y, "Target series CSV")->required();
    cmd_fit_forest->add_option("--exog", fit_forest.exog, "Exogenous series CSV (repeatable)");
    cmd_fit_forest->add_option("--p", fit_forest.p, "Lagged-target features");
    cmd_fit_forest->add_option("--trees", fit_forest.trees, "Number of trees");
    cmd_fit_forest->add_option("--min-leaf", fit_forest.min_leaf, "Minimum samples per leaf");
    cmd_fit_forest->add_option("--max-depth", fit_forest.max_depth, "Depth cap (0 = none)");
    cmd_fit_forest->add_option("--mtry", fit_forest.mtry,
                               "Features tried per split (0 = ceil(sqrt(d)))");
    cmd_fit_forest->add_flag("--bootstrap", fit_forest.bootstrap, "Bootstrap rows per tree");
    cmd_fit_forest->add_option("--seed", fit_forest.seed, "Random seed")->required();
    cmd_fit_forest->add_option("--window", fit_forest.common.window, "Pre-slice FROM..TO");
    cmd_fit_forest->add_option("--out", fit_forest.common.out, "Output directory");
    cmd_fit_forest->callback([&] { run_fit_forest(fit_forest); });

    PredictOpts predict;
    auto* cmd_predict = app.add_subcommand("predict", "Predict from a saved fit report");
    cmd_predict->add_option("--model", predict.model, "model.json from fit")->required();
    cmd_predict->add_option("--y", predict.y, "Target history CSV (for lag features)");
    cmd_predict->add_option("--exog", predict.exog, "Exogenous series CSV (repeatable)");
    cmd_predict->add_option("--months", predict.months, "Months to predict FROM..TO")->required();
    cmd_predict->add_option("--out", predict.out, "Output directory");
    cmd_predict->callback([&] { run_predict(predict); });

    SelectOpts select;
    auto* cmd_select = app.add_subcommand("select-queries", "Correlation-ranked forward selection");
    cmd_select->add_option("--y", select.y, "Target series CSV")->required();
    cmd_select->add_option("--panel", select.panel, "Query series CSV (repeatable)")
        ->required();
    cmd_select->add_option("--train", select.train, "Training window FROM..TO")->required();
    cmd_select->add_option("--validate", select.validate, "Validation window FROM..TO")
        ->required();
    cmd_select->add_option("--mode", select.mode, "Combine mode: separate|aggregate");
    cmd_select->add_option("--out", select.out, "Output directory");
    cmd_select->callback([&] { run_select(select); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const uptake::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const uptake::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const uptake::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
