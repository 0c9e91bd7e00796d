#include <doctest.h>

#include <string>

#include "support/synthetic.hpp"
#include "uptake/model_json.hpp"
#include "uptake/nowcast.hpp"

using namespace uptake;

TEST_CASE("linear model json round trip preserves every field") {
    const auto y = synthetic::gaussian_series(70, YearMonth{2010, 1}, 40, 10.0, 1.0);
    const auto q = synthetic::gaussian_series(71, YearMonth{2010, 1}, 40, 0.0, 1.0);
    const auto panel = ExogPanel::make({"media"}, {q});
    const auto model = fit_ar_exog(y, panel, 2, Regularization::elastic_net(0.3, 0.1));

    const std::string text = serialize_model(model);
    CHECK(model_family(text) == "linear");
    const auto back = parse_linear_model(text);

    CHECK(back.mu == model.mu);
    CHECK((back.theta - model.theta).norm() == 0.0);
    CHECK((back.alpha - model.alpha).norm() == 0.0);
    CHECK(back.trend_beta == model.trend_beta);
    CHECK(back.regularization.kind == model.regularization.kind);
    CHECK(back.regularization.lambda == model.regularization.lambda);
    CHECK(back.regularization.eta == model.regularization.eta);
    CHECK(back.exog_names == model.exog_names);
    CHECK(back.train_window.from == model.train_window.from);
    CHECK(back.train_window.to == model.train_window.to);
    REQUIRE(back.descent.has_value());
    CHECK(back.descent->sweeps == model.descent->sweeps);
    CHECK(back.descent->objective == model.descent->objective);
}

TEST_CASE("parse errors are typed and name the problem") {
    CHECK_THROWS_AS(parse_linear_model("not json"), ParseError);
    CHECK_THROWS_AS(parse_linear_model("{\"family\":\"gp\"}"), ParseError);
    CHECK_THROWS_AS(parse_gp_model("{\"family\":\"linear\"}"), ParseError);
    CHECK_THROWS_AS(parse_forest_model("{}"), ParseError);
    CHECK_THROWS_AS(model_family("[]"), ParseError);
    CHECK_THROWS_AS(parse_linear_model("{\"family\":\"linear\",\"mu\":\"x\"}"), ParseError);
}

TEST_CASE("family probe reads minimal documents") {
    CHECK(model_family("{\"family\":\"forest\"}") == "forest");
    CHECK(model_family("{\"family\":\"gp\",\"extra\":1}") == "gp");
}
