#pragma once

#include <string>

#include "uptake/nowcast.hpp"

namespace uptake {

// JSON round-trip for fitted models. Numbers survive losslessly; parsing a
// serialized GP model rebuilds its cached factorization, so predictions are
// identical across the round trip.

std::string serialize_model(const LinearNowcastModel& model);
std::string serialize_model(const GPModel& model);
std::string serialize_model(const ForestModel& model);

// "linear", "gp" or "forest"; ParseError on anything else.
std::string model_family(const std::string& json);

LinearNowcastModel parse_linear_model(const std::string& json);
GPModel parse_gp_model(const std::string& json);
ForestModel parse_forest_model(const std::string& json);

}  // namespace uptake
