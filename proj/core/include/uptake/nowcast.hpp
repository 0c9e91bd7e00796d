#pragma once

#include "uptake/nowcast/forest.hpp"
#include "uptake/nowcast/gp.hpp"
#include "uptake/nowcast/linear.hpp"
#include "uptake/nowcast/panel.hpp"
#include "uptake/nowcast/select.hpp"
