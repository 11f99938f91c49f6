#pragma once

// Library umbrella: model, calibration, solver, what-if, TCO and the shared
// request layer. The CLI and HTTP front ends live in cli.hpp and service.hpp.

#include "csdplan/bep.hpp"
#include "csdplan/calibration.hpp"
#include "csdplan/errors.hpp"
#include "csdplan/model.hpp"
#include "csdplan/planner.hpp"
#include "csdplan/ratios.hpp"
#include "csdplan/tco.hpp"
#include "csdplan/whatif.hpp"
