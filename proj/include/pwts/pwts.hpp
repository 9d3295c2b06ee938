#pragma once

// Engine only; cli.hpp and service.hpp pull in CLI11 and cpp-httplib and are included
// separately.
#include "pwts/candidates.hpp"
#include "pwts/clustering.hpp"
#include "pwts/combinatorics.hpp"
#include "pwts/data_model.hpp"
#include "pwts/errors.hpp"
#include "pwts/grid_search.hpp"
#include "pwts/json_io.hpp"
#include "pwts/lad_lasso.hpp"
#include "pwts/mode_affinity.hpp"
#include "pwts/piecewise_fit.hpp"
#include "pwts/synthetic.hpp"
