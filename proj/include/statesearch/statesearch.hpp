#pragma once

#include "statesearch/dpmm_weights.hpp"
#include "statesearch/fbo.hpp"
#include "statesearch/gbo.hpp"
#include "statesearch/harness/config.hpp"
#include "statesearch/harness/experiments.hpp"
#include "statesearch/harness/results.hpp"
#include "statesearch/harness/selftest.hpp"
#include "statesearch/kernel_weights.hpp"
#include "statesearch/observation_log.hpp"
#include "statesearch/partition.hpp"
#include "statesearch/piecewise_linear.hpp"
#include "statesearch/polytope.hpp"
#include "statesearch/problems/newsvendor.hpp"
#include "statesearch/problems/wind.hpp"
#include "statesearch/state.hpp"
#include "statesearch/weighting.hpp"
