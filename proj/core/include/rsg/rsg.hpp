#pragma once

#include "rsg/baselines.hpp"
#include "rsg/diagnostics.hpp"
#include "rsg/errors.hpp"
#include "rsg/problem.hpp"
#include "rsg/projection.hpp"
#include "rsg/rsg_lc.hpp"
#include "rsg/rsg_nc.hpp"
#include "rsg/sketch.hpp"
#include "rsg/solver_state.hpp"
#include "rsg/types.hpp"
