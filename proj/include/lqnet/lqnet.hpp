#pragma once

#include "lqnet/analysis.hpp"
#include "lqnet/atlas.hpp"
#include "lqnet/core.hpp"
#include "lqnet/dynamics.hpp"
#include "lqnet/equilibria.hpp"
#include "lqnet/errors.hpp"
#include "lqnet/format.hpp"
#include "lqnet/json_io.hpp"
#include "lqnet/scenario.hpp"
#include "lqnet/session_io.hpp"
#include "lqnet/structure.hpp"
#include "lqnet/thresholds.hpp"
#include "lqnet/treatments.hpp"
#include "lqnet/verifier.hpp"
