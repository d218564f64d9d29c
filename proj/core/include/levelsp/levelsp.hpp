#pragma once

// Umbrella header: probability aggregation over ordered scales with
// level-strategyproof rules, axiom audits, and majority-judgment ranking.

#include "levelsp/aggregators.hpp"
#include "levelsp/arith.hpp"
#include "levelsp/audits.hpp"
#include "levelsp/distribution.hpp"
#include "levelsp/errors.hpp"
#include "levelsp/phantoms.hpp"
#include "levelsp/rational.hpp"
#include "levelsp/scale.hpp"
#include "levelsp/voting.hpp"
