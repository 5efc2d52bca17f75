#pragma once

// Umbrella header.

#include "elcp/csv.hpp"
#include "elcp/config.hpp"
#include "elcp/diagnostics.hpp"
#include "elcp/errors.hpp"
#include "elcp/inference.hpp"
#include "elcp/lagrange.hpp"
#include "elcp/model.hpp"
#include "elcp/moments.hpp"
#include "elcp/prng.hpp"
#include "elcp/score.hpp"
#include "elcp/simlab.hpp"
#include "elcp/stats.hpp"
