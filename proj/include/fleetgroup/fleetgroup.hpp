#pragma once

// Umbrella header for the full pipeline: fleet data, per-entity regression,
// dissimilarity graphs, community detection, meta-validation sweep, and the
// synthetic scenario generator.

#include "fleetgroup/community.hpp"
#include "fleetgroup/dissimilarity.hpp"
#include "fleetgroup/errors.hpp"
#include "fleetgroup/evaluation.hpp"
#include "fleetgroup/fleet.hpp"
#include "fleetgroup/matrix.hpp"
#include "fleetgroup/meta.hpp"
#include "fleetgroup/regression.hpp"
#include "fleetgroup/synthgen.hpp"
