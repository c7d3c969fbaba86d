#pragma once

// Umbrella header: the whole library in one include.

#include "common.hpp"
#include "units.hpp"
#include "model.hpp"
#include "equilibria.hpp"
#include "stability.hpp"
#include "dynamics.hpp"
#include "dmc.hpp"
#include "io_util.hpp"
