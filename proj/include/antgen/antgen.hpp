#pragma once

// Umbrella header for the antgen spatial point-process toolkit.

#include "antgen/core.hpp"
#include "antgen/deform.hpp"
#include "antgen/intensity.hpp"
#include "antgen/io.hpp"
#include "antgen/plot.hpp"
#include "antgen/rng.hpp"
#include "antgen/simulate.hpp"
#include "antgen/stats.hpp"
#include "antgen/triangulate.hpp"

namespace antgen {
inline constexpr const char* kVersion = "0.1.0";
}
