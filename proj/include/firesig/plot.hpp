#pragma once

#include "firesig/features.hpp"

#include <string>

namespace firesig {

/// Self-contained SVG line plot of a signature: angle (0..359°) on x, aspect
/// ratio on y, with detected peaks and valleys marked (classes "peak"/"valley").
std::string signature_svg(const PatternFeatures& features, const std::string& title);

}  // namespace firesig
