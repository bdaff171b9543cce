#pragma once

#include "firesig/mask.hpp"

#include <array>
#include <string_view>

namespace firesig {

inline constexpr int kSignatureSize = 360;

/// Ray: centroid to the farthest foreground hit along the ray (360° aperiodic).
/// FullLine: span between the outermost hits on the whole line (180° periodic).
enum class ChordMode { Ray, FullLine };

std::string_view to_string(ChordMode mode);
/// Accepts "ray" / "line" (and the long names); throws Error{Config} otherwise.
ChordMode parse_chord_mode(std::string_view text);

/// Marching step along the line, in pixels.
inline constexpr double kMarchStep = 0.25;

/// Angle convention: theta = 0 points to the top of the image and increases
/// counterclockwise as displayed. Returns the unit step in pixel coordinates.
Point2 direction_for(int theta_deg) noexcept;
Point2 direction_for(double theta_deg) noexcept;

struct AspectSignature {
  std::array<double, kSignatureSize> values{};
  Point2 centroid;
  double max_chord = 0.0;
  /// Set when the foreground has more than one 8-connected component; the
  /// signature is still computed over the union.
  bool multi_component = false;
};

/// Length (pixels) of the chord at `theta_deg` through `centroid`; 0 when the
/// line misses the foreground.
double chord_length(const ShapeMask& mask, Point2 centroid, double theta_deg, ChordMode mode = ChordMode::Ray);

/// 1°-step signature normalized by the longest chord. Angles are evaluated in
/// parallel. Throws DegenerateShape on invalid masks or a zero longest chord.
AspectSignature aspect_signature(const ShapeMask& mask, ChordMode mode = ChordMode::Ray);

namespace serial {

/// Reference kernels: full outward march over the whole canvas reach, keeping
/// the last hit; single-threaded. Bit-identical to the fast path.
double chord_length(const ShapeMask& mask, Point2 centroid, double theta_deg, ChordMode mode = ChordMode::Ray);
AspectSignature aspect_signature(const ShapeMask& mask, ChordMode mode = ChordMode::Ray);

}  // namespace serial

}  // namespace firesig
