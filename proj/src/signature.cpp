#include "firesig/signature.hpp"

#include "firesig/error.hpp"
#include "firesig/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace firesig {

std::string_view to_string(ChordMode mode) { return mode == ChordMode::Ray ? "ray" : "line"; }

ChordMode parse_chord_mode(std::string_view text) {
  if (text == "ray" || text == "RAY_ENVELOPE") return ChordMode::Ray;
  if (text == "line" || text == "FULL_LINE_ENVELOPE") return ChordMode::FullLine;
  throw Error(ErrorKind::Config, "unknown chord mode '" + std::string(text) + "' (expected ray|line)");
}

Point2 direction_for(double theta_deg) noexcept {
  const double a = theta_deg * std::numbers::pi / 180.0;
  return {-std::sin(a), -std::cos(a)};
}

Point2 direction_for(int theta_deg) noexcept {
  theta_deg = ((theta_deg % 360) + 360) % 360;
  // Opposite angles get exactly negated directions so line chords are
  // bit-for-bit 180° periodic; quarter turns are exact.
  if (theta_deg >= 180) {
    auto d = direction_for(theta_deg - 180);
    return {-d.x, -d.y};
  }
  switch (theta_deg) {
    case 0: return {0.0, -1.0};
    case 90: return {-1.0, 0.0};
    default: return direction_for(static_cast<double>(theta_deg));
  }
}

namespace {

Point2 direction_any(double theta_deg) noexcept {
  const double r = std::round(theta_deg);
  if (r == theta_deg) return direction_for(static_cast<int>(r));
  return direction_for(theta_deg);
}

bool hit(const ShapeMask& mask, Point2 c, Point2 d, long k) noexcept {
  const double t = static_cast<double>(k) * kMarchStep;
  return mask.sample(c.x + t * d.x, c.y + t * d.y) >= 0.5;
}

// Beyond this many steps every sample is background: one pixel past the
// farthest canvas corner.
long canvas_reach(const ShapeMask& mask, Point2 c) noexcept {
  const double corners[4][2] = {{-1.0, -1.0},
                                {mask.width() + 0.0, -1.0},
                                {-1.0, mask.height() + 0.0},
                                {mask.width() + 0.0, mask.height() + 0.0}};
  double r = 0.0;
  for (const auto& p : corners) r = std::max(r, std::hypot(p[0] - c.x, p[1] - c.y));
  return static_cast<long>(std::ceil(r / kMarchStep)) + 1;
}

struct Bounds {
  int x0, y0, x1, y1;
};

Bounds foreground_bounds(const ShapeMask& mask) noexcept {
  Bounds b{mask.width(), mask.height(), -1, -1};
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.at(x, y)) {
        b.x0 = std::min(b.x0, x);
        b.y0 = std::min(b.y0, y);
        b.x1 = std::max(b.x1, x);
        b.y1 = std::max(b.y1, y);
      }
  return b;
}

// Samples farther than one pixel outside the foreground box are background.
long bounds_reach(const Bounds& b, Point2 c) noexcept {
  if (b.x1 < b.x0) return 0;
  const double xs[2] = {b.x0 - 1.0, b.x1 + 1.0};
  const double ys[2] = {b.y0 - 1.0, b.y1 + 1.0};
  double r = 0.0;
  for (double x : xs)
    for (double y : ys) r = std::max(r, std::hypot(x - c.x, y - c.y));
  return static_cast<long>(std::ceil(r / kMarchStep)) + 1;
}

// Fast path: scan inward from the reach, first hit is the farthest.
double fast_chord(const ShapeMask& mask, Point2 c, Point2 d, ChordMode mode, long reach) noexcept {
  long far = -1;
  for (long k = reach; k >= 0; --k)
    if (hit(mask, c, d, k)) {
      far = k;
      break;
    }
  if (mode == ChordMode::Ray) return far < 0 ? 0.0 : static_cast<double>(far) * kMarchStep;

  // Full line over k in [-reach, reach]: max hit index minus min hit index.
  long lo = 0;
  bool any = false;
  for (long k = -reach; k <= reach; ++k)
    if (hit(mask, c, d, k)) {
      lo = k;
      any = true;
      break;
    }
  if (!any) return 0.0;
  long hi = lo;
  for (long k = reach; k > lo; --k)
    if (hit(mask, c, d, k)) {
      hi = k;
      break;
    }
  return static_cast<double>(hi - lo) * kMarchStep;
}

AspectSignature finish(std::array<double, kSignatureSize> chords, Point2 centroid, bool multi) {
  AspectSignature sig;
  sig.centroid = centroid;
  sig.multi_component = multi;
  sig.max_chord = *std::max_element(chords.begin(), chords.end());
  if (!(sig.max_chord > 0.0)) throw Error(ErrorKind::DegenerateShape, "longest chord is zero");
  for (int t = 0; t < kSignatureSize; ++t) sig.values[t] = chords[t] / sig.max_chord;
  return sig;
}

}  // namespace

double chord_length(const ShapeMask& mask, Point2 centroid, double theta_deg, ChordMode mode) {
  return fast_chord(mask, centroid, direction_any(theta_deg), mode, canvas_reach(mask, centroid));
}

AspectSignature aspect_signature(const ShapeMask& mask, ChordMode mode) {
  mask.check_valid();
  const Point2 c = compute_centroid(mask);
  const long reach = bounds_reach(foreground_bounds(mask), c);
  std::array<double, kSignatureSize> chords{};
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (int t = 0; t < kSignatureSize; ++t) chords[t] = fast_chord(mask, c, direction_for(t), mode, reach);
  return finish(chords, c, count_components(mask) > 1);
}

namespace serial {

double chord_length(const ShapeMask& mask, Point2 centroid, double theta_deg, ChordMode mode) {
  const Point2 d = direction_any(theta_deg);
  const long reach = canvas_reach(mask, centroid);
  const long first = mode == ChordMode::Ray ? 0 : -reach;
  long lo = 0;
  long hi = 0;
  bool any = false;
  for (long k = first; k <= reach; ++k) {
    if (!hit(mask, centroid, d, k)) continue;
    if (!any) lo = k;
    hi = k;
    any = true;
  }
  if (!any) return 0.0;
  if (mode == ChordMode::Ray) return static_cast<double>(hi) * kMarchStep;
  return static_cast<double>(hi - lo) * kMarchStep;
}

AspectSignature aspect_signature(const ShapeMask& mask, ChordMode mode) {
  mask.check_valid();
  const Point2 c = compute_centroid(mask);
  std::array<double, kSignatureSize> chords{};
  for (int t = 0; t < kSignatureSize; ++t) chords[t] = serial::chord_length(mask, c, static_cast<double>(t), mode);
  return finish(chords, c, count_components(mask) > 1);
}

}  // namespace serial

}  // namespace firesig
