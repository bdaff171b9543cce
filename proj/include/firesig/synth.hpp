#pragma once

#include "firesig/mask.hpp"
#include "firesig/rng.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace firesig {

/// Generator classes. TRIANGLE_UP widens upward (flat side on top, apex at the
/// bottom); TRIANGLE_DOWN is the inverted cone (apex on top, base at the bottom).
enum class PatternClass { Circle, HalfCircle, Hourglass, Rectangle, TriangleUp, TriangleDown, VShape, UShape };

inline constexpr std::array<PatternClass, 8> kAllClasses = {
    PatternClass::Circle,     PatternClass::HalfCircle,   PatternClass::Hourglass, PatternClass::Rectangle,
    PatternClass::TriangleUp, PatternClass::TriangleDown, PatternClass::VShape,    PatternClass::UShape};

std::string_view to_string(PatternClass c);
/// Throws Error{Config} for unknown names.
PatternClass parse_pattern_class(std::string_view name);

/// Evaluation grouping: Seven merges both triangle orientations into "triangle".
enum class Grouping { Seven, Eight };

std::string group_label(PatternClass c, Grouping g);
/// Ordered label set of a grouping (the classifier's class order).
std::vector<std::string> group_labels(Grouping g);

struct ShapeProportions {
  int circle_vertices = 64;
  double rectangle_aspect = 2.2;        ///< height / width
  double triangle_apex_deg = 50.0;
  double hourglass_width = 0.70;        ///< of height
  double hourglass_waist = 0.15;        ///< waist width, fraction of scale
  double v_leg_width = 0.22;            ///< fraction of scale, perpendicular to the leg
  double v_opening_deg = 70.0;
  double u_width = 0.80;                ///< outer width / height
  double u_notch_width = 0.50;          ///< fraction of outer width
  double u_notch_height = 0.60;         ///< fraction of outer height
};

struct SynthConfig {
  int canvas_width = 256;
  int canvas_height = 256;
  int n_per_class = 1;
  std::uint64_t seed = 0;
  double noise_amplitude = 0.25;       ///< fraction of local radius
  double smoothing_sigma = 2.0;        ///< pixels
  double distortion_amplitude = 0.5;   ///< warp amplitude, fraction of the shape half-extent
  double rotation_jitter = 12.0;       ///< degrees, symmetric
  double scale_min = 0.55;             ///< largest shape extent as a fraction of the canvas
  double scale_max = 0.90;
  /// Per-sample relative jitter applied to every shape proportion,
  /// factor Uniform(1 - j, 1 + j).
  double proportion_jitter = 0.4;
  int boundary_points = 256;
  ShapeProportions shape;

  void validate() const;
};

using Polygon = std::vector<Point2>;

/// Proportions scaled by independent Uniform(1 - j, 1 + j) factors drawn from rng
/// (always the same number of draws, whatever the class).
ShapeProportions jitter_proportions(const ShapeProportions& base, double jitter, Rng& rng);

/// Canonical upright outline in pixel coordinates (y down), largest extent =
/// scale * min(canvas side), bounding box centered on the canvas.
Polygon base_polygon(PatternClass c, double scale, const SynthConfig& cfg = {});
Polygon base_polygon(PatternClass c, double scale, const SynthConfig& cfg, const ShapeProportions& shape);

/// Even-odd fill sampled at pixel centers.
ShapeMask rasterize(const Polygon& poly, int width, int height);

/// Separable Gaussian blur of the 0/1 mask re-thresholded at 0.5 (zero border).
ShapeMask blur_threshold(const ShapeMask& mask, double sigma);

/// Boundary resampled to `n` points by arc length; original vertices are kept.
Polygon resample_boundary(const Polygon& poly, int n);

struct PerturbInfo {
  double rotation = 0.0;  ///< applied jitter, degrees
};

/// Fixed pipeline: resample -> radial noise -> sinusoidal warp -> rotate ->
/// rasterize -> blur + re-threshold. Throws DegenerateShape when fewer than 16
/// foreground pixels survive.
ShapeMask perturb_and_rasterize(const Polygon& poly, const SynthConfig& cfg, Rng& rng, PerturbInfo* info = nullptr);

struct SampleRecord {
  std::string filename;
  PatternClass cls = PatternClass::Circle;
  int index = 0;
  std::uint64_t seed_offset = 0;
  double scale = 0.0;
  double rotation = 0.0;
};

struct Dataset {
  std::vector<SampleRecord> records;  ///< class-major, index-minor
  std::vector<ShapeMask> masks;       ///< parallel to records
};

inline constexpr int kMaxRetries = 10;

/// Balanced dataset; each sample draws from its own substream so the result
/// is independent of scheduling. Samples are generated in parallel.
Dataset generate_dataset(const SynthConfig& cfg);

/// One sample with the same substream layout generate_dataset uses.
SampleRecord generate_sample(const SynthConfig& cfg, PatternClass c, int index, ShapeMask& out);

namespace serial {
Dataset generate_dataset(const SynthConfig& cfg);
}

/// Writes `<class>_<index>.pgm` files and manifest.csv
/// (`filename,class,seed_offset,scale,rotation`).
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);
std::string manifest_csv(const std::vector<SampleRecord>& records);
std::vector<SampleRecord> read_manifest(const std::filesystem::path& manifest);

}  // namespace firesig
