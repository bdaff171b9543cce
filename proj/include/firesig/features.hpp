#pragma once

#include "firesig/signature.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace firesig {

inline constexpr int kLocationSlots = 5;
/// 360 signature samples + peak count + valley count + 10 locations.
inline constexpr int kFeatureDim = kSignatureSize + 2 + 2 * kLocationSlots;

struct ExtremaConfig {
  int smoothing_window = 5;      ///< degrees, odd, circular moving average
  double min_prominence = 0.05;  ///< topographic prominence on the smoothed signal
  int min_separation = 15;       ///< degrees between two extrema of the same kind
  /// The angle-0 reference direction is the pattern's anchor point: the single
  /// extremum closest to 0°, if within this many degrees, is the reference
  /// itself and is not reported. 0 disables the rule.
  int reference_window = 15;

  /// Throws Error{Config} on out-of-range values.
  void validate() const;
};

struct Extremum {
  int angle = 0;            ///< degrees in [0, 360)
  double value = 0.0;       ///< smoothed signal value
  double prominence = 0.0;
};

struct Extrema {
  std::vector<Extremum> peaks;    ///< ascending angle
  std::vector<Extremum> valleys;  ///< ascending angle
};

Extrema detect_extrema(std::span<const double, kSignatureSize> values, const ExtremaConfig& cfg = {});
inline Extrema detect_extrema(const AspectSignature& sig, const ExtremaConfig& cfg = {}) {
  return detect_extrema(std::span<const double, kSignatureSize>(sig.values), cfg);
}

/// Circular moving average used by detect_extrema.
std::array<double, kSignatureSize> circular_smooth(std::span<const double, kSignatureSize> values, int window);

struct PatternFeatures {
  std::array<double, kSignatureSize> signature{};
  int n_peaks = 0;
  int n_valleys = 0;
  /// First five peak angles then first five valley angles, each / 360, zero padded.
  std::array<double, 2 * kLocationSlots> locations{};
  std::vector<Extremum> peaks;
  std::vector<Extremum> valleys;

  /// Classifier input row, column order as feature_column_names().
  std::vector<double> to_row() const;
};

PatternFeatures build_features(const AspectSignature& sig, const ExtremaConfig& cfg = {});

/// a000..a359, n_peaks, n_valleys, peak_loc0..4, valley_loc0..4
const std::vector<std::string>& feature_column_names();

/// Human-readable name for a feature column, e.g. "aspect ratio at 76°".
std::string describe_feature(int index);

}  // namespace firesig
