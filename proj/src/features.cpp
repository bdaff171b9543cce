#include "firesig/features.hpp"

#include "firesig/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <fmt/format.h>

namespace firesig {

namespace {

constexpr int N = kSignatureSize;

int wrap(int i) { return ((i % N) + N) % N; }

int circular_distance(int a, int b) {
  const int d = std::abs(wrap(a) - wrap(b));
  return std::min(d, N - d);
}

// Plateau-aware strict local maxima on the circular signal; a plateau reports
// its middle sample (lower-index middle for even lengths).
std::vector<int> local_maxima(const std::array<double, N>& s) {
  std::vector<int> out;
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  if (*lo == *hi) return out;
  // Start at a sample that differs from its predecessor so no plateau is split.
  int start = 0;
  while (s[wrap(start - 1)] == s[start]) ++start;
  int i = start;
  int visited = 0;
  while (visited < N) {
    int run = 1;
    while (run < N && s[wrap(i + run)] == s[wrap(i)]) ++run;
    const double before = s[wrap(i - 1)];
    const double after = s[wrap(i + run)];
    if (before < s[wrap(i)] && after < s[wrap(i)]) out.push_back(wrap(i + (run - 1) / 2));
    i += run;
    visited += run;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double prominence(const std::array<double, N>& s, int at) {
  const double h = s[at];
  double left_min = h;
  bool left_higher = false;
  for (int k = 1; k < N; ++k) {
    const double v = s[wrap(at - k)];
    if (v > h) {
      left_higher = true;
      break;
    }
    left_min = std::min(left_min, v);
  }
  if (!left_higher) return h - *std::min_element(s.begin(), s.end());
  double right_min = h;
  for (int k = 1; k < N; ++k) {
    const double v = s[wrap(at + k)];
    if (v > h) break;
    right_min = std::min(right_min, v);
  }
  return h - std::max(left_min, right_min);
}

std::vector<Extremum> find_peaks(const std::array<double, N>& s, const ExtremaConfig& cfg) {
  std::vector<Extremum> cands;
  for (int i : local_maxima(s)) {
    const double p = prominence(s, i);
    if (p >= cfg.min_prominence) cands.push_back({i, s[i], p});
  }
  // Higher peaks claim their neighbourhood first.
  std::sort(cands.begin(), cands.end(), [](const Extremum& a, const Extremum& b) {
    return a.value != b.value ? a.value > b.value : a.angle < b.angle;
  });
  std::vector<Extremum> kept;
  for (const auto& c : cands) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](const Extremum& k) {
      return circular_distance(k.angle, c.angle) >= cfg.min_separation;
    });
    if (clear) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const Extremum& a, const Extremum& b) { return a.angle < b.angle; });
  return kept;
}

struct Tagged {
  Extremum e;
  bool peak;
};

// Drop the weaker member of any two circularly consecutive extrema of the
// same kind until kinds alternate.
void enforce_alternation(std::vector<Tagged>& seq) {
  bool changed = true;
  while (changed && seq.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::size_t j = (i + 1) % seq.size();
      if (i == j || seq[i].peak != seq[j].peak) continue;
      const bool peak = seq[i].peak;
      const double vi = seq[i].e.value;
      const double vj = seq[j].e.value;
      const bool drop_j = peak ? vi >= vj : vi <= vj;
      seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(drop_j ? j : i));
      changed = true;
      break;
    }
  }
}

}  // namespace

void ExtremaConfig::validate() const {
  if (smoothing_window < 1 || smoothing_window % 2 == 0)
    throw Error(ErrorKind::Config, "smoothing_window must be odd and >= 1");
  if (!(min_prominence > 0.0 && min_prominence < 1.0))
    throw Error(ErrorKind::Config, "min_prominence must lie in (0, 1)");
  if (min_separation < 1 || min_separation > 120) throw Error(ErrorKind::Config, "min_separation must lie in [1, 120]");
  if (reference_window < 0 || reference_window >= 180)
    throw Error(ErrorKind::Config, "reference_window must lie in [0, 180)");
}

std::array<double, N> circular_smooth(std::span<const double, N> values, int window) {
  const int half = window / 2;
  std::array<double, N> out{};
  for (int i = 0; i < N; ++i) {
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) sum += values[wrap(i + k)];
    out[i] = sum / window;
  }
  return out;
}

Extrema detect_extrema(std::span<const double, N> values, const ExtremaConfig& cfg) {
  cfg.validate();
  const auto s = circular_smooth(values, cfg.smoothing_window);
  std::array<double, N> neg{};
  for (int i = 0; i < N; ++i) neg[i] = -s[i];

  std::vector<Tagged> seq;
  for (const auto& p : find_peaks(s, cfg)) seq.push_back({p, true});
  for (auto v : find_peaks(neg, cfg)) {
    v.value = -v.value;
    seq.push_back({v, false});
  }
  std::sort(seq.begin(), seq.end(), [](const Tagged& a, const Tagged& b) { return a.e.angle < b.e.angle; });
  enforce_alternation(seq);

  if (cfg.reference_window > 0 && !seq.empty()) {
    auto nearest = std::min_element(seq.begin(), seq.end(), [](const Tagged& a, const Tagged& b) {
      return circular_distance(a.e.angle, 0) < circular_distance(b.e.angle, 0);
    });
    if (circular_distance(nearest->e.angle, 0) <= cfg.reference_window) seq.erase(nearest);
  }

  Extrema out;
  for (const auto& t : seq) (t.peak ? out.peaks : out.valleys).push_back(t.e);
  return out;
}

std::vector<double> PatternFeatures::to_row() const {
  std::vector<double> row;
  row.reserve(kFeatureDim);
  row.insert(row.end(), signature.begin(), signature.end());
  row.push_back(n_peaks);
  row.push_back(n_valleys);
  row.insert(row.end(), locations.begin(), locations.end());
  return row;
}

PatternFeatures build_features(const AspectSignature& sig, const ExtremaConfig& cfg) {
  PatternFeatures f;
  f.signature = sig.values;
  auto ext = detect_extrema(sig, cfg);
  f.peaks = std::move(ext.peaks);
  f.valleys = std::move(ext.valleys);
  f.n_peaks = static_cast<int>(f.peaks.size());
  f.n_valleys = static_cast<int>(f.valleys.size());
  for (int i = 0; i < kLocationSlots && i < f.n_peaks; ++i) f.locations[i] = f.peaks[i].angle / 360.0;
  for (int i = 0; i < kLocationSlots && i < f.n_valleys; ++i)
    f.locations[kLocationSlots + i] = f.valleys[i].angle / 360.0;
  return f;
}

const std::vector<std::string>& feature_column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    n.reserve(kFeatureDim);
    for (int t = 0; t < N; ++t) n.push_back(fmt::format("a{:03d}", t));
    n.emplace_back("n_peaks");
    n.emplace_back("n_valleys");
    for (int i = 0; i < kLocationSlots; ++i) n.push_back(fmt::format("peak_loc{}", i));
    for (int i = 0; i < kLocationSlots; ++i) n.push_back(fmt::format("valley_loc{}", i));
    return n;
  }();
  return names;
}

std::string describe_feature(int index) {
  if (index >= 0 && index < N) return fmt::format("aspect ratio at {}°", index);
  if (index == N) return "number of peaks";
  if (index == N + 1) return "number of valleys";
  const int slot = index - (N + 2);
  if (slot >= 0 && slot < kLocationSlots) return fmt::format("peak {} location", slot + 1);
  if (slot >= kLocationSlots && slot < 2 * kLocationSlots)
    return fmt::format("valley {} location", slot - kLocationSlots + 1);
  return fmt::format("feature {}", index);
}

}  // namespace firesig
