#include "oracles.hpp"

#include "firesig/error.hpp"
#include "firesig/features.hpp"
#include "firesig/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace firesig;

namespace {

SynthConfig clean() {
  SynthConfig c;
  c.noise_amplitude = 0.0;
  c.distortion_amplitude = 0.0;
  c.smoothing_sigma = 0.0;
  c.rotation_jitter = 0.0;
  c.proportion_jitter = 0.0;
  return c;
}

/// Lightly perturbed generator levels used for the per-class mean curves.
SynthConfig nominal() {
  SynthConfig c;
  c.noise_amplitude = 0.06;
  c.distortion_amplitude = 0.08;
  c.rotation_jitter = 5.0;
  c.proportion_jitter = 0.0;
  return c;
}

Extrema mean_curve_extrema(const SynthConfig& base, PatternClass cls, int n, const ExtremaConfig& ec = {}) {
  auto cfg = base;
  cfg.seed = 21;
  std::array<double, kSignatureSize> mean{};
  for (int i = 0; i < n; ++i) {
    ShapeMask m;
    generate_sample(cfg, cls, i, m);
    const auto s = aspect_signature(m);
    for (int a = 0; a < kSignatureSize; ++a) mean[static_cast<std::size_t>(a)] += s.values[static_cast<std::size_t>(a)] / n;
  }
  return detect_extrema(std::span<const double, kSignatureSize>(mean), ec);
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("class names round trip") {
  for (auto c : kAllClasses) CHECK(parse_pattern_class(to_string(c)) == c);
  CHECK_THROWS_AS(parse_pattern_class("star"), Error);
  CHECK(group_labels(Grouping::Seven).size() == 7);
  CHECK(group_labels(Grouping::Eight).size() == 8);
  CHECK(group_label(PatternClass::TriangleUp, Grouping::Seven) == group_label(PatternClass::TriangleDown, Grouping::Seven));
}

TEST_CASE("circle: 64 vertices on radius 0.4 canvas at scale 0.8") {
  const auto p = base_polygon(PatternClass::Circle, 0.8);
  REQUIRE(p.size() == 64);
  for (const auto& v : p) CHECK(std::hypot(v.x - 127.5, v.y - 127.5) == doctest::Approx(102.4).epsilon(1e-12));
}

TEST_CASE("rectangle: four vertices, height 2.2 times width") {
  for (double s : {0.55, 0.7, 0.9}) {
    const auto p = base_polygon(PatternClass::Rectangle, s);
    REQUIRE(p.size() == 4);
    double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
    for (const auto& v : p) {
      x0 = std::min(x0, v.x), x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y), y1 = std::max(y1, v.y);
    }
    CHECK((y1 - y0) / (x1 - x0) == doctest::Approx(2.2));
    CHECK(y1 - y0 == doctest::Approx(s * 256));
  }
}

TEST_CASE("hourglass is horizontally centered") {
  const auto m = rasterize(base_polygon(PatternClass::Hourglass, 0.8), 256, 256);
  CHECK(std::abs(compute_centroid(m).x - 127.5) <= 1.0);
}

TEST_CASE("triangle orientation") {
  auto widths = [](const ShapeMask& m) {
    int top = -1, bottom = -1;
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        if (m.at(x, y)) {
          if (top < 0) top = y;
          bottom = y;
        }
    auto row_width = [&](int y) {
      int n = 0;
      for (int x = 0; x < m.width(); ++x) n += m.at(x, y);
      return n;
    };
    return std::pair{row_width(top + 5), row_width(bottom - 5)};
  };
  const auto [down_top, down_bottom] = widths(rasterize(base_polygon(PatternClass::TriangleDown, 0.8), 256, 256));
  CHECK(down_top < down_bottom);  // apex on top
  const auto [up_top, up_bottom] = widths(rasterize(base_polygon(PatternClass::TriangleUp, 0.8), 256, 256));
  CHECK(up_top > up_bottom);
}

TEST_CASE("identity pipeline reproduces the base rasterization") {
  const auto cfg = clean();
  for (auto c : kAllClasses) {
    const auto poly = base_polygon(c, 0.7, cfg);
    Rng rng(1);
    CHECK(perturb_and_rasterize(poly, cfg, rng) == rasterize(poly, 256, 256));
  }
}

TEST_CASE("same seed, same mask") {
  SynthConfig cfg;
  cfg.seed = 77;
  ShapeMask a, b, c;
  const auto ra = generate_sample(cfg, PatternClass::VShape, 4, a);
  const auto rb = generate_sample(cfg, PatternClass::VShape, 4, b);
  CHECK(a == b);
  CHECK(ra.seed_offset == rb.seed_offset);
  cfg.seed = 78;
  generate_sample(cfg, PatternClass::VShape, 4, c);
  CHECK(!(a == c));
}

TEST_CASE("three per class gives 24 masks; parallel equals serial") {
  SynthConfig cfg;
  cfg.n_per_class = 3;
  cfg.seed = 5;
  const auto ds = generate_dataset(cfg);
  CHECK(ds.masks.size() == 24);
  CHECK(ds.records.size() == 24);
  CHECK(ds.records[0].filename == "circle_0.pgm");
  const auto ref = serial::generate_dataset(cfg);
  CHECK(ds.masks == ref.masks);
  CHECK(manifest_csv(ds.records) == manifest_csv(ref.records));
}

TEST_CASE("manifest round trip") {
  SynthConfig cfg;
  cfg.n_per_class = 2;
  cfg.seed = 9;
  const auto ds = generate_dataset(cfg);
  const auto dir = oracle::scratch_dir("manifest");
  write_dataset(dir, ds);
  const auto text = oracle::slurp(dir / "manifest.csv");
  CHECK(text.rfind("filename,class,seed_offset,scale,rotation\n", 0) == 0);
  const auto back = read_manifest(dir / "manifest.csv");
  REQUIRE(back.size() == ds.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].filename == ds.records[i].filename);
    CHECK(back[i].cls == ds.records[i].cls);
    CHECK(back[i].seed_offset == ds.records[i].seed_offset);
  }
  CHECK(manifest_csv(back) == text);
}

TEST_CASE("perturbation stays within the Hausdorff bound") {
  for (const auto& cfg0 : {SynthConfig{}, nominal()}) {
    auto cfg = cfg0;
    cfg.seed = 31;
    const double bound =
        (cfg.noise_amplitude + cfg.distortion_amplitude + 3.0 * cfg.smoothing_sigma / cfg.canvas_width) * cfg.canvas_width;
    for (int i = 0; i < 50; ++i) {
      const auto cls = kAllClasses[static_cast<std::size_t>(i) % 8];
      ShapeMask m;
      const auto rec = generate_sample(cfg, cls, i / 8, m);
      Rng rng(derive_seed(cfg.seed, {rec.seed_offset}));
      const double scale = rng.uniform(cfg.scale_min, cfg.scale_max);
      const auto shape = jitter_proportions(cfg.shape, cfg.proportion_jitter, rng);
      const auto base = rasterize(base_polygon(cls, scale, cfg, shape), cfg.canvas_width, cfg.canvas_height);
      const double h = std::max(oracle::directed_hausdorff(m, base), oracle::directed_hausdorff(base, m));
      CAPTURE(i);
      CHECK(h <= bound);
    }
  }
}

TEST_CASE("config validation") {
  SynthConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_per_class = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.scale_min = 0.9;
  c.scale_max = 0.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.noise_amplitude = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("mean triangle-down curve: two peaks, three valleys") {
  const auto ex = mean_curve_extrema(SynthConfig{}, PatternClass::TriangleDown, 100);
  CHECK(ex.peaks.size() == 2);
  CHECK(ex.valleys.size() == 3);
}

TEST_CASE("mean curves at light perturbation: flat circle, four-peak rectangle, M-shaped half-circle") {
  // Shape-level reading of the curves: every bump of 0.02 counts and the
  // anchor direction is not suppressed. The rectangle's corner pairs either
  // side of 0° and 180° dip by only ~0.05 in the mean, right at the default
  // detection threshold.
  ExtremaConfig shape;
  shape.min_prominence = 0.02;
  shape.reference_window = 0;
  const auto c = mean_curve_extrema(nominal(), PatternClass::Circle, 100, shape);
  CHECK(c.peaks.empty());
  const auto r = mean_curve_extrema(nominal(), PatternClass::Rectangle, 100, shape);
  REQUIRE(r.peaks.size() == 4);
  const double corner = std::atan(1.0 / 2.2) * 180.0 / std::numbers::pi;  // from vertical
  const double want[4] = {corner, 180.0 - corner, 180.0 + corner, 360.0 - corner};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(r.peaks[static_cast<std::size_t>(i)].angle - want[i]) <= 6.0);
  const auto h = mean_curve_extrema(nominal(), PatternClass::HalfCircle, 100, shape);
  REQUIRE(h.peaks.size() == 2);
  CHECK(h.peaks[0].angle < 180);
  CHECK(h.peaks[1].angle > 180);
}

}  // TEST_SUITE
