#include "firesig/synth.hpp"

#include "firesig/error.hpp"
#include "firesig/image_io.hpp"
#include "firesig/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <sstream>

namespace firesig {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }

// Local outlines use y-up unit-ish coordinates; normalize() fits them to the canvas.
Polygon local_outline(PatternClass c, const ShapeProportions& p) {
  Polygon poly;
  switch (c) {
    case PatternClass::Circle: {
      for (int i = 0; i < p.circle_vertices; ++i) {
        const double a = 2.0 * kPi * i / p.circle_vertices;
        poly.push_back({0.5 * std::cos(a), 0.5 * std::sin(a)});
      }
      break;
    }
    case PatternClass::HalfCircle: {
      const int arc = p.circle_vertices / 2;
      for (int i = 0; i <= arc; ++i) {
        const double a = kPi * i / arc;
        poly.push_back({0.5 * std::cos(a), 0.5 * std::sin(a)});
      }
      break;
    }
    case PatternClass::Hourglass: {
      const double hw = p.hourglass_width / 2.0;
      const double waist = p.hourglass_waist / 2.0;
      poly = {{-hw, 0.5}, {-waist, 0.0}, {-hw, -0.5}, {hw, -0.5}, {waist, 0.0}, {hw, 0.5}};
      break;
    }
    case PatternClass::Rectangle: {
      const double hw = 0.5 / p.rectangle_aspect;
      poly = {{-hw, 0.5}, {-hw, -0.5}, {hw, -0.5}, {hw, 0.5}};
      break;
    }
    case PatternClass::TriangleUp:
    case PatternClass::TriangleDown: {
      const double hb = std::tan(deg2rad(p.triangle_apex_deg / 2.0));
      if (c == PatternClass::TriangleUp)
        poly = {{-hb, 0.5}, {0.0, -0.5}, {hb, 0.5}};
      else
        poly = {{0.0, 0.5}, {-hb, -0.5}, {hb, -0.5}};
      break;
    }
    case PatternClass::VShape: {
      // Unit height; the outer edges leave the bottom vertex at +-half the opening.
      const double half = deg2rad(p.v_opening_deg / 2.0);
      const double outer_w = 2.0 * std::tan(half);
      // Leg width is specified against the largest extent.
      const double extent = std::max(1.0, outer_w);
      const double t = p.v_leg_width * extent;
      const double inner_rise = t / std::sin(half);
      const double inner_x = (1.0 - inner_rise) * std::tan(half);
      poly = {{0.0, -0.5},
              {outer_w / 2.0, 0.5},
              {inner_x, 0.5},
              {0.0, -0.5 + inner_rise},
              {-inner_x, 0.5},
              {-outer_w / 2.0, 0.5}};
      break;
    }
    case PatternClass::UShape: {
      const double hw = p.u_width / 2.0;
      const double nw = hw * p.u_notch_width;
      const double notch_bottom = 0.5 - p.u_notch_height;
      poly = {{-hw, -0.5}, {hw, -0.5}, {hw, 0.5}, {nw, 0.5}, {nw, notch_bottom}, {-nw, notch_bottom}, {-nw, 0.5},
              {-hw, 0.5}};
      break;
    }
  }
  return poly;
}

Polygon normalize(const Polygon& local, double extent, const SynthConfig& cfg) {
  double x0 = local[0].x, x1 = x0, y0 = local[0].y, y1 = y0;
  for (const auto& q : local) {
    x0 = std::min(x0, q.x);
    x1 = std::max(x1, q.x);
    y0 = std::min(y0, q.y);
    y1 = std::max(y1, q.y);
  }
  const double k = extent / std::max(x1 - x0, y1 - y0);
  const double mx = 0.5 * (x0 + x1);
  const double my = 0.5 * (y0 + y1);
  const double cx = 0.5 * (cfg.canvas_width - 1);
  const double cy = 0.5 * (cfg.canvas_height - 1);
  Polygon out;
  out.reserve(local.size());
  for (const auto& q : local) out.push_back({cx + k * (q.x - mx), cy - k * (q.y - my)});
  return out;
}

Point2 vertex_mean(const Polygon& poly) {
  Point2 c;
  for (const auto& q : poly) {
    c.x += q.x;
    c.y += q.y;
  }
  c.x /= static_cast<double>(poly.size());
  c.y /= static_cast<double>(poly.size());
  return c;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[static_cast<std::size_t>(i + r)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

std::uint64_t seed_offset_for(const SynthConfig& cfg, int class_idx, int index, int attempt) {
  const auto sample = static_cast<std::uint64_t>(class_idx) * static_cast<std::uint64_t>(cfg.n_per_class) +
                      static_cast<std::uint64_t>(index);
  return sample * 16 + static_cast<std::uint64_t>(attempt);
}

int class_index(PatternClass c) { return static_cast<int>(c); }

std::string format_real(double v) { return fmt::format("{:.6f}", v); }

}  // namespace

std::string_view to_string(PatternClass c) {
  switch (c) {
    case PatternClass::Circle: return "circle";
    case PatternClass::HalfCircle: return "half_circle";
    case PatternClass::Hourglass: return "hourglass";
    case PatternClass::Rectangle: return "rectangle";
    case PatternClass::TriangleUp: return "triangle_up";
    case PatternClass::TriangleDown: return "triangle_down";
    case PatternClass::VShape: return "v_shape";
    case PatternClass::UShape: return "u_shape";
  }
  return "unknown";
}

PatternClass parse_pattern_class(std::string_view name) {
  for (auto c : kAllClasses)
    if (to_string(c) == name) return c;
  throw Error(ErrorKind::Config, "unknown pattern class '" + std::string(name) + "'");
}

std::string group_label(PatternClass c, Grouping g) {
  if (g == Grouping::Seven && (c == PatternClass::TriangleUp || c == PatternClass::TriangleDown)) return "triangle";
  return std::string(to_string(c));
}

std::vector<std::string> group_labels(Grouping g) {
  std::vector<std::string> out;
  for (auto c : kAllClasses) {
    auto l = group_label(c, g);
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  return out;
}

void SynthConfig::validate() const {
  if (canvas_width < ShapeMask::kMinSide || canvas_height < ShapeMask::kMinSide)
    throw Error(ErrorKind::Config, "canvas must be at least 8x8");
  if (n_per_class < 1) throw Error(ErrorKind::Config, "n_per_class must be >= 1");
  if (noise_amplitude < 0 || smoothing_sigma < 0 || distortion_amplitude < 0 || rotation_jitter < 0)
    throw Error(ErrorKind::Config, "amplitudes must be >= 0");
  if (!(scale_min > 0.0 && scale_min <= scale_max && scale_max <= 1.0))
    throw Error(ErrorKind::Config, "scale range must lie within (0, 1]");
  if (!(proportion_jitter >= 0.0 && proportion_jitter < 0.9))
    throw Error(ErrorKind::Config, "proportion_jitter must lie in [0, 0.9)");
  if (boundary_points < 3) throw Error(ErrorKind::Config, "boundary_points must be >= 3");
}

Polygon base_polygon(PatternClass c, double scale, const SynthConfig& cfg) {
  return base_polygon(c, scale, cfg, cfg.shape);
}

Polygon base_polygon(PatternClass c, double scale, const SynthConfig& cfg, const ShapeProportions& shape) {
  const double extent = scale * std::min(cfg.canvas_width, cfg.canvas_height);
  return normalize(local_outline(c, shape), extent, cfg);
}

ShapeProportions jitter_proportions(const ShapeProportions& base, double jitter, Rng& rng) {
  ShapeProportions p = base;
  double* fields[] = {&p.rectangle_aspect, &p.triangle_apex_deg, &p.hourglass_width, &p.hourglass_waist,
                      &p.v_leg_width,      &p.v_opening_deg,     &p.u_width,         &p.u_notch_width,
                      &p.u_notch_height};
  for (double* f : fields) {
    const double u = rng.uniform(-1.0, 1.0);
    *f *= 1.0 + jitter * u;
  }
  return p;
}

ShapeMask rasterize(const Polygon& poly, int width, int height) {
  ShapeMask mask(width, height);
  std::vector<double> xs;
  const std::size_t n = poly.size();
  for (int y = 0; y < height; ++y) {
    xs.clear();
    const double yc = y;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = poly[i];
      const Point2& b = poly[(i + 1) % n];
      // Half-open in y so shared vertices are counted once.
      if ((a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y))
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k])));
      const int x1 = std::min(width - 1, static_cast<int>(std::ceil(xs[k + 1])) - 1);
      for (int x = x0; x <= x1; ++x) mask.set(x, y, true);
    }
  }
  return mask;
}

ShapeMask blur_threshold(const ShapeMask& mask, double sigma) {
  if (sigma <= 0.0) return mask;
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int w = mask.width();
  const int h = mask.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += k[static_cast<std::size_t>(i + r)] * mask.at_or_zero(x + i, y);
      tmp[static_cast<std::size_t>(y) * w + x] = s;
    }
  ShapeMask out(w, h, mask.pixel_scale());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int yy = y + i;
        if (yy < 0 || yy >= h) continue;
        s += k[static_cast<std::size_t>(i + r)] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out.set(x, y, s >= 0.5);
    }
  return out;
}

Polygon resample_boundary(const Polygon& poly, int n) {
  const std::size_t m = poly.size();
  if (static_cast<std::size_t>(n) <= m) return poly;
  std::vector<double> len(m);
  double perimeter = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % m];
    len[i] = std::hypot(b.x - a.x, b.y - a.y);
    perimeter += len[i];
  }
  // Largest-remainder allocation of n points, at least one (the vertex) per edge.
  std::vector<int> count(m, 1);
  int spare = n - static_cast<int>(m);
  std::vector<double> want(m);
  for (std::size_t i = 0; i < m; ++i) want[i] = spare * len[i] / perimeter;
  int used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const int f = static_cast<int>(std::floor(want[i]));
    count[i] += f;
    used += f;
  }
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return want[a] - std::floor(want[a]) > want[b] - std::floor(want[b]);
  });
  for (int r = 0; r < spare - used; ++r) ++count[order[static_cast<std::size_t>(r) % m]];

  Polygon out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % m];
    for (int j = 0; j < count[i]; ++j) {
      const double t = static_cast<double>(j) / count[i];
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

ShapeMask perturb_and_rasterize(const Polygon& poly, const SynthConfig& cfg, Rng& rng, PerturbInfo* info) {
  Polygon pts = resample_boundary(poly, cfg.boundary_points);
  const Point2 c = vertex_mean(poly);

  // Draw order is part of the reproducibility contract.
  const double warp_amp = cfg.distortion_amplitude * rng.uniform(-1.0, 1.0);
  const double warp_phase = rng.uniform(0.0, 2.0 * kPi);
  const double rotation = cfg.rotation_jitter > 0.0 ? rng.uniform(-cfg.rotation_jitter, cfg.rotation_jitter) : 0.0;

  if (cfg.noise_amplitude > 0.0) {
    for (auto& q : pts) {
      const double u = rng.uniform(-cfg.noise_amplitude, cfg.noise_amplitude);
      q.x = c.x + (q.x - c.x) * (1.0 + u);
      q.y = c.y + (q.y - c.y) * (1.0 + u);
    }
  }

  if (warp_amp != 0.0) {
    double half_extent = 0.0;
    for (const auto& q : poly) half_extent = std::max({half_extent, std::abs(q.x - c.x), std::abs(q.y - c.y)});
    const double amplitude = warp_amp * half_extent;
    const double lambda = 0.5 * cfg.canvas_height;
    for (auto& q : pts) q.x += amplitude * std::sin(2.0 * kPi * q.y / lambda + warp_phase);
  }

  if (rotation != 0.0) {
    // Screen-counterclockwise turn in y-down coordinates.
    const double a = deg2rad(rotation);
    const double ca = std::cos(a);
    const double sa = std::sin(a);
    const double cx = 0.5 * (cfg.canvas_width - 1);
    const double cy = 0.5 * (cfg.canvas_height - 1);
    for (auto& q : pts) {
      const double dx = q.x - cx;
      const double dy = q.y - cy;
      q = {cx + ca * dx + sa * dy, cy - sa * dx + ca * dy};
    }
  }

  ShapeMask mask = blur_threshold(rasterize(pts, cfg.canvas_width, cfg.canvas_height), cfg.smoothing_sigma);
  if (mask.foreground_count() < static_cast<std::size_t>(ShapeMask::kMinForeground))
    throw Error(ErrorKind::DegenerateShape, "perturbed shape has fewer than 16 foreground pixels");
  if (info) info->rotation = rotation;
  return mask;
}

SampleRecord generate_sample(const SynthConfig& cfg, PatternClass c, int index, ShapeMask& out) {
  SampleRecord rec;
  rec.cls = c;
  rec.index = index;
  rec.filename = fmt::format("{}_{}.pgm", to_string(c), index);
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    rec.seed_offset = seed_offset_for(cfg, class_index(c), index, attempt);
    Rng rng(derive_seed(cfg.seed, {rec.seed_offset}));
    rec.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
    const auto shape = jitter_proportions(cfg.shape, cfg.proportion_jitter, rng);
    PerturbInfo info;
    try {
      out = perturb_and_rasterize(base_polygon(c, rec.scale, cfg, shape), cfg, rng, &info);
      rec.rotation = info.rotation;
      return rec;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateShape || attempt == kMaxRetries) throw;
    }
  }
  throw Error(ErrorKind::DegenerateShape, "retries exhausted");
}

Dataset generate_dataset(const SynthConfig& cfg) {
  cfg.validate();
  const int per = cfg.n_per_class;
  const int total = per * static_cast<int>(kAllClasses.size());
  Dataset ds;
  ds.records.resize(static_cast<std::size_t>(total));
  ds.masks.resize(static_cast<std::size_t>(total));
  std::vector<std::string> failures(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 4) num_threads(max_threads())
  for (int s = 0; s < total; ++s) {
    const auto i = static_cast<std::size_t>(s);
    try {
      ds.records[i] = generate_sample(cfg, kAllClasses[static_cast<std::size_t>(s / per)], s % per, ds.masks[i]);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw Error(ErrorKind::DegenerateShape, f);
  return ds;
}

namespace serial {

Dataset generate_dataset(const SynthConfig& cfg) {
  cfg.validate();
  Dataset ds;
  for (auto c : kAllClasses)
    for (int i = 0; i < cfg.n_per_class; ++i) {
      ShapeMask m;
      ds.records.push_back(generate_sample(cfg, c, i, m));
      ds.masks.push_back(std::move(m));
    }
  return ds;
}

}  // namespace serial

std::string manifest_csv(const std::vector<SampleRecord>& records) {
  std::string out = "filename,class,seed_offset,scale,rotation\n";
  for (const auto& r : records)
    out += fmt::format("{},{},{},{},{}\n", r.filename, to_string(r.cls), r.seed_offset, format_real(r.scale),
                       format_real(r.rotation));
  return out;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < ds.records.size(); ++i) write_pgm(dir / ds.records[i].filename, ds.masks[i]);
  std::ofstream out(dir / "manifest.csv", std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest in " + dir.string());
  out << manifest_csv(ds.records);
}

std::vector<SampleRecord> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + manifest.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("filename,class", 0) != 0)
    throw Error(ErrorKind::Io, manifest.string() + ": missing manifest header");
  std::vector<SampleRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f, cls, off, scale, rot;
    if (!std::getline(ss, f, ',') || !std::getline(ss, cls, ',') || !std::getline(ss, off, ',') ||
        !std::getline(ss, scale, ',') || !std::getline(ss, rot, ','))
      throw Error(ErrorKind::Io, manifest.string() + ": malformed row '" + line + "'");
    SampleRecord r;
    r.filename = f;
    r.cls = parse_pattern_class(cls);
    try {
      r.seed_offset = std::stoull(off);
      r.scale = std::stod(scale);
      r.rotation = std::stod(rot);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Io, manifest.string() + ": malformed number in '" + line + "'");
    }
    const auto us = f.find_last_of('_');
    const auto dot = f.find_last_of('.');
    if (us != std::string::npos && dot != std::string::npos && dot > us + 1) {
      try {
        r.index = std::stoi(f.substr(us + 1, dot - us - 1));
      } catch (const std::logic_error&) {
        r.index = 0;
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace firesig
