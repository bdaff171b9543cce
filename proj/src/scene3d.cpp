#include "firesig/scene3d.hpp"

#include "firesig/error.hpp"
#include "firesig/parallel.hpp"
#include "firesig/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace firesig {

std::string_view to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::Wall: return "WALL";
    case SurfaceKind::Floor: return "FLOOR";
    case SurfaceKind::Ceiling: return "CEILING";
    case SurfaceKind::Other: return "OTHER";
  }
  return "OTHER";
}

SurfaceKind parse_surface_kind(std::string_view s) {
  for (auto k : {SurfaceKind::Wall, SurfaceKind::Floor, SurfaceKind::Ceiling, SurfaceKind::Other})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::Schema, "unknown surface kind '" + std::string(s) + "'");
}

void PointCloud::validate() const {
  for (const auto& p : points)
    if (!p.allFinite()) throw Error(ErrorKind::Config, "point cloud has non-finite coordinates");
  if (!rgb.empty() && rgb.size() != points.size())
    throw Error(ErrorKind::Config, "color count does not match point count");
  if (!gravity_up.allFinite() || gravity_up.norm() < 1e-12) throw Error(ErrorKind::Config, "gravity axis must be non-zero");
}

void SegmentConfig::validate() const {
  if (!(inlier_eps > 0.0)) throw Error(ErrorKind::Config, "inlier_eps must be positive");
  if (!(min_inlier_frac > 0.0 && min_inlier_frac <= 1.0))
    throw Error(ErrorKind::Config, "min_inlier_frac must lie in (0, 1]");
  if (max_planes < 1) throw Error(ErrorKind::Config, "max_planes must be >= 1");
  if (iterations < 1) throw Error(ErrorKind::Config, "iterations must be >= 1");
}

namespace {

constexpr std::size_t kMinCloud = 100;

struct Plane {
  Vec3 n = Vec3::UnitZ();
  double d = 0.0;
  bool ok = false;
};

// Hypothesis `iter` of plane search `round`: three distinct remaining points.
Plane hypothesis(const std::vector<Vec3>& pts, const std::vector<int>& remaining, std::uint64_t seed, int round,
                 int iter) {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(iter)}));
  const auto m = remaining.size();
  const auto i = rng.below(m);
  auto j = rng.below(m - 1);
  if (j >= i) ++j;
  auto k = rng.below(m - 2);
  for (auto lo = std::min(i, j), hi = std::max(i, j); auto s : {lo, hi})
    if (k >= s) ++k;
  const Vec3& a = pts[static_cast<std::size_t>(remaining[i])];
  const Vec3& b = pts[static_cast<std::size_t>(remaining[j])];
  const Vec3& c = pts[static_cast<std::size_t>(remaining[k])];
  Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  Plane p;
  if (!(len > 1e-12)) return p;
  p.n = n / len;
  p.d = -p.n.dot(a);
  p.ok = true;
  return p;
}

int count_inliers(const std::vector<Vec3>& pts, const std::vector<int>& remaining, const Plane& p, double eps) {
  if (!p.ok) return -1;
  int c = 0;
  for (int idx : remaining)
    if (std::abs(p.n.dot(pts[static_cast<std::size_t>(idx)]) + p.d) <= eps) ++c;
  return c;
}

std::vector<int> inliers_of(const std::vector<Vec3>& pts, const std::vector<int>& remaining, const Plane& p,
                            double eps) {
  std::vector<int> out;
  for (int idx : remaining)
    if (std::abs(p.n.dot(pts[static_cast<std::size_t>(idx)]) + p.d) <= eps) out.push_back(idx);
  return out;
}

// Total least squares: normal = eigenvector of the smallest covariance eigenvalue.
Plane fit_plane(const std::vector<Vec3>& pts, const std::vector<int>& idx, Vec3* centroid) {
  Vec3 c = Vec3::Zero();
  for (int i : idx) c += pts[static_cast<std::size_t>(i)];
  c /= static_cast<double>(idx.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int i : idx) {
    const Vec3 q = pts[static_cast<std::size_t>(i)] - c;
    cov += q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  Plane p;
  p.n = es.eigenvectors().col(0).normalized();
  p.d = -p.n.dot(c);
  p.ok = true;
  if (centroid) *centroid = c;
  return p;
}

using Counter = std::vector<int> (*)(const std::vector<Vec3>&, const std::vector<int>&, const SegmentConfig&, int);

std::vector<int> counts_parallel(const std::vector<Vec3>& pts, const std::vector<int>& remaining,
                                 const SegmentConfig& cfg, int round) {
  std::vector<int> counts(static_cast<std::size_t>(cfg.iterations));
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (int it = 0; it < cfg.iterations; ++it)
    counts[static_cast<std::size_t>(it)] =
        count_inliers(pts, remaining, hypothesis(pts, remaining, cfg.seed, round, it), cfg.inlier_eps);
  return counts;
}

std::vector<int> counts_serial(const std::vector<Vec3>& pts, const std::vector<int>& remaining,
                               const SegmentConfig& cfg, int round) {
  std::vector<int> counts;
  counts.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int it = 0; it < cfg.iterations; ++it)
    counts.push_back(count_inliers(pts, remaining, hypothesis(pts, remaining, cfg.seed, round, it), cfg.inlier_eps));
  return counts;
}

std::vector<PlanarSegment> segment_impl(const PointCloud& cloud, const SegmentConfig& cfg, Counter counter) {
  cloud.validate();
  cfg.validate();
  const auto& pts = cloud.points;
  if (pts.size() < kMinCloud)
    throw Error(ErrorKind::InsufficientData, "segmentation needs at least 100 points");
  const auto min_count = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::ceil(cfg.min_inlier_frac * static_cast<double>(pts.size()) - 1e-9)));

  Vec3 cloud_centroid = Vec3::Zero();
  for (const auto& p : pts) cloud_centroid += p;
  cloud_centroid /= static_cast<double>(pts.size());
  const Vec3 up = cloud.gravity_up.normalized();

  std::vector<int> remaining(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) remaining[i] = static_cast<int>(i);

  std::vector<PlanarSegment> segments;
  for (int round = 0; round < cfg.max_planes && remaining.size() >= min_count; ++round) {
    const auto counts = counter(pts, remaining, cfg, round);
    const auto best_it = std::max_element(counts.begin(), counts.end()) - counts.begin();  // first max
    if (counts[static_cast<std::size_t>(best_it)] < static_cast<int>(min_count)) break;

    Plane plane = hypothesis(pts, remaining, cfg.seed, round, static_cast<int>(best_it));
    std::vector<int> in = inliers_of(pts, remaining, plane, cfg.inlier_eps);
    Vec3 centroid;
    for (int pass = 0; pass < 3; ++pass) {
      plane = fit_plane(pts, in, &centroid);
      auto next = inliers_of(pts, remaining, plane, cfg.inlier_eps);
      if (next.size() < 3) break;
      const bool same = next == in;
      in = std::move(next);
      if (same) break;
    }
    if (in.size() < min_count) break;
    // Final statistics over the final inlier set.
    Vec3 c = Vec3::Zero();
    for (int i : in) c += pts[static_cast<std::size_t>(i)];
    c /= static_cast<double>(in.size());

    PlanarSegment seg;
    seg.id = static_cast<int>(segments.size());
    seg.normal = plane.n;
    seg.offset = plane.d;
    // Face the cloud centroid; a plane through it falls back to facing up.
    double side = seg.signed_distance(cloud_centroid);
    if (std::abs(side) < 1e-9) side = seg.normal.dot(up);
    if (std::abs(side) < 1e-12) {
      const auto& n = seg.normal;
      side = std::abs(n.x()) > 1e-12 ? n.x() : (std::abs(n.y()) > 1e-12 ? n.y() : n.z());
    }
    if (side < 0) {
      seg.normal = -seg.normal;
      seg.offset = -seg.offset;
    }
    seg.inliers = in;
    seg.centroid = c;
    double ss = 0.0;
    for (int i : in) ss += std::pow(seg.signed_distance(pts[static_cast<std::size_t>(i)]), 2);
    seg.rms = std::sqrt(ss / static_cast<double>(in.size()));
    segments.push_back(std::move(seg));

    std::vector<int> rest;
    rest.reserve(remaining.size() - in.size());
    std::set_difference(remaining.begin(), remaining.end(), in.begin(), in.end(), std::back_inserter(rest));
    remaining = std::move(rest);
  }
  if (segments.empty()) throw Error(ErrorKind::NoPlanesFound, "no plane reaches min_inlier_frac");

  classify_segments(segments, up);
  for (auto& s : segments) s.chart = make_chart(s, pts, up);
  return segments;
}

}  // namespace

std::vector<PlanarSegment> segment_planes(const PointCloud& cloud, const SegmentConfig& cfg) {
  return segment_impl(cloud, cfg, counts_parallel);
}

namespace serial {
std::vector<PlanarSegment> segment_planes(const PointCloud& cloud, const SegmentConfig& cfg) {
  return segment_impl(cloud, cfg, counts_serial);
}
}  // namespace serial

void classify_segments(std::vector<PlanarSegment>& segments, const Vec3& gravity_up) {
  const Vec3 g = gravity_up.normalized();
  std::vector<std::size_t> horizontal;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double a = std::abs(segments[i].normal.dot(g));
    segments[i].kind = a < 0.3 ? SurfaceKind::Wall : SurfaceKind::Other;
    if (a > 0.9) horizontal.push_back(i);
  }
  if (horizontal.empty()) return;
  std::stable_sort(horizontal.begin(), horizontal.end(), [&](std::size_t a, std::size_t b) {
    return segments[a].centroid.dot(g) < segments[b].centroid.dot(g);
  });
  segments[horizontal.front()].kind = SurfaceKind::Floor;
  if (horizontal.size() > 1) segments[horizontal.back()].kind = SurfaceKind::Ceiling;
}

PlaneChart make_chart(const PlanarSegment& seg, const std::vector<Vec3>& points, const Vec3& gravity_up) {
  if (seg.inliers.size() < 3) throw Error(ErrorKind::InsufficientData, "chart needs at least 3 inliers");
  const Vec3 g = gravity_up.normalized();
  const Vec3& n = seg.normal;
  const Vec3 gp = g - g.dot(n) * n;
  PlaneChart ch;
  ch.origin = seg.centroid - seg.signed_distance(seg.centroid) * n;
  if (seg.kind == SurfaceKind::Wall && gp.norm() < 1e-9)
    throw Error(ErrorKind::DegenerateBasis, "wall normal is parallel to gravity");
  if (seg.kind == SurfaceKind::Wall || std::abs(n.dot(g)) <= 0.9) {
    ch.v = gp.normalized();
  } else {
    // Principal in-plane axis, signed toward the inlier farthest along it.
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i : seg.inliers) {
      Vec3 q = points[static_cast<std::size_t>(i)] - ch.origin;
      q -= q.dot(n) * n;
      cov += q * q.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    Vec3 e = es.eigenvectors().col(2);
    e = (e - e.dot(n) * n).normalized();
    double best = -1.0;
    double sign = 1.0;
    for (int i : seg.inliers) {
      const double t = e.dot(points[static_cast<std::size_t>(i)] - ch.origin);
      if (std::abs(t) > best) {
        best = std::abs(t);
        sign = t < 0 ? -1.0 : 1.0;
      }
    }
    ch.v = sign * e;
  }
  ch.u = ch.v.cross(n);
  ch.u_min = ch.v_min = std::numeric_limits<double>::infinity();
  ch.u_max = ch.v_max = -std::numeric_limits<double>::infinity();
  for (int i : seg.inliers) {
    const auto q = ch.to_uv(points[static_cast<std::size_t>(i)]);
    ch.u_min = std::min(ch.u_min, q.x());
    ch.u_max = std::max(ch.u_max, q.x());
    ch.v_min = std::min(ch.v_min, q.y());
    ch.v_max = std::max(ch.v_max, q.y());
  }
  return ch;
}

Eigen::Vector2d ImageFrame::pixel_of(const Vec3& p) const {
  const auto q = chart.to_uv(p);
  return {(q.x() - chart.u_min) * resolution, (chart.v_max - q.y()) * resolution};
}

Vec3 ImageFrame::point_of(const Eigen::Vector2d& px) const {
  return chart.from_uv({px.x() / resolution + chart.u_min, chart.v_max - px.y() / resolution});
}

ImageFrame plane_to_image(const PlanarSegment& seg, double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorKind::Config, "resolution must be positive");
  if (seg.inliers.size() < 3) throw Error(ErrorKind::InsufficientData, "chart needs at least 3 inliers");
  ImageFrame f;
  f.chart = seg.chart;
  f.resolution = resolution;
  f.width = static_cast<int>(std::floor((seg.chart.u_max - seg.chart.u_min) * resolution)) + 1;
  f.height = static_cast<int>(std::floor((seg.chart.v_max - seg.chart.v_min) * resolution)) + 1;
  return f;
}

ProjectedPattern project_mask(const PlanarSegment& seg, const std::vector<Vec3>& points, const ShapeMask& mask,
                              const Placement& placement, double inlier_eps) {
  mask.check_valid();
  if (!(placement.scale > 0.0)) throw Error(ErrorKind::Config, "placement scale must be positive");
  const auto& ch = seg.chart;
  const double s = placement.scale;
  const int w = mask.width();
  const int h = mask.height();
  const double left = ch.u_min + placement.u0;
  const double bottom = ch.v_min + placement.v0;

  ProjectedPattern out;
  out.host = seg.id;
  constexpr double kSlack = 1e-9;
  out.clip_warning = left < ch.u_min - kSlack || bottom < ch.v_min - kSlack || left + w * s > ch.u_max + kSlack ||
                     bottom + h * s > ch.v_max + kSlack;

  // Foreground footprint inside the segment rectangle.
  std::size_t fg = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!mask.at(c, r)) continue;
      const double cu = left + (c + 0.5) * s;
      const double cv = bottom + (h - 1 - r + 0.5) * s;
      if (cu >= ch.u_min && cu <= ch.u_max && cv >= ch.v_min && cv <= ch.v_max) ++fg;
    }
  out.area = static_cast<double>(fg) * s * s;

  Vec3 sum = Vec3::Zero();
  for (int idx : seg.inliers) {
    const Vec3& p = points[static_cast<std::size_t>(idx)];
    const auto q = ch.to_uv(p);
    const double fx = (q.x() - left) / s;
    const double fy = (q.y() - bottom) / s;
    if (fx < 0.0 || fy < 0.0) continue;
    const auto col = static_cast<long>(std::floor(fx));
    const auto up = static_cast<long>(std::floor(fy));
    if (col >= w || up >= h) continue;
    if (!mask.at(static_cast<int>(col), static_cast<int>(h - 1 - up))) continue;
    // RefineAlignment: gate on the plane residual, then snap.
    const double res = seg.signed_distance(p);
    if (std::abs(res) > 2.0 * inlier_eps) continue;
    out.points.push_back(idx);
    out.snapped.push_back(p - res * seg.normal);
    sum += out.snapped.back();
  }
  if (out.points.empty()) throw Error(ErrorKind::EmptyProjection, "no segment point falls on the mask foreground");
  out.centroid = sum / static_cast<double>(out.points.size());
  return out;
}

bool FurnitureBox::line_hits(const Vec3& p, const Vec3& dir) const {
  const Vec3 lp = axes.transpose() * (p - center);
  const Vec3 ld = axes.transpose() * dir;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ld[i]) < 1e-12) {
      if (std::abs(lp[i]) > half_extents[i]) return false;
      continue;
    }
    double a = (-half_extents[i] - lp[i]) / ld[i];
    double b = (half_extents[i] - lp[i]) / ld[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t0 <= t1;
}

Room make_box_room(const RoomSpec& spec) {
  if (!(spec.size.minCoeff() > 0.0) || !(spec.density > 0.0) || spec.noise_sigma < 0.0 || spec.outlier_frac < 0.0 ||
      spec.outlier_frac >= 1.0)
    throw Error(ErrorKind::Config, "invalid room specification");
  const Vec3& L = spec.size;
  Room room;
  room.faces = {{Vec3::UnitX(), 0.0},   {-Vec3::UnitX(), L.x()}, {Vec3::UnitY(), 0.0},
                {-Vec3::UnitY(), L.y()}, {Vec3::UnitZ(), 0.0},   {-Vec3::UnitZ(), L.z()}};
  Rng rng(derive_seed(spec.seed, {0x726f6f6dULL}));
  auto& pts = room.cloud.points;
  for (int f = 0; f < 6; ++f) {
    const int axis = f / 2;
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    const double plane_at = (f % 2 == 0) ? 0.0 : L[axis];
    const auto n = static_cast<long>(std::llround(L[a1] * L[a2] * spec.density));
    for (long i = 0; i < n; ++i) {
      Vec3 p;
      p[a1] = rng.uniform(0.0, L[a1]);
      p[a2] = rng.uniform(0.0, L[a2]);
      p[axis] = plane_at + spec.noise_sigma * rng.normal();
      pts.push_back(p);
    }
  }
  const auto n_out = static_cast<long>(
      std::llround(spec.outlier_frac / (1.0 - spec.outlier_frac) * static_cast<double>(pts.size())));
  for (long i = 0; i < n_out; ++i)
    pts.emplace_back(rng.uniform(0.0, L.x()), rng.uniform(0.0, L.y()), rng.uniform(0.0, L.z()));
  return room;
}

}  // namespace firesig
