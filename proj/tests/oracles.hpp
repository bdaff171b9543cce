#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include "firesig/forest.hpp"
#include "firesig/mask.hpp"
#include "firesig/signature.hpp"
#include "firesig/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace oracle {

using firesig::Point2;
using firesig::Polygon;

// ---------------------------------------------------------------------------
// Geometry

/// Parameters t >= -inf of all crossings of the line c + t*d with the polygon edges.
inline std::vector<double> line_polygon_hits(const Polygon& poly, Point2 c, Point2 d) {
  std::vector<double> ts;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double den = d.x * ey - d.y * ex;
    if (std::abs(den) < 1e-12) continue;
    const double wx = a.x - c.x, wy = a.y - c.y;
    const double t = (wx * ey - wy * ex) / den;
    const double s = (wx * d.y - wy * d.x) / den;
    if (s >= 0.0 && s <= 1.0) ts.push_back(t);
  }
  return ts;
}

/// Exact chord of a polygon through c: farthest forward crossing (ray) or the
/// span between the outermost crossings (line). Angle convention as the library:
/// 0° up, counterclockwise as displayed, y down.
inline double polygon_chord(const Polygon& poly, Point2 c, double theta_deg, bool full_line) {
  const double r = theta_deg * std::numbers::pi / 180.0;
  const Point2 d{-std::sin(r), -std::cos(r)};
  const auto ts = line_polygon_hits(poly, c, d);
  double hi = 0.0, lo = 0.0;
  for (double t : ts) {
    hi = std::max(hi, t);
    lo = std::min(lo, t);
  }
  return full_line ? hi - lo : hi;
}

inline double hypot3(double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); }

// ---------------------------------------------------------------------------
// Masks

inline firesig::ShapeMask disk(int w, int h, double cx, double cy, double r) {
  firesig::ShapeMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r);
  return m;
}

inline firesig::ShapeMask box(int w, int h, int x0, int y0, int x1, int y1) {
  firesig::ShapeMask m(w, h);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) m.set(x, y, true);
  return m;
}

/// Smallest distance from a foreground pixel of `a` to any of `b`'s, maximized
/// over `a`; brute force over boundary pixels of b.
inline double directed_hausdorff(const firesig::ShapeMask& a, const firesig::ShapeMask& b) {
  std::vector<Point2> bb;
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x) {
      if (!b.at(x, y)) continue;
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (!b.at_or_zero(x + dx, y + dy)) edge = true;
      if (edge) bb.push_back({double(x), double(y)});
    }
  if (bb.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      if (!a.at(x, y) || b.at_or_zero(x, y)) continue;  // inside b: distance 0
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : bb) best = std::min(best, (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y));
      worst = std::max(worst, std::sqrt(best));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Exhaustive decision-tree reference.
//
// Evaluates every candidate threshold of every sampled feature by counting the
// two children from scratch and scoring them with weighted Gini impurity,
// compared as exact rationals. Shares only the randomness (bootstrap
// multiplicities and per-node feature subsets) with the library.

using i128 = __int128;

struct Frac {  // num / den, den > 0
  i128 num;
  i128 den;
};
inline bool less(const Frac& a, const Frac& b) { return a.num * b.den < b.num * a.den; }

/// n * gini(counts) as a fraction: n - sum(c^2)/n.
inline Frac weighted_gini(const std::vector<long long>& counts) {
  i128 n = 0, sq = 0;
  for (auto c : counts) {
    n += c;
    sq += static_cast<i128>(c) * c;
  }
  if (n == 0) return {0, 1};
  return {n * n - sq, n};
}

inline Frac add(const Frac& a, const Frac& b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }

struct RefBuilder {
  const std::vector<std::vector<double>>& rows;  // canonical order
  const std::vector<int>& labels;
  int n_classes;
  firesig::ForestParams params;
  std::uint64_t seed;
  int tree;

  std::vector<long long> histogram(const std::vector<std::pair<int, int>>& items) const {
    std::vector<long long> h(static_cast<std::size_t>(n_classes), 0);
    for (auto [r, w] : items) h[static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])] += w;
    return h;
  }

  int grow(firesig::DecisionTree& t, const std::vector<std::pair<int, int>>& items, std::uint64_t key, int depth) const {
    const int self = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    const auto h = histogram(items);
    long long total = 0;
    int classes_present = 0;
    for (auto c : h) {
      total += c;
      classes_present += c > 0;
    }
    std::optional<std::pair<int, double>> best;
    if (depth < params.max_depth && classes_present >= 2 && total >= 2LL * params.min_samples_leaf) {
      const Frac parent = weighted_gini(h);
      Frac best_imp = parent;
      const int dim = static_cast<int>(rows[0].size());
      for (int f : firesig::forest_sampling::split_features(seed, tree, key, dim, params.features_per_split)) {
        std::vector<double> vals;
        for (auto [r, w] : items) vals.push_back(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
          const double thr = firesig::split_threshold(vals[i], vals[i + 1]);
          std::vector<std::pair<int, int>> l, r;
          for (auto it : items)
            (rows[static_cast<std::size_t>(it.first)][static_cast<std::size_t>(f)] <= thr ? l : r).push_back(it);
          long long nl = 0, nr = 0;
          for (auto [_, w] : l) nl += w;
          for (auto [_, w] : r) nr += w;
          if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
          const Frac imp = add(weighted_gini(histogram(l)), weighted_gini(histogram(r)));
          if (less(imp, best_imp)) {  // strict: earlier candidates win ties
            best_imp = imp;
            best = std::pair{f, thr};
          }
        }
      }
    }
    if (!best) {
      t.nodes[static_cast<std::size_t>(self)].histogram.assign(h.begin(), h.end());
      return self;
    }
    std::vector<std::pair<int, int>> l, r;
    for (auto it : items)
      (rows[static_cast<std::size_t>(it.first)][static_cast<std::size_t>(best->first)] <= best->second ? l : r)
          .push_back(it);
    const int li = grow(t, l, 2 * key, depth + 1);
    const int ri = grow(t, r, 2 * key + 1, depth + 1);
    auto& node = t.nodes[static_cast<std::size_t>(self)];
    node.feature = best->first;
    node.threshold = best->second;
    node.left = li;
    node.right = ri;
    return self;
  }
};

/// Reference forest: same canonical ordering rule (stable sort by key), built
/// tree by tree with the exhaustive split search above.
inline std::vector<firesig::DecisionTree> reference_forest(const firesig::TrainingSet& data,
                                                           const firesig::ForestParams& params, std::uint64_t seed) {
  std::vector<std::size_t> order(data.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (!data.keys.empty())
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return data.keys[a] < data.keys[b]; });
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (auto i : order) {
    rows.push_back(data.rows[i]);
    labels.push_back(data.labels[i]);
  }
  std::vector<firesig::DecisionTree> out;
  const int n = static_cast<int>(rows.size());
  for (int t = 0; t < params.n_trees; ++t) {
    const auto counts = firesig::forest_sampling::bootstrap_counts(seed, t, n, params.bootstrap);
    std::vector<std::pair<int, int>> items;
    for (int i = 0; i < n; ++i)
      if (counts[static_cast<std::size_t>(i)] > 0) items.push_back({i, counts[static_cast<std::size_t>(i)]});
    firesig::DecisionTree tree;
    RefBuilder{rows, labels, static_cast<int>(data.class_names.size()), params, seed, t}.grow(tree, items, 1, 0);
    out.push_back(std::move(tree));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("firesig_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

/// Relative path -> contents, for every regular file except those named `skip`.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& dir, const std::string& skip) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == skip) continue;
    out[std::filesystem::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

/// Runs a shell command, returns its exit status (-1 if it did not exit normally).
inline int run(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace oracle
