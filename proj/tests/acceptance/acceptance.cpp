// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any gating
// criterion fails.

#include "oracles.hpp"

#include "firesig/evaluation.hpp"
#include "firesig/features.hpp"
#include "firesig/forest.hpp"
#include "firesig/parallel.hpp"
#include "firesig/pipeline.hpp"
#include "firesig/rng.hpp"
#include "firesig/scene3d.hpp"
#include "firesig/signature.hpp"
#include "firesig/synth.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

using namespace firesig;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool gating = true;
};

int g_failed = 0;

void report(const std::string& id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass && o.gating) ++g_failed;
  fmt::print("[{:>2}] {}{} {} ({:.1f}s)\n      {}\n", id, o.pass ? "PASS" : "FAIL",
             o.gating ? "" : " (non-gating)", title, secs, o.detail);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs_diff(const AspectSignature& a, const AspectSignature& b, int shift = 0) {
  double w = 0.0;
  for (int t = 0; t < kSignatureSize; ++t)
    w = std::max(w, std::abs(a.values[static_cast<std::size_t>((t + shift) % kSignatureSize)] -
                             b.values[static_cast<std::size_t>(t)]));
  return w;
}

std::string stats(std::vector<double> v, double limit) {
  std::sort(v.begin(), v.end());
  const auto over = std::count_if(v.begin(), v.end(), [&](double x) { return x >= limit; });
  return fmt::format("worst {:.4f}, median {:.4f}, {}/{} masks at or over {}", v.back(), v[v.size() / 2], over,
                     v.size(), limit);
}

std::vector<ShapeMask> default_masks(int n, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  std::vector<ShapeMask> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    generate_sample(cfg, kAllClasses[static_cast<std::size_t>(i) % 8], i / 8, out[static_cast<std::size_t>(i)]);
  return out;
}

// --- desk-scale classifier shared by criteria 1, 4 and 6 -------------------

struct Desk {
  Dataset data;
  std::vector<std::vector<double>> rows;
  Split split;
  TrainingSet training;
  ForestModel model;
  MetricsReport test;
  double seconds = 0.0;
};

constexpr std::uint64_t kDataSeed = 1;
constexpr std::uint64_t kTrainSeed = 0;  // the CLI default

Desk& desk() {
  static Desk d = [] {
    Desk d;
    set_max_threads(1);
    const auto t0 = std::chrono::steady_clock::now();
    SynthConfig cfg;
    cfg.n_per_class = 300;
    cfg.seed = kDataSeed;
    d.data = generate_dataset(cfg);
    d.rows = feature_rows(d.data.masks, FeatureConfig{});
    d.split = stratified_split(d.data.records, Grouping::Seven, 0.7, kTrainSeed);
    d.training = make_training_set(d.data.records, d.rows, d.split.train, Grouping::Seven);
    d.model = train(d.training, ForestParams{}, kTrainSeed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    const auto groups = group_indices(d.data.records, Grouping::Seven);
    for (auto i : d.split.test) {
      rows.push_back(d.rows[i]);
      labels.push_back(groups[i]);
    }
    d.test = evaluate(d.model, rows, labels);
    d.seconds = seconds_since(t0);
    set_max_threads(0);
    return d;
  }();
  return d;
}

Outcome criterion1() {
  auto& d = desk();
  const auto& m = d.test;
  const bool acc = m.accuracy >= 0.90;
  const bool prec = std::abs(m.macro_precision - 0.9326) <= 0.05;
  const bool rec = std::abs(m.macro_recall - 0.9316) <= 0.05;
  const bool fast = d.seconds < 180.0;

  // Clean U-shape end to end: U among the two most probable classes, p >= 0.5.
  const auto u = rasterize(base_polygon(PatternClass::UShape, 0.7), 256, 256);
  const auto pred = predict(d.model, feature_row(u, FeatureConfig{}));
  const auto names = d.model.class_names;
  const int u_idx = static_cast<int>(std::find(names.begin(), names.end(), group_label(PatternClass::UShape, Grouping::Seven)) -
                                     names.begin());
  std::vector<int> order(names.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pred.probabilities[static_cast<std::size_t>(a)] > pred.probabilities[static_cast<std::size_t>(b)];
  });
  const double pu = pred.probabilities[static_cast<std::size_t>(u_idx)];
  const bool u_ok = (order[0] == u_idx || order[1] == u_idx) && pu >= 0.5;

  return {acc && prec && rec && fast && u_ok,
          fmt::format("n=300/class seed {}, {} train / {} test rows; accuracy {:.4f} (>= 0.90), macro precision "
                      "{:.4f} (0.9326 +- 0.05), macro recall {:.4f} (0.9316 +- 0.05), single-threaded {:.1f}s (< 180s); "
                      "clean U-shape p(U) = {:.2f}, top class {}",
                      kDataSeed, d.split.train.size(), d.split.test.size(), m.accuracy, m.macro_precision,
                      m.macro_recall, d.seconds, pu, names[static_cast<std::size_t>(order[0])])};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  SynthConfig cfg;
  cfg.noise_amplitude = cfg.distortion_amplitude = cfg.smoothing_sigma = 0.0;
  cfg.rotation_jitter = cfg.proportion_jitter = 0.0;
  cfg.seed = 2;
  struct Row {
    PatternClass cls;
    int peaks, valleys;
    bool gated;
  };
  const Row table[] = {{PatternClass::Circle, 0, 0, true},       {PatternClass::Rectangle, 4, 3, true},
                       {PatternClass::Hourglass, 4, 3, true},    {PatternClass::TriangleUp, 3, 2, true},
                       {PatternClass::HalfCircle, 2, 1, true},   {PatternClass::VShape, 2, 3, false},
                       {PatternClass::UShape, 3, 2, false}};
  bool ok = true;
  std::string detail;
  for (const auto& r : table) {
    double sp = 0, sv = 0;
    for (int i = 0; i < 100; ++i) {
      ShapeMask m;
      generate_sample(cfg, r.cls, i, m);
      const auto f = build_features(aspect_signature(m));
      sp += f.n_peaks;
      sv += f.n_valleys;
    }
    sp /= 100;
    sv /= 100;
    const bool match = sp == r.peaks && sv == r.valleys;
    if (r.gated) ok = ok && match;
    detail += fmt::format("{} {:.2f}/{:.2f} (expected {}/{}{}); ", to_string(r.cls), sp, sv, r.peaks, r.valleys,
                          r.gated ? (match ? "" : ", MISMATCH") : ", reported only");
  }
  const double secs = seconds_since(t0);
  detail += fmt::format("{:.1f}s (< 60s)", secs);
  return {ok && secs < 60.0, detail};
}

Outcome criterion3a() {
  int bad = 0;
  SynthConfig cfg;
  cfg.seed = 3;
  for (int i = 0; i < 1000; ++i) {
    ShapeMask m;
    generate_sample(cfg, kAllClasses[static_cast<std::size_t>(i) % 8], i / 8, m);
    const auto s = aspect_signature(m);
    const double mx = *std::max_element(s.values.begin(), s.values.end());
    const double mn = *std::min_element(s.values.begin(), s.values.end());
    bad += !(mx == 1.0 && mn >= 0.0);
  }
  return {bad == 0, fmt::format("{} of 1000 random masks have max != 1 or a negative value", bad)};
}

// Masks are padded first so that rotated and rescaled copies stay on the canvas.
Outcome criterion3b() {
  std::vector<double> drift;
  for (const auto& m0 : default_masks(100, 4)) {
    const auto m = pad_mask(m0, 64);
    const auto base = aspect_signature(m);
    double w = 0.0;
    for (double f : {0.5, 2.0}) w = std::max(w, max_abs_diff(aspect_signature(scale_mask(m, f)), base));
    drift.push_back(w);
  }
  const bool ok = *std::max_element(drift.begin(), drift.end()) < 0.02;
  return {ok, "per-angle drift under 0.5x and 2x: " + stats(drift, 0.02) +
                  ". Ray chords take the farthest boundary crossing, which jumps wherever a ray grazes a concavity "
                  "or a noise spike; resampling moves those tangencies"};
}

Outcome criterion3c() {
  std::vector<double> err;
  for (const auto& m0 : default_masks(100, 4)) {
    const auto m = pad_mask(m0, 64);
    const auto base = aspect_signature(m);
    double w = 0.0;
    for (int d : {30, 90, 180})
      w = std::max(w, max_abs_diff(aspect_signature(rotate_mask(m, d, compute_centroid(m))), base, d));
    err.push_back(w);
  }
  const bool ok = *std::max_element(err.begin(), err.end()) < 0.05;
  return {ok, "circular-shift error for 30/90/180 deg: " + stats(err, 0.05) +
                  ". Same cause as scale drift: resampling the boundary moves grazing-ray tangencies"};
}

Outcome criterion3d() {
  double worst = 0.0;
  std::string where;
  SynthConfig cfg;
  cfg.canvas_width = cfg.canvas_height = 512;
  for (auto cls : {PatternClass::Circle, PatternClass::Rectangle, PatternClass::TriangleDown})
    for (double scale : {0.5, 0.7, 0.9}) {
      const auto poly = base_polygon(cls, scale, cfg);
      const auto m = rasterize(poly, cfg.canvas_width, cfg.canvas_height);
      const auto c = compute_centroid(m);
      for (auto mode : {ChordMode::Ray, ChordMode::FullLine}) {
        const double limit = 0.01 * aspect_signature(m, mode).max_chord;
        for (int a = 0; a < 360; ++a) {
          const double e = std::abs(chord_length(m, c, a, mode) -
                                    oracle::polygon_chord(poly, c, a, mode == ChordMode::FullLine)) / limit;
          if (e > worst) {
            worst = e;
            where = fmt::format("{} scale {} {} at {} deg", to_string(cls), scale, to_string(mode), a);
          }
        }
      }
    }
  return {worst <= 1.0, fmt::format("worst error {:.2f}% of max chord ({}); 512 px canvas, 3 shapes x 3 scales x 2 modes",
                                    worst, where)};
}

Outcome criterion4() {
  auto& d = desk();
  std::string detail;

  // (a)
  double worst_sum = 0.0;
  Rng rng(17);
  std::vector<std::vector<double>> inputs;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(kFeatureDim);
    for (auto& v : x) v = rng.uniform(0.0, 1.0);
    inputs.push_back(std::move(x));
  }
  for (auto i : d.split.test) inputs.push_back(d.rows[i]);
  for (const auto& x : inputs) {
    const auto p = predict(d.model, x);
    double s = 0;
    for (double v : p.probabilities) s += v;
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }
  const bool a = worst_sum <= 1e-9;
  detail += fmt::format("(a) max |sum p - 1| = {:.1e} over {} inputs; ", worst_sum, inputs.size());

  // (b)
  const auto again = serial::train(d.training, ForestParams{}, kTrainSeed);
  const bool b = serialize(again) == serialize(d.model) && serialize(deserialize(serialize(d.model))) == serialize(d.model);
  detail += fmt::format("(b) retrain (serial kernel) {} and JSON round trip; ", b ? "byte-identical" : "DIFFERS");

  // (c)
  int replay_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto& x = inputs[static_cast<std::size_t>(i)];
    replay_bad += replay(d.model, explain(d.model, x), x) != d.model.trees[0].leaf_for(x);
  }
  const bool c = replay_bad == 0;
  detail += fmt::format("(c) replay mismatches {}/100; ", replay_bad);

  // (d)
  Rng toy_rng(99);
  TrainingSet toy;
  toy.class_names = {"a", "b", "c"};
  for (int i = 0; i < 40; ++i) {
    const int label = i % 3;
    std::vector<double> x(5);
    for (int f = 0; f < 5; ++f) x[static_cast<std::size_t>(f)] = std::round((toy_rng.uniform(0.0, 1.0) + 0.3 * label * (f % 2)) * 20) / 20;
    toy.rows.push_back(std::move(x));
    toy.labels.push_back(label);
    toy.keys.push_back(fmt::format("s{:02}", (i * 17) % 40));
  }
  ForestParams tp;
  tp.n_trees = 3;
  tp.max_depth = 2;
  tp.features_per_split = 3;
  int nodes = 0, mismatched_trees = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto model = train(toy, tp, seed);
    const auto ref = oracle::reference_forest(toy, tp, seed);
    for (std::size_t t = 0; t < ref.size(); ++t) {
      nodes += static_cast<int>(ref[t].nodes.size());
      mismatched_trees += !(model.trees[t] == ref[t]);
    }
  }
  const bool dd = mismatched_trees == 0;
  detail += fmt::format("(d) 40x5 toy set, 3 trees depth 2, seeds 1-3: {} mismatched trees, {} nodes compared",
                        mismatched_trees, nodes);
  return {a && b && c && dd, detail};
}

// --- scene ------------------------------------------------------------------

struct SceneBuild {
  std::vector<PlanarSegment> segments;
  std::vector<ProjectedPattern> patterns;
  SceneGraph graph;
};

SceneBuild build_scene(const PointCloud& cloud, const std::vector<FurnitureBox>& furniture) {
  SceneBuild b;
  SegmentConfig sc;
  sc.seed = 5;
  b.segments = segment_planes(cloud, sc);
  const auto mask = oracle::disk(100, 100, 49.5, 49.5, 50);  // r = 0.5 m at 1 cm/px
  const std::pair<SurfaceKind, Placement> specs[] = {{SurfaceKind::Wall, {1.0, 1.0, 0.01}},
                                                     {SurfaceKind::Floor, {1.0, 1.5, 0.01}}};
  int id = 0;
  for (const auto& [kind, placement] : specs) {
    std::size_t host = 0;
    while (b.segments.at(host).kind != kind) ++host;
    auto p = project_mask(b.segments[host], cloud.points, mask, placement, sc.inlier_eps);
    p.id = id++;
    b.patterns.push_back(std::move(p));
  }
  GraphConfig gc;
  gc.gravity_up = cloud.gravity_up;
  b.graph = build_scene_graph(b.segments, b.patterns, furniture, cloud.points, gc);
  return b;
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  RoomSpec spec;
  spec.noise_sigma = 0.005;
  spec.outlier_frac = 0.2;
  spec.seed = 3;
  const auto room = make_box_room(spec);
  const std::vector<FurnitureBox> furniture = {
      {"table", {2.0, 1.5, 0.375}, {0.6, 0.4, 0.375}, Eigen::Matrix3d::Identity()},
      {"cabinet", {0.2, 1.5, 0.45}, {0.3, 0.5, 0.45}, Eigen::Matrix3d::Identity()}};
  const auto b = build_scene(room.cloud, furniture);
  std::string detail;

  // Segments and normals: each true face matched by orientation.
  double worst_angle = 0.0;
  for (const auto& [n, d] : room.faces) {
    const auto best = std::max_element(b.segments.begin(), b.segments.end(), [&](const auto& x, const auto& y) {
      return x.normal.dot(n) < y.normal.dot(n);
    });
    worst_angle = std::max(worst_angle, std::acos(std::clamp(best->normal.dot(n), -1.0, 1.0)) * 180.0 / std::numbers::pi);
  }
  const bool seg_ok = b.segments.size() == 6 && worst_angle < 2.0;
  detail += fmt::format("{} segments, worst normal error {:.3f} deg; ", b.segments.size(), worst_angle);

  // Chart round trip through integer pixel centers.
  constexpr double res = 100.0, eps = 0.02;
  double worst_rt = 0.0;
  for (const auto& s : b.segments) {
    const auto f = plane_to_image(s, res);
    for (int i : s.inliers) {
      const Vec3& p = room.cloud.points[static_cast<std::size_t>(i)];
      const auto px = f.pixel_of(p);
      const auto q = f.point_of({std::round(px.x()), std::round(px.y())});
      worst_rt = std::max(worst_rt, (q - p).norm());
    }
  }
  const bool rt_ok = worst_rt < 1.0 / res + eps;
  detail += fmt::format("chart round trip worst {:.4f} m (< {:.2f}); ", worst_rt, 1.0 / res + eps);

  // Footprint area of the r = 0.5 m disk.
  const double want_area = std::numbers::pi * 0.25;
  double worst_area = 0.0;
  for (const auto& p : b.patterns) worst_area = std::max(worst_area, std::abs(p.area - want_area) / want_area);
  const bool area_ok = worst_area < 0.05;
  detail += fmt::format("disk area worst relative error {:.2f}%; ", 100 * worst_area);

  // Distances against centroids recomputed from the sources.
  std::vector<Vec3> expect;
  for (const auto& s : b.segments) expect.push_back(s.centroid);
  for (const auto& p : b.patterns) {
    Vec3 c = Vec3::Zero();
    for (const auto& q : p.snapped) c += q;
    expect.push_back(c / static_cast<double>(p.snapped.size()));
  }
  for (const auto& f : furniture) expect.push_back(f.center);
  double worst_d = 0.0;
  const bool count_ok = expect.size() == b.graph.nodes.size();
  std::istringstream csv(distances_csv(b.graph));
  std::string line;
  std::getline(csv, line);
  int pairs = 0;
  while (count_ok && std::getline(csv, line)) {
    std::istringstream ls(line);
    std::string ia, ib, dv;
    std::getline(ls, ia, ',');
    std::getline(ls, ib, ',');
    std::getline(ls, dv, ',');
    const auto& a = expect.at(static_cast<std::size_t>(b.graph.find(ia)));
    const auto& c = expect.at(static_cast<std::size_t>(b.graph.find(ib)));
    worst_d = std::max(worst_d, std::abs(std::stod(dv) - oracle::hypot3(a.x() - c.x(), a.y() - c.y(), a.z() - c.z())));
    ++pairs;
  }
  for (const auto& e : b.graph.edges) {
    const auto& a = expect[static_cast<std::size_t>(e.a)];
    const auto& c = expect[static_cast<std::size_t>(e.b)];
    worst_d = std::max(worst_d, std::abs(e.distance_m - oracle::hypot3(a.x() - c.x(), a.y() - c.y(), a.z() - c.z())));
  }
  const std::size_t n = expect.size();
  const bool dist_ok = count_ok && pairs == static_cast<int>(n * (n - 1) / 2) && worst_d < 1e-9;
  detail += fmt::format("{} distance pairs, worst oracle error {:.1e}; ", pairs, worst_d);

  // Rigid motion.
  const Eigen::Matrix3d R =
      (Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()) * Eigen::AngleAxisd(-0.3, Vec3::UnitX())).toRotationMatrix();
  const Vec3 t{5.0, -2.0, 0.5};
  PointCloud moved = room.cloud;
  for (auto& p : moved.points) p = R * p + t;
  moved.gravity_up = R * room.cloud.gravity_up;
  auto furn = furniture;
  for (auto& f : furn) {
    f.center = R * f.center + t;
    f.axes = R * f.axes;
  }
  const auto m = build_scene(moved, furn);
  bool same = m.graph.nodes.size() == b.graph.nodes.size() && m.graph.edges.size() == b.graph.edges.size();
  double worst_rm = 0.0;
  if (same) {
    const int k = static_cast<int>(b.graph.nodes.size());
    for (int i = 0; i < k; ++i) {
      same = same && m.graph.nodes[static_cast<std::size_t>(i)].id == b.graph.nodes[static_cast<std::size_t>(i)].id;
      const Vec3 moved_c = R * b.graph.nodes[static_cast<std::size_t>(i)].centroid + t;
      worst_rm = std::max(worst_rm, (m.graph.nodes[static_cast<std::size_t>(i)].centroid - moved_c).norm());
      for (int j = 0; j < k; ++j) worst_rm = std::max(worst_rm, std::abs(m.graph.distance(i, j) - b.graph.distance(i, j)));
    }
    for (std::size_t e = 0; e < b.graph.edges.size(); ++e)
      same = same && m.graph.edges[e].a == b.graph.edges[e].a && m.graph.edges[e].b == b.graph.edges[e].b &&
             m.graph.edges[e].relation == b.graph.edges[e].relation;
  }
  const bool rm_ok = same && worst_rm < 1e-6;
  detail += fmt::format("rigid motion: same nodes/edges {}, worst centroid/distance deviation {:.1e}; ", same, worst_rm);

  const double secs = seconds_since(t0);
  detail += fmt::format("{:.1f}s (< 60s)", secs);
  return {seg_ok && rt_ok && area_ok && dist_ok && rm_ok && secs < 60.0, detail};
}

Outcome criterion6() {
  auto& d = desk();
  const auto usage = feature_usage(d.model);
  std::vector<int> idx(usage.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return usage[static_cast<std::size_t>(a)] > usage[static_cast<std::size_t>(b)]; });
  idx.resize(20);
  std::string top;
  int hits = 0;
  for (int f : idx) {
    top += fmt::format("{}{}", top.empty() ? "" : ", ", f < kSignatureSize ? fmt::format("{}°", f) : describe_feature(f));
    if (f >= kSignatureSize) continue;
    for (int centre : {76, 182, 337}) {
      const int diff = std::abs(f - centre);
      hits += std::min(diff, 360 - diff) <= 10;
    }
  }
  return {hits > 0,
          fmt::format("{} of the top-20 split features fall within 10° of 76°/182°/337°; top-20: {}", hits, top), false};
}

Outcome criterion7() {
  const std::string cli = FIRESIG_CLI;
  const auto root = oracle::scratch_dir("acceptance_repro");
  std::vector<std::string> failures;
  int commands = 0;
  const auto twice = [&](const std::string& name, const std::string& args) {
    std::map<std::string, std::string> out[2];
    for (int k = 0; k < 2; ++k) {
      const auto dir = root / fmt::format("{}_{}", name, k);
      const int rc = oracle::run(cli + " " + args + " --out '" + dir.string() + "' >/dev/null 2>&1");
      if (rc != 0) {
        failures.push_back(fmt::format("{} exit {}", name, rc));
        return;
      }
      out[k] = oracle::tree_contents(dir, "run.json");
    }
    ++commands;
    if (out[0] != out[1] || out[0].empty()) failures.push_back(name + " outputs differ");
  };
  const auto data = (root / "generate_0").string();
  const auto model = (root / "train_0" / "model.json").string();
  const auto mask = (root / "generate_0" / "u_shape_0.pgm").string();
  const auto scene = (root / "room_0" / "scene.json").string();
  twice("generate", "generate --n 4 --seed 7");
  twice("signature", "signature '" + mask + "' --mode line --plot");
  twice("features", "features --data '" + data + "'");
  twice("train", "train --data '" + data + "' --trees 10 --seed 2");
  twice("eval", "eval --data '" + data + "' --model '" + model + "'");
  twice("explain", "explain '" + mask + "' --model '" + model + "'");
  twice("room", "room --seed 4 --outliers 0.2");
  twice("project", "project --scene '" + scene + "' --plot");
  twice("graph", "graph --scene '" + scene + "' --model '" + model + "' --plot");
  std::string detail = fmt::format("{}/9 subcommands byte-identical on rerun (run.json excluded)", commands);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty() && commands == 9, detail};
}

}  // namespace

int main() {
  fmt::print("firesig acceptance run ({} worker threads)\n", max_threads());
  report("1", "synthetic classification accuracy", criterion1);
  report("2", "extrema counts on clean shapes", criterion2);
  report("3a", "signature normalization", criterion3a);
  report("3b", "signature scale invariance", criterion3b);
  report("3c", "signature rotation equivariance", criterion3c);
  report("3d", "marched chord vs analytic polygon chord", criterion3d);
  report("4", "forest correctness", criterion4);
  report("5", "scene pipeline", criterion5);
  report("6", "split-feature usage near 76°/182°/337°", criterion6);
  report("7", "CLI reproducibility", criterion7);
  fmt::print("{} gating criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
