// firesig: command-line driver (generate, signature, features, train, eval,
// explain, room, project, graph).

#include "firesig/error.hpp"
#include "firesig/evaluation.hpp"
#include "firesig/image_io.hpp"
#include "firesig/parallel.hpp"
#include "firesig/pipeline.hpp"
#include "firesig/plot.hpp"
#include "firesig/scene3d.hpp"

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace firesig;

namespace {

constexpr const char* kVersion = "1.0.0";

// Exit codes.
constexpr int kOk = 0;
constexpr int kOther = 1;
constexpr int kConfig = 2;
constexpr int kGeneration = 3;
constexpr int kBadMask = 4;
constexpr int kDimension = 5;
constexpr int kSceneSchema = 6;

struct CliFailure : std::runtime_error {
  int code;
  CliFailure(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  out << content;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

// Exclusive `.<dir>.lock` next to the output directory for the lifetime of a run.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& out) {
    const auto abs = fs::absolute(out).lexically_normal();
    auto name = abs.filename().string();
    if (name.empty()) name = abs.parent_path().filename().string();
    const auto parent = abs.filename().empty() ? abs.parent_path().parent_path() : abs.parent_path();
    fs::create_directories(parent);
    path_ = parent / ("." + name + ".lock");
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0)
      throw CliFailure(kOther, fmt::format("output directory {} is in use (lock {} exists; remove it if stale)",
                                           out.string(), path_.string()));
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
    fs::create_directories(out);
  }
  ~OutputLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      std::error_code ec;
      fs::remove(path_, ec);
    }
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

// run.json: the fully-resolved configuration. The timestamp lives only here.
void write_run_record(const fs::path& out, const std::string& command, const json& config) {
  const auto now = std::chrono::system_clock::now();
  json j = {{"command", command},
            {"version", kVersion},
            {"config", config},
            {"threads", max_threads()},
            {"started_at", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)))}};
  write_file(out / "run.json", j.dump(2) + "\n");
}

json to_json(const SynthConfig& c) {
  return {{"canvas_width", c.canvas_width},
          {"canvas_height", c.canvas_height},
          {"n_per_class", c.n_per_class},
          {"seed", c.seed},
          {"noise_amplitude", c.noise_amplitude},
          {"smoothing_sigma", c.smoothing_sigma},
          {"distortion_amplitude", c.distortion_amplitude},
          {"rotation_jitter", c.rotation_jitter},
          {"scale_min", c.scale_min},
          {"scale_max", c.scale_max},
          {"proportion_jitter", c.proportion_jitter},
          {"boundary_points", c.boundary_points}};
}

json to_json(const ForestParams& p) {
  return {{"n_trees", p.n_trees},
          {"max_depth", p.max_depth},
          {"min_samples_leaf", p.min_samples_leaf},
          {"features_per_split", p.features_per_split},
          {"bootstrap", p.bootstrap}};
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Grouping grouping_for(int classes) {
  if (classes == 7) return Grouping::Seven;
  if (classes == 8) return Grouping::Eight;
  throw Error(ErrorKind::Config, "--classes must be 7 or 8");
}

ShapeMask load_mask(const fs::path& p) {
  try {
    auto m = read_mask(p);
    m.check_valid();
    return m;
  } catch (const Error& e) {
    throw CliFailure(kBadMask, e.what());
  }
}

ForestModel load_model(const fs::path& p) {
  auto m = deserialize(read_text(p));
  if (m.feature_dim != kFeatureDim)
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("model expects {} features, this build produces {}", m.feature_dim, kFeatureDim));
  return m;
}

FeatureConfig model_feature_config(const ForestModel& m) {
  if (m.metadata.contains("features")) return feature_config_from_json(m.metadata["features"]);
  return {};
}

struct Loaded {
  std::vector<SampleRecord> records;
  std::vector<ShapeMask> masks;
};

Loaded load_dataset(const fs::path& dir) {
  Loaded d;
  d.records = read_manifest(dir / "manifest.csv");
  if (d.records.empty()) throw Error(ErrorKind::InsufficientData, "manifest lists no samples");
  for (const auto& r : d.records) d.masks.push_back(load_mask(dir / r.filename));
  return d;
}

std::vector<std::vector<double>> rows_for(const Loaded& d, const std::vector<std::size_t>& idx,
                                          const FeatureConfig& fc) {
  std::vector<ShapeMask> sub;
  sub.reserve(idx.size());
  for (auto i : idx) sub.push_back(d.masks[i]);
  auto rows = feature_rows(sub, fc);
  std::vector<std::vector<double>> full(d.records.size());
  for (std::size_t k = 0; k < idx.size(); ++k) full[idx[k]] = std::move(rows[k]);
  return full;
}

std::string fixed6(double v) { return fmt::format("{:.6f}", v); }

// --- scene pipeline --------------------------------------------------------

struct SceneRun {
  SceneSpec spec;
  PointCloud cloud;
  std::vector<PlanarSegment> segments;
  std::vector<ProjectedPattern> patterns;
  SceneGraph graph;
};

struct SceneOptions {
  fs::path scene;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  fs::path model;
};

SceneRun run_scene(const SceneOptions& opt) {
  SceneRun r;
  try {
    r.spec = read_scene(opt.scene);
  } catch (const Error& e) {
    throw CliFailure(e.kind() == ErrorKind::Io ? kOther : kSceneSchema, e.what());
  }
  if (opt.seed) r.spec.segmentation.seed = *opt.seed;
  if (opt.tau) r.spec.tau = *opt.tau;
  r.cloud = read_cloud(r.spec.cloud);
  r.cloud.gravity_up = r.spec.gravity_up;
  r.segments = segment_planes(r.cloud, r.spec.segmentation);

  std::optional<ForestModel> model;
  FeatureConfig fc;
  if (!opt.model.empty()) {
    model = load_model(opt.model);
    fc = model_feature_config(*model);
  }
  for (std::size_t i = 0; i < r.spec.patterns.size(); ++i) {
    const auto& ps = r.spec.patterns[i];
    int seg;
    try {
      seg = select_segment(r.segments, ps.segment);
    } catch (const Error& e) {
      throw CliFailure(kSceneSchema, fmt::format("patterns[{}].segment: {}", i, e.what()));
    }
    const auto mask = load_mask(ps.mask);
    auto p = project_mask(r.segments[static_cast<std::size_t>(seg)], r.cloud.points, mask, ps.placement,
                          r.spec.segmentation.inlier_eps);
    p.id = static_cast<int>(i);
    p.source = ps.mask.filename().string();
    if (model) {
      const auto pred = predict(*model, feature_row(mask, fc));
      p.label = model->class_names[static_cast<std::size_t>(pred.label)];
      p.class_names = model->class_names;
      p.probabilities = pred.probabilities;
    }
    r.patterns.push_back(std::move(p));
  }
  GraphConfig gc;
  gc.tau = r.spec.tau;
  gc.gravity_up = r.spec.gravity_up;
  r.graph = build_scene_graph(r.segments, r.patterns, r.spec.furniture, r.cloud.points, gc);
  return r;
}

json scene_config_json(const SceneRun& r, const SceneOptions& opt) {
  const auto& s = r.spec;
  return {{"scene", opt.scene.string()},
          {"cloud", s.cloud.string()},
          {"gravity", vec_json(s.gravity_up)},
          {"seed", s.segmentation.seed},
          {"inlier_eps", s.segmentation.inlier_eps},
          {"min_inlier_frac", s.segmentation.min_inlier_frac},
          {"max_planes", s.segmentation.max_planes},
          {"iterations", s.segmentation.iterations},
          {"resolution", s.resolution},
          {"tau", s.tau},
          {"model", opt.model.string()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fire-pattern shape signatures, classification and scene graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  fs::path out;
  std::uint64_t seed = 0;
  bool plot = false;
  std::string mode_name = "ray";
  const auto add_out = [&](CLI::App* c) { c->add_option("--out", out, "output directory")->required(); };

  // generate
  SynthConfig synth;
  auto* gen = app.add_subcommand("generate", "synthesize a labeled pattern dataset");
  add_out(gen);
  gen->add_option("--n", synth.n_per_class, "samples per class")->capture_default_str();
  gen->add_option("--seed", seed, "generator seed")->capture_default_str();
  gen->add_option("--noise", synth.noise_amplitude, "radial boundary noise (fraction of radius)")->capture_default_str();
  gen->add_option("--distortion", synth.distortion_amplitude, "sinusoidal warp amplitude")->capture_default_str();
  gen->add_option("--rotation-jitter", synth.rotation_jitter, "max rotation (deg)")->capture_default_str();
  gen->add_option("--proportion-jitter", synth.proportion_jitter, "relative proportion jitter")->capture_default_str();
  gen->add_option("--smoothing", synth.smoothing_sigma, "blur sigma (px)")->capture_default_str();
  gen->add_option("--canvas", synth.canvas_width, "canvas side (px)")->capture_default_str();

  // signature
  fs::path mask_path;
  ExtremaConfig extrema;
  auto* sig = app.add_subcommand("signature", "aspect-ratio signature of one mask");
  add_out(sig);
  sig->add_option("mask", mask_path, "PGM or PNG mask")->required();
  sig->add_option("--mode", mode_name, "chord mode: ray|line")->capture_default_str();
  sig->add_flag("--plot", plot, "also write signature.svg");

  // features
  fs::path data_dir;
  auto* feat = app.add_subcommand("features", "feature table for a dataset");
  add_out(feat);
  feat->add_option("--data", data_dir, "dataset directory (manifest.csv)")->required();
  feat->add_option("--mode", mode_name, "chord mode: ray|line")->capture_default_str();

  // train
  ForestParams params;
  double split_fraction = 0.7;
  int classes = 7;
  bool no_bootstrap = false;
  auto* tr = app.add_subcommand("train", "train the random forest on a dataset split");
  add_out(tr);
  tr->add_option("--data", data_dir, "dataset directory")->required();
  tr->add_option("--seed", seed, "split and forest seed")->capture_default_str();
  tr->add_option("--trees", params.n_trees)->capture_default_str();
  tr->add_option("--depth", params.max_depth)->capture_default_str();
  tr->add_option("--min-leaf", params.min_samples_leaf)->capture_default_str();
  tr->add_option("--mtry", params.features_per_split, "features tried per split")->capture_default_str();
  tr->add_flag("--no-bootstrap", no_bootstrap, "grow every tree on all training rows");
  tr->add_option("--split", split_fraction, "training fraction")->capture_default_str();
  tr->add_option("--classes", classes, "7 (triangles merged) or 8")->capture_default_str();
  tr->add_option("--mode", mode_name, "chord mode: ray|line")->capture_default_str();

  // eval
  fs::path model_path;
  auto* ev = app.add_subcommand("eval", "per-class metrics on the train and test subsets");
  add_out(ev);
  ev->add_option("--data", data_dir, "dataset directory")->required();
  ev->add_option("--model", model_path, "model.json")->required();

  // explain
  auto* ex = app.add_subcommand("explain", "decision path of tree 0 for one mask");
  add_out(ex);
  ex->add_option("mask", mask_path, "PGM or PNG mask")->required();
  ex->add_option("--model", model_path, "model.json")->required();

  // room
  RoomSpec room;
  std::vector<double> room_size{4.0, 3.0, 2.5};
  auto* rm = app.add_subcommand("room", "procedural box room with an example scene file");
  add_out(rm);
  rm->add_option("--seed", room.seed)->capture_default_str();
  rm->add_option("--size", room_size, "x y z extents (m)")->expected(3)->capture_default_str();
  rm->add_option("--density", room.density, "points per m^2")->capture_default_str();
  rm->add_option("--noise", room.noise_sigma, "surface noise sigma (m)")->capture_default_str();
  rm->add_option("--outliers", room.outlier_frac, "uniform outlier fraction")->capture_default_str();

  // project / graph
  SceneOptions scene_opt;
  std::uint64_t scene_seed = 0;
  double tau = 1.5;
  CLI::Option* seed_opt_p = nullptr;
  CLI::Option* tau_opt_p = nullptr;
  CLI::Option* seed_opt_g = nullptr;
  CLI::Option* tau_opt_g = nullptr;
  auto* pj = app.add_subcommand("project", "segment the cloud and project pattern masks");
  auto* gr = app.add_subcommand("graph", "scene graph and pairwise distances");
  for (auto* c : {pj, gr}) {
    add_out(c);
    c->add_option("--scene", scene_opt.scene, "scene JSON")->required();
    c->add_option("--model", scene_opt.model, "classify masks with this model");
    auto* so = c->add_option("--seed", scene_seed, "override the scene seed");
    auto* to = c->add_option("--tau", tau, "NEAR threshold (m), overrides the scene");
    c->add_flag("--plot", plot, "also write scene.svg");
    (c == pj ? seed_opt_p : seed_opt_g) = so;
    (c == pj ? tau_opt_p : tau_opt_g) = to;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  // Codes for failures the library reports by kind.
  const auto code_for = [&](ErrorKind k) {
    switch (k) {
      case ErrorKind::Config: return kConfig;
      case ErrorKind::DimensionMismatch: return kDimension;
      case ErrorKind::Schema: return (name == "project" || name == "graph") ? kSceneSchema : kOther;
      case ErrorKind::DegenerateShape:
      case ErrorKind::EmptyMask:
        return name == "generate" ? kGeneration : kBadMask;
      default: return kOther;
    }
  };

  try {
    const auto mode = parse_chord_mode(mode_name);
    std::optional<OutputLock> lock;
    lock.emplace(out);

    if (name == "generate") {
      synth.seed = seed;
      synth.canvas_height = synth.canvas_width;
      synth.validate();
      write_run_record(out, name, to_json(synth));
      const auto ds = generate_dataset(synth);
      write_dataset(out, ds);
      fmt::print("wrote {} masks to {}\n", ds.records.size(), out.string());
    } else if (name == "signature") {
      const auto mask = load_mask(mask_path);
      FeatureConfig fc{mode, extrema};
      write_run_record(out, name, {{"mask", mask_path.string()}, {"features", to_json(fc)}, {"plot", plot}});
      const auto s = aspect_signature(mask, mode);
      const auto f = build_features(s, extrema);
      std::string csv = "theta,aspect_ratio\n";
      for (int a = 0; a < kSignatureSize; ++a)
        csv += fmt::format("{},{}\n", a, fixed6(s.values[static_cast<std::size_t>(a)]));
      write_file(out / "signature.csv", csv);
      std::string ext = "kind,theta,value,prominence\n";
      for (const auto& p : f.peaks) ext += fmt::format("peak,{},{},{}\n", p.angle, fixed6(p.value), fixed6(p.prominence));
      for (const auto& v : f.valleys)
        ext += fmt::format("valley,{},{},{}\n", v.angle, fixed6(v.value), fixed6(v.prominence));
      write_file(out / "extrema.csv", ext);
      if (plot)
        write_file(out / "signature.svg",
                   signature_svg(f, fmt::format("{} ({} mode)", mask_path.filename().string(), to_string(mode))));
      fmt::print("{} peaks, {} valleys{}\n", f.n_peaks, f.n_valleys,
                 s.multi_component ? " (mask has several components)" : "");
    } else if (name == "features") {
      FeatureConfig fc{mode, extrema};
      write_run_record(out, name, {{"data", data_dir.string()}, {"features", to_json(fc)}});
      const auto d = load_dataset(data_dir);
      std::vector<std::size_t> all(d.records.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      const auto rows = rows_for(d, all, fc);
      std::string csv = "filename,class";
      for (const auto& c : feature_column_names()) csv += "," + c;
      csv += "\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        csv += d.records[i].filename + "," + std::string(to_string(d.records[i].cls));
        for (double v : rows[i]) csv += "," + fixed6(v);
        csv += "\n";
      }
      write_file(out / "features.csv", csv);
      fmt::print("wrote {} rows x {} features\n", rows.size(), kFeatureDim);
    } else if (name == "train") {
      params.bootstrap = !no_bootstrap;
      params.validate(kFeatureDim);
      const auto grouping = grouping_for(classes);
      FeatureConfig fc{mode, extrema};
      json split_meta = {{"fraction", split_fraction}, {"seed", seed}, {"classes", classes}};
      write_run_record(out, name,
                       {{"data", data_dir.string()},
                        {"seed", seed},
                        {"features", to_json(fc)},
                        {"forest", to_json(params)},
                        {"split", split_meta}});
      const auto d = load_dataset(data_dir);
      const auto split = stratified_split(d.records, grouping, split_fraction, seed);
      const auto rows = rows_for(d, split.train, fc);
      auto model = train(make_training_set(d.records, rows, split.train, grouping), params, seed);
      model.metadata = {{"features", to_json(fc)}, {"split", split_meta}};
      write_file(out / "model.json", serialize(model));
      std::string csv = "filename,subset\n";
      std::vector<std::string> subset(d.records.size());
      for (auto i : split.train) subset[i] = "train";
      for (auto i : split.test) subset[i] = "test";
      for (std::size_t i = 0; i < subset.size(); ++i) csv += d.records[i].filename + "," + subset[i] + "\n";
      write_file(out / "split.csv", csv);
      fmt::print("trained {} trees on {} rows ({} held out)\n", params.n_trees, split.train.size(), split.test.size());
    } else if (name == "eval") {
      const auto model = load_model(model_path);
      const auto fc = model_feature_config(model);
      const auto& sm = model.metadata.contains("split") ? model.metadata["split"] : json::object();
      const double fraction = sm.value("fraction", 0.7);
      const std::uint64_t split_seed = sm.value("seed", std::uint64_t{0});
      const auto grouping = grouping_for(sm.value("classes", 7));
      if (group_labels(grouping) != model.class_names)
        throw Error(ErrorKind::DimensionMismatch, "model classes do not match its recorded grouping");
      write_run_record(out, name,
                       {{"data", data_dir.string()},
                        {"model", model_path.string()},
                        {"features", to_json(fc)},
                        {"split", {{"fraction", fraction}, {"seed", split_seed}}}});
      const auto d = load_dataset(data_dir);
      const auto split = stratified_split(d.records, grouping, fraction, split_seed);
      const auto labels = group_indices(d.records, grouping);
      for (const auto& [subset_name, idx] : {std::pair{"train", split.train}, std::pair{"test", split.test}}) {
        const auto full = rows_for(d, idx, fc);
        std::vector<std::vector<double>> rows;
        std::vector<int> truth;
        for (auto i : idx) {
          rows.push_back(full[i]);
          truth.push_back(labels[i]);
        }
        const auto rep = evaluate(model, rows, truth);
        write_file(out / fmt::format("metrics_{}.csv", subset_name), metrics_csv(rep));
        write_file(out / fmt::format("confusion_{}.csv", subset_name), confusion_csv(rep));
        fmt::print("{:<5} n={:<5} accuracy {:.4f}  macro P {:.4f} R {:.4f} F1 {:.4f}\n", subset_name, rep.total,
                   rep.accuracy, rep.macro_precision, rep.macro_recall, rep.macro_f1);
      }
    } else if (name == "explain") {
      const auto model = load_model(model_path);
      const auto fc = model_feature_config(model);
      const auto mask = load_mask(mask_path);
      write_run_record(out, name, {{"mask", mask_path.string()}, {"model", model_path.string()}});
      const auto x = feature_row(mask, fc);
      const auto pred = predict(model, x);
      std::string text = fmt::format("prediction: {}\nprobabilities:\n", model.class_names[static_cast<std::size_t>(pred.label)]);
      for (std::size_t c = 0; c < model.class_names.size(); ++c)
        text += fmt::format("  {:<14} {:.4f}\n", model.class_names[c], pred.probabilities[c]);
      text += explain(model, x).text();
      write_file(out / "explanation.txt", text);
      std::cout << text;
    } else if (name == "room") {
      room.size = Vec3(room_size[0], room_size[1], room_size[2]);
      write_run_record(out, name,
                       {{"seed", room.seed},
                        {"size", vec_json(room.size)},
                        {"density", room.density},
                        {"noise", room.noise_sigma},
                        {"outliers", room.outlier_frac}});
      const auto r = make_box_room(room);
      write_file(out / "room.ply", encode_ply(r.cloud));
      // A 1 m disk mask at 1 cm per pixel.
      ShapeMask disk(100, 100, 0.01);
      for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x) disk.set(x, y, (x - 49.5) * (x - 49.5) + (y - 49.5) * (y - 49.5) <= 50.0 * 50.0);
      write_pgm(out / "disk.pgm", disk);
      const Vec3& L = room.size;
      // Floor charts run v along the longer horizontal side.
      const double floor_u = std::min(L.x(), L.y());
      const double floor_v = std::max(L.x(), L.y());
      json scene = {
          {"cloud", "room.ply"},
          {"gravity", {0, 0, 1}},
          {"seed", room.seed},
          {"resolution", 100},
          {"tau", 1.5},
          {"furniture",
           {{{"label", "table"}, {"center", {L.x() / 2, L.y() / 2, 0.375}}, {"half_extents", {0.6, 0.4, 0.375}}},
            {{"label", "cabinet"}, {"center", {0.2, L.y() / 2, 0.45}}, {"half_extents", {0.3, 0.5, 0.45}}}}},
          {"patterns",
           {{{"mask", "disk.pgm"},
             {"segment", {{"kind", "WALL"}, {"near", {0.0, L.y() / 2, 1.5}}}},
             {"u0", L.y() / 2 - 0.5},
             {"v0", 1.0},
             {"scale", 0.01}},
            {{"mask", "disk.pgm"},
             {"segment", {{"kind", "FLOOR"}}},
             {"u0", floor_u / 2 - 0.5},
             {"v0", floor_v / 2 - 0.5},
             {"scale", 0.01}}}}};
      write_file(out / "scene.json", scene.dump(2) + "\n");
      fmt::print("wrote room.ply ({} points), disk.pgm, scene.json\n", r.cloud.points.size());
    } else if (name == "project" || name == "graph") {
      const bool is_project = name == "project";
      if ((is_project ? seed_opt_p : seed_opt_g)->count()) scene_opt.seed = scene_seed;
      if ((is_project ? tau_opt_p : tau_opt_g)->count()) scene_opt.tau = tau;
      const auto r = run_scene(scene_opt);
      auto cfg = scene_config_json(r, scene_opt);
      cfg["plot"] = plot;
      write_run_record(out, name, cfg);
      if (is_project) {
        json segs = json::array();
        for (const auto& s : r.segments) {
          const auto frame = plane_to_image(s, r.spec.resolution);
          segs.push_back({{"id", fmt::format("seg_{}", s.id)},
                          {"kind", std::string(to_string(s.kind))},
                          {"normal", vec_json(s.normal)},
                          {"offset", s.offset},
                          {"n_inliers", s.inliers.size()},
                          {"rms", s.rms},
                          {"centroid", vec_json(s.centroid)},
                          {"chart",
                           {{"origin", vec_json(s.chart.origin)},
                            {"u", vec_json(s.chart.u)},
                            {"v", vec_json(s.chart.v)},
                            {"u_range", {s.chart.u_min, s.chart.u_max}},
                            {"v_range", {s.chart.v_min, s.chart.v_max}},
                            {"raster", {frame.width, frame.height}}}}});
        }
        json pats = json::array();
        for (const auto& p : r.patterns) {
          json probs = json::object();
          for (std::size_t c = 0; c < p.probabilities.size(); ++c) probs[p.class_names[c]] = p.probabilities[c];
          pats.push_back({{"id", fmt::format("pat_{}", p.id)},
                          {"source", p.source},
                          {"host", fmt::format("seg_{}", p.host)},
                          {"label", p.label},
                          {"probabilities", probs},
                          {"n_points", p.points.size()},
                          {"centroid", vec_json(p.centroid)},
                          {"area_m2", p.area},
                          {"clip_warning", p.clip_warning}});
          if (p.clip_warning) fmt::print(stderr, "warning: pat_{} extends beyond its host segment\n", p.id);
        }
        write_file(out / "segments.json", segs.dump(2) + "\n");
        write_file(out / "patterns.json", pats.dump(2) + "\n");
        fmt::print("{} segments, {} patterns projected\n", r.segments.size(), r.patterns.size());
      } else {
        write_file(out / "scene_graph.json", to_json(r.graph).dump(2) + "\n");
        write_file(out / "distances.csv", distances_csv(r.graph));
        fmt::print("{} nodes, {} relation edges\n", r.graph.nodes.size(), r.graph.edges.size());
      }
      if (plot) write_file(out / "scene.svg", scene_svg(r.graph, r.segments, r.spec.furniture, r.spec.gravity_up));
    }
    return kOk;
  } catch (const CliFailure& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return e.code;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return code_for(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kOther;
  }
}
