#include "firesig/error.hpp"
#include "firesig/scene3d.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace firesig {

namespace fs = std::filesystem;

namespace {

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

PointCloud read_ply(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const auto fail = [&](const std::string& msg) { throw Error(ErrorKind::Io, path.string() + ": " + msg); };

  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) fail("not a PLY file");
  struct Element {
    std::string name;
    long count = 0;
    std::vector<std::string> props;
  };
  std::vector<Element> elements;
  bool ascii = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string fmt_name;
      ls >> fmt_name;
      ascii = fmt_name == "ascii";
    } else if (key == "element") {
      Element e;
      ls >> e.name >> e.count;
      if (!ls || e.count < 0) fail("bad element line");
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) fail("property before element");
      std::string type, name;
      ls >> type;
      if (type == "list") {
        std::string t1, t2;
        ls >> t1 >> t2;
      }
      ls >> name;
      elements.back().props.push_back(name);
    } else if (key == "end_header") {
      break;
    }
  }
  if (!ascii) fail("only ASCII PLY is supported");

  PointCloud cloud;
  for (const auto& e : elements) {
    if (e.name != "vertex") {
      for (long i = 0; i < e.count; ++i)
        if (!std::getline(in, line)) fail("truncated element '" + e.name + "'");
      continue;
    }
    const auto col = [&](std::string_view n) {
      const auto it = std::find(e.props.begin(), e.props.end(), n);
      return it == e.props.end() ? -1 : static_cast<int>(it - e.props.begin());
    };
    const int ix = col("x"), iy = col("y"), iz = col("z");
    const int ir = col("red"), ig = col("green"), ib = col("blue");
    if (ix < 0 || iy < 0 || iz < 0) fail("vertex element lacks x/y/z");
    const bool color = ir >= 0 && ig >= 0 && ib >= 0;
    std::vector<double> vals(e.props.size());
    for (long i = 0; i < e.count; ++i) {
      if (!std::getline(in, line)) fail("truncated vertex data");
      std::istringstream ls(line);
      for (auto& v : vals)
        if (!(ls >> v)) fail(fmt::format("bad vertex line {}", i));
      cloud.points.emplace_back(vals[static_cast<std::size_t>(ix)], vals[static_cast<std::size_t>(iy)],
                                vals[static_cast<std::size_t>(iz)]);
      if (color)
        cloud.rgb.push_back({to_byte(vals[static_cast<std::size_t>(ir)]), to_byte(vals[static_cast<std::size_t>(ig)]),
                             to_byte(vals[static_cast<std::size_t>(ib)])});
    }
  }
  return cloud;
}

PointCloud read_xyz(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  PointCloud cloud;
  std::string line;
  int lineno = 0;
  int width = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) throw Error(ErrorKind::Io, fmt::format("{}:{}: not a number", path.string(), lineno));
    if (v.empty()) continue;
    if ((v.size() != 3 && v.size() != 6) || (width >= 0 && static_cast<int>(v.size()) != width))
      throw Error(ErrorKind::Io, fmt::format("{}:{}: expected x y z [r g b]", path.string(), lineno));
    width = static_cast<int>(v.size());
    cloud.points.emplace_back(v[0], v[1], v[2]);
    if (v.size() == 6) cloud.rgb.push_back({to_byte(v[3]), to_byte(v[4]), to_byte(v[5])});
  }
  return cloud;
}

PointCloud read_cloud(const fs::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".ply" ? read_ply(path) : read_xyz(path);
}

std::string encode_ply(const PointCloud& cloud) {
  const bool color = !cloud.rgb.empty();
  std::string out = fmt::format("ply\nformat ascii 1.0\nelement vertex {}\n"
                                "property double x\nproperty double y\nproperty double z\n",
                                cloud.points.size());
  if (color) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "end_header\n";
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    out += fmt::format("{} {} {}", p.x(), p.y(), p.z());
    if (color) out += fmt::format(" {} {} {}", cloud.rgb[i][0], cloud.rgb[i][1], cloud.rgb[i][2]);
    out += '\n';
  }
  return out;
}

// --- scene files -----------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::Schema, field + ": " + msg);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      schema(where.empty() ? k : where + "." + k, "unknown field");
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) schema(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema(field, "must be finite");
  return v;
}

double positive(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!(v > 0.0)) schema(field, "must be positive");
  return v;
}

Vec3 vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) schema(field, "expected an array of 3 numbers");
  return {number(j[0], field + "[0]"), number(j[1], field + "[1]"), number(j[2], field + "[2]")};
}

std::string string(const json& j, const std::string& field) {
  if (!j.is_string()) schema(field, "expected a string");
  return j.get<std::string>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) schema(field, "expected an integer");
  return j.get<int>();
}

}  // namespace

SceneSpec parse_scene(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) schema("scene", "expected a JSON object");
  only_keys(j, "", {"cloud", "gravity", "seed", "segmentation", "resolution", "tau", "furniture", "patterns"});
  SceneSpec s;
  if (!j.contains("cloud")) schema("cloud", "required");
  s.cloud = base_dir / string(j["cloud"], "cloud");
  if (j.contains("gravity")) {
    s.gravity_up = vec3(j["gravity"], "gravity");
    if (s.gravity_up.norm() < 1e-12) schema("gravity", "must be non-zero");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) schema("seed", "expected a non-negative integer");
    s.segmentation.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("segmentation")) {
    const auto& g = j["segmentation"];
    if (!g.is_object()) schema("segmentation", "expected an object");
    only_keys(g, "segmentation", {"inlier_eps", "min_inlier_frac", "max_planes", "iterations"});
    if (g.contains("inlier_eps")) s.segmentation.inlier_eps = positive(g["inlier_eps"], "segmentation.inlier_eps");
    if (g.contains("min_inlier_frac")) {
      s.segmentation.min_inlier_frac = positive(g["min_inlier_frac"], "segmentation.min_inlier_frac");
      if (s.segmentation.min_inlier_frac > 1.0) schema("segmentation.min_inlier_frac", "must be <= 1");
    }
    if (g.contains("max_planes")) s.segmentation.max_planes = integer(g["max_planes"], "segmentation.max_planes");
    if (g.contains("iterations")) s.segmentation.iterations = integer(g["iterations"], "segmentation.iterations");
    if (s.segmentation.max_planes < 1) schema("segmentation.max_planes", "must be >= 1");
    if (s.segmentation.iterations < 1) schema("segmentation.iterations", "must be >= 1");
  }
  if (j.contains("resolution")) s.resolution = positive(j["resolution"], "resolution");
  if (j.contains("tau")) {
    s.tau = number(j["tau"], "tau");
    if (s.tau < 0.0) schema("tau", "must be non-negative");
  }
  if (j.contains("furniture")) {
    if (!j["furniture"].is_array()) schema("furniture", "expected an array");
    for (std::size_t i = 0; i < j["furniture"].size(); ++i) {
      const auto& f = j["furniture"][i];
      const auto where = fmt::format("furniture[{}]", i);
      if (!f.is_object()) schema(where, "expected an object");
      only_keys(f, where, {"label", "center", "half_extents", "axes"});
      for (const char* req : {"label", "center", "half_extents"})
        if (!f.contains(req)) schema(where + "." + req, "required");
      FurnitureBox b;
      b.label = string(f["label"], where + ".label");
      b.center = vec3(f["center"], where + ".center");
      b.half_extents = vec3(f["half_extents"], where + ".half_extents");
      if (!(b.half_extents.minCoeff() > 0.0)) schema(where + ".half_extents", "must be positive");
      if (f.contains("axes")) {
        const auto& a = f["axes"];
        if (!a.is_array() || a.size() != 3) schema(where + ".axes", "expected 3 axis vectors");
        for (int c = 0; c < 3; ++c)
          b.axes.col(c) = vec3(a[static_cast<std::size_t>(c)], fmt::format("{}.axes[{}]", where, c));
        if (!(b.axes.transpose() * b.axes).isIdentity(1e-6)) schema(where + ".axes", "must be orthonormal");
      }
      s.furniture.push_back(b);
    }
  }
  if (j.contains("patterns")) {
    if (!j["patterns"].is_array()) schema("patterns", "expected an array");
    for (std::size_t i = 0; i < j["patterns"].size(); ++i) {
      const auto& p = j["patterns"][i];
      const auto where = fmt::format("patterns[{}]", i);
      if (!p.is_object()) schema(where, "expected an object");
      only_keys(p, where, {"mask", "segment", "u0", "v0", "scale"});
      for (const char* req : {"mask", "segment", "u0", "v0", "scale"})
        if (!p.contains(req)) schema(where + "." + req, "required");
      PatternSpec ps;
      ps.mask = base_dir / string(p["mask"], where + ".mask");
      const auto& sel = p["segment"];
      if (sel.is_number_integer()) {
        ps.segment.index = sel.get<int>();
        if (*ps.segment.index < 0) schema(where + ".segment", "must be >= 0");
      } else if (sel.is_object()) {
        only_keys(sel, where + ".segment", {"kind", "near"});
        if (sel.contains("kind")) {
          try {
            ps.segment.kind = parse_surface_kind(string(sel["kind"], where + ".segment.kind"));
          } catch (const Error&) {
            schema(where + ".segment.kind", "expected WALL, FLOOR, CEILING or OTHER");
          }
        }
        if (sel.contains("near")) ps.segment.near = vec3(sel["near"], where + ".segment.near");
        if (!ps.segment.kind && !ps.segment.near) schema(where + ".segment", "needs kind and/or near");
      } else {
        schema(where + ".segment", "expected a segment index or a selector object");
      }
      ps.placement.u0 = number(p["u0"], where + ".u0");
      ps.placement.v0 = number(p["v0"], where + ".v0");
      ps.placement.scale = positive(p["scale"], where + ".scale");
      s.patterns.push_back(ps);
    }
  }
  return s;
}

SceneSpec read_scene(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, path.string() + ": " + e.what());
  }
  return parse_scene(j, path.parent_path());
}

int select_segment(const std::vector<PlanarSegment>& segments, const SegmentSelector& sel) {
  if (sel.index) {
    for (std::size_t i = 0; i < segments.size(); ++i)
      if (segments[i].id == *sel.index) return static_cast<int>(i);
    throw Error(ErrorKind::DanglingReference, fmt::format("segment {} does not exist", *sel.index));
  }
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (sel.kind && s.kind != *sel.kind) continue;
    double d = 0.0;
    if (sel.near) {
      // Distance to the chart rectangle embedded in 3D.
      const auto q = s.chart.to_uv(*sel.near);
      const Eigen::Vector2d c(std::clamp(q.x(), s.chart.u_min, s.chart.u_max),
                              std::clamp(q.y(), s.chart.v_min, s.chart.v_max));
      d = (*sel.near - s.chart.from_uv(c)).norm();
    }
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw Error(ErrorKind::DanglingReference, "no segment matches the selector");
  return best;
}

}  // namespace firesig
