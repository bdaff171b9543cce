#include "firesig/error.hpp"
#include "firesig/scene3d.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace firesig {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Pattern: return "PATTERN";
    case NodeKind::Wall: return "WALL";
    case NodeKind::Floor: return "FLOOR";
    case NodeKind::Ceiling: return "CEILING";
    case NodeKind::Other: return "OTHER";
    case NodeKind::Furniture: return "FURNITURE";
  }
  return "OTHER";
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::On: return "ON";
    case Relation::Adjacent: return "ADJACENT";
    case Relation::Above: return "ABOVE";
    case Relation::Below: return "BELOW";
    case Relation::Near: return "NEAR";
  }
  return "NEAR";
}

int SceneGraph::find(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

NodeKind node_kind(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::Wall: return NodeKind::Wall;
    case SurfaceKind::Floor: return NodeKind::Floor;
    case SurfaceKind::Ceiling: return NodeKind::Ceiling;
    case SurfaceKind::Other: return NodeKind::Other;
  }
  return NodeKind::Other;
}

// Some inlier of `a` lies near plane `b` and inside b's chart rectangle (grown by gap).
bool touches(const PlanarSegment& a, const PlanarSegment& b, const std::vector<Vec3>& pts, double gap) {
  for (int i : a.inliers) {
    const Vec3& p = pts[static_cast<std::size_t>(i)];
    if (std::abs(b.signed_distance(p)) > gap) continue;
    const auto q = b.chart.to_uv(p);
    if (q.x() >= b.chart.u_min - gap && q.x() <= b.chart.u_max + gap && q.y() >= b.chart.v_min - gap &&
        q.y() <= b.chart.v_max + gap)
      return true;
  }
  return false;
}

}  // namespace

SceneGraph build_scene_graph(const std::vector<PlanarSegment>& segments, const std::vector<ProjectedPattern>& patterns,
                             const std::vector<FurnitureBox>& furniture, const std::vector<Vec3>& points,
                             const GraphConfig& cfg) {
  if (!(cfg.tau >= 0.0)) throw Error(ErrorKind::Config, "tau must be non-negative");
  const Vec3 g = cfg.gravity_up.normalized();
  SceneGraph graph;
  std::vector<int> seg_node;
  for (const auto& s : segments) {
    SceneNode n;
    n.id = fmt::format("seg_{}", s.id);
    n.kind = node_kind(s.kind);
    n.label = std::string(to_string(s.kind));
    std::transform(n.label.begin(), n.label.end(), n.label.begin(), [](unsigned char c) { return std::tolower(c); });
    n.centroid = s.centroid;
    n.attributes = {{"normal", vec_json(s.normal)},
                    {"offset", s.offset},
                    {"n_inliers", s.inliers.size()},
                    {"rms", s.rms},
                    {"extent_m", {s.chart.u_max - s.chart.u_min, s.chart.v_max - s.chart.v_min}}};
    seg_node.push_back(static_cast<int>(graph.nodes.size()));
    graph.nodes.push_back(std::move(n));
  }
  const auto host_node = [&](int host) {
    for (std::size_t i = 0; i < segments.size(); ++i)
      if (segments[i].id == host) return seg_node[i];
    throw Error(ErrorKind::DanglingReference, fmt::format("pattern host seg_{} does not exist", host));
  };

  std::vector<int> object_nodes;  // patterns then furniture
  std::vector<std::pair<int, int>> on_edges;
  for (const auto& p : patterns) {
    const int host = host_node(p.host);
    SceneNode n;
    n.id = fmt::format("pat_{}", p.id);
    n.kind = NodeKind::Pattern;
    n.label = p.label;
    n.centroid = p.centroid;
    nlohmann::json probs = nlohmann::json::object();
    for (std::size_t c = 0; c < p.probabilities.size() && c < p.class_names.size(); ++c)
      probs[p.class_names[c]] = p.probabilities[c];
    n.attributes = {{"host", graph.nodes[static_cast<std::size_t>(host)].id},
                    {"source", p.source},
                    {"n_points", p.points.size()},
                    {"area_m2", p.area},
                    {"clip_warning", p.clip_warning},
                    {"probabilities", probs}};
    const int idx = static_cast<int>(graph.nodes.size());
    on_edges.emplace_back(idx, host);
    object_nodes.push_back(idx);
    graph.nodes.push_back(std::move(n));
  }
  const auto n_patterns = object_nodes.size();
  for (std::size_t f = 0; f < furniture.size(); ++f) {
    const auto& b = furniture[f];
    SceneNode n;
    n.id = fmt::format("furn_{}", f);
    n.kind = NodeKind::Furniture;
    n.label = b.label;
    n.centroid = b.center;
    nlohmann::json axes = nlohmann::json::array();
    for (int c = 0; c < 3; ++c) axes.push_back(vec_json(b.axes.col(c)));
    n.attributes = {{"half_extents", vec_json(b.half_extents)}, {"axes", axes}};
    object_nodes.push_back(static_cast<int>(graph.nodes.size()));
    graph.nodes.push_back(std::move(n));
  }

  for (auto [a, b] : on_edges) graph.edges.push_back({a, b, graph.distance(a, b), Relation::On});

  for (std::size_t i = 0; i < segments.size(); ++i)
    for (std::size_t j = i + 1; j < segments.size(); ++j)
      if (touches(segments[i], segments[j], points, cfg.adjacency_gap) ||
          touches(segments[j], segments[i], points, cfg.adjacency_gap))
        graph.edges.push_back({seg_node[i], seg_node[j], graph.distance(seg_node[i], seg_node[j]), Relation::Adjacent});

  for (std::size_t i = 0; i < object_nodes.size(); ++i)
    for (std::size_t j = i + 1; j < object_nodes.size(); ++j) {
      const int a = object_nodes[i];
      const int b = object_nodes[j];
      const double d = graph.distance(a, b);
      if (d < cfg.tau) graph.edges.push_back({a, b, d, Relation::Near});
      // Vertical relations: pattern vs furniture whose box the vertical through the pattern crosses.
      if (i < n_patterns && j >= n_patterns) {
        const auto& box = furniture[j - n_patterns];
        const Vec3& pc = graph.nodes[static_cast<std::size_t>(a)].centroid;
        if (!box.line_hits(pc, g)) continue;
        const double dh = g.dot(pc - box.center);
        if (dh > 1e-9) graph.edges.push_back({a, b, d, Relation::Above});
        else if (dh < -1e-9) graph.edges.push_back({a, b, d, Relation::Below});
      }
    }
  return graph;
}

nlohmann::json to_json(const SceneGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : g.nodes)
    nodes.push_back({{"id", n.id},
                     {"kind", std::string(to_string(n.kind))},
                     {"label", n.label},
                     {"centroid", vec_json(n.centroid)},
                     {"attributes", n.attributes}});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"a", g.nodes[static_cast<std::size_t>(e.a)].id},
                     {"b", g.nodes[static_cast<std::size_t>(e.b)].id},
                     {"distance_m", e.distance_m},
                     {"relation", std::string(to_string(e.relation))}});
  return {{"nodes", nodes}, {"edges", edges}};
}

std::string distances_csv(const SceneGraph& g) {
  std::string out = "id_a,id_b,distance_m\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j)
      out += fmt::format("{},{},{}\n", g.nodes[i].id, g.nodes[j].id,
                         g.distance(static_cast<int>(i), static_cast<int>(j)));
  return out;
}

std::string scene_svg(const SceneGraph& g, const std::vector<PlanarSegment>& segments,
                      const std::vector<FurnitureBox>& furniture, const Vec3& gravity_up) {
  const Vec3 up = gravity_up.normalized();
  Vec3 e1 = Vec3::UnitX() - up.x() * up;
  if (e1.norm() < 1e-6) e1 = Vec3::UnitY() - up.y() * up;
  e1.normalize();
  const Vec3 e2 = up.cross(e1);
  const auto flat = [&](const Vec3& p) { return Eigen::Vector2d(e1.dot(p), e2.dot(p)); };

  std::vector<std::vector<Eigen::Vector2d>> seg_polys;
  for (const auto& s : segments) {
    const auto& c = s.chart;
    seg_polys.push_back({flat(c.from_uv({c.u_min, c.v_min})), flat(c.from_uv({c.u_max, c.v_min})),
                         flat(c.from_uv({c.u_max, c.v_max})), flat(c.from_uv({c.u_min, c.v_max}))});
  }
  std::vector<std::vector<Eigen::Vector2d>> box_polys;
  for (const auto& b : furniture) {
    std::vector<Eigen::Vector2d> corners;
    for (int k = 0; k < 8; ++k) {
      Vec3 o;
      for (int a = 0; a < 3; ++a) o[a] = ((k >> a) & 1 ? 1.0 : -1.0) * b.half_extents[a];
      corners.push_back(flat(b.center + b.axes * o));
    }
    // Convex hull (monotone chain) of the projected corners.
    std::sort(corners.begin(), corners.end(),
              [](const auto& p, const auto& q) { return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y()); });
    std::vector<Eigen::Vector2d> hull(2 * corners.size());
    std::size_t k = 0;
    const auto cross = [](const auto& o, const auto& a, const auto& b) {
      return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    for (std::size_t i = 0; i < corners.size(); ++i) {
      while (k >= 2 && cross(hull[k - 2], hull[k - 1], corners[i]) <= 0) --k;
      hull[k++] = corners[i];
    }
    for (std::size_t i = corners.size() - 1, t = k + 1; i > 0; --i) {
      while (k >= t && cross(hull[k - 2], hull[k - 1], corners[i - 1]) <= 0) --k;
      hull[k++] = corners[i - 1];
    }
    hull.resize(k > 0 ? k - 1 : 0);
    box_polys.push_back(hull);
  }

  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  const auto grow = [&](const Eigen::Vector2d& p) {
    x0 = std::min(x0, p.x());
    y0 = std::min(y0, p.y());
    x1 = std::max(x1, p.x());
    y1 = std::max(y1, p.y());
  };
  for (const auto& poly : seg_polys) for (const auto& p : poly) grow(p);
  for (const auto& poly : box_polys) for (const auto& p : poly) grow(p);
  for (const auto& n : g.nodes) grow(flat(n.centroid));
  if (!std::isfinite(x0)) x0 = y0 = 0.0, x1 = y1 = 1.0;

  constexpr double kSize = 600.0;
  constexpr double kMargin = 40.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-6});
  const double k = (kSize - 2 * kMargin) / span;
  const auto sx = [&](const Eigen::Vector2d& p) { return kMargin + (p.x() - x0) * k; };
  const auto sy = [&](const Eigen::Vector2d& p) { return kSize - kMargin - (p.y() - y0) * k; };
  const auto points_attr = [&](const std::vector<Eigen::Vector2d>& poly) {
    std::string s;
    for (const auto& p : poly) s += fmt::format("{}{:.2f},{:.2f}", s.empty() ? "" : " ", sx(p), sy(p));
    return s;
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">top view (gravity into page)</text>\n",
      kSize);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto kind = segments[i].kind;
    const char* stroke = kind == SurfaceKind::Wall ? "#333" : kind == SurfaceKind::Other ? "#999" : "#bbb";
    const char* fill = kind == SurfaceKind::Floor ? "#f4f1ea" : "none";
    if (kind == SurfaceKind::Ceiling) continue;  // would hide the floor
    svg += fmt::format("<polygon class=\"segment\" data-id=\"seg_{}\" points=\"{}\" fill=\"{}\" stroke=\"{}\" "
                       "stroke-width=\"{}\"/>\n",
                       segments[i].id, points_attr(seg_polys[i]), fill, stroke,
                       kind == SurfaceKind::Wall ? 4 : 1);
  }
  for (std::size_t i = 0; i < furniture.size(); ++i)
    svg += fmt::format("<polygon class=\"furniture\" data-id=\"furn_{}\" points=\"{}\" fill=\"#cfe3f5\" "
                       "stroke=\"#3a6ea5\"/>\n",
                       i, points_attr(box_polys[i]));
  for (const auto& e : g.edges) {
    if (e.relation != Relation::Near) continue;
    const auto a = flat(g.nodes[static_cast<std::size_t>(e.a)].centroid);
    const auto b = flat(g.nodes[static_cast<std::size_t>(e.b)].centroid);
    svg += fmt::format("<line class=\"near\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#e08a00\" "
                       "stroke-dasharray=\"4 3\"/>\n",
                       sx(a), sy(a), sx(b), sy(b));
  }
  for (const auto& n : g.nodes) {
    if (n.kind != NodeKind::Pattern && n.kind != NodeKind::Furniture) continue;
    const auto p = flat(n.centroid);
    if (n.kind == NodeKind::Pattern)
      svg += fmt::format("<circle class=\"pattern\" data-id=\"{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"6\" fill=\"#c0392b\"/>\n",
                         n.id, sx(p), sy(p));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">{} {}</text>\n",
                       sx(p) + 8, sy(p) + (n.kind == NodeKind::Pattern ? -8 : 16), n.id, xml_escape(n.label));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace firesig
