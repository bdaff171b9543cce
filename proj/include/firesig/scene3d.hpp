#pragma once

#include "firesig/mask.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace firesig {

using Vec3 = Eigen::Vector3d;

struct PointCloud {
  std::vector<Vec3> points;                       ///< meters
  std::vector<std::array<std::uint8_t, 3>> rgb;   ///< empty or parallel to points
  Vec3 gravity_up = Vec3::UnitZ();

  /// Throws Config on non-finite coordinates or a zero gravity vector.
  void validate() const;
};

/// ASCII PLY with `x y z` and optional `red green blue` vertex properties.
PointCloud read_ply(const std::filesystem::path& path);
/// Whitespace-separated `x y z [r g b]` per line; `#` starts a comment.
PointCloud read_xyz(const std::filesystem::path& path);
/// Dispatch on extension (.ply, otherwise XYZ).
PointCloud read_cloud(const std::filesystem::path& path);
std::string encode_ply(const PointCloud& cloud);

enum class SurfaceKind { Wall, Floor, Ceiling, Other };
std::string_view to_string(SurfaceKind k);
SurfaceKind parse_surface_kind(std::string_view s);

/// Orthonormal in-plane frame: u right, v up, u x v = normal.
struct PlaneChart {
  Vec3 origin = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitY();
  double u_min = 0, u_max = 0, v_min = 0, v_max = 0;

  Eigen::Vector2d to_uv(const Vec3& p) const { return {u.dot(p - origin), v.dot(p - origin)}; }
  Vec3 from_uv(const Eigen::Vector2d& q) const { return origin + q.x() * u + q.y() * v; }
};

struct PlanarSegment {
  int id = 0;
  SurfaceKind kind = SurfaceKind::Other;
  Vec3 normal = Vec3::UnitZ();  ///< unit, faces the cloud centroid
  double offset = 0.0;          ///< n.p + d = 0
  std::vector<int> inliers;     ///< ascending cloud indices
  Vec3 centroid = Vec3::Zero();
  double rms = 0.0;             ///< inlier point-plane RMS after refit
  PlaneChart chart;

  double signed_distance(const Vec3& p) const { return normal.dot(p) + offset; }
};

struct SegmentConfig {
  double inlier_eps = 0.02;       ///< m
  double min_inlier_frac = 0.05;  ///< of the whole cloud
  int max_planes = 12;
  int iterations = 2000;          ///< RANSAC hypotheses per plane
  std::uint64_t seed = 0;

  void validate() const;
};

/// Greedy sequential RANSAC. Hypotheses are evaluated in parallel; the winner is
/// the one with most inliers, lowest iteration index on ties, so the result does
/// not depend on the thread count. Throws NoPlanesFound.
std::vector<PlanarSegment> segment_planes(const PointCloud& cloud, const SegmentConfig& cfg);

namespace serial {
std::vector<PlanarSegment> segment_planes(const PointCloud& cloud, const SegmentConfig& cfg);
}

/// Kind from the normal and the height rank of the horizontal segments.
void classify_segments(std::vector<PlanarSegment>& segments, const Vec3& gravity_up);

/// Chart for a fitted segment. v follows gravity projected into the plane;
/// near-horizontal planes use their principal in-plane axis instead. Throws
/// DegenerateBasis for a WALL whose normal is parallel to gravity.
PlaneChart make_chart(const PlanarSegment& seg, const std::vector<Vec3>& points, const Vec3& gravity_up);

/// Raster frame over a segment's chart.
struct ImageFrame {
  PlaneChart chart;
  double resolution = 100.0;  ///< px / m
  int width = 0;
  int height = 0;

  Eigen::Vector2d pixel_of(const Vec3& p) const;
  Vec3 point_of(const Eigen::Vector2d& px) const;
};

ImageFrame plane_to_image(const PlanarSegment& seg, double resolution);

/// Mask placement on a chart: (u0, v0) is the offset in meters of the mask's
/// lower-left corner from the chart's (u_min, v_min) corner; `scale` is m/px.
struct Placement {
  double u0 = 0.0;
  double v0 = 0.0;
  double scale = 0.01;
};

struct ProjectedPattern {
  int id = 0;
  std::string source;
  std::string label = "unclassified";
  std::vector<std::string> class_names;
  std::vector<double> probabilities;
  int host = 0;                 ///< segment id
  std::vector<int> points;      ///< cloud indices, subset of the host inliers
  std::vector<Vec3> snapped;    ///< pattern points moved onto the host plane
  Vec3 centroid = Vec3::Zero(); ///< mean of `snapped`
  double area = 0.0;            ///< m^2
  bool clip_warning = false;    ///< mask footprint leaves the segment rectangle
};

/// Marks host inliers under foreground pixels, snaps them onto the plane and drops
/// any farther than 2 * inlier_eps. Throws EmptyProjection.
ProjectedPattern project_mask(const PlanarSegment& seg, const std::vector<Vec3>& points, const ShapeMask& mask,
                              const Placement& placement, double inlier_eps);

struct FurnitureBox {
  std::string label;
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.5);
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();  ///< columns = box axes

  /// Does the line through p along dir cross the box?
  bool line_hits(const Vec3& p, const Vec3& dir) const;
};

enum class NodeKind { Pattern, Wall, Floor, Ceiling, Other, Furniture };
enum class Relation { On, Adjacent, Above, Below, Near };
std::string_view to_string(NodeKind k);
std::string_view to_string(Relation r);

struct SceneNode {
  std::string id;
  NodeKind kind = NodeKind::Other;
  std::string label;
  Vec3 centroid = Vec3::Zero();
  nlohmann::json attributes = nlohmann::json::object();
};

struct SceneEdge {
  int a = 0;  ///< node indices
  int b = 0;
  double distance_m = 0.0;
  Relation relation = Relation::Near;
};

struct SceneGraph {
  std::vector<SceneNode> nodes;
  std::vector<SceneEdge> edges;  ///< relation-labeled subset

  /// Euclidean centroid distance between two nodes.
  double distance(int a, int b) const { return (nodes[static_cast<std::size_t>(a)].centroid -
                                                nodes[static_cast<std::size_t>(b)].centroid).norm(); }
  int find(std::string_view id) const;
};

struct GraphConfig {
  double tau = 1.5;              ///< NEAR threshold, m
  double adjacency_gap = 0.10;   ///< segments closer than this along their borders are ADJACENT
  Vec3 gravity_up = Vec3::UnitZ();
};

/// Throws DanglingReference when a pattern's host is not among the segments.
SceneGraph build_scene_graph(const std::vector<PlanarSegment>& segments, const std::vector<ProjectedPattern>& patterns,
                             const std::vector<FurnitureBox>& furniture, const std::vector<Vec3>& points,
                             const GraphConfig& cfg);

nlohmann::json to_json(const SceneGraph& g);
/// Every unordered node pair: `id_a,id_b,distance_m`.
std::string distances_csv(const SceneGraph& g);
/// Top-down sketch (view along gravity).
std::string scene_svg(const SceneGraph& g, const std::vector<PlanarSegment>& segments,
                      const std::vector<FurnitureBox>& furniture, const Vec3& gravity_up);

// --- scene files -----------------------------------------------------------

struct SegmentSelector {
  std::optional<int> index;
  std::optional<SurfaceKind> kind;
  std::optional<Vec3> near;
};

struct PatternSpec {
  std::filesystem::path mask;
  SegmentSelector segment;
  Placement placement;
};

struct SceneSpec {
  std::filesystem::path cloud;
  Vec3 gravity_up = Vec3::UnitZ();
  SegmentConfig segmentation;
  double resolution = 100.0;
  double tau = 1.5;
  std::vector<FurnitureBox> furniture;
  std::vector<PatternSpec> patterns;
};

/// Relative paths resolve against `base_dir`. Throws Schema naming the field.
SceneSpec parse_scene(const nlohmann::json& j, const std::filesystem::path& base_dir);
SceneSpec read_scene(const std::filesystem::path& path);

/// Resolves a selector: an explicit index, or the segment (optionally of a given
/// kind) whose chart rectangle is closest to `near`. Throws DanglingReference.
int select_segment(const std::vector<PlanarSegment>& segments, const SegmentSelector& sel);

// --- procedural rooms ------------------------------------------------------

struct RoomSpec {
  Vec3 size{4.0, 3.0, 2.5};     ///< x, y, z extents; floor at z = 0, corner at the origin
  double density = 600.0;       ///< points per m^2
  double noise_sigma = 0.005;   ///< m, along the face normal
  double outlier_frac = 0.0;    ///< extra uniform points in the bounding volume, fraction of the total
  std::uint64_t seed = 0;
};

struct Room {
  PointCloud cloud;
  /// Ground-truth faces: inward normals with offsets, order -x,+x,-y,+y,floor,ceiling.
  std::vector<std::pair<Vec3, double>> faces;
};

Room make_box_room(const RoomSpec& spec);

}  // namespace firesig
