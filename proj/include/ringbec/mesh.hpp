#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <vector>

namespace ringbec {

using Vec2 = Eigen::Vector2d;

struct MeshParams {
  double r_min = 0.6;
  double r_max = 1.4;
  double h = 0.06;
  std::optional<int> n_circles;  // overrides the derived N_c
  std::optional<int> n_points;   // overrides the derived N_p
  // Use N_c bands of triangles (N_c + 1 circles) instead of N_c circles.
  bool match_paper_counts = false;

  void validate() const;
};

struct MeshCounts {
  int n_circles = 0;
  int n_points = 0;
};

/// N_c = ceil((r_max - r_min) / h) clamped to >= 2 and
/// N_p = ceil(2 pi sqrt(2) N_c / (1 - r_min / r_max)), evaluated in plain
/// double arithmetic.
MeshCounts derive_mesh_counts(double h, double r_min, double r_max);

/// Radii of `count` concentric circles from r_min to r_max whose increments
/// follow the quadratic concentration profile f(x) = alpha (x - 1/2)^2 +
/// (r_max - r_min) / (2 count). Increments are f(k / count) for
/// k = 1..count-1, rescaled by a single factor so that the last radius is
/// exactly r_max.
std::vector<double> compute_radii(int count, double r_min, double r_max);

/// alpha = 6 n / (n^2 + 2) (r_max - r_min).
double concentration_alpha(int n, double r_min, double r_max);

/// One mesh edge. `normal` points out of triangle `first`; for interior edges
/// it therefore points into `second`. `tangent` is the normal rotated by
/// +pi/2, so (normal, tangent) is positively oriented.
struct Edge {
  std::array<int, 2> vertices{};
  int first = -1;
  int second = -1;  // -1 on the boundary
  double length = 0.0;
  double distance = 0.0;  // d_{K,L} (interior) or d_{K,sigma} (boundary)
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  Vec2 midpoint = Vec2::Zero();

  bool boundary() const { return second < 0; }
};

/// Layout information of the structured ring construction.
struct RingLayout {
  int n_points = 0;
  int n_bands = 0;
  std::vector<double> radii;
};

/// Triangulation with the finite-volume geometry attached. Immutable after
/// construction.
class RingMesh {
 public:
  /// General triangulation (used for hand-built meshes in tests as well).
  /// Triangles are reoriented counter-clockwise.
  RingMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           std::optional<RingLayout> layout = std::nullopt);

  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Vec2>& circumcenters() const { return circumcenters_; }
  const std::vector<double>& areas() const { return areas_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::array<int, 3>& triangle_edges(int k) const { return triangle_edges_[k]; }
  /// Triangles sharing at least one vertex with `k`, `k` excluded, sorted.
  const std::vector<int>& vertex_neighbors(int k) const { return vertex_neighbors_[k]; }
  /// Triangles sharing an edge with `k` (boundary slots omitted).
  std::vector<int> edge_neighbors(int k) const;

  const std::optional<RingLayout>& layout() const { return layout_; }

  /// Sum of triangle areas.
  double total_area() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Vec2> circumcenters_;
  std::vector<double> areas_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::vector<int>> vertex_neighbors_;
  std::optional<RingLayout> layout_;
};

/// Builds the concentrated, twisted annulus triangulation. Throws
/// NumericalError if any angle reaches pi/2.
RingMesh build_ring_mesh(const MeshParams& params);

struct AdmissibilityReport {
  double max_angle = 0.0;
  /// Smallest barycentric coordinate of any circumcenter in its triangle
  /// (positive means strictly inside).
  double min_containment_margin = 0.0;
  /// max |cos| between [x_K, x_L] and the shared edge over interior edges.
  double max_orthogonality_defect = 0.0;
  double min_distance = 0.0;
  int worst_triangle = -1;
  bool pass = false;
};

AdmissibilityReport verify_admissibility(const RingMesh& mesh, double orthogonality_tol = 1e-10);

/// S_0(k), S_1(k), ..., S_{lambda_max}(k): graph-distance shells in the
/// vertex-sharing adjacency graph.
std::vector<std::vector<int>> triangle_shells(const RingMesh& mesh, int k, int lambda_max);

/// Index permutation induced by a rotation of 2 pi / N_p: triangle t is
/// mapped to perm[t]. Requires a structured ring layout.
std::vector<int> rotation_permutation(const RingMesh& mesh);

/// Interior angles of triangle k.
std::array<double, 3> triangle_angles(const RingMesh& mesh, int k);

}  // namespace ringbec
