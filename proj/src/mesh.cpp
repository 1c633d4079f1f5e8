#include "ringbec/mesh.hpp"

#include "ringbec/errors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace ringbec {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  // Relative to a for accuracy on small triangles.
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = ab.squaredNorm();
  const double ac2 = ac.squaredNorm();
  const Vec2 rel((ac.y() * ab2 - ab.y() * ac2) / d, (ab.x() * ac2 - ac.x() * ab2) / d);
  return a + rel;
}

}  // namespace

void MeshParams::validate() const {
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw ConfigError("mesh: require 0 < r_min < r_max");
  }
  if (!(h > 0.0)) {
    throw ConfigError("mesh: step size h must be positive");
  }
  if (n_circles && *n_circles < 2) {
    throw ConfigError("mesh: n_circles must be >= 2");
  }
  if (n_points && *n_points < 3) {
    throw ConfigError("mesh: n_points must be >= 3");
  }
}

MeshCounts derive_mesh_counts(double h, double r_min, double r_max) {
  if (!(h > 0.0)) {
    throw ConfigError("derive_mesh_counts: h must be positive");
  }
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw ConfigError("derive_mesh_counts: require 0 < r_min < r_max");
  }
  MeshCounts counts;
  counts.n_circles = std::max(2, static_cast<int>(std::ceil((r_max - r_min) / h)));
  const double c = 2.0 * std::numbers::pi * std::numbers::sqrt2;
  counts.n_points =
      std::max(3, static_cast<int>(std::ceil(c * counts.n_circles / (1.0 - r_min / r_max))));
  return counts;
}

double concentration_alpha(int n, double r_min, double r_max) {
  const double dn = n;
  return 6.0 * dn / (dn * dn + 2.0) * (r_max - r_min);
}

std::vector<double> compute_radii(int count, double r_min, double r_max) {
  if (count < 2) {
    throw ConfigError("compute_radii: need at least 2 circles");
  }
  const double width = r_max - r_min;
  const double alpha = concentration_alpha(count, r_min, r_max);
  const double floor_thickness = width / (2.0 * count);

  std::vector<double> increments(count - 1);
  for (int k = 1; k < count; ++k) {
    const double x = static_cast<double>(k) / count - 0.5;
    increments[k - 1] = alpha * x * x + floor_thickness;
  }
  double sum = 0.0;
  for (double d : increments) sum += d;
  const double scale = width / sum;

  std::vector<double> radii(count);
  radii[0] = r_min;
  for (int k = 1; k < count; ++k) {
    radii[k] = radii[k - 1] + scale * increments[k - 1];
  }
  radii.back() = r_max;
  return radii;
}

RingMesh::RingMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                   std::optional<RingLayout> layout)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), layout_(std::move(layout)) {
  const int n_tri = num_triangles();
  const int n_vert = num_vertices();

  circumcenters_.resize(n_tri);
  areas_.resize(n_tri);
  for (int k = 0; k < n_tri; ++k) {
    auto& t = triangles_[k];
    for (int v : t) {
      if (v < 0 || v >= n_vert) {
        throw std::invalid_argument("RingMesh: vertex index out of range");
      }
    }
    double twice_area = cross(vertices_[t[1]] - vertices_[t[0]], vertices_[t[2]] - vertices_[t[0]]);
    if (twice_area < 0.0) {
      std::swap(t[1], t[2]);
      twice_area = -twice_area;
    }
    if (!(twice_area > 0.0)) {
      throw NumericalError("RingMesh: degenerate triangle " + std::to_string(k));
    }
    areas_[k] = 0.5 * twice_area;
    circumcenters_[k] = circumcenter(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
  }

  // Edges in order of first appearance.
  std::unordered_map<long long, int> edge_index;
  edge_index.reserve(3 * n_tri);
  triangle_edges_.resize(n_tri);
  for (int k = 0; k < n_tri; ++k) {
    const auto& t = triangles_[k];
    for (int e = 0; e < 3; ++e) {
      const int a = t[(e + 1) % 3];
      const int b = t[(e + 2) % 3];
      const long long key = static_cast<long long>(std::min(a, b)) * n_vert + std::max(a, b);
      auto [it, inserted] = edge_index.try_emplace(key, static_cast<int>(edges_.size()));
      if (inserted) {
        Edge edge;
        edge.vertices = {a, b};
        edge.first = k;
        edges_.push_back(edge);
      } else {
        Edge& edge = edges_[it->second];
        if (edge.second >= 0) {
          throw NumericalError("RingMesh: edge shared by more than two triangles");
        }
        edge.second = k;
      }
      triangle_edges_[k][e] = it->second;
    }
  }

  for (Edge& edge : edges_) {
    const Vec2& a = vertices_[edge.vertices[0]];
    const Vec2& b = vertices_[edge.vertices[1]];
    const Vec2 along = b - a;
    edge.length = along.norm();
    edge.midpoint = 0.5 * (a + b);
    Vec2 normal(along.y(), -along.x());
    normal /= edge.length;
    const auto& t = triangles_[edge.first];
    const Vec2 centroid = (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0;
    if (normal.dot(edge.midpoint - centroid) < 0.0) normal = -normal;
    edge.normal = normal;
    edge.tangent = Vec2(-normal.y(), normal.x());
    const Vec2& xk = circumcenters_[edge.first];
    if (edge.boundary()) {
      edge.distance = std::abs((edge.midpoint - xk).dot(normal));
    } else {
      edge.distance = (circumcenters_[edge.second] - xk).norm();
    }
  }

  std::vector<std::vector<int>> vertex_triangles(n_vert);
  for (int k = 0; k < n_tri; ++k) {
    for (int v : triangles_[k]) vertex_triangles[v].push_back(k);
  }
  vertex_neighbors_.resize(n_tri);
  for (int k = 0; k < n_tri; ++k) {
    auto& nb = vertex_neighbors_[k];
    for (int v : triangles_[k]) {
      for (int other : vertex_triangles[v]) {
        if (other != k) nb.push_back(other);
      }
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

std::vector<int> RingMesh::edge_neighbors(int k) const {
  std::vector<int> out;
  for (int e : triangle_edges_[k]) {
    const Edge& edge = edges_[e];
    if (edge.boundary()) continue;
    out.push_back(edge.first == k ? edge.second : edge.first);
  }
  return out;
}

double RingMesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

std::array<double, 3> triangle_angles(const RingMesh& mesh, int k) {
  const auto& t = mesh.triangles()[k];
  const auto& v = mesh.vertices();
  std::array<double, 3> angles{};
  for (int i = 0; i < 3; ++i) {
    const Vec2 u = v[t[(i + 1) % 3]] - v[t[i]];
    const Vec2 w = v[t[(i + 2) % 3]] - v[t[i]];
    angles[i] = std::atan2(std::abs(cross(u, w)), u.dot(w));
  }
  return angles;
}

AdmissibilityReport verify_admissibility(const RingMesh& mesh, double orthogonality_tol) {
  AdmissibilityReport report;
  report.min_containment_margin = std::numeric_limits<double>::infinity();
  report.min_distance = std::numeric_limits<double>::infinity();
  const auto& v = mesh.vertices();
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    for (double a : triangle_angles(mesh, k)) {
      if (a > report.max_angle) {
        report.max_angle = a;
        report.worst_triangle = k;
      }
    }
    const auto& t = mesh.triangles()[k];
    const Vec2& c = mesh.circumcenters()[k];
    const double twice_area = 2.0 * mesh.areas()[k];
    for (int i = 0; i < 3; ++i) {
      const double bary = cross(v[t[(i + 1) % 3]] - c, v[t[(i + 2) % 3]] - c) / twice_area;
      report.min_containment_margin = std::min(report.min_containment_margin, bary);
    }
  }
  for (const Edge& e : mesh.edges()) {
    report.min_distance = std::min(report.min_distance, e.distance);
    if (e.boundary()) continue;
    const Vec2 link = mesh.circumcenters()[e.second] - mesh.circumcenters()[e.first];
    const Vec2 along = v[e.vertices[1]] - v[e.vertices[0]];
    const double defect = std::abs(link.dot(along)) / (link.norm() * along.norm());
    report.max_orthogonality_defect = std::max(report.max_orthogonality_defect, defect);
  }
  report.pass = report.max_angle < std::numbers::pi / 2 &&
                report.max_orthogonality_defect < orthogonality_tol && report.min_distance > 0.0;
  return report;
}

RingMesh build_ring_mesh(const MeshParams& params) {
  params.validate();
  MeshCounts counts = derive_mesh_counts(params.h, params.r_min, params.r_max);
  if (params.n_circles) counts.n_circles = *params.n_circles;
  if (params.n_points) counts.n_points = *params.n_points;

  const int n_circles = params.match_paper_counts ? counts.n_circles + 1 : counts.n_circles;
  const int n_points = counts.n_points;

  RingLayout layout;
  layout.n_points = n_points;
  layout.n_bands = n_circles - 1;
  layout.radii = compute_radii(n_circles, params.r_min, params.r_max);

  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n_circles) * n_points);
  const double pi = std::numbers::pi;
  for (int j = 0; j < n_circles; ++j) {
    const double r = layout.radii[j];
    for (int k = 0; k < n_points; ++k) {
      const double angle = (2.0 * k - j) * pi / n_points;
      vertices.emplace_back(r * std::cos(angle), r * std::sin(angle));
    }
  }

  auto vid = [n_points](int j, int k) { return j * n_points + k % n_points; };
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(layout.n_bands) * n_points);
  for (int b = 0; b < layout.n_bands; ++b) {
    for (int k = 0; k < n_points; ++k) {
      triangles.push_back({vid(b, k), vid(b + 1, k), vid(b + 1, k + 1)});
      triangles.push_back({vid(b, k), vid(b, k + 1), vid(b + 1, k + 1)});
    }
  }

  RingMesh mesh(std::move(vertices), std::move(triangles), std::move(layout));
  const AdmissibilityReport report = verify_admissibility(mesh);
  if (!report.pass) {
    std::ostringstream msg;
    msg << "build_ring_mesh: mesh is not admissible (max angle " << report.max_angle
        << " rad at triangle " << report.worst_triangle << ", orthogonality defect "
        << report.max_orthogonality_defect << ")";
    throw NumericalError(msg.str());
  }
  return mesh;
}

std::vector<std::vector<int>> triangle_shells(const RingMesh& mesh, int k, int lambda_max) {
  if (k < 0 || k >= mesh.num_triangles()) {
    throw std::out_of_range("triangle_shells: triangle index out of range");
  }
  std::vector<std::vector<int>> shells;
  shells.push_back({k});
  std::vector<char> seen(mesh.num_triangles(), 0);
  seen[k] = 1;
  for (int lambda = 1; lambda <= lambda_max; ++lambda) {
    std::vector<int> next;
    for (int t : shells.back()) {
      for (int nb : mesh.vertex_neighbors(t)) {
        if (!seen[nb]) {
          seen[nb] = 1;
          next.push_back(nb);
        }
      }
    }
    std::sort(next.begin(), next.end());
    shells.push_back(std::move(next));
  }
  return shells;
}

std::vector<int> rotation_permutation(const RingMesh& mesh) {
  if (!mesh.layout()) {
    throw std::logic_error("rotation_permutation: mesh has no ring layout");
  }
  const int np = mesh.layout()->n_points;
  std::vector<int> perm(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const int l = t % 2;
    const int cell = t / 2;
    const int b = cell / np;
    const int k = cell % np;
    perm[t] = 2 * (b * np + (k + 1) % np) + l;
  }
  return perm;
}

}  // namespace ringbec
