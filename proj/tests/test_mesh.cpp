#include "doctest.h"
#include "support.hpp"

#include "ringbec/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <numbers>
#include <set>

using namespace ringbec;
using testing::desk_mesh;

TEST_CASE("mesh counts reproduce the concentrated 14850-triangle ring") {
  const MeshCounts c = derive_mesh_counts(0.05, 0.4, 1.6);
  CHECK(c.n_circles == 25);
  CHECK(c.n_points == 297);
}

TEST_CASE("mesh counts for h=0.1 on [0.5, 1.5]") {
  // N_p = ceil(2 pi sqrt(2) * 10 / (1 - 1/3)) evaluated by hand: 133.286...
  const double oracle = 2.0 * std::numbers::pi * std::sqrt(2.0) * 10.0 / (2.0 / 3.0);
  CHECK(oracle == doctest::Approx(133.2865).epsilon(1e-6));
  const MeshCounts c = derive_mesh_counts(0.1, 0.5, 1.5);
  CHECK(c.n_circles == 10);
  CHECK(c.n_points == 134);
}

TEST_CASE("a single band is clamped to two circles") {
  CHECK(derive_mesh_counts(1.0, 0.5, 1.5).n_circles == 2);
  CHECK(derive_mesh_counts(5.0, 0.5, 1.5).n_circles == 2);
}

TEST_CASE("invalid mesh parameters are rejected") {
  CHECK_THROWS_AS(derive_mesh_counts(0.0, 0.5, 1.5), ConfigError);
  CHECK_THROWS_AS(derive_mesh_counts(-0.1, 0.5, 1.5), ConfigError);
  CHECK_THROWS_AS(derive_mesh_counts(0.1, 1.5, 0.5), ConfigError);
  CHECK_THROWS_AS(derive_mesh_counts(0.1, 0.0, 0.5), ConfigError);
  MeshParams p;
  p.n_circles = 1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.n_circles.reset();
  p.n_points = 2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("radii: exact endpoints, monotone, symmetric concentration") {
  const int n = 25;
  const double a = 0.4, b = 1.6;
  const auto radii = compute_radii(n, a, b);
  REQUIRE(radii.size() == static_cast<std::size_t>(n));
  CHECK(radii.front() == a);
  CHECK(radii.back() == b);
  std::vector<double> inc;
  for (int k = 0; k + 1 < n; ++k) {
    CHECK(radii[k + 1] > radii[k]);
    inc.push_back(radii[k + 1] - radii[k]);
  }
  for (std::size_t k = 0; k < inc.size(); ++k) {
    CHECK(inc[k] == doctest::Approx(inc[inc.size() - 1 - k]).epsilon(1e-10));
  }
  // Increments are one common multiple of f(k/n).
  const double alpha = 6.0 * n / (n * n + 2.0) * (b - a);
  CHECK(concentration_alpha(n, a, b) == doctest::Approx(0.28708).epsilon(1e-4));
  CHECK(concentration_alpha(n, a, b) == doctest::Approx(alpha).epsilon(1e-14));
  const double scale = inc[0] / (alpha * std::pow(1.0 / n - 0.5, 2) + (b - a) / (2.0 * n));
  for (int k = 1; k < n; ++k) {
    const double f = alpha * std::pow(double(k) / n - 0.5, 2) + (b - a) / (2.0 * n);
    CHECK(inc[k - 1] == doctest::Approx(scale * f).epsilon(1e-12));
  }
  // Smallest raw increment sits at the middle and is at least (b - a) / (2n).
  const double mid = *std::min_element(inc.begin(), inc.end()) / scale;
  CHECK(mid >= (b - a) / (2.0 * n) - 1e-15);
}

TEST_CASE("paper-count mesh has 14850 acute triangles") {
  MeshParams p;
  p.r_min = 0.4;
  p.r_max = 1.6;
  p.h = 0.05;
  p.match_paper_counts = true;
  const RingMesh mesh = build_ring_mesh(p);
  CHECK(mesh.num_triangles() == 14850);
  CHECK(mesh.layout()->n_points == 297);
  double worst = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    for (double a : triangle_angles(mesh, k)) worst = std::max(worst, a);
  }
  CHECK(worst < std::numbers::pi / 2);
}

TEST_CASE("default band count is one less than the circle count") {
  const RingMesh& mesh = desk_mesh();
  const auto& layout = *mesh.layout();
  CHECK(layout.n_bands == static_cast<int>(layout.radii.size()) - 1);
  CHECK(mesh.num_triangles() == 2 * layout.n_points * layout.n_bands);
}

TEST_CASE("every triangle is isosceles") {
  const RingMesh& mesh = desk_mesh();
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    std::array<double, 3> len{};
    for (int i = 0; i < 3; ++i) len[i] = mesh.edges()[mesh.triangle_edges(k)[i]].length;
    std::sort(len.begin(), len.end());
    const bool iso = std::abs(len[0] - len[1]) <= 1e-10 * len[2] ||
                     std::abs(len[1] - len[2]) <= 1e-10 * len[2];
    REQUIRE(iso);
  }
}

TEST_CASE("vertex set is invariant under rotation by 2 pi / N_p") {
  const RingMesh& mesh = desk_mesh();
  const double a = 2.0 * std::numbers::pi / mesh.layout()->n_points;
  const Eigen::Rotation2Dd rot(a);
  int unmatched = 0;
  for (const Vec2& v : mesh.vertices()) {
    const Vec2 w = rot * v;
    bool found = false;
    for (const Vec2& u : mesh.vertices()) {
      if ((u - w).norm() <= 1e-10) {
        found = true;
        break;
      }
    }
    if (!found) ++unmatched;
  }
  CHECK(unmatched == 0);
}

TEST_CASE("admissibility report on generated meshes") {
  for (double h : {0.1, 0.06, 0.05}) {
    MeshParams p = testing::desk_params();
    p.h = h;
    const RingMesh mesh = build_ring_mesh(p);
    const AdmissibilityReport r = verify_admissibility(mesh);
    CHECK(r.pass);
    CHECK(r.max_angle < std::numbers::pi / 2);
    CHECK(r.min_containment_margin > 0.0);
    CHECK(r.max_orthogonality_defect < 1e-10);
    CHECK(r.min_distance > 0.0);
  }
}

TEST_CASE("an obtuse triangle fails admissibility") {
  std::vector<Vec2> v{{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.3}, {1.0, -1.0}};
  const RingMesh mesh(v, {{0, 1, 2}, {0, 3, 1}});
  const AdmissibilityReport r = verify_admissibility(mesh);
  CHECK_FALSE(r.pass);
  CHECK(r.max_angle > std::numbers::pi / 2);
  CHECK(r.worst_triangle == 0);
}

TEST_CASE("edge geometry") {
  const RingMesh& mesh = desk_mesh();
  std::vector<int> count(mesh.num_triangles(), 0);
  for (const Edge& e : mesh.edges()) {
    CHECK(e.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.normal.x() * e.tangent.y() - e.normal.y() * e.tangent.x() == doctest::Approx(1.0));
    ++count[e.first];
    if (!e.boundary()) ++count[e.second];
    // Normal points away from the first circumcenter.
    CHECK(e.normal.dot(e.midpoint - mesh.circumcenters()[e.first]) > 0.0);
  }
  for (int c : count) CHECK(c == 3);
}

TEST_CASE("size orders stay bounded as h halves") {
  std::vector<double> edge_ratio, area_ratio;
  for (double h : {0.1, 0.05, 0.025}) {
    MeshParams p = testing::desk_params();
    p.h = h;
    const RingMesh mesh = build_ring_mesh(p);
    double max_len = 0.0, max_area = 0.0;
    for (const Edge& e : mesh.edges()) max_len = std::max(max_len, e.length);
    for (double a : mesh.areas()) max_area = std::max(max_area, a);
    edge_ratio.push_back(max_len / h);
    area_ratio.push_back(max_area / (h * h));
  }
  for (std::size_t i = 0; i + 1 < edge_ratio.size(); ++i) {
    const double re = edge_ratio[i + 1] / edge_ratio[i];
    const double ra = area_ratio[i + 1] / area_ratio[i];
    CHECK(re >= 0.4);
    CHECK(re <= 2.5);
    CHECK(ra >= 0.4);
    CHECK(ra <= 2.5);
  }
}

TEST_CASE("shells match brute-force vertex adjacency") {
  const RingMesh& mesh = desk_mesh();
  const int interior = testing::nearest_triangle(mesh, Vec2(1.0, 0.01));
  REQUIRE_FALSE(testing::touches_boundary(mesh, interior));
  auto brute = [&](int k) {
    std::set<int> out;
    const auto& tk = mesh.triangles()[k];
    for (int j = 0; j < mesh.num_triangles(); ++j) {
      if (j == k) continue;
      for (int a : mesh.triangles()[j]) {
        if (std::find(tk.begin(), tk.end(), a) != tk.end()) {
          out.insert(j);
          break;
        }
      }
    }
    return out;
  };
  const auto shells = triangle_shells(mesh, interior, 3);
  REQUIRE(shells.size() == 4);
  CHECK(shells[0] == std::vector<int>{interior});
  const auto expected = brute(interior);
  CHECK(std::set<int>(shells[1].begin(), shells[1].end()) == expected);
  CHECK(shells[1].size() >= 9);
  CHECK(shells[1].size() <= 12);

  // Disjoint levels; every S_2 member touches S_1.
  std::set<int> s1(shells[1].begin(), shells[1].end());
  for (int j : shells[2]) {
    CHECK(s1.count(j) == 0);
    CHECK(j != interior);
    const auto& nb = mesh.vertex_neighbors(j);
    CHECK(std::any_of(nb.begin(), nb.end(), [&](int q) { return s1.count(q) > 0; }));
  }

  int boundary = 0;
  while (!testing::touches_boundary(mesh, boundary)) ++boundary;
  const auto bs = triangle_shells(mesh, boundary, 1);
  CHECK(bs[1].size() < shells[1].size());
  CHECK(std::set<int>(bs[1].begin(), bs[1].end()) == brute(boundary));
}

TEST_CASE("rotation permutation is a graph automorphism") {
  const RingMesh& mesh = desk_mesh();
  const auto perm = rotation_permutation(mesh);
  std::vector<char> hit(mesh.num_triangles(), 0);
  for (int p : perm) hit[p] = 1;
  CHECK(std::all_of(hit.begin(), hit.end(), [](char c) { return c == 1; }));
  const double a = 2.0 * std::numbers::pi / mesh.layout()->n_points;
  const Eigen::Rotation2Dd rot(a);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    std::vector<int> mapped;
    for (int q : mesh.vertex_neighbors(t)) mapped.push_back(perm[q]);
    std::sort(mapped.begin(), mapped.end());
    REQUIRE(mapped == mesh.vertex_neighbors(perm[t]));
    CHECK((rot * mesh.circumcenters()[t] - mesh.circumcenters()[perm[t]]).norm() < 1e-10);
  }
}
