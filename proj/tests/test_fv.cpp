#include "doctest.h"
#include "support.hpp"

#include "ringbec/errors.hpp"

#include <Eigen/Eigenvalues>

using namespace ringbec;
using testing::coarse_mesh;
using testing::desk_mesh;

namespace {

// Shoelace area of the polygon formed by the outer circle minus the inner one.
double polygon_annulus_area(const RingMesh& mesh) {
  const auto& layout = *mesh.layout();
  const int np = layout.n_points;
  const double ro = layout.radii.back(), ri = layout.radii.front();
  const double s = std::sin(2.0 * std::numbers::pi / np);
  return 0.5 * np * s * (ro * ro - ri * ri);
}

}  // namespace

TEST_CASE("Dirichlet rows of the flux matrix sum to minus the boundary transmissivity") {
  const RingMesh& mesh = desk_mesh();
  const LaplacianOperator op = assemble_laplacian(mesh, BoundaryCondition::Dirichlet);
  std::vector<double> expected(mesh.num_triangles(), 0.0);
  for (const Edge& e : mesh.edges()) {
    if (e.boundary()) expected[e.first] -= e.length / e.distance;
  }
  const Eigen::VectorXd rows = op.flux * Eigen::VectorXd::Ones(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    REQUIRE(rows[k] == doctest::Approx(expected[k]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("Neumann operator annihilates constants") {
  const RingMesh& mesh = desk_mesh();
  const LaplacianOperator op = assemble_laplacian(mesh, BoundaryCondition::Neumann);
  const Field one = Field::Ones(mesh.num_triangles());
  const double scale = op.scaled.cwiseAbs().sum() / mesh.num_triangles();
  CHECK(op.apply(one).cwiseAbs().maxCoeff() <= 1e-13 * scale);
}

TEST_CASE("flux matrix is symmetric and A_T is self-adjoint in L2(T)") {
  const RingMesh& mesh = desk_mesh();
  for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    const LaplacianOperator op = assemble_laplacian(mesh, bc);
    const SparseMatrix diff = op.flux - SparseMatrix(op.flux.transpose());
    CHECK(diff.cwiseAbs().sum() <= 1e-12 * op.flux.cwiseAbs().sum());
    for (unsigned s = 0; s < 10; ++s) {
      const Field u = testing::random_field(mesh.num_triangles(), 2 * s);
      const Field v = testing::random_field(mesh.num_triangles(), 2 * s + 1);
      const double lhs = inner_product(mesh, op.apply(u), v);
      const double rhs = inner_product(mesh, u, op.apply(v));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("A_T is negative semi-definite, strictly so with Dirichlet data") {
  const RingMesh& mesh = coarse_mesh();
  for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    const LaplacianOperator op = assemble_laplacian(mesh, bc);
    // M^{1/2} A_T M^{-1/2} is symmetric with the spectrum of A_T.
    Eigen::VectorXd sq(mesh.num_triangles());
    for (int k = 0; k < mesh.num_triangles(); ++k) sq[k] = std::sqrt(mesh.areas()[k]);
    const Eigen::MatrixXd dense = sq.asDiagonal() * Eigen::MatrixXd(op.scaled) * sq.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd sym = 0.5 * (dense + dense.transpose());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    CHECK(ev.maxCoeff() <= 1e-10 * scale);
    if (bc == BoundaryCondition::Dirichlet) {
      CHECK(ev.maxCoeff() < -1.0);
    } else {
      CHECK(std::abs(ev.maxCoeff()) <= 1e-10 * scale);
      CHECK(ev[ev.size() - 2] < -1.0);
    }
  }
}

TEST_CASE("non-admissible meshes are refused") {
  std::vector<Vec2> v{{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.3}, {1.0, -1.0}};
  const RingMesh mesh(v, {{0, 1, 2}, {0, 3, 1}});
  CHECK_THROWS_AS(assemble_laplacian(mesh, BoundaryCondition::Dirichlet), NumericalError);
}

TEST_CASE("inner product weights by triangle area") {
  const RingMesh& mesh = desk_mesh();
  const int k = 17;
  Field ind = Field::Zero(mesh.num_triangles());
  ind[k] = 1.0;
  CHECK(inner_product(mesh, ind, ind) == doctest::Approx(mesh.areas()[k]).epsilon(1e-15));
  const Field u = testing::random_field(mesh.num_triangles(), 3);
  const Field w = testing::random_field(mesh.num_triangles(), 4);
  CHECK(inner_product(mesh, u, w) == doctest::Approx(inner_product(mesh, w, u)).epsilon(1e-14));
  const Complex p = complex_pairing(mesh, u, w);
  const Complex q = complex_pairing(mesh, w, u);
  CHECK(std::abs(p - std::conj(q)) <= 1e-12 * std::abs(p));
  CHECK(norm(mesh, u) * norm(mesh, u) == doctest::Approx(inner_product(mesh, u, u)).epsilon(1e-14));
}

TEST_CASE("total area equals the inscribed polygonal annulus") {
  for (const RingMesh* mesh : {&coarse_mesh(), &desk_mesh()}) {
    CHECK(mesh->total_area() == doctest::Approx(polygon_annulus_area(*mesh)).epsilon(1e-12));
  }
}

TEST_CASE("gradient of constant and linear fields") {
  const RingMesh& mesh = desk_mesh();
  const RealField c = RealField::Constant(mesh.num_triangles(), 2.5);
  const VectorField gc = discrete_gradient(mesh, c, false);
  CHECK(gc.cwiseAbs().maxCoeff() <= 1e-12);

  const Vec2 a(0.7, -1.3);
  RealField lin(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) lin[k] = a.dot(mesh.circumcenters()[k]) + 0.4;
  const VectorField g = discrete_gradient(mesh, lin, true);
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    if (testing::touches_boundary(mesh, k)) continue;
    REQUIRE((g.col(k) - a).norm() <= 1e-10);
  }
}

TEST_CASE("complex gradient is linear and matches real parts") {
  const RingMesh& mesh = coarse_mesh();
  const Field u = testing::random_field(mesh.num_triangles(), 11);
  const Field v = testing::random_field(mesh.num_triangles(), 12);
  const Complex s(0.3, -2.0);
  const ComplexVectorField lhs = discrete_gradient(mesh, Field(u + s * v));
  const ComplexVectorField rhs = discrete_gradient(mesh, u) + s * discrete_gradient(mesh, v);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * rhs.cwiseAbs().maxCoeff());
  const VectorField re = discrete_gradient(mesh, RealField(u.real()));
  CHECK((re - discrete_gradient(mesh, u).real()).cwiseAbs().maxCoeff() <= 1e-12 * re.cwiseAbs().maxCoeff());
}

TEST_CASE("curl of edge-sampled rigid rotation is exactly two") {
  const RingMesh& mesh = desk_mesh();
  Eigen::Matrix2Xd edge_values(2, mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Vec2& x = mesh.edges()[e].midpoint;
    edge_values.col(e) = Vec2(-x.y(), x.x());
  }
  const RealField c = discrete_curl_edges(mesh, edge_values);
  for (int k = 0; k < mesh.num_triangles(); ++k) REQUIRE(c[k] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("curl of cell-sampled fields") {
  std::vector<double> err;
  for (double h : {0.1, 0.05, 0.025}) {
    MeshParams p = testing::desk_params();
    p.h = h;
    const RingMesh mesh = build_ring_mesh(p);
    VectorField c(2, mesh.num_triangles());
    VectorField rot(2, mesh.num_triangles());
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      c.col(k) = Vec2(1.5, -0.5);
      const Vec2& x = mesh.circumcenters()[k];
      rot.col(k) = Vec2(-x.y(), x.x());
    }
    const RealField cc = discrete_curl(mesh, c);
    const RealField cr = discrete_curl(mesh, rot);
    double worst = 0.0;
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      if (testing::touches_boundary(mesh, k)) continue;
      REQUIRE(std::abs(cc[k]) <= 1e-12);
      worst = std::max(worst, std::abs(cr[k] - 2.0));
    }
    CHECK(worst <= 5.0 * h);
    err.push_back(worst);
  }
  // First order in h.
  CHECK(err[1] < 0.6 * err[0]);
  CHECK(err[2] < 0.6 * err[1]);
}

TEST_CASE("assembly is deterministic") {
  const RingMesh& mesh = coarse_mesh();
  const auto a = to_triplets(assemble_laplacian(mesh, BoundaryCondition::Dirichlet).flux);
  const auto b = to_triplets(assemble_laplacian(mesh, BoundaryCondition::Dirichlet).flux);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].row() == b[i].row());
    REQUIRE(a[i].col() == b[i].col());
    REQUIRE(a[i].value() == b[i].value());
  }
}

TEST_CASE("size mismatches are rejected") {
  const RingMesh& mesh = coarse_mesh();
  const Field u = Field::Ones(3);
  CHECK_THROWS(discrete_gradient(mesh, u));
  CHECK_THROWS(norm(mesh, u));
}
