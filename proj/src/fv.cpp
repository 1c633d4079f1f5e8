#include "ringbec/fv.hpp"

#include "ringbec/errors.hpp"

#include <sstream>

namespace ringbec {

LaplacianOperator assemble_laplacian(const RingMesh& mesh, BoundaryCondition bc) {
  const AdmissibilityReport report = verify_admissibility(mesh);
  if (!report.pass) {
    std::ostringstream msg;
    msg << "assemble_laplacian: mesh is not admissible (max angle " << report.max_angle
        << ", orthogonality defect " << report.max_orthogonality_defect << ")";
    throw NumericalError(msg.str());
  }

  const int n = mesh.num_triangles();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * static_cast<std::size_t>(n));
  for (const Edge& e : mesh.edges()) {
    const double transmissivity = e.length / e.distance;
    if (e.boundary()) {
      if (bc == BoundaryCondition::Dirichlet) {
        triplets.emplace_back(e.first, e.first, -transmissivity);
      }
      continue;
    }
    triplets.emplace_back(e.first, e.first, -transmissivity);
    triplets.emplace_back(e.second, e.second, -transmissivity);
    triplets.emplace_back(e.first, e.second, transmissivity);
    triplets.emplace_back(e.second, e.first, transmissivity);
  }

  LaplacianOperator op;
  op.bc = bc;
  op.flux.resize(n, n);
  op.flux.setFromTriplets(triplets.begin(), triplets.end());
  op.flux.makeCompressed();

  Eigen::VectorXd inv_area(n);
  for (int k = 0; k < n; ++k) inv_area[k] = 1.0 / mesh.areas()[k];
  op.scaled = inv_area.asDiagonal() * op.flux;
  op.scaled.makeCompressed();
  return op;
}

void check_size(const RingMesh& mesh, Eigen::Index size, const char* what) {
  if (size != mesh.num_triangles()) {
    std::ostringstream msg;
    msg << what << ": field of length " << size << " does not match mesh with "
        << mesh.num_triangles() << " triangles";
    throw std::invalid_argument(msg.str());
  }
}

Complex complex_pairing(const RingMesh& mesh, const Field& u, const Field& v) {
  check_size(mesh, u.size(), "complex_pairing");
  check_size(mesh, v.size(), "complex_pairing");
  const auto& area = mesh.areas();
  Complex sum = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) sum += u[k] * std::conj(v[k]) * area[k];
  return sum;
}

double inner_product(const RingMesh& mesh, const Field& u, const Field& v) {
  return complex_pairing(mesh, u, v).real();
}

double norm(const RingMesh& mesh, const Field& u) {
  check_size(mesh, u.size(), "norm");
  const auto& area = mesh.areas();
  double sum = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) sum += std::norm(u[k]) * area[k];
  return std::sqrt(sum);
}

double norm(const RingMesh& mesh, const RealField& u) {
  check_size(mesh, u.size(), "norm");
  const auto& area = mesh.areas();
  double sum = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) sum += u[k] * u[k] * area[k];
  return std::sqrt(sum);
}

namespace {

template <typename Scalar>
Eigen::Matrix<Scalar, 2, Eigen::Dynamic> gradient_impl(const RingMesh& mesh,
                                                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u,
                                                       bool include_boundary) {
  check_size(mesh, u.size(), "discrete_gradient");
  const int n = mesh.num_triangles();
  Eigen::Matrix<Scalar, 2, Eigen::Dynamic> grad(2, n);
  const auto& edges = mesh.edges();
  const auto& centers = mesh.circumcenters();
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    Eigen::Matrix<Scalar, 2, 1> sum = Eigen::Matrix<Scalar, 2, 1>::Zero();
    for (int e : mesh.triangle_edges(k)) {
      const Edge& edge = edges[e];
      const double transmissivity = edge.length / edge.distance;
      Scalar jump;
      if (edge.boundary()) {
        if (!include_boundary) continue;
        jump = -u[k];
      } else {
        const int other = edge.first == k ? edge.second : edge.first;
        jump = u[other] - u[k];
      }
      const Vec2 offset = edge.midpoint - centers[k];
      sum += (transmissivity * jump) * offset.template cast<Scalar>();
    }
    grad.col(k) = sum / mesh.areas()[k];
  }
  return grad;
}

}  // namespace

VectorField discrete_gradient(const RingMesh& mesh, const RealField& u, bool include_boundary) {
  return gradient_impl<double>(mesh, u, include_boundary);
}

ComplexVectorField discrete_gradient(const RingMesh& mesh, const Field& u, bool include_boundary) {
  return gradient_impl<Complex>(mesh, u, include_boundary);
}

RealField discrete_curl_edges(const RingMesh& mesh, const Eigen::Matrix2Xd& edge_values) {
  if (edge_values.cols() != mesh.num_edges()) {
    throw std::invalid_argument("discrete_curl_edges: need one value per edge");
  }
  const int n = mesh.num_triangles();
  RealField curl(n);
  const auto& edges = mesh.edges();
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    for (int e : mesh.triangle_edges(k)) {
      const Edge& edge = edges[e];
      // The stored tangent is counter-clockwise for `first`.
      const double orientation = edge.first == k ? 1.0 : -1.0;
      sum += orientation * edge.length * edge_values.col(e).dot(edge.tangent);
    }
    curl[k] = sum / mesh.areas()[k];
  }
  return curl;
}

RealField discrete_curl(const RingMesh& mesh, const VectorField& v) {
  check_size(mesh, v.cols(), "discrete_curl");
  Eigen::Matrix2Xd edge_values(2, mesh.num_edges());
  const auto& edges = mesh.edges();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = edges[e];
    edge_values.col(e) = edge.boundary() ? v.col(edge.first).eval()
                                         : (0.5 * (v.col(edge.first) + v.col(edge.second))).eval();
  }
  return discrete_curl_edges(mesh, edge_values);
}

std::vector<Eigen::Triplet<double>> to_triplets(const SparseMatrix& m) {
  std::vector<Eigen::Triplet<double>> out;
  out.reserve(m.nonZeros());
  for (int row = 0; row < m.outerSize(); ++row) {
    for (SparseMatrix::InnerIterator it(m, row); it; ++it) {
      out.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  return out;
}

}  // namespace ringbec
