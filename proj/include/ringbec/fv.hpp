#pragma once

#include "ringbec/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <vector>

namespace ringbec {

using Complex = std::complex<double>;
/// One complex value per triangle.
using Field = Eigen::VectorXcd;
/// One real value per triangle.
using RealField = Eigen::VectorXd;
/// One 2-vector per triangle (column k belongs to triangle k).
using VectorField = Eigen::Matrix2Xd;
using ComplexVectorField = Eigen::Matrix2Xcd;

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class BoundaryCondition { Dirichlet, Neumann };

/// TPFA Laplacian. `flux` is the assembled matrix A (row K carries the
/// summed fluxes, i.e. it is scaled by |K|); `scaled` is A_T = diag(1/|K|) A,
/// which approximates the Laplacian and is negative semi-definite.
struct LaplacianOperator {
  SparseMatrix flux;
  SparseMatrix scaled;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;

  Field apply(const Field& u) const { return scaled * u; }
};

/// Throws NumericalError if the mesh fails verify_admissibility.
LaplacianOperator assemble_laplacian(const RingMesh& mesh, BoundaryCondition bc);

void check_size(const RingMesh& mesh, Eigen::Index size, const char* what);

/// Re(sum_K U_K conj(V_K) |K|).
double inner_product(const RingMesh& mesh, const Field& u, const Field& v);
/// sum_K U_K conj(V_K) |K|.
Complex complex_pairing(const RingMesh& mesh, const Field& u, const Field& v);
double norm(const RingMesh& mesh, const Field& u);
/// L2(T) norm of a real field.
double norm(const RingMesh& mesh, const RealField& u);

/// Diamond-point gradient reconstruction, one 2-vector per triangle.
/// Boundary edges contribute -tau_sigma U_K (homogeneous Dirichlet data) unless
/// `include_boundary` is false, in which case they are skipped.
VectorField discrete_gradient(const RingMesh& mesh, const RealField& u, bool include_boundary = true);
ComplexVectorField discrete_gradient(const RingMesh& mesh, const Field& u, bool include_boundary = true);

/// Discrete curl from tangential edge values: (1/|K|) sum_sigma |sigma| v_sigma . t_{K,sigma}
/// with t_{K,sigma} the counter-clockwise tangent of K. `edge_values` has one
/// column per mesh edge.
RealField discrete_curl_edges(const RingMesh& mesh, const Eigen::Matrix2Xd& edge_values);

/// Same, with per-triangle input averaged onto edges (the inside value on
/// boundary edges).
RealField discrete_curl(const RingMesh& mesh, const VectorField& v);

/// Sparse matrix export helper: (row, col, value) triplets in row-major order.
std::vector<Eigen::Triplet<double>> to_triplets(const SparseMatrix& m);

}  // namespace ringbec
