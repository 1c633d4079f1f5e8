#pragma once

#include "ringbec/fv.hpp"
#include "ringbec/mesh.hpp"

#include <Eigen/Core>

#include <vector>

namespace ringbec {

/// Bessel functions of integer order. bessel_y rejects x <= 0.
double bessel_j(int order, double x);
double bessel_y(int order, double x);

struct AnnulusEigenpair {
  int alpha = 0;
  int beta = 1;
  double lambda = 0.0;
  double c = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;

  /// J_alpha(r sqrt(lambda)) + c Y_alpha(r sqrt(lambda)).
  double radial(double r) const;
};

/// f_alpha(x) = J(r_min x) Y(r_max x) - Y(r_min x) J(r_max x).
double annulus_determinant(int alpha, double x, double r_min, double r_max);

/// First `count` Dirichlet eigenpairs of -Laplace on the annulus for the
/// given angular order, sorted by eigenvalue.
std::vector<AnnulusEigenpair> annulus_eigenpairs(int alpha, int count, double r_min, double r_max);

/// u_{alpha,beta,sigma} sampled at circumcenters and normalized in L2(T).
/// sigma = 1 uses cos(alpha theta), sigma = 2 uses sin(alpha theta).
Field annulus_eigenfunction_field(const RingMesh& mesh, const AnnulusEigenpair& pair, int sigma);

struct RadialParams {
  double r_min = 0.6;
  double r_max = 1.4;
  double m = 10.0;
  double V0 = 100.0;

  void validate() const;
};

/// Interior tridiagonal part of the finite-difference operator
/// H = -(1/2m)(L + R^{-1} D - l^2 R^{-2}) - V0 diag(exp(-2m (r_k - 1)^2))
/// on r_k = r_min + k (r_max - r_min) / n, k = 1..n-1.
struct RadialOperator {
  Eigen::VectorXd r;      // interior nodes, size n-1
  Eigen::VectorXd diag;   // H(k, k)
  Eigen::VectorXd lower;  // H(k + 1, k), size n-2
  Eigen::VectorXd upper;  // H(k, k + 1), size n-2

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;
};

RadialOperator assemble_radial_operator(int ell, int n, const RadialParams& params);

struct RadialModes {
  int ell = 0;
  /// Full grid r_0..r_n.
  Eigen::VectorXd grid;
  Eigen::VectorXd eigenvalues;
  /// Column p holds phi_p on the full grid (zero at both ends), unit
  /// Euclidean norm, positive next to r_min.
  Eigen::MatrixXd vectors;
  double max_residual = 0.0;
};

/// First P + 1 eigenpairs of H. Throws NumericalError if the eigensolver
/// fails or a residual exceeds 1e-8.
RadialModes radial_modes(int ell, int P, int n, const RadialParams& params);

/// Piecewise-linear interpolation of a radial vector on its grid.
double interpolate_radial(const Eigen::VectorXd& grid, const Eigen::VectorXd& values, double r);

struct ModeBasis {
  int P = 0;
  int L = 0;
  int n = 0;
  std::vector<Field> fields;      // (P+1)(2L+1), index(p, ell)
  std::vector<double> eigenvalues;

  int index(int p, int ell) const { return p * (2 * L + 1) + (ell + L); }
  const Field& field(int p, int ell) const { return fields[index(p, ell)]; }
  double eigenvalue(int p, int ell) const { return eigenvalues[index(p, ell)]; }
  int size() const { return static_cast<int>(fields.size()); }
};

ModeBasis mode_basis(const RingMesh& mesh, int P, int L, int n, const RadialParams& params);

/// Largest |<Phi_a, Phi_b>| over distinct pairs.
double max_off_pairing(const RingMesh& mesh, const ModeBasis& basis);

struct ModeCoefficients {
  int P = 0;
  int L = 0;
  /// Row p, column ell + L.
  Eigen::MatrixXcd c;

  Complex at(int p, int ell) const { return c(p, ell + L); }
  Eigen::MatrixXd abs2() const { return c.cwiseAbs2(); }
};

/// c_{p,l} = sum_K U_K conj(Phi_{p,l}(K)) |K|.
ModeCoefficients decompose(const RingMesh& mesh, const Field& u, const ModeBasis& basis);

}  // namespace ringbec
