#pragma once

#include "ringbec/fv.hpp"

#include <string>
#include <vector>

namespace ringbec {

/// Step control of the normalized gradient flow. The physical parameters
/// (m, gamma, trap) live in the EnergyFunctional.
struct GradientFlowConfig {
  double kappa0 = 1e-2;
  double epsilon = 5e-3;
  int max_iters = 10000;
  /// The loop aborts once kappa has been halved below this value.
  double kappa_floor = 1e-14;

  void validate() const;
};

struct GroundStateResult {
  Field state;
  std::vector<double> energy_history;
  double residual = 0.0;
  int iterations = 0;
  int rejected_steps = 0;
  double kappa_final = 0.0;
  bool converged = false;
  std::string diagnostic;
};

/// Discrete GP energy functional with a fixed real potential (one value per
/// triangle).
class EnergyFunctional {
 public:
  EnergyFunctional(const RingMesh& mesh, const LaplacianOperator& op, RealField potential,
                   double m, double gamma);

  /// -(1/2m)<U, A_T U> + <U, V U> + (gamma/2)<U, |U|^2 U>.
  double energy(const Field& u) const;
  /// -(1/m) A_T U + 2 V U + 2 gamma |U|^2 U.
  Field gradient(const Field& u) const;
  /// || grad E - <grad E, U> U ||_{L2(T)}.
  double residual(const Field& u) const;

  const RingMesh& mesh() const { return *mesh_; }
  const LaplacianOperator& laplacian() const { return *op_; }
  const RealField& potential() const { return potential_; }
  double m() const { return m_; }
  double gamma() const { return gamma_; }

 private:
  const RingMesh* mesh_;
  const LaplacianOperator* op_;
  RealField potential_;
  double m_;
  double gamma_;
};

/// One semi-implicit normalized gradient flow step:
/// solve (I - kappa[(1/m) A_T - 2V - 2 gamma |U_n|^2]) U* = U_n, return U*/||U*||.
/// Throws NumericalError when the linear solve residual exceeds 1e-10.
Field gradient_flow_step(const EnergyFunctional& functional, const Field& u, double kappa);

/// Normalized constant field.
Field normalized_constant(const RingMesh& mesh);

/// Adaptive normalized gradient flow from `initial` (normalized constant if
/// empty). Returns a partial result with converged = false when max_iters is
/// hit or kappa underflows.
GroundStateResult compute_ground_state(const GradientFlowConfig& config,
                                       const EnergyFunctional& functional,
                                       const Field& initial = Field());

}  // namespace ringbec
