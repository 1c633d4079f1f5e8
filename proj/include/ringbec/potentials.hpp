#pragma once

#include "ringbec/fv.hpp"
#include "ringbec/mesh.hpp"

namespace ringbec {

/// Gaussian ring trap V_pot(r) = -V0 exp(-2 m (r - 1)^2) and its rotating
/// modulation V_rot = V_p V_pot(r) sin(n_theta theta - omega t).
struct PotentialParams {
  double V0 = 100.0;
  double m = 10.0;
  double V_p = 0.0;
  int n_theta = 6;
  double omega = 0.0;

  void validate() const;
};

/// Radial trap profile.
double trap_value(double r, double V0, double m);

/// Trap sampled at circumcenters.
RealField eval_trap(const RingMesh& mesh, const PotentialParams& params);

/// Rotating modulation at time t sampled at circumcenters.
RealField eval_rotating(const RingMesh& mesh, double t, const PotentialParams& params);

/// Exact integral over [t, t + dt] of V_pot + V_rot at each circumcenter.
RealField phase_integral(const RingMesh& mesh, double t, double dt, const PotentialParams& params);

/// Precomputed per-triangle trap values and polar angles, so that repeated
/// phase integrals avoid trig on the geometry.
class PotentialEvaluator {
 public:
  PotentialEvaluator(const RingMesh& mesh, const PotentialParams& params);

  const RealField& trap() const { return trap_; }
  RealField rotating(double t) const;
  RealField phase_integral(double t, double dt) const;
  const PotentialParams& params() const { return params_; }

  /// A zero potential (V0 = 0, no modulation).
  static PotentialEvaluator zero(const RingMesh& mesh);

 private:
  PotentialParams params_;
  RealField trap_;
  RealField angle_;  // n_theta * theta_K
};

}  // namespace ringbec
