#include "ringbec/potentials.hpp"

#include "ringbec/errors.hpp"

#include <cmath>

namespace ringbec {

namespace {
constexpr double kOmegaBranch = 1e-12;
}

void PotentialParams::validate() const {
  if (!(V0 >= 0.0)) throw ConfigError("physics: V0 must be non-negative");
  if (!(m > 0.0)) throw ConfigError("physics: m must be positive");
  if (!(V_p >= 0.0 && V_p <= 1.0)) throw ConfigError("physics: V_p must lie in [0, 1]");
  if (n_theta < 1) throw ConfigError("physics: n_theta must be >= 1");
  if (!std::isfinite(omega)) throw ConfigError("physics: omega must be finite");
}

double trap_value(double r, double V0, double m) {
  const double d = r - 1.0;
  return -V0 * std::exp(-2.0 * m * d * d);
}

PotentialEvaluator::PotentialEvaluator(const RingMesh& mesh, const PotentialParams& params)
    : params_(params) {
  params_.validate();
  const int n = mesh.num_triangles();
  trap_.resize(n);
  angle_.resize(n);
  for (int k = 0; k < n; ++k) {
    const Vec2& x = mesh.circumcenters()[k];
    trap_[k] = trap_value(x.norm(), params_.V0, params_.m);
    angle_[k] = params_.n_theta * std::atan2(x.y(), x.x());
  }
}

PotentialEvaluator PotentialEvaluator::zero(const RingMesh& mesh) {
  PotentialParams p;
  p.V0 = 0.0;
  p.V_p = 0.0;
  return PotentialEvaluator(mesh, p);
}

RealField PotentialEvaluator::rotating(double t) const {
  RealField out(trap_.size());
  for (Eigen::Index k = 0; k < trap_.size(); ++k) {
    out[k] = params_.V_p * trap_[k] * std::sin(angle_[k] - params_.omega * t);
  }
  return out;
}

RealField PotentialEvaluator::phase_integral(double t, double dt) const {
  RealField out = trap_ * dt;
  if (params_.V_p == 0.0) return out;
  const double w = params_.omega;
  for (Eigen::Index k = 0; k < trap_.size(); ++k) {
    double rot;
    // cos(a - w(t+dt)) - cos(a - wt) written without cancellation
    const double mid = std::sin(angle_[k] - w * (t + 0.5 * dt));
    if (std::abs(w) < kOmegaBranch) {
      rot = mid * dt;
    } else {
      rot = 2.0 * mid * std::sin(0.5 * w * dt) / w;
    }
    out[k] += params_.V_p * trap_[k] * rot;
  }
  return out;
}

RealField eval_trap(const RingMesh& mesh, const PotentialParams& params) {
  return PotentialEvaluator(mesh, params).trap();
}

RealField eval_rotating(const RingMesh& mesh, double t, const PotentialParams& params) {
  return PotentialEvaluator(mesh, params).rotating(t);
}

RealField phase_integral(const RingMesh& mesh, double t, double dt, const PotentialParams& params) {
  return PotentialEvaluator(mesh, params).phase_integral(t, dt);
}

}  // namespace ringbec
