#pragma once

#include "ringbec/fv.hpp"
#include "ringbec/potentials.hpp"

#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace ringbec {

enum class KineticSolver { Direct, Iterative };

struct SplitStepConfig {
  double tau = 3.0 / 5000.0;
  double t_max = 3.0;
  double m = 10.0;
  double gamma = 100.0;
  int snapshot_stride = 0;  // 0: only the initial and final states
  bool fuse_b_steps = true;
  KineticSolver solver = KineticSolver::Direct;

  void validate() const;
  /// Number of steps J = round(t_max / tau).
  int num_steps() const;
};

/// w -> exp(-i (int_t^{t+dt} V ds + dt gamma |w|^2)) w, pointwise.
Field flow_potential(const Field& u, double t, double dt, double gamma,
                     const PotentialEvaluator& potential);
/// Pure phase multiplication with a precomputed potential integral.
void apply_phase(Field& u, const RealField& potential_integral, double dt, double gamma);

/// Cayley (1,1)-Pade approximation of exp(i tau/(2m) A_T). The shifted
/// matrix is factorized once at construction.
class KineticFlow {
 public:
  KineticFlow(const RingMesh& mesh, const LaplacianOperator& op, double tau, double m,
              KineticSolver solver = KineticSolver::Direct);
  ~KineticFlow();
  KineticFlow(KineticFlow&&) noexcept;
  KineticFlow& operator=(KineticFlow&&) noexcept;

  /// Throws NumericalError if the linear residual exceeds 1e-10 (relative).
  Field apply(const Field& u) const;

  double tau() const { return tau_; }
  double last_residual() const { return last_residual_; }

 private:
  struct Impl;
  const RingMesh* mesh_;
  double tau_;
  double m_;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

Field flow_kinetic(const RingMesh& mesh, const LaplacianOperator& op, const Field& u, double tau,
                   double m);

/// Strang splitting propagator Phi_B^{tau/2, t+tau/2} o Phi_A^tau o Phi_B^{tau/2, t}.
class StrangStepper {
 public:
  StrangStepper(const RingMesh& mesh, const LaplacianOperator& op,
                const PotentialEvaluator& potential, const SplitStepConfig& config);

  /// One full step from time t.
  Field step(const Field& u, double t) const;

  /// J steps from t0; with fuse_b_steps the adjacent half potential flows are
  /// merged into one full flow.
  Field advance(const Field& u, double t0, int steps) const;

  const KineticFlow& kinetic() const { return kinetic_; }
  const SplitStepConfig& config() const { return config_; }

  /// Number of potential-flow applications performed by the last advance().
  int last_half_b_count() const { return half_b_; }
  int last_full_b_count() const { return full_b_; }

 private:
  const RingMesh* mesh_;
  const PotentialEvaluator* potential_;
  SplitStepConfig config_;
  KineticFlow kinetic_;
  mutable int half_b_ = 0;
  mutable int full_b_ = 0;
};

struct Snapshot {
  int step = 0;
  double t = 0.0;
  Field state;
};

struct ObservableSample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  std::optional<double> err_gs;
};

struct EvolveResult {
  std::vector<Snapshot> snapshots;
  std::vector<ObservableSample> observables;
  Field final_state;
};

/// Called for every emitted snapshot (after it has been copied).
using SnapshotObserver = std::function<void(const Snapshot&, const ObservableSample&)>;

struct EvolveOptions {
  /// When set, err_GS(t) = || |U(t)| - |reference| || is recorded.
  const Field* reference = nullptr;
  /// Keep the snapshot fields in EvolveResult (can be large).
  bool keep_snapshots = true;
  SnapshotObserver observer;
};

/// Integrates from t = 0 to t_max. Throws NumericalError on NaN with the
/// offending step index.
EvolveResult evolve(const RingMesh& mesh, const LaplacianOperator& op,
                    const PotentialEvaluator& potential, const SplitStepConfig& config,
                    const Field& u0, const EvolveOptions& options = {});

/// Energy with the potential frozen at time t (trap + modulation).
double energy_at(const RingMesh& mesh, const LaplacianOperator& op,
                 const PotentialEvaluator& potential, double m, double gamma, const Field& u,
                 double t);

/// Ground state with the sign flipped on x_1 <= 0 and multiplied by
/// exp(-0.1 / |x_1|), renormalized.
Field make_unstable_state(const RingMesh& mesh, const Field& ground_state);

/// m_phi = log2(||y_{2tau} - y_tau|| / ||y_tau - y_{tau/2}||).
double order_estimate(const RingMesh& mesh, const Field& y_2tau, const Field& y_tau,
                      const Field& y_half);

}  // namespace ringbec
