#include "ringbec/dynamics.hpp"

#include "ringbec/errors.hpp"
#include "ringbec/ground_state.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <sstream>

namespace ringbec {

namespace {

constexpr double kSolveTolerance = 1e-10;

using ComplexMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

}  // namespace

void SplitStepConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("split: tau must be positive");
  if (!(t_max >= tau)) throw ConfigError("split: t_max must be >= tau");
  if (!(m > 0.0)) throw ConfigError("split: m must be positive");
  if (!(gamma >= 0.0)) throw ConfigError("split: gamma must be non-negative");
  if (snapshot_stride < 0) throw ConfigError("split: snapshot_stride must be >= 0");
}

int SplitStepConfig::num_steps() const { return static_cast<int>(std::lround(t_max / tau)); }

void apply_phase(Field& u, const RealField& potential_integral, double dt, double gamma) {
  const Eigen::Index n = u.size();
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < n; ++k) {
    const double phase = potential_integral[k] + dt * gamma * std::norm(u[k]);
    u[k] *= std::polar(1.0, -phase);
  }
}

Field flow_potential(const Field& u, double t, double dt, double gamma,
                     const PotentialEvaluator& potential) {
  if (!(dt > 0.0)) throw std::invalid_argument("flow_potential: dt must be positive");
  Field out = u;
  apply_phase(out, potential.phase_integral(t, dt), dt, gamma);
  return out;
}

struct KineticFlow::Impl {
  ComplexMatrix lhs;
  ComplexMatrix rhs;
  Eigen::SparseLU<ComplexMatrix, Eigen::COLAMDOrdering<int>> lu;
  Eigen::BiCGSTAB<ComplexMatrix, Eigen::DiagonalPreconditioner<Complex>> krylov;
  KineticSolver solver = KineticSolver::Direct;
};

KineticFlow::KineticFlow(const RingMesh& mesh, const LaplacianOperator& op, double tau, double m,
                         KineticSolver solver)
    : mesh_(&mesh), tau_(tau), m_(m), impl_(std::make_unique<Impl>()) {
  if (!(tau > 0.0) || !(m > 0.0)) {
    throw std::invalid_argument("KineticFlow: tau and m must be positive");
  }
  const int n = mesh.num_triangles();
  // Rows scaled by |K|: (M - i z A) X = (M + i z A) U with z = tau / (4m).
  const Complex iz(0.0, tau / (4.0 * m));
  std::vector<Eigen::Triplet<Complex>> lhs;
  std::vector<Eigen::Triplet<Complex>> rhs;
  for (const auto& t : to_triplets(op.flux)) {
    lhs.emplace_back(t.row(), t.col(), -iz * t.value());
    rhs.emplace_back(t.row(), t.col(), iz * t.value());
  }
  for (int k = 0; k < n; ++k) {
    lhs.emplace_back(k, k, mesh.areas()[k]);
    rhs.emplace_back(k, k, mesh.areas()[k]);
  }
  impl_->lhs.resize(n, n);
  impl_->lhs.setFromTriplets(lhs.begin(), lhs.end());
  impl_->lhs.makeCompressed();
  impl_->rhs.resize(n, n);
  impl_->rhs.setFromTriplets(rhs.begin(), rhs.end());
  impl_->rhs.makeCompressed();
  impl_->solver = solver;
  if (solver == KineticSolver::Direct) {
    impl_->lu.compute(impl_->lhs);
    if (impl_->lu.info() != Eigen::Success) {
      throw NumericalError("KineticFlow: sparse LU failed: " + impl_->lu.lastErrorMessage());
    }
  } else {
    impl_->krylov.setTolerance(1e-12);
    impl_->krylov.setMaxIterations(10 * n);
    impl_->krylov.compute(impl_->lhs);
  }
}

KineticFlow::~KineticFlow() = default;
KineticFlow::KineticFlow(KineticFlow&&) noexcept = default;
KineticFlow& KineticFlow::operator=(KineticFlow&&) noexcept = default;

Field KineticFlow::apply(const Field& u) const {
  check_size(*mesh_, u.size(), "flow_kinetic");
  const Field b = impl_->rhs * u;
  Field x;
  if (impl_->solver == KineticSolver::Direct) {
    x = impl_->lu.solve(b);
  } else {
    x = impl_->krylov.solveWithGuess(b, u);
  }
  const double b_norm = b.norm();
  last_residual_ = b_norm > 0.0 ? (impl_->lhs * x - b).norm() / b_norm : 0.0;
  if (!(last_residual_ <= kSolveTolerance)) {
    std::ostringstream msg;
    msg << "flow_kinetic: linear solve residual " << last_residual_ << " exceeds "
        << kSolveTolerance;
    throw NumericalError(msg.str());
  }
  return x;
}

Field flow_kinetic(const RingMesh& mesh, const LaplacianOperator& op, const Field& u, double tau,
                   double m) {
  return KineticFlow(mesh, op, tau, m).apply(u);
}

StrangStepper::StrangStepper(const RingMesh& mesh, const LaplacianOperator& op,
                             const PotentialEvaluator& potential, const SplitStepConfig& config)
    : mesh_(&mesh),
      potential_(&potential),
      config_(config),
      kinetic_(mesh, op, config.tau, config.m, config.solver) {
  config_.validate();
}

Field StrangStepper::step(const Field& u, double t) const {
  const double half = 0.5 * config_.tau;
  Field w = u;
  apply_phase(w, potential_->phase_integral(t, half), half, config_.gamma);
  w = kinetic_.apply(w);
  apply_phase(w, potential_->phase_integral(t + half, half), half, config_.gamma);
  return w;
}

Field StrangStepper::advance(const Field& u, double t0, int steps) const {
  half_b_ = 0;
  full_b_ = 0;
  if (steps <= 0) return u;
  const double tau = config_.tau;
  const double half = 0.5 * tau;
  if (!config_.fuse_b_steps) {
    Field w = u;
    for (int i = 0; i < steps; ++i) {
      w = step(w, t0 + i * tau);
      half_b_ += 2;
    }
    return w;
  }
  Field w = u;
  apply_phase(w, potential_->phase_integral(t0, half), half, config_.gamma);
  ++half_b_;
  for (int i = 0; i < steps; ++i) {
    w = kinetic_.apply(w);
    const double t_mid = t0 + i * tau + half;
    if (i + 1 < steps) {
      apply_phase(w, potential_->phase_integral(t_mid, tau), tau, config_.gamma);
      ++full_b_;
    } else {
      apply_phase(w, potential_->phase_integral(t_mid, half), half, config_.gamma);
      ++half_b_;
    }
  }
  return w;
}

double energy_at(const RingMesh& mesh, const LaplacianOperator& op,
                 const PotentialEvaluator& potential, double m, double gamma, const Field& u,
                 double t) {
  RealField v = potential.trap() + potential.rotating(t);
  return EnergyFunctional(mesh, op, std::move(v), m, gamma).energy(u);
}

EvolveResult evolve(const RingMesh& mesh, const LaplacianOperator& op,
                    const PotentialEvaluator& potential, const SplitStepConfig& config,
                    const Field& u0, const EvolveOptions& options) {
  config.validate();
  check_size(mesh, u0.size(), "evolve");
  const StrangStepper stepper(mesh, op, potential, config);
  const int total = config.num_steps();
  const int stride = config.snapshot_stride > 0 ? config.snapshot_stride : total;
  RealField reference_modulus;
  if (options.reference) {
    check_size(mesh, options.reference->size(), "evolve reference");
    reference_modulus = options.reference->cwiseAbs();
  }

  EvolveResult result;
  auto emit = [&](int step, const Field& state) {
    Snapshot snap{step, step * config.tau, state};
    ObservableSample obs;
    obs.t = snap.t;
    const double nrm = norm(mesh, state);
    obs.mass = nrm * nrm;
    obs.energy = energy_at(mesh, op, potential, config.m, config.gamma, state, snap.t);
    if (options.reference) {
      obs.err_gs = norm(mesh, RealField(state.cwiseAbs() - reference_modulus));
    }
    if (options.observer) options.observer(snap, obs);
    result.observables.push_back(obs);
    if (options.keep_snapshots) result.snapshots.push_back(std::move(snap));
  };

  Field state = u0;
  emit(0, state);
  int done = 0;
  while (done < total) {
    const int chunk = std::min(stride, total - done);
    Field next;
    bool ok = true;
    try {
      next = stepper.advance(state, done * config.tau, chunk);
      ok = next.allFinite();
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      // Replay the chunk step by step to name the first failing step.
      int bad = done + chunk;
      std::string cause = "non-finite state";
      Field w = state;
      for (int i = 0; i < chunk; ++i) {
        try {
          w = stepper.step(w, (done + i) * config.tau);
        } catch (const NumericalError& e) {
          bad = done + i + 1;
          cause = e.what();
          break;
        }
        if (!w.allFinite()) {
          bad = done + i + 1;
          break;
        }
      }
      throw NumericalError("evolve: " + cause + " at step " + std::to_string(bad));
    }
    state = std::move(next);
    done += chunk;
    emit(done, state);
  }
  result.final_state = std::move(state);
  return result;
}

Field make_unstable_state(const RingMesh& mesh, const Field& ground_state) {
  check_size(mesh, ground_state.size(), "make_unstable_state");
  Field out(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const double x1 = mesh.circumcenters()[k].x();
    const double sign = x1 > 0.0 ? 1.0 : -1.0;
    const double damping = x1 == 0.0 ? 0.0 : std::exp(-0.1 / std::abs(x1));
    out[k] = sign * damping * ground_state[k];
  }
  return out / norm(mesh, out);
}

double order_estimate(const RingMesh& mesh, const Field& y_2tau, const Field& y_tau,
                      const Field& y_half) {
  const double coarse = norm(mesh, Field(y_2tau - y_tau));
  const double fine = norm(mesh, Field(y_tau - y_half));
  return std::log(coarse / fine) / std::log(2.0);
}

}  // namespace ringbec
