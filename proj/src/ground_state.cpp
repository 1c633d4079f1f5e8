#include "ringbec/ground_state.hpp"

#include "ringbec/errors.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

namespace ringbec {

namespace {

constexpr double kSolveTolerance = 1e-10;

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Symmetric form of the semi-implicit step: multiplying row K by |K| turns
// I - kappa[(1/m) A_T - D] into diag(|K|)(I + kappa D) - (kappa/m) A.
class FlowSolver {
 public:
  explicit FlowSolver(const EnergyFunctional& f) : f_(f) {
    const auto& mesh = f.mesh();
    const int n = mesh.num_triangles();
    ColMatrix identity(n, n);
    identity.setIdentity();
    pattern_ = ColMatrix(f.laplacian().flux) + identity;
    pattern_.makeCompressed();
    lu_.analyzePattern(pattern_);
  }

  Field step(const Field& u, double kappa) {
    const auto& mesh = f_.mesh();
    const auto& area = mesh.areas();
    const int n = mesh.num_triangles();
    const double gamma = f_.gamma();
    const RealField& v = f_.potential();

    ColMatrix system = (-kappa / f_.m()) * ColMatrix(f_.laplacian().flux);
    Eigen::VectorXd diag(n);
    for (int k = 0; k < n; ++k) {
      diag[k] = area[k] * (1.0 + kappa * (2.0 * v[k] + 2.0 * gamma * std::norm(u[k])));
    }
    for (int k = 0; k < n; ++k) system.coeffRef(k, k) += diag[k];
    system.makeCompressed();

    lu_.factorize(system);
    if (lu_.info() != Eigen::Success) {
      throw NumericalError("gradient_flow_step: factorization failed: " + lu_.lastErrorMessage());
    }
    Eigen::MatrixXd rhs(n, 2);
    for (int k = 0; k < n; ++k) {
      rhs(k, 0) = area[k] * u[k].real();
      rhs(k, 1) = area[k] * u[k].imag();
    }
    const Eigen::MatrixXd x = lu_.solve(rhs);
    const double rhs_norm = rhs.norm();
    const double res = (system * x - rhs).norm();
    if (!(res <= kSolveTolerance * rhs_norm)) {
      std::ostringstream msg;
      msg << "gradient_flow_step: linear solve residual " << res / rhs_norm << " exceeds "
          << kSolveTolerance;
      throw NumericalError(msg.str());
    }
    Field out(n);
    for (int k = 0; k < n; ++k) out[k] = Complex(x(k, 0), x(k, 1));
    const double nrm = norm(mesh, out);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      throw NumericalError("gradient_flow_step: intermediate state has invalid norm");
    }
    return out / nrm;
  }

 private:
  const EnergyFunctional& f_;
  ColMatrix pattern_;
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

}  // namespace

void GradientFlowConfig::validate() const {
  if (!(kappa0 > 0.0)) throw ConfigError("flow: kappa0 must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("flow: epsilon must be positive");
  if (max_iters < 1) throw ConfigError("flow: max_iters must be >= 1");
  if (!(kappa_floor > 0.0)) throw ConfigError("flow: kappa_floor must be positive");
}

EnergyFunctional::EnergyFunctional(const RingMesh& mesh, const LaplacianOperator& op,
                                   RealField potential, double m, double gamma)
    : mesh_(&mesh), op_(&op), potential_(std::move(potential)), m_(m), gamma_(gamma) {
  check_size(mesh, potential_.size(), "EnergyFunctional");
  if (!(m > 0.0)) throw ConfigError("EnergyFunctional: m must be positive");
  if (!(gamma >= 0.0)) throw ConfigError("EnergyFunctional: gamma must be non-negative");
}

double EnergyFunctional::energy(const Field& u) const {
  check_size(*mesh_, u.size(), "energy");
  const Field lap = op_->apply(u);
  const auto& area = mesh_->areas();
  double kinetic = 0.0;
  double potential = 0.0;
  double interaction = 0.0;
  for (int k = 0; k < mesh_->num_triangles(); ++k) {
    const double rho = std::norm(u[k]);
    kinetic += (u[k] * std::conj(lap[k])).real() * area[k];
    potential += potential_[k] * rho * area[k];
    interaction += rho * rho * area[k];
  }
  return -kinetic / (2.0 * m_) + potential + 0.5 * gamma_ * interaction;
}

Field EnergyFunctional::gradient(const Field& u) const {
  check_size(*mesh_, u.size(), "energy_gradient");
  Field g = (-1.0 / m_) * op_->apply(u);
  for (int k = 0; k < mesh_->num_triangles(); ++k) {
    g[k] += 2.0 * (potential_[k] + gamma_ * std::norm(u[k])) * u[k];
  }
  return g;
}

double EnergyFunctional::residual(const Field& u) const {
  const Field g = gradient(u);
  const double proj = inner_product(*mesh_, g, u);
  return norm(*mesh_, (g - proj * u).eval());
}

Field gradient_flow_step(const EnergyFunctional& functional, const Field& u, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("gradient_flow_step: kappa must be positive");
  check_size(functional.mesh(), u.size(), "gradient_flow_step");
  FlowSolver solver(functional);
  return solver.step(u, kappa);
}

Field normalized_constant(const RingMesh& mesh) {
  return Field::Constant(mesh.num_triangles(), Complex(1.0 / std::sqrt(mesh.total_area()), 0.0));
}

GroundStateResult compute_ground_state(const GradientFlowConfig& config,
                                       const EnergyFunctional& functional, const Field& initial) {
  config.validate();
  const RingMesh& mesh = functional.mesh();
  GroundStateResult result;
  if (initial.size() == 0) {
    result.state = normalized_constant(mesh);
  } else {
    check_size(mesh, initial.size(), "compute_ground_state");
    result.state = initial / norm(mesh, initial);
  }

  FlowSolver solver(functional);
  double kappa = config.kappa0;
  double energy = functional.energy(result.state);
  result.energy_history.push_back(energy);
  result.residual = functional.residual(result.state);

  while (result.residual > config.epsilon) {
    if (result.iterations >= config.max_iters) {
      result.diagnostic = "max_iters reached before the residual criterion was met";
      break;
    }
    Field candidate = solver.step(result.state, kappa);
    const double candidate_energy = functional.energy(candidate);
    if (!(candidate_energy < energy)) {
      ++result.rejected_steps;
      kappa *= 0.5;
      if (kappa < config.kappa_floor) {
        std::ostringstream msg;
        msg << "kappa underflow (" << kappa << ") with residual " << result.residual;
        result.diagnostic = msg.str();
        break;
      }
      continue;
    }
    result.state = std::move(candidate);
    energy = candidate_energy;
    result.energy_history.push_back(energy);
    result.residual = functional.residual(result.state);
    ++result.iterations;
  }
  result.converged = result.residual <= config.epsilon;
  result.kappa_final = kappa;
  return result;
}

}  // namespace ringbec
