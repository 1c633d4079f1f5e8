#pragma once

#include "ringbec/dynamics.hpp"
#include "ringbec/fv.hpp"
#include "ringbec/ground_state.hpp"
#include "ringbec/mesh.hpp"
#include "ringbec/potentials.hpp"
#include "ringbec/spectral.hpp"
#include "ringbec/vortex.hpp"

#include <string>
#include <vector>

namespace ringbec {

struct PhysicsParams {
  double m = 10.0;
  double V0 = 100.0;
  double gamma = 100.0;
  double V_p = 0.0;
  int n_theta = 6;
  double omega = 0.0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;

  PotentialParams potential() const { return {V0, m, V_p, n_theta, omega}; }
};

enum class InitialState { GroundState, Unstable };

struct EvolveParams {
  double tau = 3.0 / 5000.0;
  double t_max = 3.0;
  int snapshot_stride = 0;
  bool fuse_b_steps = true;
  KineticSolver solver = KineticSolver::Direct;
  InitialState initial = InitialState::GroundState;
};

struct ModesParams {
  bool enabled = true;
  int P = 3;
  int L = 20;
  int n = 500;
};

struct OutputParams {
  std::string dir = "out";
  bool vtk = true;
  /// Write every snapshot field (CSV and VTK) in addition to the final one.
  bool all_snapshots = false;
};

struct HarnessParams {
  std::vector<double> space_h{0.1, 0.05, 0.025};
  std::vector<int> space_beta{1, 2, 3};
  double time_t_max = 0.1;
  std::vector<int> time_k{5, 6, 7, 8, 9, 10};
  /// Phase kick exp(i kick x_1) applied to the ground state used as initial
  /// data of the time-order harness.
  double time_kick = 0.0;
};

struct RunConfig {
  MeshParams mesh;
  PhysicsParams physics;
  GradientFlowConfig flow;
  EvolveParams split;
  DetectionParams detect;
  ModesParams modes;
  OutputParams output;
  HarnessParams harness;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
  SplitStepConfig split_config() const;
  RadialParams radial_params() const;
};

/// Parses INI text. Unknown sections or keys, malformed values and out of
/// range values raise ConfigError with the offending line number. The keys
/// mesh.r_min, mesh.r_max, mesh.h, physics.m, physics.V0 and physics.gamma
/// are required.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// INI text with every key, doubles at 17 significant digits.
std::string serialize_config(const RunConfig& config);

/// Named presets: paper62, unstable-dirichlet, unstable-neumann.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

std::string format_double(double v);

}  // namespace ringbec
