#pragma once

#include "ringbec/config.hpp"
#include "ringbec/io.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ringbec {

using Logger = std::function<void(const std::string&)>;

RingMesh make_mesh(const RunConfig& config);

/// Ground state of the trapped functional (V_rot = 0). Throws NumericalError
/// when the gradient flow does not reach the residual threshold.
GroundStateResult make_ground_state(const RunConfig& config, const RingMesh& mesh,
                                    const LaplacianOperator& op);

/// Initial datum of the evolution selected by config.split.initial.
Field make_initial_state(const RunConfig& config, const RingMesh& mesh, const Field& ground_state);

/// Density, regularized-vorticity and pseudo-vorticity detections, in that
/// order.
std::vector<VortexRecord> detect_all(const RingMesh& mesh, const Field& u, const DetectionParams& params);

struct SpaceConvergenceRow {
  double h = 0.0;
  int beta = 0;
  int n_triangles = 0;
  double lambda = 0.0;
  double residual = 0.0;
};

struct SpaceConvergenceResult {
  std::vector<SpaceConvergenceRow> rows;
  /// Least-squares slope of log(residual) against log(h), per beta.
  std::map<int, double> slopes;
};

/// Bessel eigenfunction residual ||-A_T U - lambda U|| for alpha = 0 over
/// harness.space_h and harness.space_beta.
SpaceConvergenceResult run_space_convergence(const RunConfig& config, const Logger& log = {});

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct TimeConvergenceRow {
  int k = 0;
  int steps = 0;
  double tau = 0.0;
  double diff_coarse = 0.0;  // ||y_{2tau} - y_tau||
  double diff_fine = 0.0;    // ||y_tau - y_{tau/2}||
  double m_phi = 0.0;
};

/// Order estimate m_phi with T = harness.time_t_max, J = 2^k and V_rot = 0,
/// starting from the ground state times exp(i time_kick x_1).
std::vector<TimeConvergenceRow> run_time_convergence(const RunConfig& config, const Logger& log = {});

/// Same with an explicit initial datum and operator.
std::vector<TimeConvergenceRow> run_time_convergence(const RunConfig& config, const RingMesh& mesh,
                                                     const LaplacianOperator& op, const Field& u0,
                                                     const Logger& log = {});

enum class PipelineStage { Mesh, GroundState, Evolve, Full };

struct PipelineResult {
  fs::path manifest;
  MeshCounts counts;
  int n_triangles = 0;
  GroundStateResult ground_state;
  std::vector<ObservableSample> observables;
  Field final_state;
  std::vector<TimedVortex> vortices;
  /// Detections of each method in the final snapshot.
  std::map<DetectionMethod, std::vector<VortexRecord>> final_vortices;
};

/// Runs the stages up to `last` and writes their artifacts plus a manifest
/// below `out_dir`. A failing stage is reported as "<stage>: <diagnostic>"
/// with the original exception type.
PipelineResult run_pipeline(const RunConfig& config, const fs::path& out_dir,
                            PipelineStage last = PipelineStage::Full, const Logger& log = {});

}  // namespace ringbec
