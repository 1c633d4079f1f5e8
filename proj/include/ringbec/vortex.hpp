#pragma once

#include "ringbec/fv.hpp"
#include "ringbec/mesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ringbec {

enum class DetectionMethod { Density, RegularizedVorticity, PseudoVorticity };

std::string to_string(DetectionMethod method);

struct VortexRecord {
  int triangle = -1;
  Vec2 position = Vec2::Zero();
  /// Winding index (density method) or sign of the extremum (vorticity methods).
  int index = 0;
  /// Characteristic shell radius lambda (density method), 0 otherwise.
  int characteristic_length = 0;
  DetectionMethod method = DetectionMethod::Density;
  /// |psi|^2 at the center (density method) or the vorticity extremum.
  double extremum_value = 0.0;
  /// Unrounded winding quotient (density method).
  double winding = 0.0;
  /// Set when the winding quotient is more than 0.25 away from an integer,
  /// or when the index could not be computed.
  bool unreliable = false;
};

struct DetectionParams {
  double tol1 = 0.1;
  double tol2 = 0.05;
  int lambda_max = 10;
  double delta = 0.1;
  double vort_threshold = 50.0;

  void validate() const;
};

/// Steps 1-4 of the density-shell algorithm: candidates below tol1, shell
/// contrast test, shell-overlap elimination and winding index.
std::vector<VortexRecord> detect_by_density(const RingMesh& mesh, const Field& u,
                                            const DetectionParams& params);

struct WindingResult {
  double quotient = 0.0;  // (theta_M - theta_0) / 2pi
  int index = 0;
  bool unreliable = false;
  /// Largest |theta_{m+1} - theta_m| along the unwrapped loop.
  double max_step = 0.0;
};

/// Unwrapped phase winding of `u` around triangle `center` along shell
/// S_lambda, traversed counter-clockwise and closed by revisiting its first
/// triangle. Returns nullopt if a shell value has zero modulus.
std::optional<WindingResult> vortex_winding(const RingMesh& mesh, const Field& u, int center,
                                            int lambda);

/// Winding index of a density-method record at its characteristic shell.
std::optional<int> vortex_index(const RingMesh& mesh, const Field& u, const VortexRecord& record);

/// Per-triangle velocity Im(conj(psi) grad psi) / (|psi|^2 + delta).
VectorField regularized_velocity(const RingMesh& mesh, const Field& u, double delta);
RealField regularized_vorticity(const RingMesh& mesh, const Field& u, double delta);
/// grad(Re psi) x grad(Im psi).
RealField pseudo_vorticity(const RingMesh& mesh, const Field& u);

/// One record per vertex-connected component of {|w| > threshold}, placed at
/// the triangle of largest |w| in the component.
std::vector<VortexRecord> detect_by_vorticity(const RingMesh& mesh, const RealField& w,
                                              double threshold, DetectionMethod method);

}  // namespace ringbec
