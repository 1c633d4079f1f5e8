#include "ringbec/vortex.hpp"

#include "ringbec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace ringbec {

std::string to_string(DetectionMethod method) {
  switch (method) {
    case DetectionMethod::Density:
      return "density";
    case DetectionMethod::RegularizedVorticity:
      return "reg_vorticity";
    case DetectionMethod::PseudoVorticity:
      return "pseudo_vorticity";
  }
  return "unknown";
}

void DetectionParams::validate() const {
  if (!(tol1 > 0.0)) throw ConfigError("detect: tol1 must be positive");
  if (!(tol2 > 0.0)) throw ConfigError("detect: tol2 must be positive");
  if (lambda_max < 1) throw ConfigError("detect: lambda_max must be >= 1");
  if (!(delta > 0.0)) throw ConfigError("detect: delta must be positive");
  if (!(vort_threshold > 0.0)) throw ConfigError("detect: vort_threshold must be positive");
}

namespace {

// Triangles within vertex-graph distance lambda_max of `center`, center
// excluded.
std::vector<int> shell_union(const RingMesh& mesh, int center, int lambda_max) {
  const auto shells = triangle_shells(mesh, center, lambda_max);
  std::vector<int> out;
  for (std::size_t l = 1; l < shells.size(); ++l) {
    out.insert(out.end(), shells[l].begin(), shells[l].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::optional<WindingResult> vortex_winding(const RingMesh& mesh, const Field& u, int center,
                                            int lambda) {
  check_size(mesh, u.size(), "vortex_winding");
  const auto shells = triangle_shells(mesh, center, lambda);
  const std::vector<int>& shell = shells[lambda];
  if (shell.empty()) return std::nullopt;

  const Vec2& c = mesh.circumcenters()[center];
  std::vector<std::pair<double, int>> ordered;
  ordered.reserve(shell.size());
  for (int j : shell) {
    if (std::abs(u[j]) == 0.0) return std::nullopt;
    const Vec2 d = mesh.circumcenters()[j] - c;
    ordered.emplace_back(std::atan2(d.y(), d.x()), j);
  }
  std::sort(ordered.begin(), ordered.end());

  constexpr double two_pi = 2.0 * std::numbers::pi;
  WindingResult result;
  const double theta0 = std::arg(u[ordered.front().second]);
  double theta = theta0;
  for (std::size_t m = 1; m <= ordered.size(); ++m) {
    const int j = ordered[m % ordered.size()].second;  // closes the loop
    const double raw = std::arg(u[j]);
    const double k = std::round((theta - raw) / two_pi);
    const double next = raw + two_pi * k;
    result.max_step = std::max(result.max_step, std::abs(next - theta));
    theta = next;
  }
  result.quotient = (theta - theta0) / two_pi;
  result.index = static_cast<int>(std::lround(result.quotient));
  result.unreliable = std::abs(result.quotient - result.index) > 0.25;
  return result;
}

std::optional<int> vortex_index(const RingMesh& mesh, const Field& u, const VortexRecord& record) {
  const int lambda = std::max(1, record.characteristic_length);
  const auto w = vortex_winding(mesh, u, record.triangle, lambda);
  if (!w) return std::nullopt;
  return w->index;
}

std::vector<VortexRecord> detect_by_density(const RingMesh& mesh, const Field& u,
                                            const DetectionParams& params) {
  params.validate();
  check_size(mesh, u.size(), "detect_by_density");
  const int n = mesh.num_triangles();
  std::vector<double> rho(n);
  for (int k = 0; k < n; ++k) rho[k] = std::norm(u[k]);

  // Steps 1 and 2.
  std::vector<VortexRecord> centers;
  for (int k = 0; k < n; ++k) {
    if (!(rho[k] < params.tol1)) continue;
    const auto shells = triangle_shells(mesh, k, params.lambda_max);
    for (int lambda = 1; lambda <= params.lambda_max; ++lambda) {
      const auto& shell = shells[lambda];
      if (shell.empty()) break;
      const bool contrast = std::all_of(shell.begin(), shell.end(), [&](int j) {
        return rho[j] > rho[k] + params.tol2;
      });
      if (contrast) {
        VortexRecord rec;
        rec.triangle = k;
        rec.position = mesh.circumcenters()[k];
        rec.characteristic_length = lambda;
        rec.method = DetectionMethod::Density;
        rec.extremum_value = rho[k];
        centers.push_back(rec);
        break;
      }
    }
  }

  // Step 3: keep the lowest density of every cluster of mutually close centers.
  std::stable_sort(centers.begin(), centers.end(), [](const VortexRecord& a, const VortexRecord& b) {
    return a.extremum_value < b.extremum_value;
  });
  std::vector<char> is_center(n, 0);
  for (const auto& c : centers) is_center[c.triangle] = 1;
  std::vector<VortexRecord> kept;
  for (const auto& c : centers) {
    if (!is_center[c.triangle]) continue;
    kept.push_back(c);
    for (int j : shell_union(mesh, c.triangle, params.lambda_max)) is_center[j] = 0;
  }

  // Step 4.
  std::vector<VortexRecord> out;
  for (auto& rec : kept) {
    const auto w = vortex_winding(mesh, u, rec.triangle, rec.characteristic_length);
    if (!w) {
      rec.unreliable = true;
      continue;
    }
    rec.index = w->index;
    rec.winding = w->quotient;
    rec.unreliable = w->unreliable;
    if (rec.index != 0) out.push_back(rec);
  }
  std::sort(out.begin(), out.end(),
            [](const VortexRecord& a, const VortexRecord& b) { return a.triangle < b.triangle; });
  return out;
}

VectorField regularized_velocity(const RingMesh& mesh, const Field& u, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("regularized_velocity: delta must be positive");
  const ComplexVectorField grad = discrete_gradient(mesh, u);
  const int n = mesh.num_triangles();
  VectorField v(2, n);
  for (int k = 0; k < n; ++k) {
    const Complex cu = std::conj(u[k]);
    const double denom = std::norm(u[k]) + delta;
    v(0, k) = (cu * grad(0, k)).imag() / denom;
    v(1, k) = (cu * grad(1, k)).imag() / denom;
  }
  return v;
}

RealField regularized_vorticity(const RingMesh& mesh, const Field& u, double delta) {
  return discrete_curl(mesh, regularized_velocity(mesh, u, delta));
}

RealField pseudo_vorticity(const RingMesh& mesh, const Field& u) {
  const ComplexVectorField grad = discrete_gradient(mesh, u);
  const int n = mesh.num_triangles();
  RealField w(n);
  for (int k = 0; k < n; ++k) {
    w[k] = grad(0, k).real() * grad(1, k).imag() - grad(1, k).real() * grad(0, k).imag();
  }
  return w;
}

std::vector<VortexRecord> detect_by_vorticity(const RingMesh& mesh, const RealField& w,
                                              double threshold, DetectionMethod method) {
  if (!(threshold > 0.0)) throw std::invalid_argument("detect_by_vorticity: threshold must be positive");
  check_size(mesh, w.size(), "detect_by_vorticity");
  const int n = mesh.num_triangles();
  std::vector<char> visited(n, 0);
  std::vector<VortexRecord> out;
  std::vector<int> stack;
  for (int seed = 0; seed < n; ++seed) {
    if (visited[seed] || !(std::abs(w[seed]) > threshold)) continue;
    // Components are grown through triangles of the same sign.
    const bool positive = w[seed] > 0.0;
    int best = seed;
    visited[seed] = 1;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      if (std::abs(w[k]) > std::abs(w[best])) best = k;
      for (int nb : mesh.vertex_neighbors(k)) {
        if (visited[nb] || !(std::abs(w[nb]) > threshold) || (w[nb] > 0.0) != positive) continue;
        visited[nb] = 1;
        stack.push_back(nb);
      }
    }
    VortexRecord rec;
    rec.triangle = best;
    rec.position = mesh.circumcenters()[best];
    rec.index = positive ? 1 : -1;
    rec.method = method;
    rec.extremum_value = w[best];
    out.push_back(rec);
  }
  return out;
}

}  // namespace ringbec
