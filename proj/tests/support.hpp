#pragma once

#include "ringbec/fv.hpp"
#include "ringbec/mesh.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace testing {

using namespace ringbec;

inline MeshParams desk_params() {
  MeshParams p;
  p.r_min = 0.6;
  p.r_max = 1.4;
  p.h = 0.06;
  return p;
}

inline const RingMesh& desk_mesh() {
  static const RingMesh mesh = build_ring_mesh(desk_params());
  return mesh;
}

inline const RingMesh& coarse_mesh() {
  static const RingMesh mesh = [] {
    MeshParams p = desk_params();
    p.h = 0.1;
    return build_ring_mesh(p);
  }();
  return mesh;
}

inline Field random_field(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Field u(n);
  for (int k = 0; k < n; ++k) u[k] = Complex(g(rng), g(rng));
  return u;
}

inline bool touches_boundary(const RingMesh& mesh, int k) {
  for (int e : mesh.triangle_edges(k)) {
    if (mesh.edges()[e].boundary()) return true;
  }
  return false;
}

struct PlantedVortex {
  Vec2 center;
  int winding = 1;
};

/// Product of tanh-core vortices and a Gaussian ring envelope centered at
/// r = 1, vanishing towards both boundaries.
inline Field planted_field(const RingMesh& mesh, const std::vector<PlantedVortex>& vortices,
                           double core = 0.1, double width = 0.3) {
  Field u(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const Vec2& x = mesh.circumcenters()[k];
    const double r = x.norm();
    Complex v = std::exp(-(r - 1.0) * (r - 1.0) / (width * width));
    for (const auto& pv : vortices) {
      const Vec2 d = x - pv.center;
      const double dist = d.norm();
      const double th = std::atan2(d.y(), d.x());
      v *= std::pow(std::tanh(dist / core), std::abs(pv.winding)) *
           std::polar(1.0, pv.winding * th);
    }
    u[k] = v;
  }
  return u;
}

/// Triangle whose circumcenter is closest to p.
inline int nearest_triangle(const RingMesh& mesh, const Vec2& p) {
  int best = 0;
  for (int k = 1; k < mesh.num_triangles(); ++k) {
    if ((mesh.circumcenters()[k] - p).norm() < (mesh.circumcenters()[best] - p).norm()) best = k;
  }
  return best;
}

}  // namespace testing
