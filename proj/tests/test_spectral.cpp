#include "doctest.h"
#include "support.hpp"

#include "ringbec/errors.hpp"
#include "ringbec/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <numbers>

using namespace ringbec;
using testing::desk_mesh;

namespace {

double j0_series(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0) / (double(k) * k);
    sum += term;
  }
  return sum;
}

template <class F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-15 * b; ++i) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if ((fa < 0) == (fc < 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

// Flux-form finite differences of -(1/r)(r u')' + alpha^2 u / r^2 on a
// uniform grid, symmetrized with sqrt(r); the k-th eigenvalue is found by
// Sturm-count bisection.
struct SturmOracle {
  Eigen::VectorXd diag, off;

  SturmOracle(int alpha, double a, double b, int n) {
    const double h = (b - a) / n;
    diag.resize(n - 1);
    off.resize(n - 2);
    for (int k = 1; k < n; ++k) {
      const double r = a + k * h;
      const double rp = r + 0.5 * h, rm = r - 0.5 * h;
      diag[k - 1] = (rp + rm) / (h * h * r) + alpha * alpha / (r * r);
      if (k + 1 < n) off[k - 1] = -rp / (h * h * std::sqrt(r * (r + h)));
    }
  }

  int count_below(double x) const {
    int count = 0;
    double d = 1.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      const double o2 = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
      d = diag[i] - x - (i > 0 ? o2 / d : 0.0);
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++count;
    }
    return count;
  }

  double eigenvalue(int k) const {
    double lo = 0.0, hi = 1.0;
    while (count_below(hi) <= k) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (count_below(mid) <= k ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

int sign_changes(const AnnulusEigenpair& p) {
  int changes = 0;
  const int n = 4000;
  double prev = p.radial(p.r_min + (p.r_max - p.r_min) * 0.5 / n);
  for (int i = 1; i < n; ++i) {
    const double v = p.radial(p.r_min + (p.r_max - p.r_min) * (i + 0.5) / n);
    if ((v < 0) != (prev < 0)) ++changes;
    prev = v;
  }
  return changes;
}

}  // namespace

TEST_CASE("Bessel function values") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  for (double x : {0.3, 1.7, 4.2, 9.9}) {
    CHECK(bessel_j(0, x) == doctest::Approx(j0_series(x)).epsilon(1e-12));
    CHECK(bessel_j(1, -x) == doctest::Approx(-bessel_j(1, x)).epsilon(1e-15));
  }
  const double z = bisect(j0_series, 2.0, 3.0);
  CHECK(z == doctest::Approx(2.404825557695773).epsilon(1e-14));
  CHECK(std::abs(bessel_j(0, z)) <= 1e-14);
  CHECK_THROWS_AS(bessel_y(0, 0.0), std::domain_error);
}

TEST_CASE("Wronskian identity J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi x)") {
  for (int n : {0, 1, 3}) {
    for (double x : {0.5, 2.0, 7.5, 20.0}) {
      const double w = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x);
      CHECK(w == doctest::Approx(2.0 / (std::numbers::pi * x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("annulus eigenpairs vanish on both circles and agree with a finite-difference oracle") {
  for (int alpha = 0; alpha <= 3; ++alpha) {
    const auto pairs = annulus_eigenpairs(alpha, 3, 0.6, 1.4);
    REQUIRE(pairs.size() == 3);
    const SturmOracle oracle(alpha, 0.6, 1.4, 2000);
    for (int b = 0; b < 3; ++b) {
      const auto& p = pairs[b];
      CHECK(p.alpha == alpha);
      CHECK(p.beta == b + 1);
      double peak = 0.0;
      for (int i = 0; i <= 200; ++i) peak = std::max(peak, std::abs(p.radial(0.6 + 0.8 * i / 200.0)));
      CHECK(std::abs(p.radial(0.6)) <= 1e-10 * peak);
      CHECK(std::abs(p.radial(1.4)) <= 1e-10 * peak);
      CHECK(std::abs(annulus_determinant(alpha, std::sqrt(p.lambda), 0.6, 1.4)) <= 1e-12);
      CHECK(p.lambda == doctest::Approx(oracle.eigenvalue(b)).epsilon(1e-5));
      CHECK(sign_changes(p) == b);
      if (b > 0) CHECK(p.lambda > pairs[b - 1].lambda);
    }
  }
  // Eigenvalues grow with the angular order.
  CHECK(annulus_eigenpairs(1, 1, 0.6, 1.4)[0].lambda > annulus_eigenpairs(0, 1, 0.6, 1.4)[0].lambda);
}

TEST_CASE("eigenfunction fields") {
  const RingMesh& mesh = desk_mesh();
  const auto p0 = annulus_eigenpairs(0, 1, 0.6, 1.4)[0];
  const Field u = annulus_eigenfunction_field(mesh, p0, 1);
  CHECK(norm(mesh, u) == doctest::Approx(1.0).epsilon(1e-13));
  const auto perm = rotation_permutation(mesh);
  for (int k = 0; k < mesh.num_triangles(); ++k) REQUIRE(std::abs(u[perm[k]] - u[k]) <= 1e-12);
  CHECK_THROWS_AS(annulus_eigenfunction_field(mesh, p0, 2), std::invalid_argument);
  const auto p2 = annulus_eigenpairs(2, 1, 0.6, 1.4)[0];
  const Field c = annulus_eigenfunction_field(mesh, p2, 1);
  const Field s = annulus_eigenfunction_field(mesh, p2, 2);
  CHECK(std::abs(complex_pairing(mesh, c, s)) <= 1e-10);
}

TEST_CASE("radial operator matches Bessel eigenvalues without trap") {
  RadialParams p;
  p.V0 = 0.0;
  for (int ell = 0; ell <= 3; ++ell) {
    const RadialModes rm = radial_modes(ell, 2, 500, p);
    const auto pairs = annulus_eigenpairs(ell, 3, p.r_min, p.r_max);
    for (int q = 0; q <= 2; ++q) {
      CHECK(rm.eigenvalues[q] == doctest::Approx(pairs[q].lambda / (2.0 * p.m)).epsilon(5e-3));
    }
  }
}

TEST_CASE("radial modes: residuals, shape and ordering") {
  const RadialParams p;
  const RadialModes a = radial_modes(0, 3, 500, p);
  const RadialModes b = radial_modes(5, 3, 500, p);
  CHECK(a.max_residual <= 1e-8);
  CHECK(a.grid.size() == 501);
  CHECK(a.grid[0] == 0.6);
  CHECK(a.grid[500] == doctest::Approx(1.4).epsilon(1e-15));
  for (int q = 0; q <= 3; ++q) {
    CHECK(a.vectors(0, q) == 0.0);
    CHECK(a.vectors(500, q) == 0.0);
    CHECK(a.vectors.col(q).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.eigenvalues[q] > a.eigenvalues[q]);
    if (q > 0) CHECK(a.eigenvalues[q] > a.eigenvalues[q - 1]);
  }
  CHECK(a.vectors(1, 0) > 0.0);
  // Dense cross-check of the eigenvalues of the nonsymmetric operator.
  const RadialOperator op = assemble_radial_operator(0, 60, p);
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(op.dense()).eigenvalues();
  std::vector<double> re;
  for (auto z : ev) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  const RadialModes c = radial_modes(0, 3, 60, p);
  for (int q = 0; q <= 3; ++q) CHECK(c.eigenvalues[q] == doctest::Approx(re[q]).epsilon(1e-10));
  CHECK_THROWS(radial_modes(0, 10, 5, p));
}

TEST_CASE("interpolation is piecewise linear and clamps") {
  Eigen::VectorXd g(3), v(3);
  g << 0.0, 1.0, 3.0;
  v << 1.0, 3.0, -1.0;
  CHECK(interpolate_radial(g, v, 0.5) == doctest::Approx(2.0));
  CHECK(interpolate_radial(g, v, 2.0) == doctest::Approx(1.0));
  CHECK(interpolate_radial(g, v, -1.0) == 1.0);
  CHECK(interpolate_radial(g, v, 9.0) == -1.0);
}

TEST_CASE("mode basis") {
  const RingMesh& mesh = desk_mesh();
  const RadialParams params;
  const ModeBasis basis = mode_basis(mesh, 3, 8, 500, params);
  REQUIRE(basis.size() == 4 * 17);
  CHECK(basis.index(0, -8) == 0);
  CHECK(basis.index(1, 0) == 17 + 8);
  for (const Field& f : basis.fields) REQUIRE(norm(mesh, f) == doctest::Approx(1.0).epsilon(1e-12));
  for (int p = 0; p <= 3; ++p) {
    for (int l = 1; l <= 8; ++l) {
      CHECK(basis.eigenvalue(p, l) == basis.eigenvalue(p, -l));
      CHECK(basis.eigenvalue(p, l) > basis.eigenvalue(p, l - 1));
    }
  }
  double distinct = 0.0;
  for (int a = 0; a < basis.size(); ++a) {
    for (int b = a + 1; b < basis.size(); ++b) {
      if (a % 17 != b % 17) {
        distinct = std::max(distinct, std::abs(complex_pairing(mesh, basis.fields[a], basis.fields[b])));
      }
    }
  }
  CHECK(distinct <= 1e-12);
  const double off = max_off_pairing(mesh, basis);
  CHECK(off < 5e-3);

  for (int p = 0; p <= 3; ++p) {
    const ModeCoefficients c = decompose(mesh, basis.field(p, 3), basis);
    CHECK(std::abs(c.at(p, 3) - 1.0) <= 1e-12);
    for (int q = 0; q <= 3; ++q) {
      for (int l = -8; l <= 8; ++l) {
        if (q != p || l != 3) REQUIRE(std::abs(c.at(q, l)) <= off + 1e-15);
      }
    }
  }

  // Gram-matrix bound: sum |c|^2 <= (1 + (B - 1) off) ||U||^2.
  Field u = testing::planted_field(mesh, {{Vec2(0.0, 1.0), 1}});
  const ModeCoefficients cu = decompose(mesh, u, basis);
  const double total = cu.abs2().sum();
  const double nu = norm(mesh, u);
  CHECK(total <= (1.0 + (basis.size() - 1) * off) * nu * nu);

  // Real data: c_{p,-l} = conj(c_{p,l}); pi-periodic data has no odd modes.
  Field r(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const Vec2& x = mesh.circumcenters()[k];
    const double th = std::atan2(x.y(), x.x());
    r[k] = std::exp(-10.0 * (x.norm() - 1.0) * (x.norm() - 1.0)) * (1.0 + std::cos(2.0 * th) + std::sin(4.0 * th));
  }
  const ModeCoefficients cr = decompose(mesh, r, basis);
  for (int p = 0; p <= 3; ++p) {
    for (int l = 0; l <= 8; ++l) {
      CHECK(std::abs(cr.at(p, -l) - std::conj(cr.at(p, l))) <= 1e-12);
      if (l % 2 == 1) CHECK(std::abs(cr.at(p, l)) <= 1e-12);
    }
  }
  CHECK(std::abs(cr.at(0, 2)) > 0.1);
}
