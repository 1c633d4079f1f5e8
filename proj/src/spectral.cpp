#include "ringbec/spectral.hpp"

#include "ringbec/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ringbec {

double bessel_j(int order, double x) {
  if (order < 0) throw std::invalid_argument("bessel_j: order must be >= 0");
  if (x < 0.0) {
    // J_n(-x) = (-1)^n J_n(x)
    const double v = std::cyl_bessel_j(static_cast<double>(order), -x);
    return order % 2 == 0 ? v : -v;
  }
  return std::cyl_bessel_j(static_cast<double>(order), x);
}

double bessel_y(int order, double x) {
  if (order < 0) throw std::invalid_argument("bessel_y: order must be >= 0");
  if (!(x > 0.0)) throw std::domain_error("bessel_y: argument must be positive");
  return std::cyl_neumann(static_cast<double>(order), x);
}

double AnnulusEigenpair::radial(double r) const {
  const double k = std::sqrt(lambda);
  return bessel_j(alpha, r * k) + c * bessel_y(alpha, r * k);
}

double annulus_determinant(int alpha, double x, double r_min, double r_max) {
  return bessel_j(alpha, r_min * x) * bessel_y(alpha, r_max * x) -
         bessel_y(alpha, r_min * x) * bessel_j(alpha, r_max * x);
}

std::vector<AnnulusEigenpair> annulus_eigenpairs(int alpha, int count, double r_min, double r_max) {
  if (alpha < 0) throw std::invalid_argument("annulus_eigenpairs: alpha must be >= 0");
  if (count < 1) throw std::invalid_argument("annulus_eigenpairs: count must be >= 1");
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw std::invalid_argument("annulus_eigenpairs: need 0 < r_min < r_max");
  }
  auto f = [&](double x) { return annulus_determinant(alpha, x, r_min, r_max); };

  // Roots are roughly pi / (r_max - r_min) apart.
  const double dx = std::numbers::pi / (r_max - r_min) / 40.0;
  const double x_end = 1000.0 / r_max;
  std::vector<AnnulusEigenpair> out;
  double a = dx;
  double fa = f(a);
  while (static_cast<int>(out.size()) < count) {
    const double b = a + dx;
    if (b > x_end) {
      std::ostringstream msg;
      msg << "annulus_eigenpairs: found " << out.size() << " of " << count
          << " roots while scanning x in [" << dx << ", " << x_end << "]";
      throw NumericalError(msg.str());
    }
    const double fb = f(b);
    if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      double lo = a;
      double hi = b;
      double flo = fa;
      if (fa != 0.0) {
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f(mid);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
      }
      const double root = 0.5 * (lo + hi);
      AnnulusEigenpair pair;
      pair.alpha = alpha;
      pair.beta = static_cast<int>(out.size()) + 1;
      pair.lambda = root * root;
      pair.r_min = r_min;
      pair.r_max = r_max;
      const double y_out = bessel_y(alpha, r_max * root);
      const double y_in = bessel_y(alpha, r_min * root);
      if (std::abs(y_out) >= std::abs(y_in)) {
        pair.c = -bessel_j(alpha, r_max * root) / y_out;
      } else {
        pair.c = -bessel_j(alpha, r_min * root) / y_in;
      }
      out.push_back(pair);
      // Step past the root so it is not bracketed twice.
      a = std::max(b, root + 1e-9 * root);
      fa = f(a);
      continue;
    }
    a = b;
    fa = fb;
  }
  return out;
}

Field annulus_eigenfunction_field(const RingMesh& mesh, const AnnulusEigenpair& pair, int sigma) {
  if (sigma != 1 && sigma != 2) throw std::invalid_argument("annulus_eigenfunction_field: sigma must be 1 or 2");
  if (sigma == 2 && pair.alpha == 0) {
    throw std::invalid_argument("annulus_eigenfunction_field: sigma=2 requires alpha != 0");
  }
  if (!(pair.lambda > 0.0)) throw std::invalid_argument("annulus_eigenfunction_field: lambda must be positive");
  const int n = mesh.num_triangles();
  Field u(n);
  for (int k = 0; k < n; ++k) {
    const Vec2& x = mesh.circumcenters()[k];
    const double r = x.norm();
    const double th = std::atan2(x.y(), x.x());
    const double ang = sigma == 1 ? std::cos(pair.alpha * th) : std::sin(pair.alpha * th);
    u[k] = pair.radial(r) * ang;
  }
  const double nrm = norm(mesh, u);
  if (!(nrm > 0.0)) throw NumericalError("annulus_eigenfunction_field: zero field");
  return u / nrm;
}

void RadialParams::validate() const {
  if (!(r_min > 0.0)) throw ConfigError("modes: r_min must be positive");
  if (!(r_max > r_min)) throw ConfigError("modes: r_max must exceed r_min");
  if (!(m > 0.0)) throw ConfigError("modes: m must be positive");
  if (!(V0 >= 0.0)) throw ConfigError("modes: V0 must be non-negative");
}

Eigen::VectorXd RadialOperator::apply(const Eigen::VectorXd& x) const {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd y = diag.cwiseProduct(x);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    y[k] += upper[k] * x[k + 1];
    y[k + 1] += lower[k] * x[k];
  }
  return y;
}

Eigen::MatrixXd RadialOperator::dense() const {
  const Eigen::Index n = diag.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  h.diagonal() = diag;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    h(k, k + 1) = upper[k];
    h(k + 1, k) = lower[k];
  }
  return h;
}

RadialOperator assemble_radial_operator(int ell, int n, const RadialParams& params) {
  params.validate();
  if (n < 2) throw std::invalid_argument("assemble_radial_operator: n must be >= 2");
  const double h = (params.r_max - params.r_min) / n;
  const double s = 1.0 / (2.0 * params.m);
  const int size = n - 1;
  RadialOperator op;
  op.r.resize(size);
  op.diag.resize(size);
  op.lower.resize(std::max(0, size - 1));
  op.upper.resize(std::max(0, size - 1));
  const double l2 = static_cast<double>(ell) * ell;
  for (int i = 0; i < size; ++i) {
    const double r = params.r_min + (params.r_max - params.r_min) * (i + 1) / n;
    op.r[i] = r;
    op.diag[i] = s * (2.0 / (h * h) + l2 / (r * r)) -
                 params.V0 * std::exp(-2.0 * params.m * (r - 1.0) * (r - 1.0));
    if (i + 1 < size) op.upper[i] = -s * (1.0 / (h * h) + 1.0 / (2.0 * h * r));
    if (i > 0) op.lower[i - 1] = -s * (1.0 / (h * h) - 1.0 / (2.0 * h * r));
  }
  return op;
}

namespace {

// (T - shift I) x = b for symmetric tridiagonal T, Gaussian elimination with
// partial pivoting. Exactly singular pivots are nudged for inverse iteration.
Eigen::VectorXd solve_shifted(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double shift,
                              Eigen::VectorXd b) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd a = diag.array() - shift;  // pivot row diagonal
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);  // first superdiagonal
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);  // second superdiagonal (fill-in)
  Eigen::VectorXd sub = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    c[k] = off[k];
    sub[k + 1] = off[k];
  }
  const double tiny = std::numeric_limits<double>::epsilon() * (diag.cwiseAbs().maxCoeff() + 1.0);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    double nd = diag[k + 1] - shift;
    double nc = k + 2 < n ? off[k + 1] : 0.0;
    if (std::abs(sub[k + 1]) > std::abs(a[k])) {
      // swap rows k and k + 1
      std::swap(b[k], b[k + 1]);
      const double ak = a[k], ck = c[k];
      a[k] = sub[k + 1];
      c[k] = nd;
      e[k] = nc;
      const double f = ak / a[k];
      nd = ck - f * c[k];
      nc = -f * e[k];
      b[k + 1] -= f * b[k];
    } else {
      if (a[k] == 0.0) a[k] = tiny;
      const double f = sub[k + 1] / a[k];
      e[k] = 0.0;
      nd -= f * c[k];
      b[k + 1] -= f * b[k];
    }
    a[k + 1] = nd;
    if (k + 2 < n) c[k + 1] = nc;
  }
  if (a[n - 1] == 0.0) a[n - 1] = tiny;
  Eigen::VectorXd x(n);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    double v = b[k];
    if (k + 1 < n) v -= c[k] * x[k + 1];
    if (k + 2 < n) v -= e[k] * x[k + 2];
    x[k] = v / a[k];
  }
  return x;
}

}  // namespace

RadialModes radial_modes(int ell, int P, int n, const RadialParams& params) {
  if (P < 0) throw std::invalid_argument("radial_modes: P must be >= 0");
  if (P + 1 > n - 1) throw std::invalid_argument("radial_modes: need P + 1 <= n - 1");
  const RadialOperator op = assemble_radial_operator(ell, n, params);
  const Eigen::Index size = op.diag.size();

  // Exact diagonal similarity S = D^{-1} H D with symmetric off-diagonals.
  Eigen::VectorXd d(size);
  Eigen::VectorXd off(std::max<Eigen::Index>(0, size - 1));
  d[0] = 1.0;
  for (Eigen::Index k = 0; k + 1 < size; ++k) {
    const double prod = op.upper[k] * op.lower[k];
    if (!(prod > 0.0)) throw NumericalError("radial_modes: grid too coarse for a symmetric form");
    d[k + 1] = d[k] * std::sqrt(op.lower[k] / op.upper[k]);
    off[k] = op.upper[k] < 0.0 ? -std::sqrt(prod) : std::sqrt(prod);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(op.diag, off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("radial_modes: tridiagonal eigensolver did not converge");

  RadialModes out;
  out.ell = ell;
  out.grid.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    out.grid[k] = params.r_min + (params.r_max - params.r_min) * k / n;
  }
  out.eigenvalues = es.eigenvalues().head(P + 1);
  out.vectors = Eigen::MatrixXd::Zero(n + 1, P + 1);
  for (int p = 0; p <= P; ++p) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(size);
    for (int it = 0; it < 3; ++it) {
      w = solve_shifted(op.diag, off, out.eigenvalues[p], w);
      w /= w.norm();
    }
    Eigen::VectorXd phi = d.cwiseProduct(w);
    phi /= phi.norm();
    if (phi[0] < 0.0) phi = -phi;
    const double res = (op.apply(phi) - out.eigenvalues[p] * phi).norm();
    out.max_residual = std::max(out.max_residual, res);
    out.vectors.col(p).segment(1, size) = phi;
  }
  if (!(out.max_residual <= 1e-8)) {
    std::ostringstream msg;
    msg << "radial_modes: eigen residual " << out.max_residual << " exceeds 1e-8";
    throw NumericalError(msg.str());
  }
  return out;
}

double interpolate_radial(const Eigen::VectorXd& grid, const Eigen::VectorXd& values, double r) {
  const Eigen::Index n = grid.size();
  if (r <= grid[0]) return values[0];
  if (r >= grid[n - 1]) return values[n - 1];
  const auto it = std::upper_bound(grid.data(), grid.data() + n, r);
  const Eigen::Index hi = it - grid.data();
  const Eigen::Index lo = hi - 1;
  const double t = (r - grid[lo]) / (grid[hi] - grid[lo]);
  return (1.0 - t) * values[lo] + t * values[hi];
}

ModeBasis mode_basis(const RingMesh& mesh, int P, int L, int n, const RadialParams& params) {
  if (L < 0) throw std::invalid_argument("mode_basis: L must be >= 0");
  ModeBasis basis;
  basis.P = P;
  basis.L = L;
  basis.n = n;
  basis.fields.resize(static_cast<std::size_t>((P + 1) * (2 * L + 1)));
  basis.eigenvalues.resize(basis.fields.size());

  const int nt = mesh.num_triangles();
  std::vector<double> radius(nt);
  std::vector<double> angle(nt);
  for (int k = 0; k < nt; ++k) {
    const Vec2& x = mesh.circumcenters()[k];
    radius[k] = x.norm();
    angle[k] = std::atan2(x.y(), x.x());
  }

  std::vector<RadialModes> radial(L + 1);
  for (int ell = 0; ell <= L; ++ell) radial[ell] = radial_modes(ell, P, n, params);

  const int total = basis.size();
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < total; ++idx) {
    const int p = idx / (2 * L + 1);
    const int ell = idx % (2 * L + 1) - L;
    const RadialModes& rm = radial[std::abs(ell)];
    const Eigen::VectorXd col = rm.vectors.col(p);
    Field f(nt);
    for (int k = 0; k < nt; ++k) {
      f[k] = interpolate_radial(rm.grid, col, radius[k]) * std::polar(1.0, ell * angle[k]);
    }
    basis.fields[idx] = f / norm(mesh, f);
    basis.eigenvalues[idx] = rm.eigenvalues[p];
  }
  return basis;
}

double max_off_pairing(const RingMesh& mesh, const ModeBasis& basis) {
  const int total = basis.size();
  double worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
  for (int a = 0; a < total; ++a) {
    for (int b = a + 1; b < total; ++b) {
      worst = std::max(worst, std::abs(complex_pairing(mesh, basis.fields[a], basis.fields[b])));
    }
  }
  return worst;
}

ModeCoefficients decompose(const RingMesh& mesh, const Field& u, const ModeBasis& basis) {
  check_size(mesh, u.size(), "decompose");
  ModeCoefficients out;
  out.P = basis.P;
  out.L = basis.L;
  out.c.resize(basis.P + 1, 2 * basis.L + 1);
  const int total = basis.size();
#pragma omp parallel for schedule(static)
  for (int idx = 0; idx < total; ++idx) {
    out.c(idx / (2 * basis.L + 1), idx % (2 * basis.L + 1)) =
        complex_pairing(mesh, u, basis.fields[idx]);
  }
  return out;
}

}  // namespace ringbec
