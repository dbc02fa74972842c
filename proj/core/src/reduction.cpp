#include "pdmplab/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "pdmplab/errors.hpp"
#include "pdmplab/flow.hpp"
#include "pdmplab/rng.hpp"

namespace pdmplab {

namespace {

constexpr double kDistinctTol = 1e-9;

Eigen::Vector2d as_vec(Point2 p) { return {p.x1, p.x2}; }
Point2 as_point(const Eigen::Vector2d& v) { return {v(0), v(1)}; }

}  // namespace

Eigen::Vector2d GeneralSystem::fixed_point(Regime i) const {
  const Eigen::Vector2d& b = i == Regime::zero ? b0 : b1;
  return -A.partialPivLu().solve(b);
}

Eigen::Vector2d GeneralSystem::flow(Regime i, double t, const Eigen::Vector2d& x) const {
  const Eigen::Vector2d xs = fixed_point(i);
  const Eigen::Matrix2d At = A * t;
  const Eigen::Matrix2d E = At.exp();
  return E * (x - xs) + xs;
}

Point2 Conjugacy::to_canonical(Regime i, const Eigen::Vector2d& x) const {
  return as_point(G * x + (i == Regime::zero ? shift0 : shift1));
}

Eigen::Vector2d Conjugacy::from_canonical(Regime i, Point2 y) const {
  return G.partialPivLu().solve(as_vec(y) - (i == Regime::zero ? shift0 : shift1));
}

Conjugacy reduce(const GeneralSystem& sys) {
  if (!sys.A.allFinite() || !sys.b0.allFinite() || !sys.b1.allFinite()) {
    throw ValidationError("reduce: system entries must be finite");
  }
  Eigen::EigenSolver<Eigen::Matrix2d> es(sys.A);
  if (es.info() != Eigen::Success) {
    throw UnsupportedSystemError("reduce: eigen-decomposition of A failed");
  }
  const Eigen::Vector2cd mu = es.eigenvalues();
  const double scale = std::max(std::abs(mu(0)), std::abs(mu(1)));
  if (std::abs(mu(0).imag()) > 1e-12 * scale || std::abs(mu(1).imag()) > 1e-12 * scale) {
    throw UnsupportedSystemError("reduce: A has complex eigenvalues");
  }
  const double m0 = mu(0).real();
  const double m1 = mu(1).real();
  if (!(m0 < 0.0 && m1 < 0.0)) {
    throw UnsupportedSystemError("reduce: A must have two strictly negative eigenvalues");
  }
  if (!(std::abs(m0 - m1) > kDistinctTol * std::max(std::abs(m0), std::abs(m1)))) {
    throw UnsupportedSystemError("reduce: A has a repeated eigenvalue");
  }

  // Columns of V: right eigenvectors ordered fast (alpha) then slow (beta).
  const int fast = m0 < m1 ? 0 : 1;
  const int slow = 1 - fast;
  Eigen::Matrix2d V;
  V.col(0) = es.eigenvectors().col(fast).real();
  V.col(1) = es.eigenvectors().col(slow).real();
  const double alpha = -mu(fast).real();
  const double beta = -mu(slow).real();

  // Rows of V^{-1} are left eigenvectors; rescale them so that the
  // fixed-point difference maps to (1, 1).
  Eigen::Matrix2d G = V.inverse();
  const Eigen::Vector2d d = sys.fixed_point(Regime::one) - sys.fixed_point(Regime::zero);
  const Eigen::Vector2d gd = G * d;
  const double gd_scale = G.norm() * d.norm();
  if (!(std::abs(gd(0)) > 1e-12 * gd_scale && std::abs(gd(1)) > 1e-12 * gd_scale)) {
    throw UnsupportedSystemError(
        "reduce: fixed points differ only along one eigendirection (degenerate system)");
  }
  G.row(0) /= gd(0);
  G.row(1) /= gd(1);

  const Eigen::Vector2d inv_rates(-1.0 / alpha, -1.0 / beta);
  Conjugacy c{G,
              inv_rates.cwiseProduct(G * sys.b0),
              inv_rates.cwiseProduct(G * sys.b1) + Eigen::Vector2d::Ones(),
              SwitchingParams(alpha, beta, sys.lambda0, sys.lambda1)};
  return c;
}

double conjugacy_residual(const GeneralSystem& sys, const Conjugacy& c, int trials,
                          std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  const double horizon = 3.0 / c.params.beta();
  for (int k = 0; k < trials; ++k) {
    const Regime i = (rng() & 1U) ? Regime::one : Regime::zero;
    const double t = horizon * rng.uniform();
    const Point2 y0{-0.5 + 2.0 * rng.uniform(), -0.5 + 2.0 * rng.uniform()};
    const Eigen::Vector2d x0 = c.from_canonical(i, y0);
    const Point2 via_system = c.to_canonical(i, sys.flow(i, t, x0));
    const Point2 via_canonical = flow_forward(c.params, i, t, y0);
    worst = std::max(worst, norm(via_system - via_canonical));
  }
  return worst;
}

GeneralSystem preset_gene_expression(double alpha_prod, double delta, double beta_prod,
                                     double gamma, double lambda0, double lambda1,
                                     std::optional<double> x_star,
                                     std::optional<double> y_star) {
  for (double v : {alpha_prod, delta, beta_prod, gamma, lambda0, lambda1}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("gene-expression preset: all rates must be positive");
    }
  }
  if (delta == gamma) {
    throw UnsupportedSystemError(
        "gene-expression preset: delta == gamma gives a repeated eigenvalue");
  }
  const double xs = x_star.value_or(alpha_prod / delta * lambda0 / (lambda0 + lambda1));
  const double ys = y_star.value_or(beta_prod / gamma * xs);
  if (!(xs > 0.0) || !(ys > 0.0)) {
    throw ValidationError("gene-expression preset: X* and Y* must be positive");
  }
  GeneralSystem sys;
  sys.A << -delta, 0.0, gamma, -gamma;
  sys.b0 = Eigen::Vector2d::Zero();
  sys.b1 = Eigen::Vector2d(alpha_prod / xs, 0.0);
  sys.lambda0 = lambda0;
  sys.lambda1 = lambda1;
  return sys;
}

double pde_mode_rate(int n) { return n * n * std::numbers::pi * std::numbers::pi; }

double pde_mode_amplitude(int n) {
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  return sign * std::numbers::sqrt2 / (n * std::numbers::pi);
}

GeneralSystem preset_pde_modes(int k, int m, double lambda0, double lambda1) {
  if (k < 1 || m < 1) throw ValidationError("pde-modes preset: mode indices must be >= 1");
  if (k == m) {
    throw UnsupportedSystemError("pde-modes preset: k == m gives a repeated eigenvalue");
  }
  if (!(lambda0 > 0.0) || !(lambda1 > 0.0)) {
    throw ValidationError("pde-modes preset: switching rates must be positive");
  }
  const double bk = pde_mode_rate(k);
  const double bm = pde_mode_rate(m);
  GeneralSystem sys;
  sys.A << -bk, 0.0, 0.0, -bm;
  sys.b0 = Eigen::Vector2d::Zero();
  sys.b1 = Eigen::Vector2d(bk * pde_mode_amplitude(k), bm * pde_mode_amplitude(m));
  sys.lambda0 = lambda0;
  sys.lambda1 = lambda1;
  return sys;
}

}  // namespace pdmplab
