#pragma once

// Reduction of a general planar affine switching system
//   dx/dt = A x + b_{I_t}
// with a common stable drift A onto the canonical pair of fields.

#include <optional>

#include <Eigen/Dense>

#include "pdmplab/types.hpp"

namespace pdmplab {

struct GeneralSystem {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d b1 = Eigen::Vector2d::Zero();
  double lambda0 = 1.0;
  double lambda1 = 1.0;

  /// Fixed point -A^{-1} b_i of the field active in regime i.
  Eigen::Vector2d fixed_point(Regime i) const;
  /// Exact flow e^{At}(x - x_i*) + x_i*, via the matrix exponential.
  Eigen::Vector2d flow(Regime i, double t, const Eigen::Vector2d& x) const;
};

/// Affine change of coordinates y = G x + shift_i onto the canonical
/// system. With the row scaling used here shift0 and shift1 coincide, so
/// the change is the same in both regimes.
struct Conjugacy {
  Eigen::Matrix2d G = Eigen::Matrix2d::Identity();
  Eigen::Vector2d shift0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d shift1 = Eigen::Vector2d::Zero();
  SwitchingParams params{2.0, 1.0, 1.0, 1.0};

  Point2 to_canonical(Regime i, const Eigen::Vector2d& x) const;
  Eigen::Vector2d from_canonical(Regime i, Point2 y) const;
};

/// Eigen-decomposes A, orders the contraction rates alpha > beta and scales
/// the rows of G so that the two fixed points land on (0,0) and (1,1).
/// Throws UnsupportedSystemError for repeated, complex or nonnegative
/// eigenvalues and when a fixed-point difference has no component along
/// one of the eigendirections.
Conjugacy reduce(const GeneralSystem& sys);

/// Largest pullback discrepancy |G x_sys(t) + shift - Phi_i^t(G x + shift)|
/// over `trials` random (t, i, x) draws.
double conjugacy_residual(const GeneralSystem& sys, const Conjugacy& c, int trials,
                          std::uint64_t seed);

/// Two-stage gene expression model with rescaled concentrations:
///   dx/dt = (alpha/X*) I_t - delta x,  dy/dt = gamma (x - y).
/// X* and Y* default to alpha/delta * lambda0/(lambda0+lambda1) and
/// beta/gamma * X*. beta_prod and Y* only fix the protein rescaling and do
/// not enter the drift.
GeneralSystem preset_gene_expression(double alpha_prod, double delta, double beta_prod,
                                     double gamma, double lambda0, double lambda1,
                                     std::optional<double> x_star = std::nullopt,
                                     std::optional<double> y_star = std::nullopt);

/// Modes k and m of the heat equation on (0,1) with c(0)=0, c(1)=I_t:
/// dc_n/dt = -beta_n (c_n - I_t b_n), beta_n = n^2 pi^2,
/// b_n = (-1)^{n+1} sqrt(2)/(n pi).
GeneralSystem preset_pde_modes(int k, int m, double lambda0, double lambda1);

double pde_mode_rate(int n);
double pde_mode_amplitude(int n);

}  // namespace pdmplab
