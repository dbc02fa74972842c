#pragma once

// Deterministic invariant-measure solvers on a uniform grid over [0,1]^2.

#include <cstdint>
#include <vector>

#include "pdmplab/grid_field.hpp"
#include "pdmplab/types.hpp"

namespace pdmplab {

struct SolverConfig {
  /// Grid nodes per axis for CDFs, cells per axis for densities.
  int grid = 256;
  /// Gauss-Legendre panels per unit time; 0 selects 4 max(alpha, lambda0, lambda1).
  double panels_per_unit_time = 0.0;
  /// Nodes per Gauss-Legendre panel.
  int gl_order = 4;
  double tol = 1e-6;
  int max_iter = 500;
  /// Threshold on |det U| below which kernel_two_switch refuses to evaluate.
  double cutoff_eps = 1e-6;

  /// Throws ValidationError on nonpositive or out-of-range entries.
  void validate() const;
  double panel_length(const SwitchingParams& p) const;
};

struct CdfSolution {
  GridField cdf;
  /// Sup-norm change of each sweep.
  std::vector<double> residuals;
  int iterations = 0;
  /// Ratio of the last two residuals (0 when fewer than two sweeps).
  double observed_ratio = 0.0;
};

/// CDF of the uniform density on Gamma, scaled to the regime masses.
GridField uniform_support_cdf(const SwitchingParams& p, int nodes);

/// Fixed-point iteration of
///   G_i(x) = int_0^inf lambda_{1-i} e^{-lambda_i t} G_{1-i}(Psi_i^t x) dt
/// on cfg.grid x cfg.grid nodes (Gauss-Seidel over the two regimes, masses
/// pinned to lambda_{1-i}/(lambda0+lambda1) after every half-sweep).
/// Throws ConvergenceError carrying the last residual.
CdfSolution cdf_fixed_point(const SwitchingParams& p, const SolverConfig& cfg);

/// One application of the CDF map to both layers (Gauss-Seidel order),
/// without mass pinning. Exposed for residual checks.
GridField apply_cdf_map(const SwitchingParams& p, const GridField& cdf, const SolverConfig& cfg);

/// Cell averages of the density: mixed second differences of the node CDF
/// divided by the cell area.
GridField density_from_cdf(const GridField& cdf);

/// rho_i(x) = int_0^{tau_i(x)} lambda_{1-i} e^{(alpha+beta-lambda_i) t} rho_{1-i}(Psi_i^t x) dt,
/// with rho_{1-i} read from layer 1-i of `rho` by bilinear interpolation.
/// Throws ValidationError unless x lies in the interior of Gamma.
double density_from_one_switch(const SwitchingParams& p, const GridField& rho, Regime i,
                               Point2 x, const SolverConfig& cfg);

/// Two-step transfer operator applied to layer 0 of `rho`, evaluated at the
/// cell centres of the same grid by double time quadrature over the
/// backward orbits inside Gamma. Layer 1 of the result is left at zero.
GridField apply_Q2(const SwitchingParams& p, const GridField& rho, const SolverConfig& cfg);

struct Q2Solution {
  /// Layer 0 from the power iteration, layer 1 from the one-switch formula.
  GridField density;
  /// L1 change of layer 0 per iteration.
  std::vector<double> residuals;
  int iterations = 0;
  /// int Q2 rho0 / int rho0 at the last iteration, before renormalisation.
  double mass_factor = 0.0;
};

/// Power iteration of apply_Q2 on cfg.grid cells, renormalised to mass
/// lambda1/(lambda0+lambda1). Throws ConvergenceError with the residual.
Q2Solution q2_power_iteration(const SwitchingParams& p, const SolverConfig& cfg);

/// Cells of an n x n grid crossed by the left boundary curve x1 = x2^gamma.
std::vector<std::uint8_t> left_boundary_cells(const SwitchingParams& p, int n);

/// True when both CDF layers are nondecreasing along each axis up to tol.
bool is_monotone_cdf(const GridField& cdf, double tol = 1e-12);

}  // namespace pdmplab
