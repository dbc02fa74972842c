#pragma once

// The lens-shaped support
//   Gamma = { 0 <= x2 <= 1, x2^gamma <= x1 <= 1 - (1 - x2)^gamma },
// its boundary curves, and timing/reachability questions inside it.

#include <string_view>

#include "pdmplab/types.hpp"

namespace pdmplab {

enum class RegionLabel {
  outside,
  boundary_left,   // forward u0 trajectory from (1,1)
  boundary_right,  // forward u1 trajectory from (0,0)
  corner_origin,   // (0,0)
  corner_one,      // (1,1)
  interior_left,   // x1 < x2 inside the interior
  interior_right,  // x1 > x2 inside the interior
  diagonal,        // |x1 - x2| <= tol inside the interior
};

std::string_view to_string(RegionLabel label);
/// Label of (1,1) - x for a point labelled `label`.
RegionLabel mirror(RegionLabel label);

inline constexpr double kAnalyticTol = 1e-12;
inline constexpr double kSimulationTol = 1e-9;

RegionLabel classify_point(const SwitchingParams& p, Point2 x, double tol = kAnalyticTol);

/// Closed support, with tolerance.
bool in_gamma(const SwitchingParams& p, Point2 x, double tol = 0.0);
/// Open interior, strict inequalities.
bool in_gamma_interior(const SwitchingParams& p, Point2 x);

/// True when the open rectangle (x1_lo, x1_hi) x (x2_lo, x2_hi) meets the
/// interior of Gamma.
bool rect_meets_interior(const SwitchingParams& p, double x1_lo, double x1_hi, double x2_lo,
                         double x2_hi);

enum class Side { left, right };

/// Left: (e^{-alpha t}, e^{-beta t}); right: its symmetry conjugate.
Point2 boundary_curve(const SwitchingParams& p, Side side, double t);

/// Unique theta with det U(Psi_i^theta x) = 0. Negative values mean the
/// diagonal is crossed forward in time. Requires x in the interior.
double alignment_time(const SwitchingParams& p, Regime i, Point2 x);

/// tau_i(x) = sup{ t >= 0 : Psi_i^t(x) in interior }, by bisection on
/// interior membership of the backward orbit.
double exit_time(const SwitchingParams& p, Regime i, Point2 x, double abs_tol = 1e-12);

struct ReachabilitySolution {
  /// Field that is followed first.
  Regime first = Regime::zero;
  double s = 0.0;  // duration in the first field
  double t = 0.0;  // duration in the second field
  /// Second coordinate of the switch point.
  double eta = 0.0;
  /// Replays the solution from x: Phi_{second}^t(Phi_{first}^s(x)).
  Point2 replay(const SwitchingParams& p, Point2 x) const;
};

/// Durations (s, t) moving x to y with a single switch, both points in the
/// interior. Throws NumericalFailure if the replay misses y by more than
/// replay_tol.
ReachabilitySolution reach_two_switch(const SwitchingParams& p, Point2 x, Point2 y,
                                      double replay_tol = 1e-9);

}  // namespace pdmplab
