#pragma once

// Closed-form flows of the two linear fields
//   u_i(x) = diag(-alpha, -beta) (x - (i, i)),  i = 0, 1.
// Nothing here integrates an ODE; every map is evaluated exactly.

#include "pdmplab/types.hpp"

namespace pdmplab {

/// exp(arg) for |arg| <= 700. Larger positive arguments throw
/// OverflowError; arguments below -700 return 0.
double checked_exp(double arg);

/// Phi_i^t(x) = (i + (x1 - i) e^{-alpha t}, i + (x2 - i) e^{-beta t}).
/// Negative t gives the inverse flow Psi_i^{|t|}.
Point2 flow_forward(const SwitchingParams& p, Regime i, double t, Point2 x);

/// Psi_i^t(x) = Phi_i^{-t}(x).
inline Point2 flow_backward(const SwitchingParams& p, Regime i, double t, Point2 x) {
  return flow_forward(p, i, -t, x);
}

/// Cumulative flow Phi_i^{(t1..tn)}: alternating composition whose last
/// (most recent) factor is field i. Empty ts is the identity.
Point2 flow_cumulative(const SwitchingParams& p, Regime i, const TimeVector& ts, Point2 x);

/// Psi_i^{(t1..tn)}, the inverse of flow_cumulative. Undoes the most recent
/// segment first.
Point2 flow_cumulative_inverse(const SwitchingParams& p, Regime i, const TimeVector& ts,
                               Point2 x);

/// det grad_x Psi_i^{(t1..tn)}(x) = e^{(alpha+beta) sum t_j}. Independent of
/// x and of i.
double backward_jacobian(const SwitchingParams& p, const TimeVector& ts);

/// det U(x) with U = (u1(x), u0(x)); equals alpha beta (x1 - x2).
double det_transversality(const SwitchingParams& p, Point2 x);

/// (1,1) - x. Conjugates the two fields:
/// Phi_1^t(x) = symmetry_conjugate(Phi_0^t(symmetry_conjugate(x))).
constexpr Point2 symmetry_conjugate(Point2 x) { return {1.0 - x.x1, 1.0 - x.x2}; }

/// Vector field u_i evaluated at x.
Point2 vector_field(const SwitchingParams& p, Regime i, Point2 x);

}  // namespace pdmplab
