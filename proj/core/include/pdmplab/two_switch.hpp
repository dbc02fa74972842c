#pragma once

// Backward two-switch map
//   Psi_0^{(s,t)}(x) = Psi_1^s(Psi_0^t(x))
//                    = (1 - e^{alpha s} + e^{alpha(s+t)} x1, 1 - e^{beta s} + e^{beta(s+t)} x2)
// its inversion on each side of the diagonal and the change-of-variables
// kernel of the two-step transfer operator.

#include <optional>
#include <utility>

#include "pdmplab/types.hpp"

namespace pdmplab {

/// Side of the diagonal on which the intermediate point z = Psi_0^t(x)
/// lies: right means z1 > z2, left means z1 < z2.
enum class Branch { right, left };

struct TwoSwitchTimes {
  double s = 0.0;  // time spent in field u1 (most recent)
  double t = 0.0;  // time spent in field u0 before that
  Branch branch = Branch::right;
};

/// Closed form of Psi_0^{(s,t)}(x).
Point2 two_switch_backward(const SwitchingParams& p, Point2 x, double s, double t);

/// det of the (s,t)-Jacobian of two_switch_backward:
/// alpha beta e^{(alpha+beta)s} (x1 e^{alpha t} - x2 e^{beta t}).
double two_switch_det(const SwitchingParams& p, Point2 x, double s, double t);

/// Solves two_switch_backward(x, s, t) = y for (s, t) >= 0 on the given
/// branch. Without a start guess the root is bracketed in t (the residual
/// is monotone on each branch) and polished by Newton in
/// (u, v) = (e^{alpha s}, e^{alpha(s+t)}). With a start guess, damped
/// Newton runs from it first. Throws NoSolutionError when y is not in the
/// image of the branch.
TwoSwitchTimes invert_two_switch(const SwitchingParams& p, Point2 x, Point2 y, Branch branch,
                                 std::optional<std::pair<double, double>> start = std::nullopt);

/// lambda0 lambda1 e^{-lambda1 s} e^{(alpha+beta-lambda0) t} / (alpha beta |z1 - z2|)
/// for the branch preimage (s, t) of y and z = Psi_0^t(x). Throws
/// NearDiagonalError when |det U(z)| <= cutoff_eps.
double kernel_two_switch(const SwitchingParams& p, Point2 x, Point2 y, Branch branch,
                         double cutoff_eps);

/// Time-domain integrand of the two-step operator without the density
/// factor: lambda0 lambda1 e^{-lambda0 t - lambda1 s} e^{(alpha+beta)(s+t)}.
double two_switch_weight(const SwitchingParams& p, double s, double t);

}  // namespace pdmplab
