#include "pdmplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdmplab/errors.hpp"
#include "pdmplab/flow.hpp"

namespace pdmplab {

std::string_view to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::outside: return "outside";
    case RegionLabel::boundary_left: return "boundary_left";
    case RegionLabel::boundary_right: return "boundary_right";
    case RegionLabel::corner_origin: return "corner_origin";
    case RegionLabel::corner_one: return "corner_one";
    case RegionLabel::interior_left: return "interior_left";
    case RegionLabel::interior_right: return "interior_right";
    case RegionLabel::diagonal: return "diagonal";
  }
  return "unknown";
}

RegionLabel mirror(RegionLabel label) {
  switch (label) {
    case RegionLabel::boundary_left: return RegionLabel::boundary_right;
    case RegionLabel::boundary_right: return RegionLabel::boundary_left;
    case RegionLabel::corner_origin: return RegionLabel::corner_one;
    case RegionLabel::corner_one: return RegionLabel::corner_origin;
    case RegionLabel::interior_left: return RegionLabel::interior_right;
    case RegionLabel::interior_right: return RegionLabel::interior_left;
    default: return label;
  }
}

namespace {

struct Bounds {
  double left;
  double right;
};

// Horizontal extent of Gamma at height x2 (clamped into [0,1]).
Bounds bounds_at(const SwitchingParams& p, double x2) {
  const double h = std::clamp(x2, 0.0, 1.0);
  const double g = p.gamma();
  return {std::pow(h, g), 1.0 - std::pow(1.0 - h, g)};
}

}  // namespace

RegionLabel classify_point(const SwitchingParams& p, Point2 x, double tol) {
  if (!(tol >= 0.0)) throw ValidationError("classify_point: tol must be >= 0");
  if (norm(x) <= tol) return RegionLabel::corner_origin;
  if (norm(x - Point2{1.0, 1.0}) <= tol) return RegionLabel::corner_one;
  if (x.x2 < -tol || x.x2 > 1.0 + tol) return RegionLabel::outside;

  const Bounds b = bounds_at(p, x.x2);
  if (x.x1 < b.left - tol || x.x1 > b.right + tol) return RegionLabel::outside;
  const double dl = std::abs(x.x1 - b.left);
  const double dr = std::abs(x.x1 - b.right);
  if (dl <= tol || dr <= tol) {
    return dl <= dr ? RegionLabel::boundary_left : RegionLabel::boundary_right;
  }
  if (std::abs(x.x1 - x.x2) <= tol) return RegionLabel::diagonal;
  return x.x1 < x.x2 ? RegionLabel::interior_left : RegionLabel::interior_right;
}

bool in_gamma(const SwitchingParams& p, Point2 x, double tol) {
  if (x.x2 < -tol || x.x2 > 1.0 + tol) return false;
  const Bounds b = bounds_at(p, x.x2);
  return x.x1 >= b.left - tol && x.x1 <= b.right + tol;
}

bool in_gamma_interior(const SwitchingParams& p, Point2 x) {
  if (!(x.x2 > 0.0 && x.x2 < 1.0)) return false;
  const Bounds b = bounds_at(p, x.x2);
  return x.x1 > b.left && x.x1 < b.right;
}

bool rect_meets_interior(const SwitchingParams& p, double x1_lo, double x1_hi, double x2_lo,
                         double x2_hi) {
  // Both boundary curves are increasing in x2, so the admissible x2 for the
  // column (x1_lo, x1_hi) form one interval.
  const double g = 1.0 / p.gamma();
  const double a = std::clamp(x1_lo, 0.0, 1.0), b = std::clamp(x1_hi, 0.0, 1.0);
  if (!(b > a)) return false;
  const double from = std::max({x2_lo, 0.0, 1.0 - std::pow(1.0 - a, g)});
  const double to = std::min({x2_hi, 1.0, std::pow(b, g)});
  return from < to;
}

Point2 boundary_curve(const SwitchingParams& p, Side side, double t) {
  if (!(t >= 0.0)) throw ValidationError("boundary_curve: t must be >= 0");
  const Point2 left{checked_exp(-p.alpha() * t), checked_exp(-p.beta() * t)};
  return side == Side::left ? left : symmetry_conjugate(left);
}

double alignment_time(const SwitchingParams& p, Regime i, Point2 x) {
  const double c = index(i);
  const double d1 = c - x.x1;
  const double d2 = c - x.x2;
  if (!(d1 * d2 > 0.0)) {
    std::ostringstream os;
    os << "alignment_time: (" << x.x1 << ", " << x.x2 << ") has no diagonal crossing along u"
       << c;
    throw ValidationError(os.str());
  }
  // (c - x1) e^{alpha theta} = (c - x2) e^{beta theta}
  return std::log(d2 / d1) / (p.alpha() - p.beta());
}

double exit_time(const SwitchingParams& p, Regime i, Point2 x, double abs_tol) {
  if (!in_gamma_interior(p, x)) {
    throw ValidationError("exit_time: point is not in the interior of the support");
  }
  if (i == Regime::one) return exit_time(p, Regime::zero, symmetry_conjugate(x), abs_tol);

  // Backward u0 orbits keep x1 x2^{-gamma} fixed and leave through the
  // right boundary, no later than the moment x1 reaches 1.
  double lo = 0.0;
  double hi = -std::log(x.x1) / p.alpha();
  while (in_gamma_interior(p, flow_backward(p, Regime::zero, hi, x))) hi *= 2.0;
  while (hi - lo > abs_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (in_gamma_interior(p, flow_backward(p, Regime::zero, mid, x))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Point2 ReachabilitySolution::replay(const SwitchingParams& p, Point2 x) const {
  return flow_forward(p, other(first), t, flow_forward(p, first, s, x));
}

namespace {

template <class F>
double bisect_root(F f, double neg, double pos) {
  // f(neg) < 0 <= f(pos)
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (neg + pos);
    if (mid == neg || mid == pos) break;
    if (f(mid) < 0.0) {
      neg = mid;
    } else {
      pos = mid;
    }
  }
  return 0.5 * (neg + pos);
}

}  // namespace

ReachabilitySolution reach_two_switch(const SwitchingParams& p, Point2 x, Point2 y,
                                      double replay_tol) {
  if (!in_gamma_interior(p, x) || !in_gamma_interior(p, y)) {
    throw ValidationError("reach_two_switch: both points must lie in the interior");
  }
  if (x == y) return {Regime::zero, 0.0, 0.0, x.x2};

  const double g = p.gamma();
  const double cx0 = x.x1 * std::pow(x.x2, -g);
  const double cy0 = y.x1 * std::pow(y.x2, -g);
  const double cx1 = (1.0 - x.x1) * std::pow(1.0 - x.x2, -g);
  const double cy1 = (1.0 - y.x1) * std::pow(1.0 - y.x2, -g);

  // Switch point on the u0 orbit of x and the u1 orbit of y (flow u0 first).
  auto gfun = [&](double eta) {
    return 1.0 - cy1 * std::pow(1.0 - eta, g) - cx0 * std::pow(eta, g);
  };
  // Switch point on the u1 orbit of x and the u0 orbit of y (flow u1 first).
  auto hfun = [&](double eta) {
    return 1.0 - cx1 * std::pow(1.0 - eta, g) - cy0 * std::pow(eta, g);
  };

  const double lo2 = std::min(x.x2, y.x2);
  const double hi2 = std::max(x.x2, y.x2);
  const double g_at = gfun(lo2);
  const double h_at = hfun(hi2);

  ReachabilitySolution sol;
  const double b = p.beta();
  if (g_at >= 0.0 && (h_at < 0.0 || g_at >= h_at)) {
    const double eta = g_at == 0.0 ? lo2 : bisect_root(gfun, 0.0, lo2);
    sol = {Regime::zero, std::log(x.x2 / eta) / b, std::log((1.0 - eta) / (1.0 - y.x2)) / b,
           eta};
  } else if (h_at >= 0.0) {
    // h is negative at 1 and nonnegative at hi2.
    auto neg_h = [&](double eta) { return -hfun(eta); };
    const double eta = h_at == 0.0 ? hi2 : bisect_root(neg_h, hi2, 1.0);
    sol = {Regime::one, std::log((1.0 - x.x2) / (1.0 - eta)) / b, std::log(eta / y.x2) / b,
           eta};
  } else {
    throw NumericalFailure("reach_two_switch: no sign change in either root function");
  }
  sol.s = std::max(sol.s, 0.0);
  sol.t = std::max(sol.t, 0.0);

  const double residual = norm(sol.replay(p, x) - y);
  if (!(residual < replay_tol)) {
    std::ostringstream os;
    os << "reach_two_switch: replay residual " << residual << " exceeds " << replay_tol;
    throw NumericalFailure(os.str());
  }
  return sol;
}

}  // namespace pdmplab
