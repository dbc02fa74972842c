#include "pdmplab/two_switch.hpp"

#include <algorithm>
#include <cmath>

#include "pdmplab/errors.hpp"
#include "pdmplab/flow.hpp"

namespace pdmplab {

Point2 two_switch_backward(const SwitchingParams& p, Point2 x, double s, double t) {
  const double a = p.alpha(), b = p.beta();
  return {1.0 - checked_exp(a * s) + checked_exp(a * (s + t)) * x.x1,
          1.0 - checked_exp(b * s) + checked_exp(b * (s + t)) * x.x2};
}

double two_switch_det(const SwitchingParams& p, Point2 x, double s, double t) {
  const double a = p.alpha(), b = p.beta();
  return a * b * checked_exp((a + b) * s) *
         (x.x1 * checked_exp(a * t) - x.x2 * checked_exp(b * t));
}

double two_switch_weight(const SwitchingParams& p, double s, double t) {
  const double ab = p.alpha() + p.beta();
  return p.lambda0() * p.lambda1() * checked_exp((ab - p.lambda0()) * t + (ab - p.lambda1()) * s);
}

namespace {

struct NewtonResult {
  double s, t, residual;
  bool ok;
};

double residual_norm(const SwitchingParams& p, Point2 x, Point2 y, double u, double v) {
  const double g = 1.0 / p.gamma();
  const double r1 = 1.0 - u + v * x.x1 - y.x1;
  const double r2 = 1.0 - std::pow(u, g) + std::pow(v, g) * x.x2 - y.x2;
  return std::max(std::abs(r1), std::abs(r2));
}

// Damped Newton on
//   1 - u + v x1 = y1,  1 - u^{1/gamma} + v^{1/gamma} x2 = y2
// projected onto u >= 1, v >= u (s, t >= 0).
NewtonResult newton_uv(const SwitchingParams& p, Point2 x, Point2 y, double s0, double t0,
                       int max_iter) {
  const double a = p.alpha();
  const double g = 1.0 / p.gamma();
  double u = std::exp(a * s0);
  double v = std::exp(a * (s0 + t0));
  double res = residual_norm(p, x, y, u, v);
  for (int it = 0; it < max_iter && res > 1e-14; ++it) {
    const double ug = std::pow(u, g), vg = std::pow(v, g);
    const double r1 = 1.0 - u + v * x.x1 - y.x1;
    const double r2 = 1.0 - ug + vg * x.x2 - y.x2;
    const double j11 = -1.0, j12 = x.x1;
    const double j21 = -g * ug / u, j22 = g * vg / v * x.x2;
    const double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || det == 0.0) break;
    const double du = (j22 * r1 - j12 * r2) / det;
    const double dv = (j11 * r2 - j21 * r1) / det;
    double step = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h, step *= 0.5) {
      double un = std::max(1.0, u - step * du);
      double vn = std::max(un, v - step * dv);
      const double rn = residual_norm(p, x, y, un, vn);
      if (rn < res) {
        u = un;
        v = vn;
        res = rn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return {std::log(u) / a, std::log(v / u) / a, res, std::isfinite(res)};
}

bool on_branch(const SwitchingParams& p, Point2 x, double t, Branch branch) {
  const Point2 z = flow_backward(p, Regime::zero, t, x);
  return branch == Branch::right ? z.x1 >= z.x2 : z.x1 <= z.x2;
}

constexpr double kResidualTol = 1e-10;

}  // namespace

TwoSwitchTimes invert_two_switch(const SwitchingParams& p, Point2 x, Point2 y, Branch branch,
                                 std::optional<std::pair<double, double>> start) {
  if (!(x.x1 > 0.0 && x.x2 > 0.0 && x.x1 < 1.0 && x.x2 < 1.0) || !(y.x1 < 1.0 && y.x2 < 1.0)) {
    throw NoSolutionError("invert_two_switch: points outside the open unit square");
  }
  const double a = p.alpha(), b = p.beta(), gam = p.gamma();

  if (start) {
    const NewtonResult r = newton_uv(p, x, y, std::max(0.0, start->first),
                                     std::max(0.0, start->second), 200);
    if (r.ok && r.residual < kResidualTol && on_branch(p, x, r.t, branch)) {
      return {r.s, r.t, branch};
    }
  }

  const double theta = std::log(x.x2 / x.x1) / (a - b);
  const double t_max = std::min(std::log(1.0 / x.x1) / a, std::log(1.0 / x.x2) / b);
  double lo, hi;
  if (branch == Branch::right) {
    lo = std::max(0.0, theta);
    hi = t_max;
  } else {
    lo = 0.0;
    hi = std::min(theta, t_max);
  }
  if (!(hi > lo)) throw NoSolutionError("invert_two_switch: branch is empty for this x");

  const double ly1 = std::log1p(-y.x1), ly2 = std::log1p(-y.x2);
  auto F = [&](double t) {
    const Point2 z = flow_backward(p, Regime::zero, t, x);
    return ly2 - std::log1p(-z.x2) - (ly1 - std::log1p(-z.x1)) / gam;
  };
  // Right branch: F decreasing to -inf at t_max. Left branch: F increasing.
  const double f_lo = F(lo);
  double t_root;
  if (f_lo == 0.0) {
    t_root = lo;
  } else {
    const bool increasing = branch == Branch::left;
    const double f_hi = branch == Branch::right ? -INFINITY : F(hi);
    if (increasing ? !(f_lo < 0.0 && f_hi >= 0.0) : !(f_lo > 0.0)) {
      throw NoSolutionError("invert_two_switch: y is not in the image of this branch");
    }
    double l = lo, h = hi;
    for (int it = 0; it < 200 && h - l > 1e-16 * (1.0 + h); ++it) {
      const double m = 0.5 * (l + h);
      const double fm = F(m);
      if ((fm > 0.0) == increasing) {
        h = m;
      } else {
        l = m;
      }
    }
    t_root = 0.5 * (l + h);
  }
  const Point2 z = flow_backward(p, Regime::zero, t_root, x);
  const double s_root = (ly1 - std::log1p(-z.x1)) / a;
  if (s_root < -1e-12) {
    throw NoSolutionError("invert_two_switch: y lies ahead of the intermediate point");
  }
  const double s0 = std::max(0.0, s_root);
  NewtonResult r = newton_uv(p, x, y, s0, t_root, 20);
  if (!on_branch(p, x, r.t, branch)) {
    r = {s0, t_root, residual_norm(p, x, y, std::exp(a * s0), std::exp(a * (s0 + t_root))), true};
  }
  if (!(r.ok && r.residual < kResidualTol)) {
    throw NoSolutionError("invert_two_switch: residual above tolerance");
  }
  return {r.s, r.t, branch};
}

double kernel_two_switch(const SwitchingParams& p, Point2 x, Point2 y, Branch branch,
                         double cutoff_eps) {
  const TwoSwitchTimes st = invert_two_switch(p, x, y, branch);
  const Point2 z = flow_backward(p, Regime::zero, st.t, x);
  const double d = std::abs(det_transversality(p, z));
  if (d <= cutoff_eps) throw NearDiagonalError("kernel_two_switch: switch point too close to the diagonal");
  const double ab = p.alpha() + p.beta();
  return p.lambda0() * p.lambda1() * checked_exp(-p.lambda1() * st.s + (ab - p.lambda0()) * st.t) /
         d;
}

}  // namespace pdmplab
