#include "pdmplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdmplab/errors.hpp"
#include "pdmplab/flow.hpp"
#include "pdmplab/geometry.hpp"
#include "pdmplab/parallel.hpp"
#include "pdmplab/quadrature.hpp"

namespace pdmplab {

void SolverConfig::validate() const {
  if (grid < 2) throw ValidationError("solver: grid must be >= 2");
  if (!(panels_per_unit_time >= 0.0)) throw ValidationError("solver: panels per unit time must be >= 0");
  if (gl_order < 1 || gl_order > 20) throw ValidationError("solver: gl_order must lie in [1, 20]");
  if (!(tol > 0.0)) throw ValidationError("solver: tolerance must be > 0");
  if (max_iter < 1) throw ValidationError("solver: max_iter must be >= 1");
  if (!(cutoff_eps > 0.0)) throw ValidationError("solver: cutoff epsilon must be > 0");
}

double SolverConfig::panel_length(const SwitchingParams& p) const {
  const double per_unit = panels_per_unit_time > 0.0
                              ? panels_per_unit_time
                              : 4.0 * std::max({p.alpha(), p.lambda0(), p.lambda1()});
  return 1.0 / per_unit;
}

GridField uniform_support_cdf(const SwitchingParams& p, int nodes) {
  GridField g(GridField::Kind::cdf, nodes, nodes);
  const double gam = p.gamma();
  std::vector<double> area(static_cast<std::size_t>(nodes) * nodes, 0.0);
  constexpr int kSub = 8;  // Simpson subintervals per grid interval
  for (int k1 = 0; k1 < nodes; ++k1) {
    const double a = g.coord1(k1);
    auto width = [&](double y) {
      const double left = std::pow(y, gam);
      const double right = 1.0 - std::pow(1.0 - y, gam);
      return std::max(0.0, std::min(a, right) - left);
    };
    for (int k2 = 1; k2 < nodes; ++k2) {
      const double y0 = g.coord2(k2 - 1), y1 = g.coord2(k2);
      const double h = (y1 - y0) / kSub;
      double s = width(y0) + width(y1);
      for (int j = 1; j < kSub; ++j) s += (j % 2 ? 4.0 : 2.0) * width(y0 + j * h);
      area[g.flat(k1, k2)] = area[g.flat(k1, k2 - 1)] + s * h / 3.0;
    }
  }
  const double total = area.back();
  for (Regime r : {Regime::zero, Regime::one}) {
    auto v = g.values(r);
    const double m = p.mass(r) / total;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = area[k] * m;
  }
  return g;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// G_i(x) from G_{1-i} = src for one node.
double cdf_map_at(const SwitchingParams& p, Regime i, std::span<const double> src, int n,
                  const Rect& bounds, Point2 x, double panel, const GaussLegendre& rule) {
  const double a = p.alpha(), b = p.beta();
  const double li = p.lambda(i), lo = p.lambda(other(i));
  const double src_total = src.back();
  auto G = [&](Point2 y) { return interpolate_nodes(src, n, n, bounds, y); };

  if (i == Regime::zero) {
    if (x.x1 <= 0.0 || x.x2 <= 0.0) return 0.0;
    const double ta = std::log(1.0 / x.x1) / a;
    const double tb = std::log(1.0 / x.x2) / b;
    const double t_first = std::max(0.0, std::min(ta, tb));
    const double t_full = std::max(0.0, std::max(ta, tb));
    auto f = [&](double t) {
      return std::exp(-li * t) * G(flow_backward(p, Regime::zero, t, x));
    };
    double sum = integrate_panels(f, 0.0, t_first, panels_for(0.0, t_first, panel), rule);
    sum += integrate_panels(f, t_first, t_full, panels_for(t_first, t_full, panel), rule);
    return lo * sum + src_total * (lo / li) * std::exp(-li * t_full);
  }

  // Regime 1: the backward orbit leaves [0,1]^2 through an axis, where
  // G_0 vanishes.
  const double ta = x.x1 < 1.0 ? -std::log1p(-x.x1) / a : kInf;
  const double tb = x.x2 < 1.0 ? -std::log1p(-x.x2) / b : kInf;
  const double t_end = std::min(ta, tb);
  if (t_end == kInf) return src_total * lo / li;
  auto f = [&](double t) {
    return std::exp(-li * t) * G(flow_backward(p, Regime::one, t, x));
  };
  return lo * integrate_panels(f, 0.0, t_end, panels_for(0.0, t_end, panel), rule);
}

void cdf_half_sweep(const SwitchingParams& p, Regime i, GridField& g, const SolverConfig& cfg) {
  const int n = g.n1();
  const double panel = cfg.panel_length(p);
  const GaussLegendre& rule = gauss_legendre(cfg.gl_order);
  std::vector<double> src(g.values(other(i)).begin(), g.values(other(i)).end());
  auto dst = g.values(i);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      const Point2 x = g.point(static_cast<int>(k1), k2);
      dst[g.flat(static_cast<int>(k1), k2)] = cdf_map_at(p, i, src, n, g.bounds(), x, panel, rule);
    }
  });
  // Quadrature panels do not follow the kinks of the bilinear interpolant,
  // which leaves O(1e-5) dips; the running maximum along both axes removes them.
  for (int k1 = 1; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      dst[g.flat(k1, k2)] = std::max(dst[g.flat(k1, k2)], dst[g.flat(k1 - 1, k2)]);
    }
  }
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 1; k2 < n; ++k2) {
      dst[g.flat(k1, k2)] = std::max(dst[g.flat(k1, k2)], dst[g.flat(k1, k2 - 1)]);
    }
  }
}

void pin_mass(const SwitchingParams& p, Regime i, GridField& g) {
  auto v = g.values(i);
  const double top = v.back();
  if (!(top > 0.0)) throw NumericalFailure("cdf_fixed_point: total mass collapsed to zero");
  const double scale = p.mass(i) / top;
  for (double& x : v) x *= scale;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

GridField apply_cdf_map(const SwitchingParams& p, const GridField& cdf, const SolverConfig& cfg) {
  cfg.validate();
  if (cdf.kind() != GridField::Kind::cdf || cdf.n1() != cdf.n2() || !(cdf.bounds() == Rect{})) {
    throw ValidationError("apply_cdf_map: expects a square CDF field on [0,1]^2");
  }
  GridField g = cdf;
  cdf_half_sweep(p, Regime::zero, g, cfg);
  cdf_half_sweep(p, Regime::one, g, cfg);
  return g;
}

CdfSolution cdf_fixed_point(const SwitchingParams& p, const SolverConfig& cfg) {
  cfg.validate();
  CdfSolution sol{uniform_support_cdf(p, cfg.grid), {}, 0, 0.0};
  GridField& g = sol.cdf;
  std::vector<double> old0, old1;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    old0.assign(g.values(Regime::zero).begin(), g.values(Regime::zero).end());
    old1.assign(g.values(Regime::one).begin(), g.values(Regime::one).end());
    cdf_half_sweep(p, Regime::zero, g, cfg);
    pin_mass(p, Regime::zero, g);
    cdf_half_sweep(p, Regime::one, g, cfg);
    pin_mass(p, Regime::one, g);
    const double res = std::max(sup_diff(old0, g.values(Regime::zero)),
                                sup_diff(old1, g.values(Regime::one)));
    sol.residuals.push_back(res);
    sol.iterations = it;
    if (sol.residuals.size() >= 2) {
      const double prev = sol.residuals[sol.residuals.size() - 2];
      sol.observed_ratio = prev > 0.0 ? res / prev : 0.0;
    }
    if (res < cfg.tol) return sol;
  }
  throw ConvergenceError("cdf_fixed_point: no convergence within max_iter",
                         sol.residuals.back());
}

GridField density_from_cdf(const GridField& cdf) {
  if (cdf.kind() != GridField::Kind::cdf) throw ValidationError("density_from_cdf: expects a CDF field");
  GridField d(GridField::Kind::density, cdf.n1() - 1, cdf.n2() - 1, cdf.bounds());
  for (Regime r : {Regime::zero, Regime::one}) {
    for (int k1 = 0; k1 + 1 < cdf.n1(); ++k1) {
      const double h1 = cdf.coord1(k1 + 1) - cdf.coord1(k1);
      for (int k2 = 0; k2 + 1 < cdf.n2(); ++k2) {
        const double h2 = cdf.coord2(k2 + 1) - cdf.coord2(k2);
        const double m = cdf.at(r, k1 + 1, k2 + 1) - cdf.at(r, k1 + 1, k2) -
                         cdf.at(r, k1, k2 + 1) + cdf.at(r, k1, k2);
        d.at(r, k1, k2) = m / (h1 * h2);
      }
    }
  }
  return d;
}

double density_from_one_switch(const SwitchingParams& p, const GridField& rho, Regime i, Point2 x,
                               const SolverConfig& cfg) {
  if (rho.kind() != GridField::Kind::density) {
    throw ValidationError("density_from_one_switch: expects a density field");
  }
  if (!in_gamma_interior(p, x)) {
    throw ValidationError("density_from_one_switch: point is not in the interior of the support");
  }
  const double tau = exit_time(p, i, x);
  const double rate = p.alpha() + p.beta() - p.lambda(i);
  const Regime src = other(i);
  auto f = [&](double t) {
    return std::exp(rate * t) * rho.interpolate(src, flow_backward(p, i, t, x));
  };
  const double panel = cfg.panel_length(p);
  return p.lambda(src) *
         integrate_panels(f, 0.0, tau, panels_for(0.0, tau, panel), gauss_legendre(cfg.gl_order));
}

GridField apply_Q2(const SwitchingParams& p, const GridField& rho, const SolverConfig& cfg) {
  cfg.validate();
  if (rho.kind() != GridField::Kind::density) throw ValidationError("apply_Q2: expects a density field");
  GridField out(GridField::Kind::density, rho.n1(), rho.n2(), rho.bounds());
  const double panel = cfg.panel_length(p);
  const GaussLegendre& rule = gauss_legendre(cfg.gl_order);
  const double ab = p.alpha() + p.beta();
  const double r0 = ab - p.lambda0(), r1 = ab - p.lambda1();
  constexpr double kExitTol = 1e-10;
  auto dst = out.values(Regime::zero);

  parallel_for(static_cast<std::size_t>(rho.n1()), [&](std::size_t k1) {
    for (int k2 = 0; k2 < rho.n2(); ++k2) {
      const Point2 x = rho.point(static_cast<int>(k1), k2);
      if (!in_gamma_interior(p, x)) continue;
      const double tau0 = exit_time(p, Regime::zero, x, kExitTol);
      auto outer = [&](double t) {
        const Point2 z = flow_backward(p, Regime::zero, t, x);
        if (!in_gamma_interior(p, z)) return 0.0;
        const double tau1 = exit_time(p, Regime::one, z, kExitTol);
        auto inner = [&](double s) {
          return std::exp(r1 * s) * rho.interpolate(Regime::zero, flow_backward(p, Regime::one, s, z));
        };
        return std::exp(r0 * t) *
               integrate_panels(inner, 0.0, tau1, panels_for(0.0, tau1, panel), rule);
      };
      dst[out.flat(static_cast<int>(k1), k2)] =
          p.lambda0() * p.lambda1() *
          integrate_panels(outer, 0.0, tau0, panels_for(0.0, tau0, panel), rule);
    }
  });
  return out;
}

Q2Solution q2_power_iteration(const SwitchingParams& p, const SolverConfig& cfg) {
  cfg.validate();
  const int n = cfg.grid;
  GridField rho(GridField::Kind::density, n, n);
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      if (in_gamma_interior(p, rho.point(k1, k2))) rho.at(Regime::zero, k1, k2) = 1.0;
    }
  }
  const double target = p.mass(Regime::zero);
  const double cell = rho.spacing1() * rho.spacing2();
  auto renormalise = [&](GridField& f) {
    const double m = f.mass(Regime::zero);
    if (!(m > 0.0)) throw NumericalFailure("q2_power_iteration: mass collapsed to zero");
    for (double& v : f.values(Regime::zero)) v *= target / m;
    return m;
  };
  renormalise(rho);

  Q2Solution sol{rho, {}, 0, 0.0};
  for (int it = 1; it <= cfg.max_iter; ++it) {
    GridField next = apply_Q2(p, sol.density, cfg);
    sol.mass_factor = renormalise(next) / target;
    double l1 = 0.0;
    auto a = next.values(Regime::zero);
    auto b = sol.density.values(Regime::zero);
    for (std::size_t k = 0; k < a.size(); ++k) l1 += std::abs(a[k] - b[k]);
    l1 *= cell;
    sol.density = std::move(next);
    sol.residuals.push_back(l1);
    sol.iterations = it;
    if (l1 < cfg.tol) {
      GridField& d = sol.density;
      parallel_for(static_cast<std::size_t>(n), [&](std::size_t k1) {
        for (int k2 = 0; k2 < n; ++k2) {
          const Point2 x = d.point(static_cast<int>(k1), k2);
          if (in_gamma_interior(p, x)) {
            d.at(Regime::one, static_cast<int>(k1), k2) =
                density_from_one_switch(p, d, Regime::one, x, cfg);
          }
        }
      });
      return sol;
    }
  }
  throw ConvergenceError("q2_power_iteration: no convergence within max_iter",
                         sol.residuals.back());
}

std::vector<std::uint8_t> left_boundary_cells(const SwitchingParams& p, int n) {
  if (n < 1) throw ValidationError("left_boundary_cells: n must be >= 1");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  const double h = 1.0 / n;
  for (int k2 = 0; k2 < n; ++k2) {
    const double lo = std::pow(k2 * h, p.gamma());
    const double hi = std::pow((k2 + 1) * h, p.gamma());
    const int c_lo = std::clamp(static_cast<int>(std::floor(lo / h)), 0, n - 1);
    const int c_hi = std::clamp(static_cast<int>(std::floor(hi / h)), 0, n - 1);
    for (int k1 = c_lo; k1 <= c_hi; ++k1) mask[static_cast<std::size_t>(k1) * n + k2] = 1;
  }
  return mask;
}

bool is_monotone_cdf(const GridField& cdf, double tol) {
  for (Regime r : {Regime::zero, Regime::one}) {
    for (int k1 = 0; k1 < cdf.n1(); ++k1) {
      for (int k2 = 0; k2 < cdf.n2(); ++k2) {
        const double v = cdf.at(r, k1, k2);
        if (k1 > 0 && v < cdf.at(r, k1 - 1, k2) - tol) return false;
        if (k2 > 0 && v < cdf.at(r, k1, k2 - 1) - tol) return false;
      }
    }
  }
  return true;
}

}  // namespace pdmplab
