// Acceptance checks. Prints one PASS/FAIL line per criterion and exits with
// the number of failures. `--only <id>` restricts the run to one criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <pdmplab/analysis.hpp>
#include <pdmplab/errors.hpp>
#include <pdmplab/flow.hpp>
#include <pdmplab/geometry.hpp>
#include <pdmplab/quadrature.hpp>
#include <pdmplab/reduction.hpp>
#include <pdmplab/simulate.hpp>
#include <pdmplab/solver.hpp>
#include <pdmplab/two_switch.hpp>

using namespace pdmplab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}
double rel_err(Point2 a, Point2 b) { return std::max(rel_err(a.x1, b.x1), rel_err(a.x2, b.x2)); }

template <class Gen>
Point2 interior_point(const SwitchingParams& p, Gen& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const Point2 x{u(gen), u(gen)};
    if (in_gamma_interior(p, x)) return x;
  }
}

const SwitchingParams kRef(2.0, 1.0, 3.0, 2.0);

// ---------------------------------------------------------------- 1
Outcome flow_exactness() {
  constexpr int kCases = 100000;
  constexpr double kTol = 1e-12;
  std::mt19937_64 gen(1001);
  std::uniform_real_distribution<double> ux(-0.5, 1.5), u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < kCases; ++k) {
    const double alpha = 1.0 + 4.0 * u(gen);
    const SwitchingParams p(alpha, alpha * (0.1 + 0.85 * u(gen)), 1.0, 1.0);
    const Regime i = k % 2 ? Regime::one : Regime::zero;
    const Point2 x{ux(gen), ux(gen)};
    // inverting over time t amplifies rounding by e^{alpha t}; keep alpha t <= 6
    const double s = 3.0 / alpha * u(gen), t = 3.0 / alpha * u(gen);
    worst = std::max(worst, rel_err(flow_forward(p, i, s + t, x),
                                     flow_forward(p, i, s, flow_forward(p, i, t, x))));
    worst = std::max(worst, rel_err(flow_backward(p, i, s + t, flow_forward(p, i, s + t, x)), x));
    worst = std::max(worst, rel_err(flow_forward(p, other(i), t, x),
                                     symmetry_conjugate(flow_forward(p, i, t, symmetry_conjugate(x)))));
  }
  return {worst < kTol, fmt("max rel err %.2e over %d cases (tol %.0e)", worst, kCases, kTol)};
}

// ---------------------------------------------------------------- 2
struct SupportAcc {
  OccupationHistogram hist;
  ExactOccupation exact;
  void add(const Segment& s) {
    hist.add(s);
    exact.add(s);
  }
  void merge(const SupportAcc& o) {
    hist.merge(o.hist);
    exact.merge(o.exact);
  }
};

Outcome support() {
  constexpr std::uint64_t kEvents = 10'000'000;
  constexpr int kChains = 4;
  constexpr int kCells = 32;
  const SwitchingParams& p = kRef;
  const double burn = default_burn_in(p);
  auto make = [&](std::size_t, Rng rng) {
    GridSpec g;
    g.n1 = g.n2 = kCells;
    return SupportAcc{OccupationHistogram(p, g, 4, burn, rng, kSimulationTol),
                      ExactOccupation(p, kCells, burn)};
  };
  const SupportAcc acc =
      run_chains<SupportAcc>(p, kDefaultInitial, kEvents / kChains, kChains, 2002, make);
  int meeting = 0, empty = 0;
  for (int a = 0; a < kCells; ++a) {
    for (int b = 0; b < kCells; ++b) {
      if (!rect_meets_interior(p, double(a) / kCells, double(a + 1) / kCells, double(b) / kCells,
                               double(b + 1) / kCells)) {
        continue;
      }
      ++meeting;
      if (!(acc.exact.cell_time(Regime::zero, a, b) + acc.exact.cell_time(Regime::one, a, b) > 0.0)) {
        ++empty;
      }
    }
  }
  const bool pass = acc.hist.outside_samples() == 0 && empty == 0;
  return {pass, fmt("%llu of %llu samples outside Gamma, %d of %d cells meeting the interior "
                    "without mass",
                    static_cast<unsigned long long>(acc.hist.outside_samples()),
                    static_cast<unsigned long long>(acc.hist.samples()), empty, meeting)};
}

// ---------------------------------------------------------------- 3
struct MarginalAcc {
  SwitchingParams p;
  double burn;
  int k;
  Rng rng;
  MarginalHistogram h;
  void add(const Segment& raw) {
    const Segment s = raw.clipped_after(p, burn);
    if (!(s.duration > 0.0)) return;
    for (int j = 0; j < k; ++j) h.add(s.position(p, s.duration * rng.uniform()), s.regime, s.duration / k);
  }
  void merge(const MarginalAcc& o) { h.merge(o.h); }
};

Outcome beta_marginals() {
  constexpr std::uint64_t kEvents = 1'600'000;
  constexpr int kChains = 4;
  constexpr double kTol = 0.005;
  constexpr double kMinEss = 1e6;
  const SwitchingParams& p = kRef;
  auto make = [&](std::size_t, Rng rng) {
    return MarginalAcc{p, default_burn_in(p), 4, rng, MarginalHistogram(4000)};
  };
  const MarginalAcc acc =
      run_chains<MarginalAcc>(p, kDefaultInitial, kEvents / kChains, kChains, 3003, make);
  const double ess = acc.h.effective_samples(Regime::zero);
  const double ks1 = ks_distance(acc.h.cdf(Regime::zero, Axis::x1),
                                 beta_marginal_oracle(p, Axis::x1, Regime::zero));
  const double ks2 = ks_distance(acc.h.cdf(Regime::zero, Axis::x2),
                                 beta_marginal_oracle(p, Axis::x2, Regime::zero));
  return {ess >= kMinEss && ks1 < kTol && ks2 < kTol,
          fmt("KS x1 %.4f, x2 %.4f (tol %.3f) at %.3g effective samples", ks1, ks2, kTol, ess)};
}

// ---------------------------------------------------------------- 4
Outcome occupancy() {
  const SwitchingParams& p = kRef;
  const EventLog log = simulate(p, kDefaultInitial, 1'000'000, 4004);
  const OccupancyEstimate e = occupancy_fraction(log, default_burn_in(p));
  const double target = p.mass(Regime::zero);
  const double z = std::abs(e.fraction0 - target) / e.std_error;
  return {z < 3.0, fmt("fraction %.5f vs %.5f, %.2f standard errors (limit 3)", e.fraction0, target, z)};
}

// ---------------------------------------------------------------- 5
Outcome contraction() {
  constexpr double kSlack = 1e-12;
  std::mt19937_64 gen(5005);
  std::vector<std::pair<Point2, Point2>> pairs;
  for (int k = 0; k < 10; ++k) pairs.emplace_back(interior_point(kRef, gen), interior_point(kRef, gen));
  try {
    const ContractionReport r = wasserstein_decay_check(kRef, pairs, 10'000, 5005, kSlack);
    return {true, fmt("worst |r_t| e^{beta t} / |r_0| = %.15f over %zu records", r.worst, r.rows.size())};
  } catch (const NumericalFailure& e) {
    return {false, e.what()};
  }
}

// ---------------------------------------------------------------- 6
Outcome solver_cross_validation() {
  constexpr int kNodes = 256;
  constexpr double kSupTol = 5e-3;
  constexpr std::uint64_t kEvents = 10'000'000;
  constexpr int kChains = 4;
  const SwitchingParams& p = kRef;
  SolverConfig cfg;
  cfg.grid = kNodes;
  cfg.tol = 1e-6;
  const CdfSolution sol = cdf_fixed_point(p, cfg);

  const double burn = default_burn_in(p);
  auto make = [&](std::size_t, Rng) { return ExactOccupation(p, kNodes - 1, burn); };
  const ExactOccupation occ =
      run_chains<ExactOccupation>(p, kDefaultInitial, kEvents / kChains, kChains, 6006, make);
  const GridField emp = occ.cdf();
  double sup = 0.0;
  for (Regime r : {Regime::zero, Regime::one}) {
    for (std::size_t k = 0; k < emp.size(); ++k) {
      sup = std::max(sup, std::abs(emp.values(r)[k] - sol.cdf.values(r)[k]));
    }
  }

  // G0(., 1) against the beta oracle, relative to the error of interpolating
  // the oracle itself on the same nodes
  const Cdf1D oracle = beta_marginal_oracle(p, Axis::x1, Regime::zero);
  const Cdf1D solved = marginal_from_cdf(sol.cdf, Regime::zero, Axis::x1);
  const Cdf1D interp = [&](double q) {
    const double u = q * (kNodes - 1);
    const int k = std::min(kNodes - 2, static_cast<int>(u));
    const double w = u - k;
    return (1 - w) * oracle(double(k) / (kNodes - 1)) + w * oracle(double(k + 1) / (kNodes - 1));
  };
  const double interp_err = ks_distance(oracle, interp, 10000);
  const double beta_err = ks_distance(oracle, solved, 10000);
  const bool pass = sup < kSupTol && beta_err < 2 * interp_err;
  return {pass, fmt("sup |G - G_emp| %.2e (tol %.0e); beta KS %.2e vs 2x interpolation error "
                    "%.2e; %d sweeps",
                    sup, kSupTol, beta_err, 2 * interp_err, sol.iterations)};
}

// ---------------------------------------------------------------- 7
Outcome two_switch() {
  const SwitchingParams& p = kRef;
  std::mt19937_64 gen(7007);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  double worst_round = 0.0;
  int cases = 0;
  while (cases < 10000) {
    const Point2 x = interior_point(p, gen);
    const double s = u(gen), t = u(gen);
    const Point2 y = two_switch_backward(p, x, s, t);
    if (!(y.x1 > 0 && y.x1 < 1 && y.x2 > 0 && y.x2 < 1)) continue;
    const Point2 z = flow_backward(p, Regime::zero, t, x);
    if (std::abs(z.x1 - z.x2) < 1e-3) continue;
    ++cases;
    const TwoSwitchTimes r = invert_two_switch(p, x, y, z.x1 > z.x2 ? Branch::right : Branch::left);
    worst_round = std::max(worst_round, norm(two_switch_backward(p, x, r.s, r.t) - y));
  }

  double worst_det = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const Point2 x = interior_point(p, gen);
    const double s = 0.05 + u(gen), t = 0.05 + u(gen);
    const double h = 1e-6;
    const Point2 ds = (0.5 / h) * (two_switch_backward(p, x, s + h, t) - two_switch_backward(p, x, s - h, t));
    const Point2 dt = (0.5 / h) * (two_switch_backward(p, x, s, t + h) - two_switch_backward(p, x, s, t - h));
    const double an = two_switch_det(p, x, s, t);
    if (std::abs(an) < 1e-3 * p.alpha() * p.beta() * std::exp((p.alpha() + p.beta()) * s)) continue;
    worst_det = std::max(worst_det, std::abs(ds.x1 * dt.x2 - ds.x2 * dt.x1 - an) / std::abs(an));
  }

  // kernel over a y patch against the weight over its (s,t) preimage
  const Point2 x{0.5, 0.5};
  const Point2 yc = two_switch_backward(p, x, 0.3, 0.15);
  const double hw = 0.01;
  const auto& rule = gauss_legendre(10);
  const double ydom = integrate_panels(
      [&](double y1) {
        return integrate_panels(
            [&](double y2) { return kernel_two_switch(p, x, {y1, y2}, Branch::right, 1e-9); },
            yc.x2 - hw, yc.x2 + hw, 2, rule);
      },
      yc.x1 - hw, yc.x1 + hw, 2, rule);
  double smin = 1e9, smax = -1e9, tmin = 1e9, tmax = -1e9;
  for (double a : {-hw, hw}) {
    for (double b : {-hw, hw}) {
      const auto st = invert_two_switch(p, x, {yc.x1 + a, yc.x2 + b}, Branch::right);
      smin = std::min(smin, st.s), smax = std::max(smax, st.s);
      tmin = std::min(tmin, st.t), tmax = std::max(tmax, st.t);
    }
  }
  const double ms = 0.3 * (smax - smin), mt = 0.3 * (tmax - tmin);
  smin -= ms, smax += ms, tmin -= mt, tmax += mt;
  const int n = 2000;
  const double dsw = (smax - smin) / n, dtw = (tmax - tmin) / n;
  double tdom = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = smin + (i + 0.5) * dsw, t = tmin + (j + 0.5) * dtw;
      const Point2 y = two_switch_backward(p, x, s, t);
      if (std::abs(y.x1 - yc.x1) < hw && std::abs(y.x2 - yc.x2) < hw) tdom += two_switch_weight(p, s, t);
    }
  }
  tdom *= dsw * dtw;
  // the indicator quadrature misplaces O(1/n) of the patch boundary
  const double patch_err = std::abs(ydom - tdom) / ydom;
  const double patch_tol = 4.0 / n;
  const bool pass = worst_round < 1e-9 && worst_det < 1e-6 && patch_err < patch_tol;
  return {pass, fmt("round trip %.1e (tol 1e-9); Jacobian vs FD %.1e (tol 1e-6); patch integral "
                    "rel diff %.1e (tol %.0e)",
                    worst_round, worst_det, patch_err, patch_tol)};
}

// ---------------------------------------------------------------- 8
Outcome classifier_table() {
  constexpr Tri Y = Tri::yes, N = Tri::no, O = Tri::open;
  struct Row {
    Tri corner, boundary, interior, compacts;
    bool conjectured;
  };
  struct Case {
    SwitchingParams p;
    Row rho0, rho1;
  };
  const Case cases[] = {
      {{2, 1, 1, 2}, {Y, N, N, O, true}, {Y, O, N, O, false}},
      {{2, 1, 4, 2}, {N, N, Y, Y, false}, {Y, N, N, Y, false}},
      {{2, 1, 2, 0.5}, {Y, Y, N, N, false}, {Y, N, N, O, true}},
      {{2, 1, 3, 1}, {O, O, O, O, false}, {Y, N, N, O, true}},
  };
  auto same = [](const DensityFlags& f, const Row& r) {
    return f.corner_singular == r.corner && f.boundary_singular == r.boundary &&
           f.bounded_interior == r.interior && f.bounded_on_boundary_compacts == r.compacts &&
           f.bounded_off_boundary == Tri::yes && f.conjectured_bounded_boundary == r.conjectured;
  };
  int mismatches = 0;
  for (const Case& c : cases) {
    const RegimeReport r = classify_regime(c.p);
    mismatches += !same(r.rho0, c.rho0) + !same(r.rho1, c.rho1);
  }
  const RegimeReport crit = classify_regime({2, 1, 3, 1});
  mismatches += !(crit.rho0.critical_corner && crit.rho0.critical_boundary);
  return {mismatches == 0, fmt("%d mismatching density rows over 4 parameter sets", mismatches)};
}

// ---------------------------------------------------------------- 9
constexpr std::uint64_t kScalingEvents = 100'000'000;
constexpr int kScalingChains = 8;
constexpr double kScalingSeconds = 450.0;  // a quarter of the 30 min budget

Outcome scaling(const SwitchingParams& p, bool corner, double target, double tol, std::uint64_t seed) {
  const double burn = default_burn_in(p);
  const std::vector<double> eps = default_eps_grid();
  ScalingFit fit;
  try {
    if (corner) {
      auto make = [&](std::size_t, Rng) { return CornerMassAccumulator(p, eps, Regime::zero, burn); };
      fit = run_chains<CornerMassAccumulator>(p, kDefaultInitial, kScalingEvents / kScalingChains,
                                              kScalingChains, seed, make)
                .fit();
    } else {
      auto make = [&](std::size_t, Rng) { return StripMassAccumulator(p, eps, kDefaultStripAnchor, burn); };
      fit = run_chains<StripMassAccumulator>(p, kDefaultInitial, kScalingEvents / kScalingChains,
                                             kScalingChains, seed, make)
                .fit();
    }
  } catch (const InsufficientDataError& e) {
    return {false, e.what()};
  }
  const bool pass = std::abs(fit.slope - target) <= tol;
  return {pass, fmt("%s slope %.3f +- %.3f for (%g,%g,%g,%g), expected %.2f +- %.2f; %zu scales "
                    "kept",
                    corner ? "corner" : "strip", fit.slope, fit.slope_stderr, p.alpha(), p.beta(),
                    p.lambda0(), p.lambda1(), target, tol, fit.epsilons.size())};
}

Outcome scaling_9a() { return scaling({2, 1, 1, 2}, true, 1.0, 0.15, 9001); }
Outcome scaling_9b() { return scaling({2, 1, 4, 2}, true, 3.0, 0.2, 9002); }
Outcome scaling_9c() { return scaling({2, 1, 2, 0.5}, false, 2.5, 0.2, 9003); }
Outcome scaling_9d() { return scaling({2, 1, 4, 2}, false, 3.0, 0.2, 9004); }

// ---------------------------------------------------------------- 10
Outcome reduction() {
  constexpr double kTol = 1e-9;
  const GeneralSystem gene = preset_gene_expression(5.0, 2.0, 3.0, 1.0, 1.5, 0.5);
  const GeneralSystem pde = preset_pde_modes(1, 2, 1.0, 1.0);
  const Conjugacy cg = reduce(gene), cp = reduce(pde);
  const double rg = conjugacy_residual(gene, cg, 1000, 10010);
  const double rp = conjugacy_residual(pde, cp, 1000, 10011);
  const double pi = std::numbers::pi;
  const bool exact = pde_mode_rate(1) == pi * pi && pde_mode_amplitude(1) == std::numbers::sqrt2 / pi &&
                     pde.A(0, 0) == -pi * pi && cp.params.beta() == pi * pi;
  return {rg < kTol && rp < kTol && exact,
          fmt("residual gene %.1e, pde %.1e (tol %.0e); beta_1 = pi^2 and b_1 = sqrt2/pi %s", rg, rp,
              kTol, exact ? "exact" : "NOT exact")};
}

struct Criterion {
  const char* id;
  const char* name;
  std::function<Outcome()> run;
  double max_seconds;  // 0 when the criterion has no runtime bound
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--only" && k + 1 < argc) {
      only = argv[++k];
    } else {
      std::fprintf(stderr, "usage: %s [--only <criterion>]\n", argv[0]);
      return 64;
    }
  }
  const Criterion criteria[] = {
      {"1", "flow exactness", flow_exactness, 5.0},
      {"2", "support", support, 60.0},
      {"3", "beta marginals", beta_marginals, 120.0},
      {"4", "occupancy", occupancy, 0.0},
      {"5", "contraction", contraction, 0.0},
      {"6", "solver cross-validation", solver_cross_validation, 600.0},
      {"7", "two-switch machinery", two_switch, 0.0},
      {"8", "regime thresholds", classifier_table, 0.0},
      {"9a", "corner scaling, singular", scaling_9a, kScalingSeconds},
      {"9b", "corner scaling, bounded", scaling_9b, kScalingSeconds},
      {"9c", "strip scaling, singular", scaling_9c, kScalingSeconds},
      {"9d", "strip scaling, bounded", scaling_9d, kScalingSeconds},
      {"10", "reduction conjugacy", reduction, 0.0},
  };
  int failures = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && only != c.id) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.max_seconds > 0.0 && secs >= c.max_seconds) {
      o.pass = false;
      o.detail += fmt(" [runtime %.1f s over the %.0f s limit]", secs, c.max_seconds);
    }
    std::printf("%s %-3s %-26s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 64;
  }
  return failures;
}
