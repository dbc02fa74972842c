#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <sstream>

#include <pdmplab/analysis.hpp>
#include <pdmplab/errors.hpp>
#include <pdmplab/geometry.hpp>
#include <pdmplab/io.hpp>
#include <pdmplab/reduction.hpp>
#include <pdmplab/simulate.hpp>
#include <pdmplab/solver.hpp>

namespace pdmplab::cli {
namespace {

using nlohmann::json;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& a : v) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

// ------------------------------------------------------------ configuration

// Flags equivalent to a JSON config object: {"grid": 64, "verbose": true}
// becomes --grid 64 --verbose. Arrays are joined with commas.
std::vector<std::string> config_tokens(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("config " + path + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config " + path + ": expected a JSON object");
  auto scalar = [&](const std::string& key, const json& v) -> std::string {
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::trunc(d) == d && std::abs(d) < 9e15) return std::to_string(static_cast<long long>(d));
      return v.dump();
    }
    if (v.is_number()) return v.dump();
    if (v.is_string()) return v.get<std::string>();
    throw ValidationError("config " + path + ": unsupported value for '" + key + "'");
  };
  std::vector<std::string> out;
  for (const auto& [key, v] : j.items()) {
    if (key == "config") throw ValidationError("config " + path + ": nested 'config' key");
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (v.is_boolean()) {
      if (v.get<bool>()) out.push_back(flag);
    } else if (v.is_array()) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ",") + scalar(key, e);
      out.push_back(flag);
      out.push_back(s);
    } else {
      out.push_back(flag);
      out.push_back(scalar(key, v));
    }
  }
  return out;
}

// Config-derived flags go right after the subcommand name so that explicit
// flags, parsed later with a take-last policy, win.
std::vector<std::string> inject_config(std::vector<std::string> args) {
  if (args.empty() || args[0] == "reduce") return args;
  for (std::size_t k = 1; k < args.size(); ++k) {
    std::string path;
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    } else {
      continue;
    }
    const auto tokens = config_tokens(path);
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
    return args;
  }
  return args;
}

// ------------------------------------------------------------ shared flags

struct ParamFlags {
  double alpha = kUnset, beta = kUnset, lambda0 = kUnset, lambda1 = kUnset;

  void add(CLI::App* app, bool required) {
    auto* a = app->add_option("--alpha", alpha, "contraction rate of x1 (alpha > beta)");
    auto* b = app->add_option("--beta", beta, "contraction rate of x2 (beta > 0)");
    auto* c = app->add_option("--lambda0", lambda0, "switching rate out of regime 0");
    auto* d = app->add_option("--lambda1", lambda1, "switching rate out of regime 1");
    if (required) {
      for (auto* o : {a, b, c, d}) o->required();
    }
  }
  bool any() const {
    return !std::isnan(alpha) || !std::isnan(beta) || !std::isnan(lambda0) || !std::isnan(lambda1);
  }
  SwitchingParams get() const {
    if (std::isnan(alpha) || std::isnan(beta) || std::isnan(lambda0) || std::isnan(lambda1)) {
      throw ValidationError("--alpha, --beta, --lambda0 and --lambda1 are all required");
    }
    return {alpha, beta, lambda0, lambda1};
  }
};

struct Provenance {
  std::string command;
  std::optional<std::uint64_t> seed;

  std::vector<std::string> comments() const {
    std::vector<std::string> c = {std::string("pdmplab ") + PDMPLAB_VERSION, "command: " + command};
    if (seed) c.push_back("seed=" + std::to_string(*seed));
    return c;
  }
  json to_json() const {
    json j = {{"version", PDMPLAB_VERSION}, {"command", command}};
    if (seed) j["seed"] = *seed;
    return j;
  }
};

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("malformed number '" + item + "' in list '" + s + "'");
    }
  }
  return v;
}

HybridState initial_state(double x1, double x2, int regime) {
  if (!std::isfinite(x1) || !std::isfinite(x2)) throw ValidationError("initial point must be finite");
  return {{x1, x2}, regime_from_index(regime)};
}

// ------------------------------------------------------------ simulate

struct SimulateOpts {
  ParamFlags params;
  std::uint64_t events = 100000;
  std::uint64_t seed = 0;
  double burn_in = kUnset;
  int samples_per_interval = 4;
  int grid = 32;
  double x1 = 0.5, x2 = 0.5;
  int regime = 0;
  std::string out = "pdmplab";
  bool no_events = false;
};

int cmd_simulate(const SimulateOpts& o, const Provenance& prov, std::ostream& out) {
  const SwitchingParams p = o.params.get();
  if (o.events < 1) throw ValidationError("--events must be >= 1");
  if (o.samples_per_interval < 1) throw ValidationError("--samples-per-interval must be >= 1");
  if (o.grid < 1) throw ValidationError("--grid must be >= 1");
  const double burn = std::isnan(o.burn_in) ? default_burn_in(p) : o.burn_in;
  if (!(burn >= 0.0)) throw ValidationError("--burn-in must be >= 0");

  const EventLog log = simulate(p, initial_state(o.x1, o.x2, o.regime), o.events, o.seed);
  GridSpec grid;
  grid.n1 = grid.n2 = o.grid;
  const GridField occ = estimate_occupation(log, grid, o.samples_per_interval, burn);
  const OccupancyEstimate est = occupancy_fraction(log, burn);

  // the event log header already records the seed
  const auto comments = prov.comments();
  Provenance unseeded = prov;
  unseeded.seed.reset();
  const std::string events_path = o.out + ".events.csv";
  const std::string occ_path = o.out + ".occupation.csv";
  if (!o.no_events) save_event_log(events_path, log, unseeded.comments());
  save_grid_field(occ_path, occ, comments);

  json j = {{"provenance", prov.to_json()},
            {"events", o.events},
            {"total_time", log.total_time},
            {"burn_in", burn},
            {"occupancy",
             {{"fraction0", est.fraction0},
              {"std_error", est.std_error},
              {"expected", p.mass(Regime::zero)}}},
            {"outputs", json::array()}};
  if (!o.no_events) j["outputs"].push_back(events_path);
  j["outputs"].push_back(occ_path);
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ solve

struct SolveOpts {
  ParamFlags params;
  SolverConfig cfg;
  std::string method = "cdf";
  std::string out = "solve.csv";
  bool cross_check = false;
};

int cmd_solve(const SolveOpts& o, const Provenance& prov, std::ostream& out) {
  const SwitchingParams p = o.params.get();
  o.cfg.validate();
  json j = {{"provenance", prov.to_json()}, {"method", o.method}, {"config", json::parse(to_json(o.cfg))}};
  if (o.method == "cdf") {
    const CdfSolution sol = cdf_fixed_point(p, o.cfg);
    if (!is_monotone_cdf(sol.cdf)) throw NumericalFailure("solve: CDF output is not monotone");
    save_grid_field(o.out, sol.cdf, prov.comments());
    j["iterations"] = sol.iterations;
    j["residuals"] = sol.residuals;
    j["observed_ratio"] = sol.observed_ratio;
  } else {
    const Q2Solution sol = q2_power_iteration(p, o.cfg);
    save_grid_field(o.out, sol.density, prov.comments());
    j["iterations"] = sol.iterations;
    j["residuals"] = sol.residuals;
    j["mass_factor"] = sol.mass_factor;
    if (o.cross_check) {
      // cell averages from the CDF solver on the matching node grid, compared
      // on cells inside the support away from the left boundary and diagonal
      const int n = o.cfg.grid;
      SolverConfig c = o.cfg;
      c.grid = n + 1;
      const GridField ref = density_from_cdf(cdf_fixed_point(p, c).cdf);
      const auto boundary = left_boundary_cells(p, n);
      const double area = 1.0 / (static_cast<double>(n) * n);
      double l1 = 0.0;
      int compared = 0;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const Point2 x = sol.density.point(a, b);
          if (boundary[static_cast<std::size_t>(a) * n + b] || std::abs(x.x1 - x.x2) < 0.1) continue;
          bool inside = true;
          for (int da : {0, 1}) {
            for (int db : {0, 1}) {
              inside = inside && in_gamma_interior(p, {double(a + da) / n, double(b + db) / n});
            }
          }
          if (!inside) continue;
          ++compared;
          l1 += std::abs(sol.density.at(Regime::zero, a, b) - ref.at(Regime::zero, a, b)) * area;
        }
      }
      j["cross_check"] = {{"cells_compared", compared}, {"l1_rho0_relative", l1 / p.mass(Regime::zero)}};
    }
  }
  j["output"] = o.out;
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ classify

int cmd_classify(const ParamFlags& params, const Provenance& prov, std::ostream& out) {
  json j = json::parse(to_json(classify_regime(params.get())));
  j["provenance"] = prov.to_json();
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ diagnose

struct DiagnoseOpts {
  std::string kind;
  ParamFlags params;
  std::string log;
  std::uint64_t events = 1000000;
  std::uint64_t seed = 0;
  int chains = 8;
  double burn_in = kUnset;
  int corner = 0;
  double anchor = kDefaultStripAnchor;
  std::string eps;
  std::uint64_t min_visits = kMinVisits;
  int samples_per_interval = 4;
  int bins = 4000;
  double ks_tol = 0.005;
  int pairs = 10;
  double x1 = 0.5, x2 = 0.5;
  int regime = 0;
  std::string out;
};

struct Source {
  SwitchingParams p{2.0, 1.0, 1.0, 1.0};
  std::optional<EventLog> log;
  HybridState initial;
  std::uint64_t events = 0;
  int chains = 1;
  std::uint64_t seed = 0;
  double burn_in = 0.0;
};

Source make_source(const DiagnoseOpts& o) {
  Source s;
  if (!o.log.empty()) {
    s.log = load_event_log(o.log);
    s.p = s.log->params;
    if (o.params.any() && !(o.params.get() == s.p)) {
      throw ValidationError("parameters given on the command line differ from those in " + o.log);
    }
    s.seed = s.log->seed;
  } else {
    s.p = o.params.get();
    if (o.chains < 1) throw ValidationError("--chains must be >= 1");
    if (o.events < static_cast<std::uint64_t>(o.chains)) throw ValidationError("--events must be >= --chains");
    s.initial = initial_state(o.x1, o.x2, o.regime);
    s.events = o.events;
    s.chains = o.chains;
    s.seed = o.seed;
  }
  s.burn_in = std::isnan(o.burn_in) ? default_burn_in(s.p) : o.burn_in;
  if (!(s.burn_in >= 0.0)) throw ValidationError("--burn-in must be >= 0");
  return s;
}

// Accumulates every segment of the source; fresh runs use parallel chains.
template <class Acc, class Make>
Acc accumulate(const Source& s, Make make) {
  if (s.log) {
    Acc acc = make(std::size_t{0}, Rng::stream(s.seed, 1));
    for (std::size_t k = 0; k < s.log->segment_count(); ++k) acc.add(s.log->segment(k));
    return acc;
  }
  return run_chains<Acc>(s.p, s.initial, s.events / s.chains, s.chains, s.seed, make);
}

// Exponents below alpha+beta mean more mass than a bounded density allows.
std::string scaling_verdict(const ScalingFit& f, double threshold, Tri flag, const std::string& flag_name,
                            const std::string& what) {
  constexpr double kMargin = 0.1;
  const char* observed = "inconclusive";
  if (f.slope + 2 * f.slope_stderr < threshold - kMargin) {
    observed = "singular";
  } else if (f.slope - 2 * f.slope_stderr >= threshold - kMargin) {
    observed = "bounded";
  }
  std::ostringstream v;
  v << "verdict: " << what << " slope " << f.slope << " +- " << f.slope_stderr
    << " against alpha+beta = " << threshold << ": " << observed << "; classify_regime " << flag_name
    << " = " << to_string(flag) << ": ";
  const std::string obs = observed;
  if (flag == Tri::open || obs == "inconclusive") {
    v << "no firm expectation";
  } else if ((flag == Tri::yes) == (obs == "singular")) {
    v << "consistent";
  } else {
    v << "inconsistent";
  }
  return v.str();
}

struct MarginalAcc {
  SwitchingParams p;
  double burn;
  int k;
  Rng rng;
  MarginalHistogram h;
  void add(const Segment& raw) {
    const Segment s = raw.clipped_after(p, burn);
    if (!(s.duration > 0.0)) return;
    for (int j = 0; j < k; ++j) {
      h.add(s.position(p, s.duration * rng.uniform()), s.regime, s.duration / k);
    }
  }
  void merge(const MarginalAcc& o) { h.merge(o.h); }
};

int cmd_diagnose(const DiagnoseOpts& o, const Provenance& prov, std::ostream& out) {
  json j = {{"provenance", prov.to_json()}, {"diagnostic", o.kind}};
  std::string verdict;

  if (o.kind == "contraction") {
    const SwitchingParams p = o.params.get();
    if (o.pairs < 1) throw ValidationError("--pairs must be >= 1");
    Rng rng(o.seed);
    auto draw = [&] {
      for (;;) {
        const Point2 x{rng.uniform(), rng.uniform()};
        if (in_gamma_interior(p, x)) return x;
      }
    };
    std::vector<std::pair<Point2, Point2>> pairs;
    for (int k = 0; k < o.pairs; ++k) {
      const Point2 a = draw();
      pairs.emplace_back(a, draw());
    }
    const ContractionReport r = wasserstein_decay_check(p, pairs, o.events, o.seed, 1e-12);
    j["pairs"] = o.pairs;
    j["events_per_pair"] = o.events;
    j["worst_ratio_over_bound"] = r.worst;
    verdict = "verdict: |r_t| <= |r_0| e^{-beta t} held at every event (worst ratio/bound " +
              std::to_string(r.worst) + ")";
    emit_json(j, o.out, out);
    out << verdict << '\n';
    return kExitOk;
  }

  const Source src = make_source(o);
  const SwitchingParams& p = src.p;
  const RegimeReport report = classify_regime(p);
  j["params"] = json::parse(to_json(report))["params"];
  j["burn_in"] = src.burn_in;
  if (src.log) {
    j["source"] = o.log;
    j["provenance"]["seed"] = src.seed;
  } else {
    j["source"] = {{"events", src.events}, {"chains", src.chains}, {"seed", src.seed}};
  }
  const std::vector<double> eps = o.eps.empty() ? default_eps_grid() : parse_list(o.eps);

  if (o.kind == "corner") {
    const Regime corner = regime_from_index(o.corner);
    auto make = [&](std::size_t, Rng) { return CornerMassAccumulator(p, eps, corner, src.burn_in); };
    const ScalingFit fit = accumulate<CornerMassAccumulator>(src, make).fit(o.min_visits);
    j["corner"] = o.corner;
    j["fit"] = json::parse(to_json(fit));
    const DensityFlags& f = corner == Regime::zero ? report.rho0 : report.rho1;
    verdict = scaling_verdict(fit, p.alpha() + p.beta(), f.corner_singular,
                              corner == Regime::zero ? "origin_singular" : "corner_one_singular",
                              "corner");
  } else if (o.kind == "strip") {
    auto make = [&](std::size_t, Rng) { return StripMassAccumulator(p, eps, o.anchor, src.burn_in); };
    const ScalingFit fit = accumulate<StripMassAccumulator>(src, make).fit(o.min_visits);
    j["anchor"] = o.anchor;
    j["fit"] = json::parse(to_json(fit));
    verdict = scaling_verdict(fit, p.alpha() + p.beta(), report.rho0.boundary_singular,
                              "left_boundary_singular", "strip");
  } else {
    if (o.samples_per_interval < 1) throw ValidationError("--samples-per-interval must be >= 1");
    if (o.bins < 1) throw ValidationError("--bins must be >= 1");
    auto make = [&](std::size_t, Rng rng) {
      return MarginalAcc{p, src.burn_in, o.samples_per_interval, rng, MarginalHistogram(o.bins)};
    };
    const MarginalAcc acc = accumulate<MarginalAcc>(src, make);
    double worst = 0.0, min_ess = std::numeric_limits<double>::infinity();
    json ks = json::object(), ess = json::object();
    for (Regime r : {Regime::zero, Regime::one}) {
      const std::string key = r == Regime::zero ? "regime0" : "regime1";
      const double e = acc.h.effective_samples(r);
      if (!(e > 0.0)) throw InsufficientDataError("marginals: no samples after burn-in");
      min_ess = std::min(min_ess, e);
      ess[key] = e;
      for (Axis a : {Axis::x1, Axis::x2}) {
        const double d = ks_distance(acc.h.cdf(r, a), beta_marginal_oracle(p, a, r));
        ks[key][a == Axis::x1 ? "x1" : "x2"] = d;
        worst = std::max(worst, d);
      }
    }
    j["ks"] = ks;
    j["effective_samples"] = ess;
    j["ks_tolerance"] = o.ks_tol;
    // 95% KS quantile; below this many samples the tolerance cannot be resolved
    const double needed = std::pow(1.36 / o.ks_tol, 2);
    std::ostringstream v;
    v << "verdict: max KS " << worst << (worst < o.ks_tol ? " < " : " >= ") << o.ks_tol << " at "
      << min_ess << " effective samples: ";
    if (worst < o.ks_tol) {
      v << "consistent with the beta marginals";
    } else if (min_ess < needed) {
      v << "inconclusive, about " << std::ceil(needed) << " effective samples are needed";
    } else {
      v << "inconsistent with the beta marginals";
    }
    verdict = v.str();
  }
  emit_json(j, o.out, out);
  out << verdict << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ reduce

struct ReduceOpts {
  std::string config;
  std::string preset;
  double alpha_prod = kUnset, delta = kUnset, beta_prod = kUnset, gamma = kUnset;
  double lambda0 = kUnset, lambda1 = kUnset;
  double x_star = kUnset, y_star = kUnset;
  int k = 1, m = 2;
  bool verify = false;
  int trials = 1000;
  std::uint64_t seed = 0;
};

GeneralSystem reduce_input(const ReduceOpts& o) {
  if (!o.config.empty() && !o.preset.empty()) throw ValidationError("give either --config or --preset");
  if (!o.config.empty()) return general_system_from_json(read_text_file(o.config));
  auto need = [](double v, const char* name) {
    if (std::isnan(v)) throw ValidationError(std::string("--") + name + " is required for this preset");
    return v;
  };
  if (o.preset == "gene-expression") {
    auto opt = [](double v) { return std::isnan(v) ? std::nullopt : std::optional<double>(v); };
    return preset_gene_expression(need(o.alpha_prod, "alpha-prod"), need(o.delta, "delta"),
                                  need(o.beta_prod, "beta-prod"), need(o.gamma, "gamma"),
                                  need(o.lambda0, "lambda0"), need(o.lambda1, "lambda1"),
                                  opt(o.x_star), opt(o.y_star));
  }
  if (o.preset == "pde-modes") {
    return preset_pde_modes(o.k, o.m, need(o.lambda0, "lambda0"), need(o.lambda1, "lambda1"));
  }
  throw ValidationError("one of --config or --preset gene-expression|pde-modes is required");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err);

namespace {

int cmd_reduce(const ReduceOpts& o, const std::vector<std::string>& chain, const Provenance& prov,
               std::ostream& out, std::ostream& err) {
  const GeneralSystem sys = reduce_input(o);
  const Conjugacy c = reduce(sys);
  json j = {{"provenance", prov.to_json()},
            {"system", json::parse(to_json(sys))},
            {"conjugacy", json::parse(to_json(c))}};
  if (o.verify) {
    if (o.trials < 1) throw ValidationError("--trials must be >= 1");
    constexpr double kTol = 1e-9;
    const double res = conjugacy_residual(sys, c, o.trials, o.seed);
    j["verify"] = {{"trials", o.trials}, {"residual", res}, {"tolerance", kTol}, {"passed", res < kTol}};
    out << j.dump(2) << '\n';
    if (!(res < kTol)) {
      err << "reduce: conjugacy residual " << res << " exceeds " << kTol << '\n';
      return kExitFailure;
    }
  } else {
    out << j.dump(2) << '\n';
  }
  if (chain.empty()) return kExitOk;
  std::vector<std::string> next = chain;
  for (const auto& [flag, v] : {std::pair{"--alpha", c.params.alpha()}, {"--beta", c.params.beta()},
                                {"--lambda0", c.params.lambda0()}, {"--lambda1", c.params.lambda1()}}) {
    next.push_back(flag);
    next.push_back(json(v).dump());
  }
  return run(next, out, err);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  std::vector<std::string> chain;
  try {
    args = raw_args;
    if (!args.empty() && args[0] == "reduce") {
      const auto sep = std::find(args.begin(), args.end(), "--");
      if (sep != args.end()) {
        chain.assign(sep + 1, args.end());
        args.erase(sep, args.end());
      }
    }
    args = inject_config(std::move(args));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  CLI::App app{"Simulation, invariant-density solvers and diagnostics for planar switching systems",
               "pdmplab"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", PDMPLAB_VERSION);
  std::string config_path;  // consumed by inject_config

  SimulateOpts sim;
  auto* s = app.add_subcommand("simulate", "simulate the switching process; write the event log and occupation grid");
  sim.params.add(s, true);
  s->add_option("--events", sim.events, "number of switching events")->capture_default_str();
  s->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  s->add_option("--burn-in", sim.burn_in, "time discarded from the start (default 50/beta)");
  s->add_option("--samples-per-interval", sim.samples_per_interval, "positions sampled per holding interval")
      ->capture_default_str();
  s->add_option("--grid", sim.grid, "occupation histogram cells per axis")->capture_default_str();
  s->add_option("--x1", sim.x1, "initial x1")->capture_default_str();
  s->add_option("--x2", sim.x2, "initial x2")->capture_default_str();
  s->add_option("--regime", sim.regime, "initial regime (0 or 1)")->capture_default_str();
  s->add_option("--out", sim.out, "output prefix: <out>.events.csv, <out>.occupation.csv")->capture_default_str();
  s->add_flag("--no-events", sim.no_events, "skip writing the event log");
  s->add_option("--config", config_path, "JSON file with default flag values");

  SolveOpts sol;
  auto* v = app.add_subcommand("solve", "solve for the invariant CDF (or density with --method q2)");
  sol.params.add(v, true);
  v->add_option("--grid", sol.cfg.grid, "grid nodes (cdf) or cells (q2) per axis")->capture_default_str();
  v->add_option("--tol", sol.cfg.tol, "sup-norm (cdf) or L1 (q2) tolerance")->capture_default_str();
  v->add_option("--max-iter", sol.cfg.max_iter, "iteration cap")->capture_default_str();
  v->add_option("--panels-per-unit-time", sol.cfg.panels_per_unit_time,
                "quadrature panels per unit time (0: 4 max(alpha, lambda0, lambda1))")
      ->capture_default_str();
  v->add_option("--gl-order", sol.cfg.gl_order, "Gauss-Legendre nodes per panel")->capture_default_str();
  v->add_option("--cutoff-eps", sol.cfg.cutoff_eps, "near-diagonal cutoff")->capture_default_str();
  v->add_option("--method", sol.method, "cdf or q2")
      ->check(CLI::IsMember({"cdf", "q2"}))
      ->capture_default_str();
  v->add_option("--out", sol.out, "output grid field CSV")->capture_default_str();
  v->add_flag("--cross-check", sol.cross_check, "with --method q2, compare against the cdf solver");
  v->add_option("--config", config_path, "JSON file with default flag values");

  ParamFlags cls;
  auto* c = app.add_subcommand("classify", "print the regime classification as JSON");
  cls.add(c, true);
  c->add_option("--config", config_path, "JSON file with default flag values");

  DiagnoseOpts dia;
  auto* d = app.add_subcommand("diagnose", "scaling, marginal and contraction diagnostics");
  d->add_option("kind", dia.kind, "corner | strip | marginals | contraction")
      ->required()
      ->check(CLI::IsMember({"corner", "strip", "marginals", "contraction"}));
  dia.params.add(d, false);
  d->add_option("--log", dia.log, "read an event log instead of simulating");
  d->add_option("--events", dia.events, "events to simulate (per pair for contraction)")->capture_default_str();
  d->add_option("--seed", dia.seed, "random seed")->capture_default_str();
  d->add_option("--chains", dia.chains, "independent chains for fresh simulations")->capture_default_str();
  d->add_option("--burn-in", dia.burn_in, "time discarded from the start of each chain (default 50/beta)");
  d->add_option("--corner", dia.corner, "corner (0,0) with 0, (1,1) with 1")->capture_default_str();
  d->add_option("--anchor", dia.anchor, "strip anchor time")->capture_default_str();
  d->add_option("--eps", dia.eps, "comma-separated decreasing scales (default 0.3 * 2^-k, k=0..7)");
  d->add_option("--min-visits", dia.min_visits, "visits required to keep a scale")->capture_default_str();
  d->add_option("--samples-per-interval", dia.samples_per_interval, "positions sampled per interval")
      ->capture_default_str();
  d->add_option("--bins", dia.bins, "marginal histogram bins")->capture_default_str();
  d->add_option("--ks-tol", dia.ks_tol, "KS tolerance for the marginals verdict")->capture_default_str();
  d->add_option("--pairs", dia.pairs, "coupled pairs for the contraction check")->capture_default_str();
  d->add_option("--x1", dia.x1, "initial x1")->capture_default_str();
  d->add_option("--x2", dia.x2, "initial x2")->capture_default_str();
  d->add_option("--regime", dia.regime, "initial regime")->capture_default_str();
  d->add_option("--out", dia.out, "write the JSON report here instead of stdout");
  d->add_option("--config", config_path, "JSON file with default flag values");

  ReduceOpts red;
  auto* r = app.add_subcommand(
      "reduce", "reduce a general affine system to canonical form; `-- <subcommand> ...` chains into it");
  r->add_option("--config", red.config, "system JSON: A (row-major), b0, b1, lambda0, lambda1");
  r->add_option("--preset", red.preset, "gene-expression or pde-modes")
      ->check(CLI::IsMember({"gene-expression", "pde-modes"}));
  r->add_option("--alpha-prod", red.alpha_prod, "gene-expression: mRNA production rate");
  r->add_option("--delta", red.delta, "gene-expression: mRNA decay rate");
  r->add_option("--beta-prod", red.beta_prod, "gene-expression: protein production rate");
  r->add_option("--gamma", red.gamma, "gene-expression: protein decay rate");
  r->add_option("--x-star", red.x_star, "gene-expression: mRNA scale");
  r->add_option("--y-star", red.y_star, "gene-expression: protein scale");
  r->add_option("--lambda0", red.lambda0, "switching rate out of regime 0");
  r->add_option("--lambda1", red.lambda1, "switching rate out of regime 1");
  r->add_option("--k", red.k, "pde-modes: first mode")->capture_default_str();
  r->add_option("--m", red.m, "pde-modes: second mode")->capture_default_str();
  r->add_flag("--verify", red.verify, "check flow conjugacy on random (t, i, x)");
  r->add_option("--trials", red.trials, "random draws for --verify")->capture_default_str();
  r->add_option("--seed", red.seed, "seed for --verify")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  Provenance prov{"pdmplab " + join(args), std::nullopt};
  try {
    if (s->parsed()) {
      prov.seed = sim.seed;
      return cmd_simulate(sim, prov, out);
    }
    if (v->parsed()) return cmd_solve(sol, prov, out);
    if (c->parsed()) return cmd_classify(cls, prov, out);
    if (d->parsed()) {
      prov.seed = dia.seed;
      return cmd_diagnose(dia, prov, out);
    }
    if (r->parsed()) {
      if (!chain.empty()) prov.command += " -- " + join(chain);
      return cmd_reduce(red, chain, prov, out, err);
    }
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (last residual " << e.residual() << ")\n";
    return kExitConvergence;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInsufficientData;
  } catch (const UnsupportedSystemError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const OverflowError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace pdmplab::cli
