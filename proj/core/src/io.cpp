#include "pdmplab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pdmplab/errors.hpp"

namespace pdmplab {

using nlohmann::json;

namespace {

// Shortest representation that round-trips.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const char* what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError(std::string("malformed number in ") + what + ": '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Value of `key=` inside a comment line, if present.
bool find_key(std::string_view line, std::string_view key, std::string_view& value) {
  const std::string needle = std::string(key) + "=";
  std::size_t pos = 0;
  while ((pos = line.find(needle, pos)) != std::string_view::npos) {
    if (pos == 0 || line[pos - 1] == ' ') {
      const std::size_t start = pos + needle.size();
      const std::size_t end = line.find(' ', start);
      value = line.substr(start, end == std::string_view::npos ? end : end - start);
      return true;
    }
    pos += needle.size();
  }
  return false;
}

}  // namespace

void write_event_log(std::ostream& os, const EventLog& log, const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  const SwitchingParams& p = log.params;
  os << "# params alpha=" << num(p.alpha()) << " beta=" << num(p.beta())
     << " lambda0=" << num(p.lambda0()) << " lambda1=" << num(p.lambda1()) << '\n';
  os << "# seed=" << log.seed << " events=" << log.events.size() << '\n';
  os << "time,x1,x2,regime\n";
  os << "0," << num(log.initial.x.x1) << ',' << num(log.initial.x.x2) << ','
     << index(log.initial.regime) << '\n';
  for (const Event& e : log.events) {
    os << num(e.time) << ',' << num(e.x.x1) << ',' << num(e.x.x2) << ',' << index(e.entered)
       << '\n';
  }
}

EventLog read_event_log(std::istream& is) {
  std::string line;
  double a = 0, b = 0, l0 = 0, l1 = 0;
  bool have_params = false, have_header = false, have_initial = false;
  std::uint64_t seed = 0;
  HybridState initial;
  std::vector<Event> events;
  double prev_time = 0.0;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view v(line);
    if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
    if (v.empty()) continue;
    if (v.front() == '#') {
      std::string_view val;
      if (v.find("params") != std::string_view::npos) {
        std::string_view va, vb, v0, v1;
        if (find_key(v, "alpha", va) && find_key(v, "beta", vb) && find_key(v, "lambda0", v0) &&
            find_key(v, "lambda1", v1)) {
          a = parse_double(va, "alpha");
          b = parse_double(vb, "beta");
          l0 = parse_double(v0, "lambda0");
          l1 = parse_double(v1, "lambda1");
          have_params = true;
        }
      }
      if (find_key(v, "seed", val)) {
        const auto res = std::from_chars(val.data(), val.data() + val.size(), seed);
        if (res.ec != std::errc()) throw ValidationError("event log: malformed seed");
      }
      continue;
    }
    if (!have_header) {
      if (v != "time,x1,x2,regime") throw ValidationError("event log: missing column header");
      have_header = true;
      continue;
    }
    const auto f = split(v, ',');
    if (f.size() != 4) {
      throw ValidationError("event log: expected 4 columns on line " + std::to_string(line_no));
    }
    const double t = parse_double(f[0], "time");
    const Point2 x{parse_double(f[1], "x1"), parse_double(f[2], "x2")};
    const double r = parse_double(f[3], "regime");
    if (r != 0.0 && r != 1.0) throw ValidationError("event log: regime must be 0 or 1");
    const Regime reg = r == 0.0 ? Regime::zero : Regime::one;
    if (!have_initial) {
      initial = {x, reg};
      have_initial = true;
      continue;
    }
    if (!(t > prev_time)) throw ValidationError("event log: switch times must increase");
    const Regime expected = events.empty() ? other(initial.regime) : other(events.back().entered);
    if (reg != expected) throw ValidationError("event log: regimes must alternate");
    events.push_back({t, t - prev_time, x, reg});
    prev_time = t;
  }
  if (!have_params) throw ValidationError("event log: missing '# params' line");
  if (!have_initial) throw ValidationError("event log: no initial state row");
  EventLog log{SwitchingParams(a, b, l0, l1), seed, initial, std::move(events), prev_time};
  return log;
}

void write_grid_field(std::ostream& os, const GridField& field,
                      const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  const Rect& b = field.bounds();
  os << "kind," << (field.kind() == GridField::Kind::cdf ? "cdf" : "density") << '\n';
  os << "n1," << field.n1() << '\n';
  os << "n2," << field.n2() << '\n';
  os << "bounds," << num(b.x1_lo) << ',' << num(b.x1_hi) << ',' << num(b.x2_lo) << ','
     << num(b.x2_hi) << '\n';
  for (int i1 = 0; i1 < field.n1(); ++i1) {
    for (int i2 = 0; i2 < field.n2(); ++i2) {
      os << i1 << ',' << i2 << ',' << num(field.at(Regime::zero, i1, i2)) << ','
         << num(field.at(Regime::one, i1, i2)) << '\n';
    }
  }
}

GridField read_grid_field(std::istream& is) {
  std::string line;
  std::vector<std::string> header;
  while (header.size() < 4 && std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    header.push_back(line);
  }
  if (header.size() < 4) throw ValidationError("grid field: truncated header");
  auto field_of = [&](int k, std::string_view key) {
    const auto f = split(header[k], ',');
    if (f.empty() || f[0] != key) {
      throw ValidationError("grid field: header line " + std::to_string(k + 1) + " must start with " +
                            std::string(key));
    }
    return f;
  };
  const auto kind_f = field_of(0, "kind");
  if (kind_f.size() != 2 || (kind_f[1] != "cdf" && kind_f[1] != "density")) {
    throw ValidationError("grid field: kind must be cdf or density");
  }
  const auto n1_f = field_of(1, "n1");
  const auto n2_f = field_of(2, "n2");
  const auto b_f = field_of(3, "bounds");
  if (n1_f.size() != 2 || n2_f.size() != 2 || b_f.size() != 5) {
    throw ValidationError("grid field: malformed header");
  }
  const double n1d = parse_double(n1_f[1], "n1"), n2d = parse_double(n2_f[1], "n2");
  if (n1d != std::floor(n1d) || n2d != std::floor(n2d) || n1d < 1 || n2d < 1 || n1d * n2d > 1e9) {
    throw ValidationError("grid field: bad resolution");
  }
  const Rect bounds{parse_double(b_f[1], "bounds"), parse_double(b_f[2], "bounds"),
                    parse_double(b_f[3], "bounds"), parse_double(b_f[4], "bounds")};
  GridField g(kind_f[1] == "cdf" ? GridField::Kind::cdf : GridField::Kind::density,
              static_cast<int>(n1d), static_cast<int>(n2d), bounds);
  std::vector<char> seen(g.size(), 0);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw ValidationError("grid field: expected 4 columns per row");
    const double i1 = parse_double(f[0], "i1"), i2 = parse_double(f[1], "i2");
    if (i1 < 0 || i2 < 0 || i1 >= g.n1() || i2 >= g.n2() || i1 != std::floor(i1) ||
        i2 != std::floor(i2)) {
      throw ValidationError("grid field: index out of range");
    }
    const std::size_t k = g.flat(static_cast<int>(i1), static_cast<int>(i2));
    if (seen[k]) throw ValidationError("grid field: duplicate row");
    seen[k] = 1;
    g.values(Regime::zero)[k] = parse_double(f[2], "value0");
    g.values(Regime::one)[k] = parse_double(f[3], "value1");
    ++rows;
  }
  if (rows != g.size()) throw ValidationError("grid field: missing rows");
  return g;
}

void save_event_log(const std::string& path, const EventLog& log,
                    const std::vector<std::string>& comments) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  write_event_log(os, log, comments);
  if (!os) throw Error("write failed: " + path);
}

EventLog load_event_log(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path);
  return read_event_log(is);
}

void save_grid_field(const std::string& path, const GridField& field,
                     const std::vector<std::string>& comments) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  write_grid_field(os, field, comments);
  if (!os) throw Error("write failed: " + path);
}

GridField load_grid_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path);
  return read_grid_field(is);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

template <class T>
T get_as(const json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string(what) + ": missing or mistyped key '" + key + "'");
  }
}

json vec2(const Eigen::Vector2d& v) { return json::array({v(0), v(1)}); }

Eigen::Vector2d read_vec2(const json& j, const char* key) {
  const auto v = get_as<std::vector<double>>(j, key, "system");
  if (v.size() != 2) throw ValidationError(std::string("system: '") + key + "' needs 2 numbers");
  return {v[0], v[1]};
}

json params_json(const SwitchingParams& p) {
  return {{"alpha", p.alpha()}, {"beta", p.beta()}, {"lambda0", p.lambda0()},
          {"lambda1", p.lambda1()}, {"gamma", p.gamma()}};
}

json flags_json(const DensityFlags& f, bool first) {
  auto s = [](Tri t) { return std::string(to_string(t)); };
  json j;
  j[first ? "origin_singular" : "corner_one_singular"] = s(f.corner_singular);
  j[first ? "left_boundary_singular" : "right_boundary_singular"] = s(f.boundary_singular);
  j["bounded_interior"] = s(f.bounded_interior);
  j[first ? "bounded_on_gamma0_compacts" : "bounded_on_gamma1_compacts"] =
      s(f.bounded_on_boundary_compacts);
  j[first ? "bounded_off_left_boundary" : "bounded_off_right_boundary"] = s(f.bounded_off_boundary);
  json crit = json::array();
  if (f.critical_corner) crit.push_back(first ? "lambda0 = alpha+beta" : "lambda1 = alpha+beta");
  if (f.critical_boundary) crit.push_back(first ? "lambda1 = beta" : "lambda0 = beta");
  j["critical_flags"] = crit;
  j[first ? "conjectured_bounded_left_boundary" : "conjectured_bounded_right_boundary"] =
      f.conjectured_bounded_boundary;
  return j;
}

}  // namespace

std::string to_json(const SolverConfig& cfg) {
  return json{{"grid", cfg.grid},
              {"panels_per_unit_time", cfg.panels_per_unit_time},
              {"gl_order", cfg.gl_order},
              {"tol", cfg.tol},
              {"max_iter", cfg.max_iter},
              {"cutoff_eps", cfg.cutoff_eps}}
      .dump(2);
}

SolverConfig solver_config_from_json(std::string_view text, SolverConfig base) {
  const json j = parse_json(text, "solver config");
  if (!j.is_object()) throw ValidationError("solver config: expected a JSON object");
  try {
    if (j.contains("grid")) base.grid = j["grid"].get<int>();
    if (j.contains("panels_per_unit_time")) base.panels_per_unit_time = j["panels_per_unit_time"].get<double>();
    if (j.contains("gl_order")) base.gl_order = j["gl_order"].get<int>();
    if (j.contains("tol")) base.tol = j["tol"].get<double>();
    if (j.contains("max_iter")) base.max_iter = j["max_iter"].get<int>();
    if (j.contains("cutoff_eps")) base.cutoff_eps = j["cutoff_eps"].get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("solver config: ") + e.what());
  }
  base.validate();
  return base;
}

std::string to_json(const GeneralSystem& sys) {
  return json{{"A", {sys.A(0, 0), sys.A(0, 1), sys.A(1, 0), sys.A(1, 1)}},
              {"b0", vec2(sys.b0)},
              {"b1", vec2(sys.b1)},
              {"lambda0", sys.lambda0},
              {"lambda1", sys.lambda1}}
      .dump(2);
}

GeneralSystem general_system_from_json(std::string_view text) {
  const json j = parse_json(text, "system");
  if (!j.is_object()) throw ValidationError("system: expected a JSON object");
  GeneralSystem sys;
  const auto a = get_as<std::vector<double>>(j, "A", "system");
  if (a.size() != 4) throw ValidationError("system: 'A' needs 4 numbers (row-major)");
  sys.A << a[0], a[1], a[2], a[3];
  sys.b0 = read_vec2(j, "b0");
  sys.b1 = read_vec2(j, "b1");
  sys.lambda0 = get_as<double>(j, "lambda0", "system");
  sys.lambda1 = get_as<double>(j, "lambda1", "system");
  if (!(sys.lambda0 > 0.0 && sys.lambda1 > 0.0)) {
    throw ValidationError("system: invariant violated: lambda0 > 0 and lambda1 > 0");
  }
  return sys;
}

std::string to_json(const Conjugacy& c) {
  return json{{"G", {{c.G(0, 0), c.G(0, 1)}, {c.G(1, 0), c.G(1, 1)}}},
              {"shift0", vec2(c.shift0)},
              {"shift1", vec2(c.shift1)},
              {"params", params_json(c.params)}}
      .dump(2);
}

std::string to_json(const RegimeReport& r) {
  return json{{"params", params_json(r.params)},
              {"rho0", flags_json(r.rho0, true)},
              {"rho1", flags_json(r.rho1, false)}}
      .dump(2);
}

std::string to_json(const ScalingFit& f) {
  return json{{"epsilons", f.epsilons},
              {"masses", f.masses},
              {"visits", f.visits},
              {"slope", f.slope},
              {"slope_stderr", f.slope_stderr},
              {"dropped_epsilons", f.dropped_epsilons},
              {"warnings", f.warnings}}
      .dump(2);
}

}  // namespace pdmplab
