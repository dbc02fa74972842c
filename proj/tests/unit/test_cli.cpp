#include <doctest.h>

#include <cli.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

using nlohmann::json;
namespace fs = std::filesystem;
namespace cli = pdmplab::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
  fs::create_directories(PDMPLAB_TEST_TMPDIR);
  return (fs::path(PDMPLAB_TEST_TMPDIR) / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

// JSON document printed before any trailing verdict line
json leading_json(const std::string& out) {
  const auto end = out.rfind("\n}\n");
  REQUIRE(end != std::string::npos);
  return json::parse(out.substr(0, end + 2));
}

const std::vector<std::string> kParams = {"--alpha", "2", "--beta", "1", "--lambda0", "1", "--lambda1", "2"};

std::vector<std::string> with_params(std::vector<std::string> head, std::vector<std::string> tail = {}) {
  head.insert(head.end(), kParams.begin(), kParams.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("missing or invalid parameters are validation errors") {
  CHECK(run({"classify", "--beta", "1", "--lambda0", "1", "--lambda1", "1"}).code == cli::kExitValidation);
  const Result r = run({"classify", "--alpha", "1", "--beta", "2", "--lambda0", "1", "--lambda1", "1"});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("alpha > beta") != std::string::npos);
  CHECK(run({"classify", "--alpha", "2", "--beta", "1", "--lambda0", "-1", "--lambda1", "1"}).code ==
        cli::kExitValidation);
  CHECK(run({}).code == cli::kExitValidation);
  CHECK(run({"frobnicate"}).code == cli::kExitValidation);
  CHECK(run({"solve", "--alpha", "2", "--beta", "1", "--lambda0", "1", "--lambda1", "1", "--method", "x"}).code ==
        cli::kExitValidation);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("classify reports the expected flags") {
  const Result r = run(with_params({"classify"}));
  REQUIRE(r.code == cli::kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["rho0"]["origin_singular"] == "yes");
  CHECK(j["rho0"]["left_boundary_singular"] == "no");
  CHECK(j["rho1"]["corner_one_singular"] == "yes");
  CHECK(j["rho1"]["critical_flags"].size() == 1);
  CHECK(j["provenance"]["version"] == PDMPLAB_VERSION);

  const json b = json::parse(
      run({"classify", "--alpha", "2", "--beta", "1", "--lambda0", "4", "--lambda1", "2"}).out);
  CHECK(b["rho0"]["origin_singular"] == "no");
  CHECK(b["rho0"]["bounded_interior"] == "yes");
}

TEST_CASE("simulate is byte-identical across runs with the same seed") {
  const auto a = tmp("sim_a"), b = tmp("sim_b");
  const Result ra = run(with_params({"simulate"}, {"--events", "3000", "--seed", "11", "--out", a}));
  const Result rb = run(with_params({"simulate"}, {"--events", "3000", "--seed", "11", "--out", b}));
  REQUIRE(ra.code == cli::kExitOk);
  REQUIRE(rb.code == cli::kExitOk);
  // the command line differs only in the output prefix
  auto strip = [](std::string s, const std::string& prefix) {
    for (auto at = s.find(prefix); at != std::string::npos; at = s.find(prefix)) s.erase(at, prefix.size());
    return s;
  };
  CHECK(strip(slurp(a + ".events.csv"), a) == strip(slurp(b + ".events.csv"), b));
  CHECK(strip(slurp(a + ".occupation.csv"), a) == strip(slurp(b + ".occupation.csv"), b));
  CHECK(slurp(a + ".events.csv").rfind("# pdmplab ", 0) == 0);

  const json j = json::parse(ra.out);
  CHECK(j["provenance"]["seed"] == 11);
  CHECK(std::abs(j["occupancy"]["fraction0"].get<double>() - 2.0 / 3.0) < 0.1);

  const auto c = tmp("sim_c");
  REQUIRE(run(with_params({"simulate"}, {"--events", "3000", "--seed", "12", "--out", c})).code == 0);
  CHECK(strip(slurp(a + ".events.csv"), a) != strip(slurp(c + ".events.csv"), c));
}

TEST_CASE("solve writes a monotone CDF and maps non-convergence to exit 3") {
  const auto path = tmp("cdf.csv");
  const Result r = run(with_params({"solve"}, {"--grid", "24", "--out", path}));
  REQUIRE(r.code == cli::kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["residuals"].back().get<double>() < 1e-6);
  CHECK(slurp(path).find("kind,cdf") != std::string::npos);

  const Result bad = run(with_params({"solve"}, {"--grid", "24", "--max-iter", "2", "--out", path}));
  CHECK(bad.code == cli::kExitConvergence);
  CHECK(bad.err.find("residual") != std::string::npos);

  const Result q2 = run(with_params({"solve"}, {"--grid", "16", "--method", "q2", "--out", tmp("q2.csv")}));
  REQUIRE(q2.code == cli::kExitOk);
  CHECK(std::abs(json::parse(q2.out)["mass_factor"].get<double>() - 1.0) < 0.2);
}

TEST_CASE("flags override values from --config") {
  const auto cfg = tmp("solve.json");
  std::ofstream(cfg) << R"({"alpha": 2, "beta": 1, "lambda0": 1, "lambda1": 2, "grid": 12, "tol": 1e-5})";
  const Result r = run({"solve", "--config", cfg, "--grid", "16", "--out", tmp("cfg.csv")});
  REQUIRE(r.code == cli::kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["config"]["grid"] == 16);
  CHECK(j["config"]["tol"] == doctest::Approx(1e-5));

  std::ofstream(tmp("bad.json")) << "{not json";
  CHECK(run({"solve", "--config", tmp("bad.json")}).code == cli::kExitValidation);
  CHECK(run({"solve", "--config", tmp("missing.json")}).code == cli::kExitValidation);
}

TEST_CASE("diagnose corner and strip on a fresh run") {
  const Result r = run(with_params({"diagnose", "corner"}, {"--events", "400000", "--seed", "3"}));
  REQUIRE(r.code == cli::kExitOk);
  const json j = leading_json(r.out);
  CHECK(j["fit"]["slope"].get<double>() == doctest::Approx(1.0).epsilon(0.15));
  CHECK(r.out.find("verdict: corner") != std::string::npos);
  CHECK(r.out.find("consistent") != std::string::npos);

  const Result s = run(with_params({"diagnose", "strip"}, {"--events", "400000", "--seed", "3"}));
  REQUIRE(s.code == cli::kExitOk);
  CHECK(s.out.find("verdict: strip") != std::string::npos);
}

TEST_CASE("diagnose reads event logs and reports insufficient data") {
  const auto prefix = tmp("short");
  REQUIRE(run(with_params({"simulate"}, {"--events", "300", "--seed", "1", "--out", prefix})).code == 0);
  const Result r = run({"diagnose", "corner", "--log", prefix + ".events.csv"});
  CHECK(r.code == cli::kExitInsufficientData);

  const Result m = run({"diagnose", "marginals", "--log", prefix + ".events.csv", "--burn-in", "1e9"});
  CHECK(m.code == cli::kExitInsufficientData);

  // parameters on the command line must agree with the log
  const Result clash = run({"diagnose", "corner", "--log", prefix + ".events.csv", "--alpha", "3", "--beta",
                            "1", "--lambda0", "1", "--lambda1", "2"});
  CHECK(clash.code == cli::kExitValidation);
}

TEST_CASE("diagnose marginals and contraction") {
  const Result m = run(with_params({"diagnose", "marginals"}, {"--events", "200000", "--seed", "5"}));
  REQUIRE(m.code == cli::kExitOk);
  const json j = leading_json(m.out);
  CHECK(j["ks"]["regime0"]["x1"].get<double>() < 0.02);

  const Result c = run(with_params({"diagnose", "contraction"}, {"--events", "2000", "--pairs", "3"}));
  REQUIRE(c.code == cli::kExitOk);
  CHECK(leading_json(c.out)["worst_ratio_over_bound"].get<double>() <= 1.0 + 1e-12);
}

TEST_CASE("reduce presets, verification and chaining") {
  const Result g = run({"reduce", "--preset", "gene-expression", "--alpha-prod", "5", "--delta", "2",
                        "--beta-prod", "3", "--gamma", "1", "--lambda0", "1.5", "--lambda1", "0.5", "--verify"});
  REQUIRE(g.code == cli::kExitOk);
  const json jg = json::parse(g.out);
  CHECK(jg["verify"]["passed"] == true);
  CHECK(jg["conjugacy"]["params"]["alpha"] == doctest::Approx(2.0));
  CHECK(jg["conjugacy"]["params"]["beta"] == doctest::Approx(1.0));

  const Result same = run({"reduce", "--preset", "gene-expression", "--alpha-prod", "5", "--delta", "1",
                           "--beta-prod", "3", "--gamma", "1", "--lambda0", "1.5", "--lambda1", "0.5"});
  CHECK(same.code == cli::kExitUnsupported);

  const Result pde = run({"reduce", "--preset", "pde-modes", "--lambda0", "1", "--lambda1", "2"});
  REQUIRE(pde.code == cli::kExitOk);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(json::parse(pde.out)["conjugacy"]["params"]["alpha"] == doctest::Approx(4 * pi2));

  const Result chained =
      run({"reduce", "--preset", "pde-modes", "--lambda0", "1", "--lambda1", "2", "--", "classify"});
  REQUIRE(chained.code == cli::kExitOk);
  // two JSON documents: the reduction, then the classification
  const auto split = chained.out.find("\n}\n");
  REQUIRE(split != std::string::npos);
  const json cls = json::parse(chained.out.substr(split + 3));
  CHECK(cls["params"]["alpha"] == doctest::Approx(4 * pi2));
  CHECK(cls["params"]["beta"] == doctest::Approx(pi2));

  CHECK(run({"reduce"}).code == cli::kExitValidation);
  CHECK(run({"reduce", "--preset", "gene-expression", "--delta", "2"}).code == cli::kExitValidation);
}
