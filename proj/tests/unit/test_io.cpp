#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include <pdmplab/errors.hpp>
#include <pdmplab/io.hpp>

using namespace pdmplab;
using nlohmann::json;

namespace {
const SwitchingParams kP(2.0, 1.0, 3.0, 2.0);
}

TEST_CASE("event log round trip is exact") {
  const EventLog log = simulate(kP, kDefaultInitial, 500, 17);
  std::stringstream ss;
  write_event_log(ss, log, {"generated by a unit test"});
  const std::string text = ss.str();
  CHECK(text.rfind("# generated by a unit test\n", 0) == 0);
  CHECK(text.find("time,x1,x2,regime\n0,0.5,0.5,0\n") != std::string::npos);

  const EventLog back = read_event_log(ss);
  CHECK(back.params == log.params);
  CHECK(back.seed == 17);
  CHECK(back.initial.x == log.initial.x);
  REQUIRE(back.events.size() == log.events.size());
  bool exact = true;
  for (std::size_t k = 0; k < log.events.size(); ++k) {
    exact = exact && back.events[k].time == log.events[k].time && back.events[k].x == log.events[k].x &&
            back.events[k].entered == log.events[k].entered;
  }
  CHECK(exact);
  CHECK(back.total_time == log.total_time);
}

TEST_CASE("malformed event logs") {
  const std::string head = "# params alpha=2 beta=1 lambda0=3 lambda1=2\ntime,x1,x2,regime\n";
  auto parse = [](const std::string& s) {
    std::istringstream is(s);
    return read_event_log(is);
  };
  CHECK_NOTHROW(parse(head + "0,0.5,0.5,0\n0.3,0.2,0.3,1\n"));
  CHECK_THROWS_AS(parse("time,x1,x2,regime\n0,0.5,0.5,0\n"), ValidationError);
  CHECK_THROWS_AS(parse(head), ValidationError);
  CHECK_THROWS_AS(parse(head + "0,0.5,0.5,0\n0.3,0.2,0.3,0\n"), ValidationError);
  CHECK_THROWS_AS(parse(head + "0,0.5,0.5,0\n0.3,0.2,0.3,1\n0.2,0.2,0.3,0\n"), ValidationError);
  CHECK_THROWS_AS(parse(head + "0,0.5,0.5,2\n"), ValidationError);
  CHECK_THROWS_AS(parse(head + "0,0.5,abc,0\n"), ValidationError);
  CHECK_THROWS_AS(parse(head + "0,0.5,0.5\n"), ValidationError);
  CHECK_THROWS_AS(parse("# params alpha=1 beta=2 lambda0=3 lambda1=2\ntime,x1,x2,regime\n0,0.5,0.5,0\n"),
                  ValidationError);
}

TEST_CASE("grid field round trip") {
  GridField g(GridField::Kind::density, 3, 4, Rect{0.0, 1.0, 0.25, 0.75});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      g.at(Regime::zero, i, j) = 0.1 * i + 1.0 / (j + 3);
      g.at(Regime::one, i, j) = -1e-300 * j;
    }
  }
  std::stringstream ss;
  write_grid_field(ss, g, {"seed=1"});
  const GridField back = read_grid_field(ss);
  CHECK(back.kind() == g.kind());
  CHECK(back.n1() == 3);
  CHECK(back.n2() == 4);
  CHECK(back.bounds() == g.bounds());
  bool exact = true;
  for (Regime r : {Regime::zero, Regime::one}) {
    for (std::size_t k = 0; k < g.size(); ++k) exact = exact && back.values(r)[k] == g.values(r)[k];
  }
  CHECK(exact);
}

TEST_CASE("malformed grid fields") {
  auto parse = [](const std::string& s) {
    std::istringstream is(s);
    return read_grid_field(is);
  };
  const std::string head = "kind,cdf\nn1,2\nn2,2\nbounds,0,1,0,1\n";
  const std::string rows = "0,0,0,0\n0,1,0,0\n1,0,0,0\n1,1,0.6,0.4\n";
  CHECK_NOTHROW(parse("# comment\n" + head + rows));
  CHECK_THROWS_AS(parse("kind,other\nn1,2\nn2,2\nbounds,0,1,0,1\n" + rows), ValidationError);
  CHECK_THROWS_AS(parse(head + "0,0,0,0\n"), ValidationError);
  CHECK_THROWS_AS(parse(head + rows + "1,1,0,0\n"), ValidationError);
  CHECK_THROWS_AS(parse(head + "0,0,0,0\n0,1,0,0\n1,0,0,0\n2,1,0.6,0.4\n"), ValidationError);
  CHECK_THROWS_AS(parse("kind,cdf\nn1,2\n"), ValidationError);
}

TEST_CASE("solver config JSON") {
  SolverConfig cfg;
  cfg.grid = 96;
  cfg.tol = 1e-8;
  const SolverConfig back = solver_config_from_json(to_json(cfg));
  CHECK(back.grid == 96);
  CHECK(back.tol == 1e-8);
  CHECK(back.gl_order == cfg.gl_order);
  const SolverConfig partial = solver_config_from_json(R"({"max_iter": 7})", cfg);
  CHECK(partial.max_iter == 7);
  CHECK(partial.grid == 96);
  CHECK_THROWS_AS(solver_config_from_json("{grid: 3"), ValidationError);
  CHECK_THROWS_AS(solver_config_from_json(R"({"grid": "big"})"), ValidationError);
  CHECK_THROWS_AS(solver_config_from_json("[1,2]"), ValidationError);
}

TEST_CASE("general system JSON") {
  GeneralSystem sys;
  sys.A << -3.0, 1.0, 0.5, -1.5;
  sys.b0 << 0.2, -0.1;
  sys.b1 << 1.0, 2.0;
  sys.lambda0 = 0.7;
  sys.lambda1 = 1.9;
  const GeneralSystem back = general_system_from_json(to_json(sys));
  CHECK(back.A == sys.A);
  CHECK(back.b0 == sys.b0);
  CHECK(back.b1 == sys.b1);
  CHECK(back.lambda0 == 0.7);
  CHECK(back.lambda1 == 1.9);
  CHECK_THROWS_AS(general_system_from_json(R"({"A":[1,2,3],"b0":[0,0],"b1":[1,1],"lambda0":1,"lambda1":1})"),
                  ValidationError);
  CHECK_THROWS_AS(general_system_from_json(R"({"A":[-2,0,0,-1],"b0":[0,0],"b1":[1,1],"lambda0":1})"),
                  ValidationError);
  CHECK_THROWS_AS(general_system_from_json(R"({"A":[-2,0,0,-1],"b0":[0,0],"b1":[1,1],"lambda0":-1,"lambda1":1})"),
                  ValidationError);
}

TEST_CASE("report JSON") {
  const json r = json::parse(to_json(classify_regime(SwitchingParams(2, 1, 3, 1))));
  CHECK(r["params"]["gamma"] == 2.0);
  CHECK(r["rho0"]["origin_singular"] == "open");
  CHECK(r["rho0"]["bounded_off_left_boundary"] == "yes");
  CHECK(r["rho0"]["critical_flags"].size() == 2);
  CHECK(r["rho1"]["corner_one_singular"] == "yes");
  CHECK(r["rho1"]["conjectured_bounded_right_boundary"] == true);

  ScalingFit f;
  f.epsilons = {0.3, 0.15};
  f.masses = {1e-2, 1e-3};
  f.slope = 3.3;
  const json jf = json::parse(to_json(f));
  CHECK(jf["slope"] == 3.3);
  CHECK(jf["epsilons"].size() == 2);

  const json jc = json::parse(to_json(reduce(preset_pde_modes(1, 2, 1.0, 1.0))));
  CHECK(jc["params"]["beta"].get<double>() == doctest::Approx(9.869604401089358));
}
