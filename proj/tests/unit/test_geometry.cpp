#include <doctest.h>

#include <cmath>
#include <random>

#include <pdmplab/errors.hpp>
#include <pdmplab/flow.hpp>
#include <pdmplab/geometry.hpp>

#include "test_helpers.hpp"

using namespace pdmplab;
using testing_support::random_interior_point;

namespace {
const SwitchingParams kP(2.0, 1.0, 1.0, 1.0);
}

TEST_CASE("classify_point examples") {
  CHECK(classify_point(kP, {0.5, 0.5}) == RegionLabel::diagonal);
  CHECK(classify_point(kP, {0.0, 0.0}) == RegionLabel::corner_origin);
  CHECK(classify_point(kP, {1.0, 1.0}) == RegionLabel::corner_one);
  CHECK(classify_point(kP, {0.9, 0.1}) == RegionLabel::outside);
  CHECK(classify_point(kP, {0.25, 0.5}) == RegionLabel::boundary_left);
  CHECK(classify_point(kP, {0.75, 0.5}) == RegionLabel::boundary_right);
  CHECK(classify_point(kP, {0.3, 0.5}) == RegionLabel::interior_left);
  CHECK(classify_point(kP, {0.6, 0.5}) == RegionLabel::interior_right);
  CHECK(classify_point(kP, {0.5, 1.2}) == RegionLabel::outside);
  CHECK(classify_point(kP, {-0.1, 0.0}) == RegionLabel::outside);
  // tolerance widens the boundary band
  CHECK(classify_point(kP, {0.25 - 1e-10, 0.5}, 1e-12) == RegionLabel::outside);
  CHECK(classify_point(kP, {0.25 - 1e-10, 0.5}, 1e-9) == RegionLabel::boundary_left);
  CHECK(to_string(RegionLabel::interior_left) == "interior_left");
}

TEST_CASE("mirror symmetry of labels") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  for (int k = 0; k < 20000; ++k) {
    const Point2 x{u(gen), u(gen)};
    CHECK(classify_point(kP, symmetry_conjugate(x)) == mirror(classify_point(kP, x)));
  }
  for (const Point2 x : {Point2{0.0, 0.0}, Point2{0.25, 0.5}, Point2{0.4, 0.4}}) {
    CHECK(classify_point(kP, symmetry_conjugate(x)) == mirror(classify_point(kP, x)));
  }
}

TEST_CASE("boundary curves") {
  CHECK(boundary_curve(kP, Side::left, 0.0) == Point2{1.0, 1.0});
  CHECK(boundary_curve(kP, Side::right, 0.0) == Point2{0.0, 0.0});
  const Point2 far = boundary_curve(kP, Side::right, 40.0);
  CHECK(far.x1 == doctest::Approx(1.0));
  CHECK(far.x2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(boundary_curve(kP, Side::left, -1.0), ValidationError);
  const SwitchingParams q(3.0, 1.3, 1.0, 1.0);
  for (double t = 0.0; t < 10.0; t += 0.37) {
    const Point2 y = boundary_curve(q, Side::left, t);
    CHECK(std::abs(y.x1 - std::pow(y.x2, q.gamma())) <= 1e-12 * y.x1);
    // x1 = x2^2 for alpha = 2 beta
    const Point2 z = boundary_curve(kP, Side::left, t);
    CHECK(std::abs(z.x1 - z.x2 * z.x2) <= 1e-12 * z.x1);
  }
}

TEST_CASE("positive invariance of Gamma") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0), ut(0.0, 50.0);
  const SwitchingParams p(2.0, 1.0, 3.0, 2.0);
  for (int k = 0; k < 10000; ++k) {
    Point2 x{u(gen), u(gen)};
    if (!in_gamma(p, x)) continue;
    const Regime i = k % 2 ? Regime::one : Regime::zero;
    CHECK(classify_point(p, flow_forward(p, i, ut(gen), x), kSimulationTol) != RegionLabel::outside);
  }
}

TEST_CASE("rect_meets_interior") {
  CHECK(rect_meets_interior(kP, 0.0, 0.1, 0.0, 0.1));
  CHECK_FALSE(rect_meets_interior(kP, 0.9, 1.0, 0.0, 0.1));
  CHECK_FALSE(rect_meets_interior(kP, 0.0, 0.1, 0.9, 1.0));
  CHECK(rect_meets_interior(kP, 0.45, 0.55, 0.45, 0.55));
  // sampled cross-check on a 16x16 grid
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      bool hit = false;
      for (int k = 0; k < 4000 && !hit; ++k) {
        hit = in_gamma_interior(kP, {(i + u(gen)) / 16.0, (j + u(gen)) / 16.0});
      }
      if (hit) CHECK(rect_meets_interior(kP, i / 16.0, (i + 1) / 16.0, j / 16.0, (j + 1) / 16.0));
    }
  }
}

TEST_CASE("alignment time") {
  CHECK(alignment_time(kP, Regime::zero, {0.5, 0.5}) == 0.0);
  // 0.4 e^{2 theta} = 0.2 e^{theta}; the point (0.4, 0.2) lies outside Gamma
  // for these rates, so the closed form is checked directly.
  const double theta = std::log(0.2 / 0.4) / (2.0 - 1.0);
  CHECK(theta == doctest::Approx(-0.6931471805599453));
  const Point2 x{0.6, 0.5};
  const double th = alignment_time(kP, Regime::zero, x);
  const Point2 z = flow_backward(kP, Regime::zero, th, x);
  CHECK(std::abs(z.x1 - z.x2) < 1e-12);
  const double th1 = alignment_time(kP, Regime::one, x);
  const Point2 z1 = flow_backward(kP, Regime::one, th1, x);
  CHECK(std::abs(z1.x1 - z1.x2) < 1e-12);
  CHECK_THROWS_AS(alignment_time(kP, Regime::zero, {0.0, 0.0}), ValidationError);

  // det U changes sign exactly once along the backward orbit
  const Point2 y{0.3, 0.45};
  const double ty = alignment_time(kP, Regime::zero, y);
  int changes = 0;
  double prev = det_transversality(kP, flow_backward(kP, Regime::zero, -3.0, y));
  for (int k = 1; k <= 1000; ++k) {
    const double t = -3.0 + 6.0 * k / 1000.0;
    const double d = det_transversality(kP, flow_backward(kP, Regime::zero, t, y));
    if ((d > 0) != (prev > 0)) {
      ++changes;
      CHECK(std::abs(t - ty) < 6.0 / 1000.0 + 1e-12);
    }
    prev = d;
  }
  CHECK(changes == 1);
}

TEST_CASE("exit time") {
  std::mt19937_64 gen(6);
  const double tol = 1e-12;
  for (int k = 0; k < 300; ++k) {
    const Point2 x = random_interior_point(kP, gen);
    const Regime i = k % 2 ? Regime::one : Regime::zero;
    const double r = exit_time(kP, i, x, tol);
    CHECK(r > 0.0);
    if (r > 4 * tol) CHECK(in_gamma_interior(kP, flow_backward(kP, i, r - 2 * tol, x)));
    CHECK_FALSE(in_gamma_interior(kP, flow_backward(kP, i, r + 2 * tol, x)));
    if (i == Regime::zero) CHECK(r < -std::log(x.x2) / kP.beta());
  }
  // near the opposite boundary the exit time vanishes
  const Point2 near_right{1.0 - std::pow(0.5, 2.0) - 1e-9, 0.5};
  CHECK(exit_time(kP, Regime::zero, near_right) < 1e-6);
  CHECK_THROWS_AS(exit_time(kP, Regime::zero, {0.9, 0.1}), ValidationError);
}

TEST_CASE("alignment and exit times shift along orbits") {
  std::mt19937_64 gen(8);
  const double h = 1e-4;
  for (int k = 0; k < 200; ++k) {
    const Point2 x = random_interior_point(kP, gen);
    const Regime i = k % 2 ? Regime::one : Regime::zero;
    const Point2 xh = flow_forward(kP, i, h, x);
    if (!in_gamma_interior(kP, xh)) continue;
    // the backward orbit from Phi^h(x) needs h more time to reach the same point
    CHECK(std::abs(exit_time(kP, i, xh) - (exit_time(kP, i, x) + h)) < 1e-9);
    if (std::abs(x.x1 - x.x2) > 1e-6) {
      CHECK(std::abs(alignment_time(kP, i, xh) - (alignment_time(kP, i, x) + h)) < 1e-9);
    }
  }
}

TEST_CASE("two-switch reachability") {
  const Point2 x{0.5, 0.5}, y{0.3, 0.4};
  const auto sol = reach_two_switch(kP, x, y);
  CHECK(sol.s >= 0.0);
  CHECK(sol.t >= 0.0);
  CHECK(norm(sol.replay(kP, x) - y) < 1e-9);

  const auto same = reach_two_switch(kP, x, x);
  CHECK(norm(same.replay(kP, x) - x) < 1e-9);

  std::mt19937_64 gen(10);
  int ok = 0;
  const int trials = 10000;
  for (int k = 0; k < trials; ++k) {
    const Point2 a = random_interior_point(kP, gen), b = random_interior_point(kP, gen);
    const auto s = reach_two_switch(kP, a, b);
    if (s.s >= 0.0 && s.t >= 0.0 && norm(s.replay(kP, a) - b) < 1e-9) ++ok;
  }
  CHECK(ok == trials);
}
