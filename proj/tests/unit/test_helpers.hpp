#pragma once

#include <cmath>
#include <random>

#include <pdmplab/geometry.hpp>
#include <pdmplab/types.hpp>

namespace testing_support {

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) / scale;
}

inline double rel_err(pdmplab::Point2 a, pdmplab::Point2 b) {
  return std::max(rel_err(a.x1, b.x1), rel_err(a.x2, b.x2));
}

/// Uniform point of the interior of Gamma by rejection.
template <class Gen>
pdmplab::Point2 random_interior_point(const pdmplab::SwitchingParams& p, Gen& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const pdmplab::Point2 x{u(gen), u(gen)};
    if (pdmplab::in_gamma_interior(p, x)) return x;
  }
}

}  // namespace testing_support
