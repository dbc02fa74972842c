#include "pdmplab/quadrature.hpp"

#include <array>
#include <cmath>
#include <algorithm>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "pdmplab/errors.hpp"

namespace pdmplab {

namespace {

constexpr int kMaxOrder = 20;

template <int N>
GaussLegendre build_rule() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  GaussLegendre g;
  // Boost stores the nonnegative half; a zero node appears first for odd N.
  for (std::size_t k = x.size(); k-- > 0;) {
    if (x[k] == 0.0) continue;
    g.nodes.push_back(-x[k]);
    g.weights.push_back(w[k]);
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    g.nodes.push_back(x[k]);
    g.weights.push_back(w[k]);
  }
  return g;
}

template <int... Is>
std::array<GaussLegendre, sizeof...(Is)> build_all(std::integer_sequence<int, Is...>) {
  return {build_rule<Is + 1>()...};
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw ValidationError("Gauss-Legendre order must lie in [1, 20]");
  }
  static const auto rules = build_all(std::make_integer_sequence<int, kMaxOrder>{});
  return rules[order - 1];
}

int panels_for(double a, double b, double max_panel) {
  if (!(b > a)) return 0;
  return std::max(1, static_cast<int>(std::ceil((b - a) / max_panel - 1e-12)));
}

}  // namespace pdmplab
