#pragma once

#include <vector>

namespace pdmplab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const noexcept { return static_cast<int>(nodes.size()); }
};

/// Rule with `order` nodes, 1 <= order <= 20. Rules are built once and
/// cached; the returned reference stays valid for the program lifetime.
const GaussLegendre& gauss_legendre(int order);

/// Composite rule: [a, b] split into `panels` equal panels.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, const GaussLegendre& rule) {
  if (!(b > a) || panels < 1) return 0.0;
  const double h = (b - a) / panels;
  const double half = 0.5 * h;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    for (int j = 0; j < rule.order(); ++j) sum += rule.weights[j] * f(mid + half * rule.nodes[j]);
  }
  return sum * half;
}

/// Number of panels of length at most `max_panel` needed to cover [a, b].
int panels_for(double a, double b, double max_panel);

}  // namespace pdmplab
