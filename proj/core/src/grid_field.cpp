#include "pdmplab/grid_field.hpp"

#include <algorithm>
#include <cmath>

#include "pdmplab/errors.hpp"

namespace pdmplab {

GridField::GridField(Kind kind, int n1, int n2, Rect bounds)
    : kind_(kind), n1_(n1), n2_(n2), bounds_(bounds) {
  const int min_n = kind == Kind::cdf ? 2 : 1;
  if (n1 < min_n || n2 < min_n) throw ValidationError("GridField: resolution too small");
  if (!(bounds.x1_hi > bounds.x1_lo) || !(bounds.x2_hi > bounds.x2_lo)) {
    throw ValidationError("GridField: empty bounds");
  }
  values0_.assign(static_cast<std::size_t>(n1) * n2, 0.0);
  values1_.assign(static_cast<std::size_t>(n1) * n2, 0.0);
}

double GridField::spacing1() const noexcept {
  const double w = bounds_.x1_hi - bounds_.x1_lo;
  return kind_ == Kind::cdf ? w / (n1_ - 1) : w / n1_;
}

double GridField::spacing2() const noexcept {
  const double w = bounds_.x2_hi - bounds_.x2_lo;
  return kind_ == Kind::cdf ? w / (n2_ - 1) : w / n2_;
}

double GridField::coord1(int i1) const noexcept {
  const double off = kind_ == Kind::cdf ? 0.0 : 0.5;
  if (kind_ == Kind::cdf && i1 == n1_ - 1) return bounds_.x1_hi;
  return bounds_.x1_lo + (i1 + off) * spacing1();
}

double GridField::coord2(int i2) const noexcept {
  const double off = kind_ == Kind::cdf ? 0.0 : 0.5;
  if (kind_ == Kind::cdf && i2 == n2_ - 1) return bounds_.x2_hi;
  return bounds_.x2_lo + (i2 + off) * spacing2();
}

namespace {

// Fractional sample coordinate of x along one axis, clamped to [0, n-1].
inline void locate(double u, int n, int& i, double& f) {
  if (n == 1 || u <= 0.0) {
    i = 0;
    f = 0.0;
    return;
  }
  if (u >= n - 1) {
    i = n - 2;
    f = 1.0;
    return;
  }
  i = static_cast<int>(u);
  if (i > n - 2) i = n - 2;
  f = u - i;
}

inline double bilinear(std::span<const double> v, int n1, int n2, double u1, double u2) {
  int i1, i2;
  double f1, f2;
  locate(u1, n1, i1, f1);
  locate(u2, n2, i2, f2);
  if (n1 == 1 || n2 == 1) {
    // Degenerate axis: linear along the other one.
    const std::size_t base = static_cast<std::size_t>(i1) * n2 + i2;
    if (n1 == 1 && n2 == 1) return v[0];
    if (n1 == 1) return (1 - f2) * v[base] + f2 * v[base + 1];
    return (1 - f1) * v[base] + f1 * v[base + n2];
  }
  const std::size_t a = static_cast<std::size_t>(i1) * n2 + i2;
  const std::size_t b = a + n2;
  return (1 - f1) * ((1 - f2) * v[a] + f2 * v[a + 1]) + f1 * ((1 - f2) * v[b] + f2 * v[b + 1]);
}

}  // namespace

double interpolate_nodes(std::span<const double> nodes, int n1, int n2, const Rect& b,
                         Point2 x) noexcept {
  const double u1 = (x.x1 - b.x1_lo) / (b.x1_hi - b.x1_lo) * (n1 - 1);
  const double u2 = (x.x2 - b.x2_lo) / (b.x2_hi - b.x2_lo) * (n2 - 1);
  return bilinear(nodes, n1, n2, u1, u2);
}

double GridField::interpolate(Regime r, Point2 x) const noexcept {
  if (kind_ == Kind::cdf) return interpolate_nodes(values(r), n1_, n2_, bounds_, x);
  if (x.x1 < bounds_.x1_lo || x.x1 > bounds_.x1_hi || x.x2 < bounds_.x2_lo ||
      x.x2 > bounds_.x2_hi) {
    return 0.0;
  }
  const double u1 = (x.x1 - bounds_.x1_lo) / spacing1() - 0.5;
  const double u2 = (x.x2 - bounds_.x2_lo) / spacing2() - 0.5;
  return bilinear(values(r), n1_, n2_, u1, u2);
}

double GridField::mass(Regime r) const {
  if (kind_ != Kind::density) throw ValidationError("GridField::mass needs a density field");
  double sum = 0.0;
  for (double v : values(r)) sum += v;
  return sum * spacing1() * spacing2();
}

}  // namespace pdmplab
