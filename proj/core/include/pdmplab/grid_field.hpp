#pragma once

#include <span>
#include <vector>

#include "pdmplab/types.hpp"

namespace pdmplab {

struct Rect {
  double x1_lo = 0.0;
  double x1_hi = 1.0;
  double x2_lo = 0.0;
  double x2_hi = 1.0;
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// A pair of scalar fields (one per regime) sampled on a uniform grid.
///
/// Density fields hold cell averages: sample (i1, i2) belongs to the cell
/// centred at lo + (i + 1/2) h with h = (hi - lo)/n.
/// CDF fields hold node values: sample (i1, i2) sits at lo + i h with
/// h = (hi - lo)/(n - 1), so both edges of the rectangle are nodes.
/// Storage is row-major in i1: index = i1 * n2 + i2.
class GridField {
 public:
  enum class Kind { density, cdf };

  GridField(Kind kind, int n1, int n2, Rect bounds = {});

  Kind kind() const noexcept { return kind_; }
  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  const Rect& bounds() const noexcept { return bounds_; }
  std::size_t size() const noexcept { return values0_.size(); }

  std::size_t flat(int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i1) * static_cast<std::size_t>(n2_) + i2;
  }
  double spacing1() const noexcept;
  double spacing2() const noexcept;
  /// Coordinate of sample index i along axis 1 or 2.
  double coord1(int i1) const noexcept;
  double coord2(int i2) const noexcept;
  Point2 point(int i1, int i2) const noexcept { return {coord1(i1), coord2(i2)}; }

  std::span<double> values(Regime r) noexcept { return r == Regime::zero ? values0_ : values1_; }
  std::span<const double> values(Regime r) const noexcept {
    return r == Regime::zero ? values0_ : values1_;
  }
  double& at(Regime r, int i1, int i2) noexcept { return values(r)[flat(i1, i2)]; }
  double at(Regime r, int i1, int i2) const noexcept { return values(r)[flat(i1, i2)]; }

  /// Bilinear interpolation between samples. CDF layers are evaluated at
  /// the argument clamped into the bounds (exact when the measure lives
  /// inside them); density layers return 0 outside the bounds.
  double interpolate(Regime r, Point2 x) const noexcept;

  /// Sum of samples times cell area (density fields only).
  double mass(Regime r) const;

 private:
  Kind kind_;
  int n1_;
  int n2_;
  Rect bounds_;
  std::vector<double> values0_;
  std::vector<double> values1_;
};

/// Bilinear interpolation of a single node-valued layer laid out like a
/// CDF GridField, with the argument clamped into the rectangle.
double interpolate_nodes(std::span<const double> nodes, int n1, int n2, const Rect& b,
                         Point2 x) noexcept;

}  // namespace pdmplab
