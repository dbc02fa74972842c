#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace pdmplab {

/// A point of the plane in canonical coordinates.
struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x1, s * a.x2}; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x1, p.x2); }

/// Index of the driving vector field. Field u0 has its sink at (0,0),
/// field u1 at (1,1).
enum class Regime : std::uint8_t { zero = 0, one = 1 };

constexpr int index(Regime r) { return static_cast<int>(r); }
constexpr Regime other(Regime r) { return r == Regime::zero ? Regime::one : Regime::zero; }
/// Throws ValidationError unless i is 0 or 1.
Regime regime_from_index(int i);

/// The four rates of the canonical switching system. Construction
/// validates alpha > beta > 0 and positive switching rates.
class SwitchingParams {
 public:
  SwitchingParams(double alpha, double beta, double lambda0, double lambda1);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double lambda0() const noexcept { return lambda0_; }
  double lambda1() const noexcept { return lambda1_; }
  /// Rate of switching away from the given field.
  double lambda(Regime r) const noexcept { return r == Regime::zero ? lambda0_ : lambda1_; }
  /// alpha / beta, strictly greater than one.
  double gamma() const noexcept { return alpha_ / beta_; }
  /// Stationary probability of the given regime, lambda_{1-i}/(lambda0+lambda1).
  double mass(Regime r) const noexcept { return lambda(other(r)) / (lambda0_ + lambda1_); }
  /// Contraction rate of the given coordinate (1 -> alpha, 2 -> beta).
  double rate(int coordinate) const noexcept { return coordinate == 1 ? alpha_ : beta_; }

  /// Same flows with lambda0 and lambda1 exchanged.
  SwitchingParams swapped() const { return {alpha_, beta_, lambda1_, lambda0_}; }
  /// Every rate multiplied by c > 0 (a change of time unit).
  SwitchingParams rescaled(double c) const;

  friend bool operator==(const SwitchingParams&, const SwitchingParams&) = default;

 private:
  double alpha_;
  double beta_;
  double lambda0_;
  double lambda1_;
};

struct HybridState {
  Point2 x;
  Regime regime = Regime::zero;
};

/// Strictly positive durations t1..tn, most recent last.
class TimeVector {
 public:
  TimeVector() = default;
  explicit TimeVector(std::vector<double> durations);
  TimeVector(std::initializer_list<double> durations)
      : TimeVector(std::vector<double>(durations)) {}

  std::span<const double> durations() const noexcept { return durations_; }
  std::size_t size() const noexcept { return durations_.size(); }
  bool empty() const noexcept { return durations_.empty(); }
  double total() const noexcept;

 private:
  std::vector<double> durations_;
};

/// Alternating product of switching rates with n factors, starting with
/// lambda_{1-i}: lambda_{1-i} lambda_i lambda_{1-i} ...
double rate_product(const SwitchingParams& p, Regime i, std::size_t n);

/// Rates that weight the n durations of a path ending in field i, most
/// recent last: the last entry is lambda_i, entries alternate backwards.
std::vector<double> rate_weights(const SwitchingParams& p, Regime i, std::size_t n);

}  // namespace pdmplab
