#pragma once

// Regime classification, singularity-scaling diagnostics and
// distributional oracles.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pdmplab/grid_field.hpp"
#include "pdmplab/simulate.hpp"
#include "pdmplab/types.hpp"

namespace pdmplab {

enum class Tri { yes, no, open };
std::string_view to_string(Tri t);

/// Flags for one density. For rho0 "corner" is (0,0) and "boundary" the
/// left curve; for rho1 they are (1,1) and the right curve.
struct DensityFlags {
  Tri corner_singular = Tri::open;
  Tri boundary_singular = Tri::open;
  Tri bounded_interior = Tri::open;
  Tri bounded_on_boundary_compacts = Tri::open;
  Tri bounded_off_boundary = Tri::yes;
  bool critical_corner = false;    // lambda_i = alpha + beta
  bool critical_boundary = false;  // lambda_{1-i} = beta
  bool conjectured_bounded_boundary = false;
};

struct RegimeReport {
  SwitchingParams params{2.0, 1.0, 1.0, 1.0};
  DensityFlags rho0;
  DensityFlags rho1;
};

/// Relative tolerance used to decide the equality cases.
inline constexpr double kCriticalRelTol = 1e-12;

RegimeReport classify_regime(const SwitchingParams& p);

struct ScalingFit {
  std::vector<double> epsilons;  // scales kept in the fit, decreasing
  std::vector<double> masses;
  std::vector<std::uint64_t> visits;
  std::vector<double> dropped_epsilons;
  std::vector<std::string> warnings;
  double slope = 0.0;
  double slope_stderr = 0.0;
};

/// 8 scales, 0.3 down to 0.3 * 2^-7.
std::vector<double> default_eps_grid();

/// Least-squares slope of log(mass) against log(eps). Scales whose visit
/// count is below min_visits (or whose mass is not positive) are dropped
/// with a warning; fewer than 3 remaining scales raise
/// InsufficientDataError. Pass an empty `visits` to skip the count check.
ScalingFit fit_scaling(const std::vector<double>& eps, const std::vector<double>& masses,
                       const std::vector<std::uint64_t>& visits, std::uint64_t min_visits);

inline constexpr std::uint64_t kMinVisits = 100;

/// Exact occupation of the boxes [0, e^alpha] x [0, e^beta] (corner (0,0),
/// regime-0 time) or [1 - e^alpha, 1] x [1 - e^beta, 1] (corner (1,1),
/// regime-1 time) for every scale, normalised by total post-burn-in time.
class CornerMassAccumulator {
 public:
  CornerMassAccumulator(const SwitchingParams& p, std::vector<double> eps, Regime corner,
                        double burn_in);
  void add(const Segment& seg);
  void merge(const CornerMassAccumulator& other);
  std::vector<double> masses() const;
  const std::vector<std::uint64_t>& visits() const noexcept { return visits_; }
  ScalingFit fit(std::uint64_t min_visits = kMinVisits) const;
  double total_time() const noexcept { return total_; }

 private:
  SwitchingParams params_;
  std::vector<double> eps_;
  std::vector<double> log_eps_;
  Regime corner_;
  double burn_in_;
  std::vector<double> time_;
  std::vector<std::uint64_t> visits_;
  double total_ = 0.0;
};

/// Strip R_eps(I) = { x1 in phi1(I), x2 in I_eps(x1) } with
/// phi1(t) = e^{-alpha t}, I_eps(z) = ((1 - eps^beta) z^{1/gamma}, z^{1/gamma}).
bool in_strip(const SwitchingParams& p, double eps, double t_lo, double t_hi, Point2 x);
/// Lebesgue measure of R_eps((t_lo, t_hi)).
double strip_area(const SwitchingParams& p, double eps, double t_lo, double t_hi);

/// Exact regime-0 occupation of R_eps((t_anchor, t_anchor + eps^alpha)) for
/// every scale. Along u0 the strip coordinate t(x1) = -ln(x1)/alpha grows
/// at unit rate and x2 / x1^{1/gamma} is constant, so the time spent is an
/// interval intersection.
class StripMassAccumulator {
 public:
  StripMassAccumulator(const SwitchingParams& p, std::vector<double> eps, double t_anchor,
                       double burn_in);
  void add(const Segment& seg);
  void merge(const StripMassAccumulator& other);
  std::vector<double> masses() const;
  const std::vector<std::uint64_t>& visits() const noexcept { return visits_; }
  ScalingFit fit(std::uint64_t min_visits = kMinVisits) const;
  double total_time() const noexcept { return total_; }

 private:
  SwitchingParams params_;
  std::vector<double> eps_;
  double t_anchor_;
  double burn_in_;
  std::vector<double> time_;
  std::vector<std::uint64_t> visits_;
  double total_ = 0.0;
};

inline constexpr double kDefaultStripAnchor = 0.5;

ScalingFit corner_mass_scaling(const SwitchingParams& p, const EventLog& log,
                               const std::vector<double>& eps, double burn_in,
                               Regime corner = Regime::zero);
/// Same estimate read off a solver CDF; scales whose box is narrower than
/// one grid cell are dropped.
ScalingFit corner_mass_scaling(const SwitchingParams& p, const GridField& cdf,
                               const std::vector<double>& eps, Regime corner = Regime::zero);
ScalingFit boundary_strip_scaling(const SwitchingParams& p, const EventLog& log, double t_anchor,
                                  const std::vector<double>& eps, double burn_in);

using Cdf1D = std::function<double(double)>;

enum class Axis { x1, x2 };

/// Normalised marginal CDF of rho_regime along the axis: the regularised
/// incomplete beta function with parameters (lambda0/a, lambda1/a + 1),
/// a = alpha or beta, for regime 0; reflected with swapped rates for
/// regime 1.
Cdf1D beta_marginal_oracle(const SwitchingParams& p, Axis axis, Regime regime);

/// Normalised marginal read off a CDF field: G_i(q, 1)/G_i(1, 1) or
/// G_i(1, q)/G_i(1, 1).
Cdf1D marginal_from_cdf(const GridField& cdf, Regime regime, Axis axis);

/// sup |a(q) - b(q)| over `points` equally spaced q in [0, 1].
double ks_distance(const Cdf1D& a, const Cdf1D& b, int points = 1000);

/// Weighted marginal histograms of sampled positions, one per regime and
/// axis, on `bins` equal bins of [0, 1].
class MarginalHistogram {
 public:
  explicit MarginalHistogram(int bins = 4000);
  void add(Point2 x, Regime r, double w);
  void merge(const MarginalHistogram& other);
  /// Piecewise-linear normalised CDF through the bin edges.
  Cdf1D cdf(Regime r, Axis axis) const;
  /// Kish effective sample size (sum w)^2 / sum w^2 of the regime.
  double effective_samples(Regime r) const;

 private:
  int bins_;
  std::vector<double> h_[2][2];
  double sum_w_[2] = {0.0, 0.0};
  double sum_w2_[2] = {0.0, 0.0};
};

struct ContractionRow {
  int pair = 0;
  double time = 0.0;
  double ratio = 0.0;  // |r_t| / |r_0|
  double bound = 0.0;  // e^{-beta t}
};

struct ContractionReport {
  std::vector<ContractionRow> rows;
  /// max over rows of ratio / bound.
  double worst = 0.0;
};

/// Coupled runs from each pair; throws NumericalFailure naming the first
/// record with ratio > bound (1 + 1e-9).
ContractionReport wasserstein_decay_check(const SwitchingParams& p,
                                          const std::vector<std::pair<Point2, Point2>>& pairs,
                                          std::uint64_t n_events, std::uint64_t seed,
                                          double rel_slack = 1e-9);

}  // namespace pdmplab
