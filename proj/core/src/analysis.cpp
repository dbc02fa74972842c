#include "pdmplab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "pdmplab/errors.hpp"
#include "pdmplab/flow.hpp"

namespace pdmplab {

std::string_view to_string(Tri t) {
  switch (t) {
    case Tri::yes: return "yes";
    case Tri::no: return "no";
    case Tri::open: return "open";
  }
  return "open";
}

namespace {

int compare(double a, double b) {
  if (std::abs(a - b) <= kCriticalRelTol * std::max(std::abs(a), std::abs(b))) return 0;
  return a < b ? -1 : 1;
}

// Flags for the density of the field with switching rate `own`; `away` is
// the rate of the other field.
DensityFlags density_flags(double alpha, double beta, double own, double away) {
  const int c_corner = compare(own, alpha + beta);
  const int c_boundary = compare(away, beta);
  const int c_own_beta = compare(own, beta);
  DensityFlags f;
  f.critical_corner = c_corner == 0;
  f.critical_boundary = c_boundary == 0;

  if (c_corner < 0 || c_boundary < 0) {
    f.corner_singular = Tri::yes;
  } else if (c_corner > 0 && c_boundary > 0) {
    f.corner_singular = Tri::no;
  }
  if (c_boundary < 0) {
    f.boundary_singular = Tri::yes;
  } else if (c_boundary > 0) {
    f.boundary_singular = Tri::no;
  }
  if (c_corner > 0 && c_boundary > 0) {
    f.bounded_interior = Tri::yes;
  } else if (c_corner < 0 || c_boundary < 0) {
    f.bounded_interior = Tri::no;
  }
  if (c_own_beta > 0 && c_boundary > 0) {
    f.bounded_on_boundary_compacts = Tri::yes;
  } else if (c_boundary < 0) {
    f.bounded_on_boundary_compacts = Tri::no;
  }
  f.bounded_off_boundary = Tri::yes;
  f.conjectured_bounded_boundary = c_own_beta <= 0 && c_boundary > 0;
  return f;
}

}  // namespace

RegimeReport classify_regime(const SwitchingParams& p) {
  return {p, density_flags(p.alpha(), p.beta(), p.lambda0(), p.lambda1()),
          density_flags(p.alpha(), p.beta(), p.lambda1(), p.lambda0())};
}

std::vector<double> default_eps_grid() {
  std::vector<double> eps(8);
  for (int k = 0; k < 8; ++k) eps[k] = 0.3 * std::ldexp(1.0, -k);
  return eps;
}

ScalingFit fit_scaling(const std::vector<double>& eps, const std::vector<double>& masses,
                       const std::vector<std::uint64_t>& visits, std::uint64_t min_visits) {
  if (eps.size() != masses.size() || (!visits.empty() && visits.size() != eps.size())) {
    throw ValidationError("fit_scaling: input lengths differ");
  }
  ScalingFit fit;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const bool few = !visits.empty() && visits[k] < min_visits;
    if (few || !(masses[k] > 0.0)) {
      fit.dropped_epsilons.push_back(eps[k]);
      std::ostringstream msg;
      msg << "scale eps=" << eps[k] << " dropped: ";
      if (few) {
        msg << visits[k] << " visits < " << min_visits;
      } else {
        msg << "zero mass";
      }
      fit.warnings.push_back(msg.str());
      continue;
    }
    fit.epsilons.push_back(eps[k]);
    fit.masses.push_back(masses[k]);
    if (!visits.empty()) fit.visits.push_back(visits[k]);
  }
  const std::size_t m = fit.epsilons.size();
  if (m < 3) throw InsufficientDataError("scaling fit: fewer than 3 usable scales");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mx += std::log(fit.epsilons[k]);
    my += std::log(fit.masses[k]);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = std::log(fit.epsilons[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(fit.masses[k]) - my);
  }
  fit.slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double r = std::log(fit.masses[k]) - my - fit.slope * (std::log(fit.epsilons[k]) - mx);
    ssr += r * r;
  }
  fit.slope_stderr = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
  return fit;
}

namespace {

void check_eps(const std::vector<double>& eps) {
  if (eps.size() < 4) throw ValidationError("scaling: at least 4 scales are required");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0 && eps[k] < 1.0)) throw ValidationError("scaling: scales must lie in (0,1)");
    if (k > 0 && !(eps[k] < eps[k - 1])) {
      throw ValidationError("scaling: scales must be strictly decreasing");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

CornerMassAccumulator::CornerMassAccumulator(const SwitchingParams& p, std::vector<double> eps,
                                             Regime corner, double burn_in)
    : params_(p), eps_(std::move(eps)), corner_(corner), burn_in_(burn_in) {
  check_eps(eps_);
  for (double e : eps_) log_eps_.push_back(std::log(e));
  time_.assign(eps_.size(), 0.0);
  visits_.assign(eps_.size(), 0);
}

void CornerMassAccumulator::add(const Segment& raw) {
  const Segment seg = raw.clipped_after(params_, burn_in_);
  if (!(seg.duration > 0.0)) return;
  total_ += seg.duration;
  if (seg.regime != corner_) return;
  // Distance to the sink contracts as e^{-alpha t}, e^{-beta t}; the box of
  // scale eps is entered at max(ln d1 / alpha, ln d2 / beta) - ln eps.
  const Point2 d = corner_ == Regime::zero ? seg.start : symmetry_conjugate(seg.start);
  if (!(d.x1 > 0.0 && d.x2 > 0.0)) {
    for (std::size_t k = 0; k < eps_.size(); ++k) {
      time_[k] += seg.duration;
      ++visits_[k];
    }
    return;
  }
  const double e = std::max(std::log(d.x1) / params_.alpha(), std::log(d.x2) / params_.beta());
  for (std::size_t k = 0; k < eps_.size(); ++k) {
    const double enter = std::max(0.0, e - log_eps_[k]);
    if (enter >= seg.duration) break;  // smaller boxes are entered later still
    time_[k] += seg.duration - enter;
    ++visits_[k];
  }
}

void CornerMassAccumulator::merge(const CornerMassAccumulator& other) {
  if (other.eps_ != eps_ || other.corner_ != corner_) {
    throw ValidationError("CornerMassAccumulator::merge: configurations differ");
  }
  for (std::size_t k = 0; k < eps_.size(); ++k) {
    time_[k] += other.time_[k];
    visits_[k] += other.visits_[k];
  }
  total_ += other.total_;
}

std::vector<double> CornerMassAccumulator::masses() const {
  if (!(total_ > 0.0)) throw InsufficientDataError("corner mass: no time left after burn-in");
  std::vector<double> m(time_);
  for (double& v : m) v /= total_;
  return m;
}

ScalingFit CornerMassAccumulator::fit(std::uint64_t min_visits) const {
  return fit_scaling(eps_, masses(), visits_, min_visits);
}

bool in_strip(const SwitchingParams& p, double eps, double t_lo, double t_hi, Point2 x) {
  if (!(x.x1 > 0.0)) return false;
  const double t = -std::log(x.x1) / p.alpha();
  if (!(t > t_lo && t < t_hi)) return false;
  const double top = std::pow(x.x1, 1.0 / p.gamma());
  const double bottom = (1.0 - std::pow(eps, p.beta())) * top;
  return x.x2 > bottom && x.x2 < top;
}

double strip_area(const SwitchingParams& p, double eps, double t_lo, double t_hi) {
  if (!(t_hi > t_lo)) return 0.0;
  const double k = 1.0 + 1.0 / p.gamma();
  const double lo = std::exp(-p.alpha() * t_hi), hi = std::exp(-p.alpha() * t_lo);
  return std::pow(eps, p.beta()) * (std::pow(hi, k) - std::pow(lo, k)) / k;
}

StripMassAccumulator::StripMassAccumulator(const SwitchingParams& p, std::vector<double> eps,
                                           double t_anchor, double burn_in)
    : params_(p), eps_(std::move(eps)), t_anchor_(t_anchor), burn_in_(burn_in) {
  check_eps(eps_);
  if (!(t_anchor > 0.0)) throw ValidationError("strip scaling: t_anchor must be > 0");
  time_.assign(eps_.size(), 0.0);
  visits_.assign(eps_.size(), 0);
}

void StripMassAccumulator::add(const Segment& raw) {
  const Segment seg = raw.clipped_after(params_, burn_in_);
  if (!(seg.duration > 0.0)) return;
  total_ += seg.duration;
  if (seg.regime != Regime::zero || !(seg.start.x1 > 0.0)) return;
  const double t0 = -std::log(seg.start.x1) / params_.alpha();
  const double r = seg.start.x2 / std::pow(seg.start.x1, 1.0 / params_.gamma());
  if (!(r < 1.0)) return;
  for (std::size_t k = 0; k < eps_.size(); ++k) {
    if (!(r > 1.0 - std::pow(eps_[k], params_.beta()))) break;  // strips shrink with eps
    const double lo = std::max(t0, t_anchor_);
    const double hi = std::min(t0 + seg.duration, t_anchor_ + std::pow(eps_[k], params_.alpha()));
    if (hi > lo) {
      time_[k] += hi - lo;
      ++visits_[k];
    }
  }
}

void StripMassAccumulator::merge(const StripMassAccumulator& other) {
  if (other.eps_ != eps_ || other.t_anchor_ != t_anchor_) {
    throw ValidationError("StripMassAccumulator::merge: configurations differ");
  }
  for (std::size_t k = 0; k < eps_.size(); ++k) {
    time_[k] += other.time_[k];
    visits_[k] += other.visits_[k];
  }
  total_ += other.total_;
}

std::vector<double> StripMassAccumulator::masses() const {
  if (!(total_ > 0.0)) throw InsufficientDataError("strip mass: no time left after burn-in");
  std::vector<double> m(time_);
  for (double& v : m) v /= total_;
  return m;
}

ScalingFit StripMassAccumulator::fit(std::uint64_t min_visits) const {
  return fit_scaling(eps_, masses(), visits_, min_visits);
}

ScalingFit corner_mass_scaling(const SwitchingParams& p, const EventLog& log,
                               const std::vector<double>& eps, double burn_in, Regime corner) {
  CornerMassAccumulator acc(p, eps, corner, burn_in);
  for (std::size_t k = 0; k < log.segment_count(); ++k) acc.add(log.segment(k));
  return acc.fit();
}

ScalingFit corner_mass_scaling(const SwitchingParams& p, const GridField& cdf,
                               const std::vector<double>& eps, Regime corner) {
  check_eps(eps);
  if (cdf.kind() != GridField::Kind::cdf) throw ValidationError("corner_mass_scaling: expects a CDF field");
  std::vector<double> kept, masses;
  std::vector<std::string> notes;
  std::vector<double> dropped;
  for (double e : eps) {
    const double a = std::pow(e, p.alpha()), b = std::pow(e, p.beta());
    if (a < cdf.spacing1() || b < cdf.spacing2()) {
      dropped.push_back(e);
      std::ostringstream msg;
      msg << "scale eps=" << e << " dropped: box narrower than one grid cell";
      notes.push_back(msg.str());
      continue;
    }
    double m;
    if (corner == Regime::zero) {
      m = cdf.interpolate(Regime::zero, {a, b});
    } else {
      auto G = [&](double x1, double x2) { return cdf.interpolate(Regime::one, {x1, x2}); };
      m = G(1, 1) - G(1 - a, 1) - G(1, 1 - b) + G(1 - a, 1 - b);
    }
    kept.push_back(e);
    masses.push_back(m);
  }
  ScalingFit fit = fit_scaling(kept, masses, {}, 0);
  fit.dropped_epsilons.insert(fit.dropped_epsilons.begin(), dropped.begin(), dropped.end());
  fit.warnings.insert(fit.warnings.begin(), notes.begin(), notes.end());
  return fit;
}

ScalingFit boundary_strip_scaling(const SwitchingParams& p, const EventLog& log, double t_anchor,
                                  const std::vector<double>& eps, double burn_in) {
  StripMassAccumulator acc(p, eps, t_anchor, burn_in);
  for (std::size_t k = 0; k < log.segment_count(); ++k) acc.add(log.segment(k));
  return acc.fit();
}

// ---------------------------------------------------------------------------

Cdf1D beta_marginal_oracle(const SwitchingParams& p, Axis axis, Regime regime) {
  const double a = axis == Axis::x1 ? p.alpha() : p.beta();
  const double own = p.lambda(regime), away = p.lambda(other(regime));
  const double pa = own / a, pb = away / a + 1.0;
  if (regime == Regime::zero) {
    return [pa, pb](double q) {
      if (q <= 0.0) return 0.0;
      if (q >= 1.0) return 1.0;
      return boost::math::ibeta(pa, pb, q);
    };
  }
  return [pa, pb](double q) {
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    return 1.0 - boost::math::ibeta(pa, pb, 1.0 - q);
  };
}

Cdf1D marginal_from_cdf(const GridField& cdf, Regime regime, Axis axis) {
  if (cdf.kind() != GridField::Kind::cdf) throw ValidationError("marginal_from_cdf: expects a CDF field");
  const double total = cdf.interpolate(regime, {1.0, 1.0});
  if (!(total > 0.0)) throw InsufficientDataError("marginal_from_cdf: regime has no mass");
  return [&cdf, regime, axis, total](double q) {
    const Point2 x = axis == Axis::x1 ? Point2{q, 1.0} : Point2{1.0, q};
    return cdf.interpolate(regime, x) / total;
  };
}

double ks_distance(const Cdf1D& a, const Cdf1D& b, int points) {
  if (points < 2) throw ValidationError("ks_distance: need at least 2 evaluation points");
  double d = 0.0;
  for (int k = 0; k < points; ++k) {
    const double q = static_cast<double>(k) / (points - 1);
    d = std::max(d, std::abs(a(q) - b(q)));
  }
  return d;
}

MarginalHistogram::MarginalHistogram(int bins) : bins_(bins) {
  if (bins < 1) throw ValidationError("MarginalHistogram: bins must be >= 1");
  for (auto& r : h_) {
    for (auto& v : r) v.assign(bins, 0.0);
  }
}

void MarginalHistogram::add(Point2 x, Regime r, double w) {
  const int i = index(r);
  auto bin = [this](double q) {
    return std::clamp(static_cast<int>(q * bins_), 0, bins_ - 1);
  };
  h_[i][0][bin(x.x1)] += w;
  h_[i][1][bin(x.x2)] += w;
  sum_w_[i] += w;
  sum_w2_[i] += w * w;
}

void MarginalHistogram::merge(const MarginalHistogram& other) {
  if (other.bins_ != bins_) throw ValidationError("MarginalHistogram::merge: bin counts differ");
  for (int i = 0; i < 2; ++i) {
    for (int a = 0; a < 2; ++a) {
      for (int k = 0; k < bins_; ++k) h_[i][a][k] += other.h_[i][a][k];
    }
    sum_w_[i] += other.sum_w_[i];
    sum_w2_[i] += other.sum_w2_[i];
  }
}

Cdf1D MarginalHistogram::cdf(Regime r, Axis axis) const {
  const int i = index(r);
  if (!(sum_w_[i] > 0.0)) throw InsufficientDataError("MarginalHistogram: regime has no samples");
  std::vector<double> edges(bins_ + 1, 0.0);
  const auto& h = h_[i][axis == Axis::x1 ? 0 : 1];
  for (int k = 0; k < bins_; ++k) edges[k + 1] = edges[k] + h[k] / sum_w_[i];
  const int n = bins_;
  return [edges = std::move(edges), n](double q) {
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    const double u = q * n;
    const int k = std::min(static_cast<int>(u), n - 1);
    const double f = u - k;
    return (1 - f) * edges[k] + f * edges[k + 1];
  };
}

double MarginalHistogram::effective_samples(Regime r) const {
  const int i = index(r);
  return sum_w2_[i] > 0.0 ? sum_w_[i] * sum_w_[i] / sum_w2_[i] : 0.0;
}

ContractionReport wasserstein_decay_check(const SwitchingParams& p,
                                          const std::vector<std::pair<Point2, Point2>>& pairs,
                                          std::uint64_t n_events, std::uint64_t seed,
                                          double rel_slack) {
  ContractionReport rep;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto run = coupled_contraction_run(p, pairs[k].first, pairs[k].second, n_events,
                                             Rng::stream(seed, k)());
    const double r0 = run.front().separation;
    for (const SeparationRecord& rec : run) {
      const double ratio = r0 > 0.0 ? rec.separation / r0 : 0.0;
      const double bound = std::exp(-p.beta() * rec.time);
      // ratio / bound, evaluated without underflow
      const double excess = r0 > 0.0 ? rec.scaled_separation / r0 : 0.0;
      rep.rows.push_back({static_cast<int>(k), rec.time, ratio, bound});
      rep.worst = std::max(rep.worst, excess);
      if (excess > 1.0 + rel_slack) {
        std::ostringstream msg;
        msg << "contraction bound violated: pair " << k << " t=" << rec.time << " ratio=" << ratio
            << " bound=" << bound;
        throw NumericalFailure(msg.str());
      }
    }
  }
  return rep;
}

}  // namespace pdmplab
