#include "pdmplab/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "pdmplab/errors.hpp"
#include "pdmplab/geometry.hpp"

namespace pdmplab {

Segment Segment::clipped_after(const SwitchingParams& p, double from) const {
  const double end = start_time + duration;
  if (end <= from) return {from, 0.0, position(p, duration), regime};
  if (start_time >= from) return *this;
  const double elapsed = from - start_time;
  return {from, duration - elapsed, position(p, elapsed), regime};
}

Segment EventLog::segment(std::size_t k) const {
  const Event& e = events[k];
  if (k == 0) return {0.0, e.duration, initial.x, initial.regime};
  const Event& prev = events[k - 1];
  return {prev.time, e.duration, prev.x, prev.entered};
}

Simulator::Simulator(const SwitchingParams& p, HybridState initial, Rng rng)
    : params_(p), state_(initial), rng_(rng) {}

Segment Simulator::next() {
  const double tau = rng_.exponential(params_.lambda(state_.regime));
  const Segment seg{time_, tau, state_.x, state_.regime};
  state_.x = flow_forward(params_, state_.regime, tau, state_.x);
  state_.regime = other(state_.regime);
  time_ += tau;
  return seg;
}

double default_burn_in(const SwitchingParams& p) { return 50.0 / p.beta(); }

EventLog simulate(const SwitchingParams& p, HybridState initial, std::uint64_t n_events,
                  std::uint64_t seed) {
  if (n_events < 1) throw ValidationError("simulate: n_events must be >= 1");
  EventLog log{p, seed, initial, {}, 0.0};
  log.events.reserve(n_events);
  Simulator sim(p, initial, Rng::stream(seed, 0));
  for (std::uint64_t k = 0; k < n_events; ++k) {
    const Segment seg = sim.next();
    log.events.push_back({sim.time(), seg.duration, sim.state().x, sim.state().regime});
  }
  log.total_time = sim.time();
  return log;
}

std::vector<Point2> replay_positions(const EventLog& log) {
  std::vector<Point2> out;
  out.reserve(log.events.size());
  Point2 x = log.initial.x;
  Regime r = log.initial.regime;
  for (const Event& e : log.events) {
    x = flow_forward(log.params, r, e.duration, x);
    r = other(r);
    out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------

OccupationHistogram::OccupationHistogram(const SwitchingParams& p, GridSpec grid,
                                         int samples_per_interval, double burn_in,
                                         Rng sample_rng, double outside_tol)
    : params_(p),
      grid_(grid),
      k_(samples_per_interval),
      burn_in_(burn_in),
      rng_(sample_rng),
      tol_(outside_tol) {
  if (k_ < 1) throw ValidationError("samples per interval must be >= 1");
  if (grid.n1 < 1 || grid.n2 < 1) throw ValidationError("histogram resolution must be >= 1");
  weights0_.assign(static_cast<std::size_t>(grid.n1) * grid.n2, 0.0);
  weights1_.assign(weights0_.size(), 0.0);
}

void OccupationHistogram::add(const Segment& raw) {
  const Segment seg = raw.clipped_after(params_, burn_in_);
  if (!(seg.duration > 0.0)) return;
  const double w = seg.duration / k_;
  const Rect& b = grid_.bounds;
  const double s1 = grid_.n1 / (b.x1_hi - b.x1_lo);
  const double s2 = grid_.n2 / (b.x2_hi - b.x2_lo);
  auto& hist = seg.regime == Regime::zero ? weights0_ : weights1_;
  for (int k = 0; k < k_; ++k) {
    const Point2 x = seg.position(params_, rng_.uniform() * seg.duration);
    ++samples_;
    if (!in_gamma(params_, x, tol_)) ++outside_;
    if (on_sample) on_sample(x, seg.regime, w);
    const double u1 = (x.x1 - b.x1_lo) * s1;
    const double u2 = (x.x2 - b.x2_lo) * s2;
    if (u1 < 0.0 || u2 < 0.0 || u1 >= grid_.n1 || u2 >= grid_.n2) {
      ++off_grid_;
      continue;
    }
    hist[static_cast<std::size_t>(u1) * grid_.n2 + static_cast<std::size_t>(u2)] += w;
  }
  total_weight_ += seg.duration;
  regime_weight_[index(seg.regime)] += seg.duration;
}

void OccupationHistogram::merge(const OccupationHistogram& other) {
  if (other.grid_.n1 != grid_.n1 || other.grid_.n2 != grid_.n2 ||
      !(other.grid_.bounds == grid_.bounds)) {
    throw ValidationError("OccupationHistogram::merge: grids differ");
  }
  for (std::size_t i = 0; i < weights0_.size(); ++i) {
    weights0_[i] += other.weights0_[i];
    weights1_[i] += other.weights1_[i];
  }
  total_weight_ += other.total_weight_;
  regime_weight_[0] += other.regime_weight_[0];
  regime_weight_[1] += other.regime_weight_[1];
  samples_ += other.samples_;
  outside_ += other.outside_;
  off_grid_ += other.off_grid_;
}

GridField OccupationHistogram::finish() const {
  if (!(total_weight_ > 0.0)) {
    throw InsufficientDataError("occupation estimate: no time left after burn-in");
  }
  GridField f(GridField::Kind::density, grid_.n1, grid_.n2, grid_.bounds);
  const double norm_const = 1.0 / (total_weight_ * f.spacing1() * f.spacing2());
  auto v0 = f.values(Regime::zero);
  auto v1 = f.values(Regime::one);
  for (std::size_t i = 0; i < weights0_.size(); ++i) {
    v0[i] = weights0_[i] * norm_const;
    v1[i] = weights1_[i] * norm_const;
  }
  return f;
}

GridField estimate_occupation(const EventLog& log, GridSpec grid, int samples_per_interval,
                              double burn_in) {
  OccupationHistogram hist(log.params, grid, samples_per_interval, burn_in,
                           Rng::stream(log.seed, 1));
  for (std::size_t k = 0; k < log.segment_count(); ++k) hist.add(log.segment(k));
  return hist.finish();
}

// ---------------------------------------------------------------------------

namespace {

struct Crossing {
  double time;
  int axis;  // 0 -> x1, 1 -> x2
  int cell;  // cell index after the crossing
};

// Appends the grid-line crossings of one coordinate along a segment, in
// increasing time order.
// log_dist[j] = ln|j/n - centre|, precomputed per grid.
void coordinate_crossings(double a, double end, double centre, double rate, int n, int axis,
                          const std::vector<double>& log_dist, int& start_cell,
                          std::vector<Crossing>& out) {
  const double log_a = std::log(std::abs(a - centre));
  const double scaled = a * n;
  if (end < a) {
    long idx = static_cast<long>(std::ceil(scaled)) - 1;
    idx = std::clamp<long>(idx, -1, n);
    start_cell = static_cast<int>(idx);
    for (long j = std::min<long>(idx, n); j >= 0; --j) {
      const double line = static_cast<double>(j) / n;
      if (!(line > end)) break;
      if (line >= a) continue;
      out.push_back({(log_a - log_dist[j]) / rate, axis, static_cast<int>(j - 1)});
    }
  } else if (end > a) {
    long idx = static_cast<long>(std::floor(scaled));
    idx = std::clamp<long>(idx, -1, n);
    start_cell = static_cast<int>(idx);
    for (long j = std::max<long>(idx + 1, 0); j <= n; ++j) {
      const double line = static_cast<double>(j) / n;
      if (!(line < end)) break;
      if (line <= a) continue;
      out.push_back({(log_a - log_dist[j]) / rate, axis, static_cast<int>(j)});
    }
  } else {
    long idx = static_cast<long>(std::floor(scaled));
    start_cell = static_cast<int>(std::clamp<long>(idx, -1, n));
  }
}

}  // namespace

ExactOccupation::ExactOccupation(const SwitchingParams& p, int cells, double burn_in)
    : params_(p), n_(cells), burn_in_(burn_in) {
  if (cells < 1) throw ValidationError("ExactOccupation: cells must be >= 1");
  t0_.assign(static_cast<std::size_t>(cells) * cells, 0.0);
  t1_.assign(t0_.size(), 0.0);
  for (int c = 0; c < 2; ++c) {
    log_dist_[c].resize(static_cast<std::size_t>(cells) + 1);
    for (int j = 0; j <= cells; ++j) {
      log_dist_[c][j] = std::log(std::abs(static_cast<double>(j) / cells - c));
    }
  }
}

void ExactOccupation::add(const Segment& raw) {
  const Segment seg = raw.clipped_after(params_, burn_in_);
  if (!(seg.duration > 0.0)) return;
  const Point2 end = seg.position(params_, seg.duration);
  const double centre = index(seg.regime);

  thread_local std::vector<Crossing> c1, c2;
  c1.clear();
  c2.clear();
  int i1 = 0, i2 = 0;
  const auto& logs = log_dist_[index(seg.regime)];
  coordinate_crossings(seg.start.x1, end.x1, centre, params_.alpha(), n_, 0, logs, i1, c1);
  coordinate_crossings(seg.start.x2, end.x2, centre, params_.beta(), n_, 1, logs, i2, c2);

  auto& cells = seg.regime == Regime::zero ? t0_ : t1_;
  auto deposit = [&](double dt) {
    if (dt > 0.0 && i1 >= 0 && i1 < n_ && i2 >= 0 && i2 < n_) {
      cells[static_cast<std::size_t>(i1) * n_ + i2] += dt;
    }
  };
  double last = 0.0;
  std::size_t a = 0, b = 0;
  while (a < c1.size() || b < c2.size()) {
    const bool take_first = b >= c2.size() || (a < c1.size() && c1[a].time <= c2[b].time);
    const Crossing& c = take_first ? c1[a++] : c2[b++];
    const double t = std::clamp(c.time, last, seg.duration);
    deposit(t - last);
    last = t;
    if (c.axis == 0) {
      i1 = c.cell;
    } else {
      i2 = c.cell;
    }
  }
  deposit(seg.duration - last);
  total_ += seg.duration;
  regime_time_[index(seg.regime)] += seg.duration;
}

void ExactOccupation::merge(const ExactOccupation& other) {
  if (other.n_ != n_) throw ValidationError("ExactOccupation::merge: grids differ");
  for (std::size_t i = 0; i < t0_.size(); ++i) {
    t0_[i] += other.t0_[i];
    t1_[i] += other.t1_[i];
  }
  total_ += other.total_;
  regime_time_[0] += other.regime_time_[0];
  regime_time_[1] += other.regime_time_[1];
}

GridField ExactOccupation::cdf() const {
  if (!(total_ > 0.0)) throw InsufficientDataError("empirical CDF: no time left after burn-in");
  GridField g(GridField::Kind::cdf, n_ + 1, n_ + 1);
  for (Regime r : {Regime::zero, Regime::one}) {
    const auto& t = r == Regime::zero ? t0_ : t1_;
    auto v = g.values(r);
    for (int k1 = 1; k1 <= n_; ++k1) {
      double row = 0.0;
      for (int k2 = 1; k2 <= n_; ++k2) {
        row += t[static_cast<std::size_t>(k1 - 1) * n_ + (k2 - 1)];
        v[g.flat(k1, k2)] = v[g.flat(k1 - 1, k2)] + row / total_;
      }
    }
  }
  return g;
}

GridField ExactOccupation::density() const {
  if (!(total_ > 0.0)) throw InsufficientDataError("occupation: no time left after burn-in");
  GridField f(GridField::Kind::density, n_, n_);
  const double c = static_cast<double>(n_) * n_ / total_;
  for (Regime r : {Regime::zero, Regime::one}) {
    const auto& t = r == Regime::zero ? t0_ : t1_;
    auto v = f.values(r);
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = t[i] * c;
  }
  return f;
}

GridField empirical_cdf(const EventLog& log, int nodes, double burn_in) {
  if (nodes < 2) throw ValidationError("empirical_cdf: need at least 2 nodes per axis");
  ExactOccupation occ(log.params, nodes - 1, burn_in);
  for (std::size_t k = 0; k < log.segment_count(); ++k) occ.add(log.segment(k));
  return occ.cdf();
}

// ---------------------------------------------------------------------------

std::vector<SeparationRecord> coupled_contraction_run(const SwitchingParams& p, Point2 x,
                                                      Point2 y, std::uint64_t n_events,
                                                      std::uint64_t seed,
                                                      Regime initial_regime) {
  Rng rng = Rng::stream(seed, 0);
  std::vector<SeparationRecord> out;
  out.reserve(n_events + 1);
  Point2 r = x - y;
  Point2 w = r;  // e^{beta t} r
  out.push_back({0.0, norm(r), r, norm(w)});
  Regime regime = initial_regime;
  double time = 0.0;
  for (std::uint64_t k = 0; k < n_events; ++k) {
    const double tau = rng.exponential(p.lambda(regime));
    x = flow_forward(p, regime, tau, x);
    y = flow_forward(p, regime, tau, y);
    const double d1 = std::exp(-p.alpha() * tau), d2 = std::exp(-p.beta() * tau);
    r = {r.x1 * d1, r.x2 * d2};
    w = {w.x1 * std::exp(-(p.alpha() - p.beta()) * tau), w.x2};
    time += tau;
    regime = other(regime);
    out.push_back({time, norm(r), r, norm(w)});
  }
  return out;
}

OccupancyEstimate occupancy_fraction(const EventLog& log, double burn_in, int batches) {
  std::vector<Segment> segs;
  segs.reserve(log.segment_count());
  for (std::size_t k = 0; k < log.segment_count(); ++k) {
    const Segment s = log.segment(k).clipped_after(log.params, burn_in);
    if (s.duration > 0.0) segs.push_back(s);
  }
  if (segs.size() < static_cast<std::size_t>(2 * batches) || batches < 2) {
    throw InsufficientDataError("occupancy_fraction: too few post-burn-in segments");
  }
  double t0 = 0.0, tt = 0.0;
  std::vector<double> frac(batches);
  for (int b = 0; b < batches; ++b) {
    const std::size_t lo = segs.size() * b / batches;
    const std::size_t hi = segs.size() * (b + 1) / batches;
    double b0 = 0.0, bt = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      bt += segs[k].duration;
      if (segs[k].regime == Regime::zero) b0 += segs[k].duration;
    }
    frac[b] = b0 / bt;
    t0 += b0;
    tt += bt;
  }
  double mean = 0.0;
  for (double f : frac) mean += f;
  mean /= batches;
  double var = 0.0;
  for (double f : frac) var += (f - mean) * (f - mean);
  var /= (batches - 1);
  return {t0 / tt, std::sqrt(var / batches)};
}

}  // namespace pdmplab
