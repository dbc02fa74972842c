#pragma once

// Exact event-driven simulation of the switching process and estimators of
// its occupation measure.
//
// Random numbers: xoshiro256++ seeded via SplitMix64 (see rng.hpp). For a
// given seed, stream 0 drives the holding times and stream 1 the
// within-interval sampling times of estimate_occupation. Parallel chain k
// uses streams 2k+2 and 2k+3.

#include <cstdint>
#include <functional>
#include <vector>

#include "pdmplab/flow.hpp"
#include "pdmplab/grid_field.hpp"
#include "pdmplab/rng.hpp"
#include "pdmplab/types.hpp"

namespace pdmplab {

/// Piece of trajectory between two consecutive switches.
struct Segment {
  double start_time = 0.0;
  double duration = 0.0;
  Point2 start;
  Regime regime = Regime::zero;

  Point2 position(const SwitchingParams& p, double elapsed) const {
    return flow_forward(p, regime, elapsed, start);
  }
  /// Part of the segment after absolute time `from`; duration 0 if none.
  Segment clipped_after(const SwitchingParams& p, double from) const;
};

struct Event {
  double time = 0.0;      // cumulative time of the switch
  double duration = 0.0;  // holding time that ended with this switch
  Point2 x;               // position at the switch
  Regime entered = Regime::zero;
};

struct EventLog {
  SwitchingParams params{2.0, 1.0, 1.0, 1.0};
  std::uint64_t seed = 0;
  HybridState initial;
  std::vector<Event> events;
  double total_time = 0.0;

  std::size_t segment_count() const noexcept { return events.size(); }
  /// Segment k ends at events[k]; it starts at the initial state for k = 0.
  Segment segment(std::size_t k) const;
};

class Simulator {
 public:
  Simulator(const SwitchingParams& p, HybridState initial, Rng rng);

  /// Draws the next holding time, advances to the next switch and returns
  /// the segment just traversed.
  Segment next();

  const HybridState& state() const noexcept { return state_; }
  double time() const noexcept { return time_; }
  const SwitchingParams& params() const noexcept { return params_; }

 private:
  SwitchingParams params_;
  HybridState state_;
  double time_ = 0.0;
  Rng rng_;
};

inline constexpr HybridState kDefaultInitial{{0.5, 0.5}, Regime::zero};

/// Default burn-in, 50/beta time units.
double default_burn_in(const SwitchingParams& p);

EventLog simulate(const SwitchingParams& p, HybridState initial, std::uint64_t n_events,
                  std::uint64_t seed);

/// Positions rebuilt from the initial state and the stored holding times.
std::vector<Point2> replay_positions(const EventLog& log);

struct GridSpec {
  int n1 = 32;
  int n2 = 32;
  Rect bounds{};
};

/// Sampled occupation histogram. For every post-burn-in interval of length
/// tau in regime i, K positions at i.i.d. uniform times are binned into the
/// regime-i histogram with weight tau/K.
class OccupationHistogram {
 public:
  OccupationHistogram(const SwitchingParams& p, GridSpec grid, int samples_per_interval,
                      double burn_in, Rng sample_rng, double outside_tol = 1e-9);

  void add(const Segment& seg);
  void merge(const OccupationHistogram& other);
  /// Density normalized by total weight and cell area.
  GridField finish() const;

  double total_weight() const noexcept { return total_weight_; }
  double weight(Regime r) const noexcept { return regime_weight_[index(r)]; }
  std::uint64_t samples() const noexcept { return samples_; }
  /// Samples classified outside the support at the configured tolerance.
  std::uint64_t outside_samples() const noexcept { return outside_; }
  /// Samples outside the grid rectangle (dropped from the histogram).
  std::uint64_t off_grid_samples() const noexcept { return off_grid_; }
  const GridSpec& grid() const noexcept { return grid_; }

  /// Optional observer of every weighted sample (x, regime, weight).
  std::function<void(Point2, Regime, double)> on_sample;

 private:
  SwitchingParams params_;
  GridSpec grid_;
  int k_;
  double burn_in_;
  Rng rng_;
  double tol_;
  std::vector<double> weights0_;
  std::vector<double> weights1_;
  double total_weight_ = 0.0;
  double regime_weight_[2] = {0.0, 0.0};
  std::uint64_t samples_ = 0;
  std::uint64_t outside_ = 0;
  std::uint64_t off_grid_ = 0;
};

/// Estimated occupation density on the given grid. Throws
/// InsufficientDataError when no time remains after burn-in.
GridField estimate_occupation(const EventLog& log, GridSpec grid, int samples_per_interval,
                              double burn_in);

/// Exact time spent per cell of an n x n grid on [0,1]^2, accumulated by
/// walking each segment through the cells it crosses (coordinates are
/// monotone along every segment).
class ExactOccupation {
 public:
  ExactOccupation(const SwitchingParams& p, int cells, double burn_in);

  void add(const Segment& seg);
  void merge(const ExactOccupation& other);

  int cells() const noexcept { return n_; }
  double total_time() const noexcept { return total_; }
  double regime_time(Regime r) const noexcept { return regime_time_[index(r)]; }
  double cell_time(Regime r, int c1, int c2) const noexcept {
    return (r == Regime::zero ? t0_ : t1_)[static_cast<std::size_t>(c1) * n_ + c2];
  }

  /// Time-weighted CDFs on the (cells+1)^2 nodes of the grid.
  GridField cdf() const;
  /// Cell averages of the occupation density.
  GridField density() const;

 private:
  SwitchingParams params_;
  int n_;
  double burn_in_;
  std::vector<double> t0_;
  std::vector<double> t1_;
  std::vector<double> log_dist_[2];  // ln|j/n - c| for sink c = 0, 1
  double total_ = 0.0;
  double regime_time_[2] = {0.0, 0.0};
};

/// Time-weighted empirical CDFs G_0, G_1 on `nodes` x `nodes` grid nodes
/// covering [0,1]^2. Throws InsufficientDataError when no time remains
/// after burn-in.
GridField empirical_cdf(const EventLog& log, int nodes, double burn_in);

/// Runs `chains` independent chains of `events_per_chain` events each,
/// feeding every segment to a per-chain accumulator built by
/// make(chain_index, sample_rng). Chains run concurrently; accumulators are
/// merged in chain order.
template <class Acc, class Make>
Acc run_chains(const SwitchingParams& p, HybridState initial, std::uint64_t events_per_chain,
               int chains, std::uint64_t seed, Make make);

struct SeparationRecord {
  double time = 0.0;
  double separation = 0.0;
  Point2 difference;
  /// separation * e^{beta t}, carried without underflow.
  double scaled_separation = 0.0;
};

/// Two trajectories from x and y driven by the same switching times.
/// Returns the separation at time 0 and at every event. Both fields share
/// the linear part diag(-alpha, -beta), so the difference is propagated
/// in closed form rather than by subtracting nearby positions.
std::vector<SeparationRecord> coupled_contraction_run(const SwitchingParams& p, Point2 x,
                                                      Point2 y, std::uint64_t n_events,
                                                      std::uint64_t seed,
                                                      Regime initial_regime = Regime::zero);

/// Fraction of post-burn-in time in regime 0, with a batch-means standard
/// error (`batches` equal batches of segments).
struct OccupancyEstimate {
  double fraction0 = 0.0;
  double std_error = 0.0;
};
OccupancyEstimate occupancy_fraction(const EventLog& log, double burn_in, int batches = 100);

}  // namespace pdmplab

#include "pdmplab/detail/run_chains.hpp"
