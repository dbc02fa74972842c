#include "pdmplab/flow.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "pdmplab/errors.hpp"

namespace pdmplab {

namespace {

constexpr double kExpLimit = 700.0;

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

Regime regime_from_index(int i) {
  if (i != 0 && i != 1) {
    throw ValidationError("regime index must be 0 or 1, got " + std::to_string(i));
  }
  return static_cast<Regime>(i);
}

SwitchingParams::SwitchingParams(double alpha, double beta, double lambda0, double lambda1)
    : alpha_(alpha), beta_(beta), lambda0_(lambda0), lambda1_(lambda1) {
  require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(lambda0) &&
              std::isfinite(lambda1),
          "switching parameters must be finite");
  require(beta > 0.0, "invariant violated: beta > 0");
  require(alpha > beta, "invariant violated: alpha > beta");
  require(lambda0 > 0.0, "invariant violated: lambda0 > 0");
  require(lambda1 > 0.0, "invariant violated: lambda1 > 0");
}

SwitchingParams SwitchingParams::rescaled(double c) const {
  require(c > 0.0 && std::isfinite(c), "rescaling factor must be positive");
  return {c * alpha_, c * beta_, c * lambda0_, c * lambda1_};
}

TimeVector::TimeVector(std::vector<double> durations) : durations_(std::move(durations)) {
  for (double t : durations_) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      std::ostringstream os;
      os << "TimeVector entries must be strictly positive, got " << t;
      throw ValidationError(os.str());
    }
  }
}

double TimeVector::total() const noexcept {
  return std::accumulate(durations_.begin(), durations_.end(), 0.0);
}

double rate_product(const SwitchingParams& p, Regime i, std::size_t n) {
  double prod = 1.0;
  Regime r = other(i);
  for (std::size_t k = 0; k < n; ++k) {
    prod *= p.lambda(r);
    r = other(r);
  }
  return prod;
}

std::vector<double> rate_weights(const SwitchingParams& p, Regime i, std::size_t n) {
  std::vector<double> w(n);
  Regime r = i;
  for (std::size_t k = n; k-- > 0;) {
    w[k] = p.lambda(r);
    r = other(r);
  }
  return w;
}

double checked_exp(double arg) {
  if (arg > kExpLimit) {
    std::ostringstream os;
    os << "exponential overflow: exp(" << arg << ")";
    throw OverflowError(os.str());
  }
  if (arg < -kExpLimit) return 0.0;
  return std::exp(arg);
}

Point2 flow_forward(const SwitchingParams& p, Regime i, double t, Point2 x) {
  const double c = index(i);
  return {c + (x.x1 - c) * checked_exp(-p.alpha() * t),
          c + (x.x2 - c) * checked_exp(-p.beta() * t)};
}

Point2 flow_cumulative(const SwitchingParams& p, Regime i, const TimeVector& ts, Point2 x) {
  const auto d = ts.durations();
  // The first segment t1 runs in field i when n is odd, in 1-i when even.
  Regime r = (d.size() % 2 == 1) ? i : other(i);
  for (double t : d) {
    x = flow_forward(p, r, t, x);
    r = other(r);
  }
  return x;
}

Point2 flow_cumulative_inverse(const SwitchingParams& p, Regime i, const TimeVector& ts,
                               Point2 x) {
  const auto d = ts.durations();
  Regime r = i;
  for (std::size_t k = d.size(); k-- > 0;) {
    x = flow_backward(p, r, d[k], x);
    r = other(r);
  }
  return x;
}

double backward_jacobian(const SwitchingParams& p, const TimeVector& ts) {
  return checked_exp((p.alpha() + p.beta()) * ts.total());
}

double det_transversality(const SwitchingParams& p, Point2 x) {
  return p.alpha() * p.beta() * (x.x1 - x.x2);
}

Point2 vector_field(const SwitchingParams& p, Regime i, Point2 x) {
  const double c = index(i);
  return {-p.alpha() * (x.x1 - c), -p.beta() * (x.x2 - c)};
}

}  // namespace pdmplab
