#include "brakeopt/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brakeopt/error.hpp"

namespace brakeopt::maxent {
namespace {

// Normalized mean (mean - lo) / (hi - lo) as a function of t = rate*(hi-lo):
// g(t) = 1/t - 1/(e^t - 1), with g(0) = 1/2.
double unit_mean(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 0.5 - t / 12.0 + t * t2 / 720.0 - t * t2 * t2 / 30240.0;
  }
  return 1.0 / t - 1.0 / std::expm1(t);
}

// log of (1 - e^{-t}) / t, evaluated without overflow for either sign of t.
double log_unit_mass(double t) {
  if (std::abs(t) < 1e-8) return -t / 2.0;
  if (t > 0.0) return std::log(-std::expm1(-t) / t);
  return -t + std::log(-std::expm1(t) / -t);
}

}  // namespace

TruncatedExponential make_truncexp(double lo, double hi, double rate) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ValidationError("support must satisfy lo < hi",
                          "support [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const double width = hi - lo;
  TruncatedExponential d{lo, hi, rate, 0.0};
  d.log_norm = -rate * lo + std::log(width) + log_unit_mass(rate * width);
  return d;
}

double mean_of(double lo, double hi, double rate) {
  const double width = hi - lo;
  return lo + width * unit_mean(rate * width);
}

double mean_of(const TruncatedExponential& d) { return mean_of(d.lo, d.hi, d.rate); }

TruncatedExponential fit_truncexp(double lo, double hi, double target_mean) {
  if (!(lo < hi)) {
    throw ValidationError("support must satisfy lo < hi",
                          "support [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  if (!(target_mean > lo && target_mean < hi)) {
    throw MeanOutOfSupport("mean " + std::to_string(target_mean) + " outside (" +
                           std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  const double width = hi - lo;
  if (target_mean == lo + width / 2.0) return make_truncexp(lo, hi, 0.0);

  // Work in t = rate*width; the mean map is strictly decreasing in t.
  const double target = (target_mean - lo) / width;
  double t_lo = -1.0;
  double t_hi = 1.0;
  for (int k = 0; k < 64 && unit_mean(t_lo) < target; ++k) t_lo *= 2.0;
  for (int k = 0; k < 64 && unit_mean(t_hi) > target; ++k) t_hi *= 2.0;

  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;
    const double value = unit_mean(mid);
    if (value == target) {
      t_lo = t_hi = mid;
      break;
    }
    (value > target ? t_lo : t_hi) = mid;
  }
  return make_truncexp(lo, hi, 0.5 * (t_lo + t_hi) / width);
}

double pdf(const TruncatedExponential& d, double x) {
  if (x < d.lo || x > d.hi) return 0.0;
  return std::exp(-d.log_norm - d.rate * x);
}

double cdf(const TruncatedExponential& d, double x) {
  if (x <= d.lo) return 0.0;
  if (x >= d.hi) return 1.0;
  const double width = d.hi - d.lo;
  const double t = d.rate * width;
  if (std::abs(t) < 1e-8) return (x - d.lo) / width;
  return std::expm1(-d.rate * (x - d.lo)) / std::expm1(-t);
}

double sample_inverse_cdf(const TruncatedExponential& d, double u) {
  u = std::clamp(u, 0.0, 1.0);
  if (u == 0.0) return d.lo;
  if (u == 1.0) return d.hi;
  const double width = d.hi - d.lo;
  const double t = d.rate * width;
  double x;
  if (std::abs(t) < 1e-8) {
    x = d.lo + u * width;
  } else if (t > 0.0) {
    x = d.lo - std::log1p(u * std::expm1(-t)) / d.rate;
  } else {
    // Mirror image of a decaying law, sampled from the upper end.
    x = d.hi - std::log1p((1.0 - u) * std::expm1(t)) / d.rate;
  }
  return std::clamp(x, d.lo, d.hi);
}

Marginal Marginal::point(double value) {
  Marginal m;
  m.dist_ = make_truncexp(value, value + 1.0, 0.0);
  m.frozen_ = value;
  return m;
}

double Marginal::sample(double u) const {
  return frozen_ ? *frozen_ : sample_inverse_cdf(dist_, u);
}

double Marginal::mean() const { return frozen_ ? *frozen_ : mean_of(dist_); }

namespace {
Marginal build_marginal(const MarginalSpec& spec) {
  if (spec.frozen) return Marginal::point(*spec.frozen);
  return Marginal(fit_truncexp(spec.lo, spec.hi, spec.mean));
}
}  // namespace

InputModel build_input_model(const RandomModelConfig& cfg) {
  return {build_marginal(cfg.alpha_deg), build_marginal(cfg.fs_kn)};
}

}  // namespace brakeopt::maxent
