// Maximum-entropy marginals for a bounded variable with a prescribed mean.
//
// Given only a support [lo, hi] and a mean, the entropy maximizer is the
// truncated exponential  pdf(x) = exp(-log_norm - rate * x)  on [lo, hi].
// A positive rate decays from lo to hi, a negative rate grows, and rate = 0
// is the uniform law (mean at the midpoint).
#pragma once

#include <optional>

namespace brakeopt::maxent {

/// |rate|*(hi-lo) below this uses the series form of the mean map.
inline constexpr double kSeriesThreshold = 1e-3;

struct TruncatedExponential {
  double lo = 0.0;
  double hi = 1.0;
  double rate = 0.0;
  double log_norm = 0.0;
};

/// Builds a distribution from support and rate; log_norm is derived so that
/// the density integrates to one. Throws ValidationError if lo >= hi.
TruncatedExponential make_truncexp(double lo, double hi, double rate);

/// Mean of the truncated exponential with the given rate on [lo, hi].
double mean_of(double lo, double hi, double rate);
double mean_of(const TruncatedExponential& dist);

/// MaxEnt fit of the rate by bisection on the (strictly decreasing) mean map.
/// Throws MeanOutOfSupport unless lo < target_mean < hi.
TruncatedExponential fit_truncexp(double lo, double hi, double target_mean);

double pdf(const TruncatedExponential& dist, double x);
double cdf(const TruncatedExponential& dist, double x);

/// Exact inverse CDF; u is clamped to [0, 1].
double sample_inverse_cdf(const TruncatedExponential& dist, double u);

/// Support and mean for one input variable. `frozen` pins the variable to a
/// fixed value, bypassing the random law.
struct MarginalSpec {
  double lo = 0.0;
  double hi = 1.0;
  double mean = 0.5;
  std::optional<double> frozen;

  bool operator==(const MarginalSpec&) const = default;
};

struct RandomModelConfig {
  MarginalSpec alpha_deg{0.0, 18.0, 6.0, std::nullopt};
  MarginalSpec fs_kn{0.0, 56.0, 42.0, std::nullopt};

  bool operator==(const RandomModelConfig&) const = default;
};

/// A marginal that is either a fitted truncated exponential or a point mass.
class Marginal {
 public:
  explicit Marginal(TruncatedExponential dist) : dist_(dist) {}
  static Marginal point(double value);

  double sample(double u) const;
  double mean() const;
  bool is_frozen() const { return frozen_.has_value(); }
  const TruncatedExponential& dist() const { return dist_; }

 private:
  Marginal() = default;
  TruncatedExponential dist_;
  std::optional<double> frozen_;
};

/// Independent product of the cam-angle (degrees) and spring-force (kN) laws.
struct InputModel {
  Marginal alpha_deg;
  Marginal fs_kn;
};

InputModel build_input_model(const RandomModelConfig& cfg);

}  // namespace brakeopt::maxent
