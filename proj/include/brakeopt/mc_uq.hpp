// Seeded Monte Carlo propagation of the MaxEnt input model through the
// brake model, plus the nonparametric statistics reported on the output.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "brakeopt/maxent.hpp"
#include "brakeopt/mechmodel.hpp"

namespace brakeopt::uq {

/// Uniform in (0,1) for a given (seed, counter). Counter-based: the value
/// never depends on how many other values were drawn.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// nu x 2 matrix of uniforms; column 0 drives the cam angle, column 1 the
/// spring force. Row i is a pure function of (seed, i).
class UniformMatrix {
 public:
  UniformMatrix(std::uint64_t seed, std::size_t nu, std::vector<double> values)
      : seed_(seed), nu_(nu), values_(std::move(values)) {}

  std::uint64_t seed() const { return seed_; }
  std::size_t nu() const { return nu_; }
  double operator()(std::size_t row, std::size_t col) const { return values_[2 * row + col]; }

 private:
  std::uint64_t seed_;
  std::size_t nu_;
  std::vector<double> values_;
};

UniformMatrix draw_uniform_matrix(std::uint64_t seed, std::size_t nu);

/// Everything in the brake model that is not random.
struct Plant {
  mech::BrakeGeometry geom;
  mech::FrictionSet fric;
  double fg_kn = 50.0;
  double fb_kn = 30.0;
};

struct InputSamples {
  std::vector<double> alpha_deg;
  std::vector<double> fs_kn;
  std::size_t size() const { return alpha_deg.size(); }
};

InputSamples sample_inputs(const maxent::InputModel& model, const UniformMatrix& uniforms);

struct Ensemble {
  InputSamples inputs;
  std::vector<double> fh_kn;         // NaN where the model was singular
  std::vector<std::uint8_t> valid;   // contact-validity flag per sample
  std::vector<std::uint8_t> singular;
  std::size_t invalid_count = 0;     // samples with valid == 0, singular included

  std::size_t size() const { return fh_kn.size(); }
  /// Outputs excluding singular samples, in index order.
  std::vector<double> finite_outputs() const;
};

Ensemble propagate(const InputSamples& inputs, const Plant& plant, unsigned threads = 1);
Ensemble propagate(const maxent::InputModel& model, const UniformMatrix& uniforms,
                   const Plant& plant, unsigned threads = 1);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

struct DensityCurve {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // unbiased (n-1)
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  Interval ci95;        // empirical 2.5% / 97.5% quantiles
  Interval normal95;    // mean +- 1.96 std
  Histogram histogram;  // Sturges bins
  std::optional<DensityCurve> kde;  // absent when std == 0
};

inline constexpr std::size_t kDefaultKdeGrid = 512;

/// Linear-interpolation quantile of an ascending sample (type 7).
double quantile_sorted(std::span<const double> sorted, double p);

/// Throws InsufficientSamples when fewer than two samples are given.
SummaryStats summarize(std::span<const double> samples, std::size_t kde_grid = kDefaultKdeGrid);

struct ConvergenceTrace {
  std::vector<double> running_mean;
  std::vector<double> running_std;
};

ConvergenceTrace convergence_trace(std::span<const double> samples);

/// Gaussian KDE with Silverman's bandwidth 1.06 std n^(-1/5) on a uniform
/// grid over [min - 3h, max + 3h]. Throws DegenerateSample when std == 0.
DensityCurve kde(std::span<const double> samples, std::size_t grid_size = kDefaultKdeGrid);

}  // namespace brakeopt::uq
