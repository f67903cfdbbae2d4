#include "brakeopt/mc_uq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "brakeopt/error.hpp"
#include "brakeopt/parallel.hpp"

namespace brakeopt::uq {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t key = mix64(seed + kGamma);
  const std::uint64_t bits = mix64(key + (counter + 1) * kGamma);
  // 53 random bits centred in their cell: strictly inside (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

UniformMatrix draw_uniform_matrix(std::uint64_t seed, std::size_t nu) {
  if (nu < 1) throw InsufficientSamples("uniform matrix needs nu >= 1");
  std::vector<double> values(2 * nu);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = counter_uniform(seed, k);
  return UniformMatrix(seed, nu, std::move(values));
}

InputSamples sample_inputs(const maxent::InputModel& model, const UniformMatrix& uniforms) {
  InputSamples s;
  s.alpha_deg.resize(uniforms.nu());
  s.fs_kn.resize(uniforms.nu());
  for (std::size_t i = 0; i < uniforms.nu(); ++i) {
    s.alpha_deg[i] = model.alpha_deg.sample(uniforms(i, 0));
    s.fs_kn[i] = model.fs_kn.sample(uniforms(i, 1));
  }
  return s;
}

std::vector<double> Ensemble::finite_outputs() const {
  std::vector<double> out;
  out.reserve(fh_kn.size());
  for (std::size_t i = 0; i < fh_kn.size(); ++i) {
    if (!singular[i]) out.push_back(fh_kn[i]);
  }
  return out;
}

Ensemble propagate(const InputSamples& inputs, const Plant& plant, unsigned threads) {
  const std::size_t nu = inputs.size();
  Ensemble ens;
  ens.inputs = inputs;
  ens.fh_kn.assign(nu, 0.0);
  ens.valid.assign(nu, 0);
  ens.singular.assign(nu, 0);

  parallel_for(nu, threads, [&](std::size_t i) {
    const mech::LoadCase load{plant.fg_kn, plant.fb_kn, inputs.fs_kn[i],
                              mech::deg_to_rad(inputs.alpha_deg[i])};
    try {
      const auto sol = mech::braking_force(plant.geom, plant.fric, load);
      ens.fh_kn[i] = sol.fh;
      ens.valid[i] = sol.valid ? 1 : 0;
    } catch (const SingularDenominator&) {
      ens.fh_kn[i] = std::numeric_limits<double>::quiet_NaN();
      ens.singular[i] = 1;
    }
  });
  ens.invalid_count = static_cast<std::size_t>(std::count(ens.valid.begin(), ens.valid.end(), 0));
  return ens;
}

Ensemble propagate(const maxent::InputModel& model, const UniformMatrix& uniforms,
                   const Plant& plant, unsigned threads) {
  return propagate(sample_inputs(model, uniforms), plant, threads);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InsufficientSamples("quantile of an empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const std::size_t above = std::min(below + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return sorted[below] + frac * (sorted[above] - sorted[below]);
}

namespace {

double sample_mean(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

Histogram sturges_histogram(std::span<const double> x, double lo, double hi) {
  Histogram h;
  if (hi <= lo) {
    h.edges = {lo, hi};
    h.counts = {x.size()};
    return h;
  }
  const auto bins =
      static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(x.size())))) + 1;
  const double width = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double v : x) {
    auto k = static_cast<std::size_t>((v - lo) / width);
    ++h.counts[std::min(k, bins - 1)];
  }
  return h;
}

}  // namespace

SummaryStats summarize(std::span<const double> samples, std::size_t kde_grid) {
  if (samples.size() < 2) {
    throw InsufficientSamples("summary statistics need at least 2 samples, got " +
                              std::to_string(samples.size()));
  }
  SummaryStats s;
  s.n = samples.size();
  s.mean = sample_mean(samples);
  s.std = sample_std(samples, s.mean);

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  if (s.min == s.max) s.std = 0.0;
  s.median = quantile_sorted(sorted, 0.5);
  s.ci95 = {quantile_sorted(sorted, 0.025), quantile_sorted(sorted, 0.975)};
  s.normal95 = {s.mean - 1.96 * s.std, s.mean + 1.96 * s.std};
  s.histogram = sturges_histogram(samples, s.min, s.max);
  if (s.std > 0.0 && kde_grid >= 2) s.kde = kde(samples, kde_grid);
  return s;
}

ConvergenceTrace convergence_trace(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientSamples("convergence trace needs at least 2 samples");
  ConvergenceTrace t;
  t.running_mean.resize(samples.size());
  t.running_std.resize(samples.size());
  double sum = 0.0;
  // Welford for the dispersion; the mean uses the same plain running sum as
  // summarize() so the final entries agree exactly.
  double w_mean = 0.0;
  double w_m2 = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double x = samples[k];
    sum += x;
    const double count = static_cast<double>(k + 1);
    t.running_mean[k] = sum / count;
    const double delta = x - w_mean;
    w_mean += delta / count;
    w_m2 += delta * (x - w_mean);
    t.running_std[k] = k == 0 ? 0.0 : std::sqrt(w_m2 / (count - 1.0));
  }
  return t;
}

DensityCurve kde(std::span<const double> samples, std::size_t grid_size) {
  if (samples.size() < 2) throw InsufficientSamples("kde needs at least 2 samples");
  if (grid_size < 2) throw ValidationError("kde grid size must be >= 2", std::to_string(grid_size));
  const double mean = sample_mean(samples);
  const double sd = sample_std(samples, mean);
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  if (*min_it == *max_it || !(sd > 0.0)) {
    throw DegenerateSample("kde of a sample with zero standard deviation");
  }

  const double n = static_cast<double>(samples.size());
  const double h = 1.06 * sd * std::pow(n, -0.2);
  const double lo = *min_it - 3.0 * h;
  const double hi = *max_it + 3.0 * h;

  DensityCurve curve;
  curve.bandwidth = h;
  curve.x.resize(grid_size);
  curve.density.assign(grid_size, 0.0);
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  const double norm = 1.0 / (n * h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < grid_size; ++g) {
    const double x = lo + step * static_cast<double>(g);
    double acc = 0.0;
    for (double xi : samples) {
      const double z = (x - xi) / h;
      if (std::abs(z) < 10.0) acc += std::exp(-0.5 * z * z);
    }
    curve.x[g] = x;
    curve.density[g] = norm * acc;
  }
  return curve;
}

}  // namespace brakeopt::uq
