#include "brakeopt/mc_uq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "brakeopt/error.hpp"

namespace brakeopt::uq {
namespace {

constexpr double kNominalFh = 7.2693735011397309;

maxent::InputModel default_model() { return maxent::build_input_model({}); }

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(const std::vector<double>& x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

TEST(UniformMatrix, Deterministic) {
  const UniformMatrix a = draw_uniform_matrix(42, 1);
  const UniformMatrix b = draw_uniform_matrix(42, 1);
  EXPECT_EQ(a(0, 0), b(0, 0));
  EXPECT_EQ(a(0, 1), b(0, 1));
}

TEST(UniformMatrix, RowsIndependentOfSampleCount) {
  const UniformMatrix small = draw_uniform_matrix(42, 4096);
  const UniformMatrix large = draw_uniform_matrix(42, 8192);
  for (std::size_t i = 0; i < 4096; ++i) {
    ASSERT_EQ(small(i, 0), large(i, 0));
    ASSERT_EQ(small(i, 1), large(i, 1));
  }
}

TEST(UniformMatrix, ColumnMeansAndRange) {
  for (std::uint64_t seed : {1u, 2u}) {
    const UniformMatrix m = draw_uniform_matrix(seed, 4096);
    for (std::size_t col = 0; col < 2; ++col) {
      double sum = 0.0;
      for (std::size_t i = 0; i < m.nu(); ++i) {
        const double u = m(i, col);
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
      }
      EXPECT_NEAR(sum / 4096.0, 0.5, 0.03);
    }
  }
  EXPECT_NE(draw_uniform_matrix(1, 1)(0, 0), draw_uniform_matrix(2, 1)(0, 0));
}

TEST(UniformMatrix, RejectsEmpty) { EXPECT_THROW(draw_uniform_matrix(0, 0), InsufficientSamples); }

TEST(Propagate, OutputsEqualModelEvaluations) {
  const Plant plant;
  const Ensemble ens = propagate(default_model(), draw_uniform_matrix(3, 512), plant);
  std::size_t invalid = 0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const mech::LoadCase ld{plant.fg_kn, plant.fb_kn, ens.inputs.fs_kn[i],
                            mech::deg_to_rad(ens.inputs.alpha_deg[i])};
    const auto sol = mech::braking_force(plant.geom, plant.fric, ld);
    ASSERT_EQ(ens.fh_kn[i], sol.fh);
    ASSERT_EQ(ens.valid[i] != 0, sol.valid);
    invalid += sol.valid ? 0 : 1;
  }
  EXPECT_EQ(ens.invalid_count, invalid);
  EXPECT_GT(invalid, 0u);
}

TEST(Propagate, ThreadCountDoesNotChangeResults) {
  const auto model = default_model();
  const auto u = draw_uniform_matrix(9, 4096);
  const Ensemble one = propagate(model, u, Plant{}, 1);
  const Ensemble four = propagate(model, u, Plant{}, 4);
  EXPECT_EQ(one.fh_kn, four.fh_kn);
  EXPECT_EQ(one.valid, four.valid);
}

TEST(Propagate, MeanSelfConsistentAtLargerSampleCount) {
  const auto model = default_model();
  const auto small = propagate(model, draw_uniform_matrix(0, 4096), Plant{}).finite_outputs();
  const auto large = propagate(model, draw_uniform_matrix(77, 65536), Plant{}).finite_outputs();
  EXPECT_LT(std::abs(mean(small) - mean(large)), 0.02 * std::abs(mean(large)));
}

TEST(Propagate, NarrowSupportsReduceToNominal) {
  maxent::RandomModelConfig cfg;
  cfg.alpha_deg = {6.0 - 1e-9, 6.0 + 1e-9, 6.0, std::nullopt};
  cfg.fs_kn = {42.0 - 1e-9, 42.0 + 1e-9, 42.0, std::nullopt};
  const Ensemble ens = propagate(maxent::build_input_model(cfg), draw_uniform_matrix(5, 256), Plant{});
  for (double fh : ens.fh_kn) ASSERT_NEAR(fh, kNominalFh, 1e-8);
}

TEST(Propagate, SingularSamplesAreFlaggedNotFatal) {
  Plant plant;
  plant.geom.m = plant.fric.mu4 * (plant.geom.n + plant.geom.l);
  const Ensemble ens = propagate(default_model(), draw_uniform_matrix(1, 16), plant);
  EXPECT_EQ(ens.invalid_count, 16u);
  EXPECT_TRUE(ens.finite_outputs().empty());
  EXPECT_TRUE(std::all_of(ens.singular.begin(), ens.singular.end(), [](auto s) { return s == 1; }));
}

// With alpha frozen the output is an affine image of Fs, so standardized
// output and standardized input coincide.
TEST(Propagate, ShapePreservedWithFrozenCamAngle) {
  for (double fs_mean : {14.0, 28.0, 42.0}) {
    maxent::RandomModelConfig cfg;
    cfg.alpha_deg.frozen = 6.0;
    cfg.fs_kn.mean = fs_mean;
    const Ensemble ens = propagate(maxent::build_input_model(cfg), draw_uniform_matrix(21, 4096), Plant{});
    const auto& fs = ens.inputs.fs_kn;
    const auto& fh = ens.fh_kn;
    const double mfs = mean(fs), sfs = stddev(fs), mfh = mean(fh), sfh = stddev(fh);
    double worst = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      worst = std::max(worst, std::abs((fh[i] - mfh) / sfh - (fs[i] - mfs) / sfs));
    }
    EXPECT_LT(worst, 1e-10) << fs_mean;
  }
}

TEST(Summarize, SmallSample) {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const SummaryStats s = summarize(x);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.std, 1.0);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 3.0);
  EXPECT_DOUBLE_EQ(s.median, 2.0);
  EXPECT_DOUBLE_EQ(s.ci95.lo, 1.05);
  EXPECT_DOUBLE_EQ(s.ci95.hi, 2.95);
}

TEST(Summarize, ConstantSample) {
  const std::vector<double> x(10, 4.5);
  const SummaryStats s = summarize(x);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.ci95.lo, 4.5);
  EXPECT_EQ(s.ci95.hi, 4.5);
  EXPECT_FALSE(s.kde.has_value());
  EXPECT_EQ(std::accumulate(s.histogram.counts.begin(), s.histogram.counts.end(), std::size_t{0}), 10u);
}

TEST(Summarize, InsufficientSamples) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(summarize(one), InsufficientSamples);
}

TEST(Summarize, PropagatedEnsembleInvariants) {
  const auto y = propagate(default_model(), draw_uniform_matrix(0, 4096), Plant{}).finite_outputs();
  const SummaryStats s = summarize(y);
  EXPECT_LE(s.min, s.ci95.lo);
  EXPECT_LE(s.ci95.lo, s.median);
  EXPECT_LE(s.median, s.ci95.hi);
  EXPECT_LE(s.ci95.lo, s.mean);
  EXPECT_LE(s.mean, s.ci95.hi);
  EXPECT_LE(s.ci95.hi, s.max);
  EXPECT_EQ(s.histogram.counts.size(), 13u);  // ceil(log2 4096) + 1
  EXPECT_EQ(std::accumulate(s.histogram.counts.begin(), s.histogram.counts.end(), std::size_t{0}), y.size());

  double reversed = 0.0;
  for (auto it = y.rbegin(); it != y.rend(); ++it) reversed += *it;
  reversed /= static_cast<double>(y.size());
  EXPECT_LT(std::abs(s.mean - reversed), 0.01 * std::abs(reversed));

  ASSERT_TRUE(s.kde.has_value());
  const auto& k = *s.kde;
  double area = 0.0;
  for (std::size_t g = 1; g < k.x.size(); ++g) {
    area += 0.5 * (k.density[g] + k.density[g - 1]) * (k.x[g] - k.x[g - 1]);
  }
  EXPECT_NEAR(area, 1.0, 1e-3);
}

TEST(ConvergenceTrace, SmallAndConstant) {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const ConvergenceTrace t = convergence_trace(x);
  EXPECT_EQ(t.running_mean, (std::vector<double>{1.0, 1.5, 2.0}));
  EXPECT_DOUBLE_EQ(t.running_std[2], 1.0);

  const std::vector<double> c(5, 3.0);
  const ConvergenceTrace tc = convergence_trace(c);
  for (std::size_t k = 0; k < c.size(); ++k) {
    EXPECT_EQ(tc.running_mean[k], 3.0);
    EXPECT_EQ(tc.running_std[k], 0.0);
  }
}

TEST(ConvergenceTrace, FinalMeanMatchesSummaryAndSettles) {
  const auto y = propagate(default_model(), draw_uniform_matrix(0, 4096), Plant{}).finite_outputs();
  const ConvergenceTrace t = convergence_trace(y);
  const SummaryStats s = summarize(y);
  EXPECT_EQ(t.running_mean.back(), s.mean);
  EXPECT_NEAR(t.running_std.back(), s.std, 1e-12);
  EXPECT_LT(std::abs(t.running_mean[4095] - t.running_mean[2047]), 3.0 * s.std / std::sqrt(2048.0));
}

TEST(Kde, RecoversUniformDensity) {
  std::vector<double> x(100000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = counter_uniform(99, i);
  const DensityCurve k = kde(x, 400);
  EXPECT_NEAR(k.bandwidth, 1.06 * stddev(x) * std::pow(1e5, -0.2), 1e-12);
  double worst = 0.0;
  for (std::size_t g = 0; g < k.x.size(); ++g) {
    if (k.x[g] >= 0.1 && k.x[g] <= 0.9) worst = std::max(worst, std::abs(k.density[g] - 1.0));
  }
  EXPECT_LT(worst, 0.05);
  EXPECT_NEAR(k.x.front(), -3.0 * k.bandwidth, 1e-4);
}

TEST(Kde, DegenerateSample) {
  const std::vector<double> x{0.0, 0.0};
  EXPECT_THROW(kde(x), DegenerateSample);
}

}  // namespace
}  // namespace brakeopt::uq
