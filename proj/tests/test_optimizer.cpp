#include "brakeopt/optimizer.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "brakeopt/error.hpp"

namespace brakeopt::opt {
namespace {

constexpr double kNominalFh = 7.2693735011397309;

ClassicalProblem classical() {
  return {mech::BrakeGeometry{}, mech::FrictionSet{}, mech::LoadCase{}};
}

struct RobustFixture : ::testing::Test {
  maxent::InputModel model = maxent::build_input_model({});
  uq::UniformMatrix uniforms = uq::draw_uniform_matrix(0, 4096);
  uq::Plant plant;

  RobustProblem problem(RobustWeights w = {}, ConstraintSpec c = {}) const {
    return make_robust_problem(plant, model, uniforms, w, c);
  }
};

OptimizerSettings coarse() {
  OptimizerSettings s;
  s.grid_nx = 21;
  s.grid_ny = 11;
  return s;
}

TEST(ClassicalObjective, NominalDesign) {
  EXPECT_NEAR(classical_objective({55.0, 52.7}, classical()), kNominalFh, 1e-12);
  ClassicalProblem zero = classical();
  zero.nominal = {0.0, 0.0, 0.0, mech::deg_to_rad(6.0)};
  EXPECT_EQ(classical_objective({55.0, 52.7}, zero), 0.0);
}

TEST(GridScan, CornersEqualDirectCalls) {
  const DesignBox box;
  const Grid g = grid_scan(box, 2, 2, classical());
  EXPECT_EQ(g.at(0, 0), classical_objective({50.0, 50.0}, classical()));
  EXPECT_EQ(g.at(0, 1), classical_objective({50.0, 55.0}, classical()));
  EXPECT_EQ(g.at(1, 0), classical_objective({60.0, 50.0}, classical()));
  EXPECT_EQ(g.at(1, 1), classical_objective({60.0, 55.0}, classical()));
  EXPECT_THROW(grid_scan(box, 1, 5, classical()), ValidationError);
}

TEST(OptimizeClassical, DominatesGridCertificate) {
  const DesignBox box;
  const OptimizationResult r = optimize_classical(box, classical());
  const Grid g = grid_scan(box, 101, 51, classical());
  double best = -std::numeric_limits<double>::infinity();
  for (double v : g.values) best = std::max(best, v);
  EXPECT_GE(r.objective, best - 1e-6);
  EXPECT_TRUE(r.feasible);
  EXPECT_TRUE(box.contains(r.s_opt));
  // The force grows with a and falls with c on this box: optimum at the corner.
  EXPECT_EQ(r.s_opt, (DesignPoint{60.0, 50.0}));
  EXPECT_EQ(r.objective, classical_objective(r.s_opt, classical()));

  const OptimizationResult again = optimize_classical(box, classical());
  EXPECT_EQ(again.s_opt, r.s_opt);
  EXPECT_EQ(again.objective, r.objective);
}

TEST(OptimizeClassical, DegenerateBoxReturnsThePoint) {
  const DesignBox box{57.0, 57.0, 51.0, 51.0};
  const OptimizationResult r = optimize_classical(box, classical());
  EXPECT_EQ(r.s_opt, (DesignPoint{57.0, 51.0}));
  EXPECT_EQ(r.objective, classical_objective({57.0, 51.0}, classical()));
}

TEST(OptimizeClassical, MonotoneSliceEndsAtIntervalEndpoint) {
  const DesignBox box{50.0, 60.0, 52.7, 52.7};
  const Grid slice = grid_scan(box, 101, 2, classical());
  for (std::size_t i = 1; i < slice.nx; ++i) ASSERT_GT(slice.at(i, 0), slice.at(i - 1, 0));
  const OptimizationResult r = optimize_classical(box, classical());
  EXPECT_EQ(r.s_opt.a_mm, 60.0);
  EXPECT_EQ(r.s_opt.c_mm, 52.7);
}

TEST(OptimizeClassical, AllStartsSingular) {
  ClassicalProblem p = classical();
  p.geom.m = p.fric.mu4 * (p.geom.n + p.geom.l);
  EXPECT_THROW(optimize_classical({}, p), AllStartsFailed);
}

TEST_F(RobustFixture, MeanOnlyWeightsGiveEnsembleMean) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(50.0, 60.0), c(50.0, 55.0);
  for (int k = 0; k < 5; ++k) {
    const DesignPoint s{a(rng), c(rng)};
    uq::Plant at = plant;
    at.geom.a = s.a_mm;
    at.geom.c = s.c_mm;
    const auto y = uq::propagate(model, uniforms, at).finite_outputs();
    const double mean = uq::summarize(y, 0).mean;
    EXPECT_NEAR(robust_objective(s, {0, 0, 1, 0}, uniforms, model, plant), mean, 1e-12);
    EXPECT_EQ(robust_objective(s, {1, 0, 0, 0}, uniforms, model, plant), *std::min_element(y.begin(), y.end()));
  }
}

TEST_F(RobustFixture, CommonRandomNumbersAreBitIdentical) {
  const DesignPoint s{56.3, 51.1};
  const double first = robust_objective(s, {}, uniforms, model, plant);
  const double second =
      robust_objective(s, {}, uq::draw_uniform_matrix(0, 4096), maxent::build_input_model({}), plant);
  EXPECT_EQ(first, second);
}

TEST_F(RobustFixture, ConstraintLimits) {
  const DesignPoint s{55.0, 52.7};
  EXPECT_EQ(empirical_constraint(s, {0.0, 0.05, false}, uniforms, model, plant), 1.0);
  EXPECT_EQ(empirical_constraint(s, {1e3, 0.05, false}, uniforms, model, plant), 0.0);
  EXPECT_FALSE(evaluate_robust(s, problem({}, {1e3, 0.05, false})).feasible);
}

TEST_F(RobustFixture, NominalDesignIsFeasible) {
  const double p = empirical_constraint({55.0, 52.7}, {}, uniforms, model, plant);
  EXPECT_GE(p, 0.95);
}

// Counting negative-normal samples as violations makes the whole box
// infeasible with the reference parameters.
TEST_F(RobustFixture, StrictValidityRuleLeavesNoFeasibleDesign) {
  const ConstraintSpec strict{0.5, 0.05, true};
  EXPECT_LT(empirical_constraint({55.0, 52.7}, strict, uniforms, model, plant), 0.95);
  EXPECT_THROW(optimize_robust({}, problem({}, strict), coarse()), NoFeasiblePoint);
}

TEST_F(RobustFixture, ConstraintGridWithReferenceParameters) {
  const Grid g = grid_scan({}, 101, 51, GridKind::kConstraint, problem());
  std::size_t feasible = 0;
  for (double p : g.values) {
    ASSERT_GT(p, 0.0);
    ASSERT_LT(p, 1.0);
    feasible += p >= 0.95 ? 1 : 0;
  }
  EXPECT_EQ(feasible, g.values.size());
}

TEST_F(RobustFixture, OptimizeRobustDefaults) {
  const RobustProblem p = problem();
  const OptimizationResult r = optimize_robust({}, p, coarse());
  EXPECT_TRUE(r.feasible);
  EXPECT_GE(r.probability, 0.95);
  EXPECT_GE(r.objective, r.certificate.value - 1e-6);
  EXPECT_EQ(r.objective, evaluate_robust(r.s_opt, p).objective);
  const OptimizationResult classical_opt = optimize_classical({}, classical());
  EXPECT_NE(r.s_opt, classical_opt.s_opt);

  OptimizerSettings threaded = coarse();
  threaded.threads = 4;
  const OptimizationResult again = optimize_robust({}, p, threaded);
  EXPECT_EQ(again.s_opt, r.s_opt);
  EXPECT_EQ(again.objective, r.objective);
}

TEST_F(RobustFixture, VacuousConstraintMatchesUnconstrainedGridMax) {
  const RobustProblem p = problem({}, {0.0, 1.0 - 1e-12, false});
  const OptimizationResult r = optimize_robust({}, p, coarse());
  const Grid g = grid_scan({}, 21, 11, GridKind::kRobust, p);
  double best = -std::numeric_limits<double>::infinity();
  for (double v : g.values) best = std::max(best, v);
  EXPECT_GE(r.objective, best - 1e-6);
  EXPECT_NEAR(r.certificate.value, best, 0.0);
}

TEST_F(RobustFixture, UnreachableThresholdHasNoFeasiblePoint) {
  EXPECT_THROW(optimize_robust({}, problem({}, {1e3, 0.05, false}), coarse()), NoFeasiblePoint);
}

TEST_F(RobustFixture, ZeroDispersionIsDegenerate) {
  maxent::RandomModelConfig cfg;
  cfg.alpha_deg.frozen = 6.0;
  cfg.fs_kn.frozen = 42.0;
  const RobustProblem p = make_robust_problem(plant, maxent::build_input_model(cfg), uniforms, {}, {});
  EXPECT_THROW(evaluate_robust({55.0, 52.7}, p), DegenerateEnsemble);
  const RobustProblem mean_only =
      make_robust_problem(plant, maxent::build_input_model(cfg), uniforms, {0, 0, 1, 0}, {});
  EXPECT_NEAR(evaluate_robust({55.0, 52.7}, mean_only).objective, kNominalFh, 1e-12);
}

TEST(Validation, WeightsBoxAndConstraint) {
  EXPECT_THROW(validate(RobustWeights{0.5, 0.5, 0.5, 0.0}), ValidationError);
  EXPECT_THROW(validate(RobustWeights{-0.1, 0.5, 0.4, 0.2}), ValidationError);
  EXPECT_NO_THROW(validate(RobustWeights{}));
  EXPECT_THROW(validate(DesignBox{60.0, 50.0, 50.0, 55.0}), ValidationError);
  EXPECT_THROW(validate(ConstraintSpec{0.5, 1.0, false}), ValidationError);
  EXPECT_THROW(validate(ConstraintSpec{-1.0, 0.05, false}), ValidationError);
  EXPECT_EQ(parse_grid_kind("robust"), GridKind::kRobust);
  EXPECT_THROW(parse_grid_kind("bogus"), ValidationError);
}

}  // namespace
}  // namespace brakeopt::opt
