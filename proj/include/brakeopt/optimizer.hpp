// Classical and robust maximization of the braking force over the (a, c)
// design box.
//
// Both problems are solved by multi-start projected finite-difference ascent
// and checked against a dense grid evaluation (the certificate). The robust
// problem evaluates every design on one shared set of input samples (common
// random numbers), which makes its objective a deterministic function of the
// design.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "brakeopt/maxent.hpp"
#include "brakeopt/mc_uq.hpp"
#include "brakeopt/mechmodel.hpp"

namespace brakeopt::opt {

struct DesignPoint {
  double a_mm = 55.0;
  double c_mm = 52.7;

  bool operator==(const DesignPoint&) const = default;
};

struct DesignBox {
  double a_min = 50.0;
  double a_max = 60.0;
  double c_min = 50.0;
  double c_max = 55.0;

  bool operator==(const DesignBox&) const = default;
  bool contains(const DesignPoint& s) const {
    return s.a_mm >= a_min && s.a_mm <= a_max && s.c_mm >= c_min && s.c_mm <= c_max;
  }
};

struct RobustWeights {
  double beta1 = 0.2;  // min
  double beta2 = 0.2;  // max
  double beta3 = 0.2;  // mean
  double beta4 = 0.4;  // inverse std

  bool operator==(const RobustWeights&) const = default;
};

struct ConstraintSpec {
  double y_star_kn = 0.5;
  double p_r = 0.05;
  /// Count samples with a negative normal force as violations, on top of
  /// the |Y| <= y* samples.
  bool invalid_is_violation = false;

  bool operator==(const ConstraintSpec&) const = default;
};

// Degenerate boxes (min == max) are allowed.
void validate(const DesignBox& box);
void validate(const RobustWeights& w);
void validate(const ConstraintSpec& spec);

struct ClassicalProblem {
  mech::BrakeGeometry geom;
  mech::FrictionSet fric;
  mech::LoadCase nominal;
};

/// Nominal braking force with a and c taken from the design point.
double classical_objective(const DesignPoint& s, const ClassicalProblem& problem);

struct RobustProblem {
  uq::Plant plant;
  uq::InputSamples inputs;  // drawn once, reused at every design (CRN)
  RobustWeights weights;
  ConstraintSpec constraint;
};

RobustProblem make_robust_problem(const uq::Plant& plant, const maxent::InputModel& model,
                                  const uq::UniformMatrix& uniforms, const RobustWeights& weights,
                                  const ConstraintSpec& constraint);

struct RobustEvaluation {
  double objective = 0.0;
  double probability = 0.0;  // empirical P{|Y| > y*}
  bool feasible = false;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
};

/// One ensemble at design s gives objective and constraint together. Throws
/// DegenerateEnsemble when std == 0 and beta4 > 0, or fewer than two samples
/// are finite.
RobustEvaluation evaluate_robust(const DesignPoint& s, const RobustProblem& problem);

double robust_objective(const DesignPoint& s, const RobustWeights& weights,
                        const uq::UniformMatrix& uniforms, const maxent::InputModel& model,
                        const uq::Plant& plant);

/// Fraction of samples with |Y| > y*. Singular samples always count as
/// violations.
double empirical_constraint(const DesignPoint& s, const ConstraintSpec& spec,
                            const uq::UniformMatrix& uniforms, const maxent::InputModel& model,
                            const uq::Plant& plant);

enum class GridKind { kClassical, kRobust, kConstraint };

std::string to_string(GridKind kind);
GridKind parse_grid_kind(const std::string& name);

/// Values on an nx x ny lattice; index i runs over a, j over c, storage is
/// row-major (i * ny + j). Cells whose evaluation failed hold NaN.
struct Grid {
  DesignBox box;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> a;
  std::vector<double> c;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * ny + j]; }
  DesignPoint point(std::size_t i, std::size_t j) const { return {a[i], c[j]}; }
};

Grid grid_scan(const DesignBox& box, std::size_t nx, std::size_t ny,
               const ClassicalProblem& problem, unsigned threads = 1);
Grid grid_scan(const DesignBox& box, std::size_t nx, std::size_t ny, GridKind kind,
               const RobustProblem& problem, unsigned threads = 1);

struct OptimizerSettings {
  std::size_t grid_nx = 101;
  std::size_t grid_ny = 51;
  std::size_t lattice = 5;        // multi-start lattice per axis
  int max_iterations = 200;
  double fd_step = 1e-4;          // fraction of the box width
  double step_tolerance = 1e-8;   // fraction of the box width
  unsigned threads = 1;
};

struct Certificate {
  DesignPoint point;
  double value = 0.0;
};

struct OptimizationResult {
  DesignPoint s_opt;
  double objective = 0.0;
  bool feasible = false;
  std::size_t evaluations = 0;
  Certificate certificate;
  /// "ascent" or "grid": which route produced s_opt.
  std::string source;
  /// Constraint probability at s_opt (robust only).
  double probability = 1.0;
};

/// Throws AllStartsFailed when no start yields a finite objective.
OptimizationResult optimize_classical(const DesignBox& box, const ClassicalProblem& problem,
                                      const OptimizerSettings& settings = {});

/// Throws NoFeasiblePoint when no cell of the certificate grid satisfies the
/// probabilistic constraint.
OptimizationResult optimize_robust(const DesignBox& box, const RobustProblem& problem,
                                   const OptimizerSettings& settings = {});

/// Both optimizations also return the certificate grid they were checked
/// against, so callers can emit it as a contour without a second scan.
struct ClassicalRun {
  OptimizationResult result;
  Grid grid;
};
struct RobustRun {
  OptimizationResult result;
  Grid objective_grid;
  Grid constraint_grid;
};
ClassicalRun run_classical(const DesignBox& box, const ClassicalProblem& problem,
                           const OptimizerSettings& settings = {});
RobustRun run_robust(const DesignBox& box, const RobustProblem& problem,
                     const OptimizerSettings& settings = {});

}  // namespace brakeopt::opt
