#include "brakeopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "brakeopt/error.hpp"
#include "brakeopt/parallel.hpp"

namespace brakeopt::opt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* invariant, const std::string& detail) {
  if (!ok) throw ValidationError(invariant, std::string(invariant) + ": " + detail);
}

mech::BrakeGeometry with_design(mech::BrakeGeometry geom, const DesignPoint& s) {
  geom.a = s.a_mm;
  geom.c = s.c_mm;
  return geom;
}

// Deterministic argmax order: larger value first, then lexicographically
// smaller (a, c).
bool better(double v1, const DesignPoint& p1, double v2, const DesignPoint& p2) {
  if (v1 != v2) return v1 > v2;
  if (p1.a_mm != p2.a_mm) return p1.a_mm < p2.a_mm;
  return p1.c_mm < p2.c_mm;
}

struct Probe {
  double value = kNaN;
  bool admissible = false;
};

using Evaluator = std::function<Probe(const DesignPoint&)>;

struct StartOutcome {
  bool ok = false;
  DesignPoint point;
  double value = kNaN;
  std::size_t evaluations = 0;
};

// Box mapped to [0,1]^2; zero-width axes stay fixed.
struct UnitBox {
  DesignBox box;
  double wa;
  double wc;

  explicit UnitBox(const DesignBox& b) : box(b), wa(b.a_max - b.a_min), wc(b.c_max - b.c_min) {}

  DesignPoint to_design(double ua, double uc) const {
    return {wa > 0.0 ? box.a_min + wa * ua : box.a_min, wc > 0.0 ? box.c_min + wc * uc : box.c_min};
  }
};

StartOutcome ascend(const UnitBox& ub, const Evaluator& eval, double ua, double uc,
                    const OptimizerSettings& cfg) {
  StartOutcome out;
  auto probe = [&](double pa, double pc) {
    ++out.evaluations;
    return eval(ub.to_design(pa, pc));
  };

  Probe current = probe(ua, uc);
  if (!current.admissible || !std::isfinite(current.value)) return out;

  const bool free_a = ub.wa > 0.0;
  const bool free_c = ub.wc > 0.0;
  const double h = cfg.fd_step;

  // Central difference where both neighbours are inside the box.
  auto partial = [&](bool along_a) -> double {
    double x = along_a ? ua : uc;
    double lo = std::max(0.0, x - h);
    double hi = std::min(1.0, x + h);
    const Probe fp = along_a ? probe(hi, uc) : probe(ua, hi);
    const Probe fm = along_a ? probe(lo, uc) : probe(ua, lo);
    return (fp.value - fm.value) / (hi - lo);
  };

  double step = 0.1;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    double ga = free_a ? partial(true) : 0.0;
    double gc = free_c ? partial(false) : 0.0;
    if (!std::isfinite(ga) || !std::isfinite(gc)) break;
    // Drop components pushing out through an active bound.
    if ((ua <= 0.0 && ga < 0.0) || (ua >= 1.0 && ga > 0.0)) ga = 0.0;
    if ((uc <= 0.0 && gc < 0.0) || (uc >= 1.0 && gc > 0.0)) gc = 0.0;
    const double norm = std::hypot(ga, gc);
    if (norm == 0.0) break;
    const double da = ga / norm;
    const double dc = gc / norm;

    bool moved = false;
    while (step >= cfg.step_tolerance) {
      const double na = std::clamp(ua + step * da, 0.0, 1.0);
      const double nc = std::clamp(uc + step * dc, 0.0, 1.0);
      const Probe trial = probe(na, nc);
      if (trial.admissible && trial.value > current.value) {
        ua = na;
        uc = nc;
        current = trial;
        step = std::min(1.0, 2.0 * step);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }

  out.ok = true;
  out.point = ub.to_design(ua, uc);
  out.value = current.value;
  return out;
}

struct AscentSummary {
  std::optional<StartOutcome> best;
  std::size_t evaluations = 0;
};

AscentSummary multi_start(const DesignBox& box, const Evaluator& eval,
                          const OptimizerSettings& cfg) {
  const UnitBox ub(box);
  const std::size_t k = std::max<std::size_t>(cfg.lattice, 1);
  std::vector<std::pair<double, double>> starts;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double ua = k == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(k - 1);
      const double uc = k == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(k - 1);
      starts.emplace_back(ub.wa > 0.0 ? ua : 0.0, ub.wc > 0.0 ? uc : 0.0);
    }
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  std::vector<StartOutcome> outcomes(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t s) {
    outcomes[s] = ascend(ub, eval, starts[s].first, starts[s].second, cfg);
  });

  AscentSummary summary;
  for (const auto& o : outcomes) {
    summary.evaluations += o.evaluations;
    if (!o.ok) continue;
    if (!summary.best || better(o.value, o.point, summary.best->value, summary.best->point)) {
      summary.best = o;
    }
  }
  return summary;
}

Grid make_grid(const DesignBox& box, std::size_t nx, std::size_t ny) {
  require(nx >= 2 && ny >= 2, "grid resolution must be at least 2x2",
          std::to_string(nx) + "x" + std::to_string(ny));
  Grid g;
  g.box = box;
  g.nx = nx;
  g.ny = ny;
  g.a.resize(nx);
  g.c.resize(ny);
  for (std::size_t i = 0; i < nx; ++i) {
    g.a[i] = box.a_min + (box.a_max - box.a_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
  }
  for (std::size_t j = 0; j < ny; ++j) {
    g.c[j] = box.c_min + (box.c_max - box.c_min) * static_cast<double>(j) / static_cast<double>(ny - 1);
  }
  g.a.back() = box.a_max;
  g.c.back() = box.c_max;
  g.values.assign(nx * ny, kNaN);
  return g;
}

// Best admissible cell; `admissible` filters cells (e.g. feasibility).
std::optional<Certificate> grid_best(const Grid& g, const std::vector<std::uint8_t>& admissible) {
  std::optional<Certificate> best;
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      const std::size_t k = i * g.ny + j;
      const double v = g.values[k];
      if (!admissible[k] || !std::isfinite(v)) continue;
      const DesignPoint p = g.point(i, j);
      if (!best || better(v, p, best->value, best->point)) best = Certificate{p, v};
    }
  }
  return best;
}

OptimizationResult pick(const AscentSummary& ascent, const Certificate& cert,
                        std::size_t grid_evals) {
  OptimizationResult r;
  r.certificate = cert;
  r.evaluations = ascent.evaluations + grid_evals;
  if (ascent.best && !better(cert.value, cert.point, ascent.best->value, ascent.best->point)) {
    r.s_opt = ascent.best->point;
    r.objective = ascent.best->value;
    r.source = "ascent";
  } else {
    r.s_opt = cert.point;
    r.objective = cert.value;
    r.source = "grid";
  }
  return r;
}

}  // namespace

void validate(const DesignBox& b) {
  require(std::isfinite(b.a_min) && std::isfinite(b.a_max) && b.a_min <= b.a_max && b.a_min > 0.0,
          "design box requires 0 < a_min <= a_max",
          std::to_string(b.a_min) + ", " + std::to_string(b.a_max));
  require(std::isfinite(b.c_min) && std::isfinite(b.c_max) && b.c_min <= b.c_max && b.c_min > 0.0,
          "design box requires 0 < c_min <= c_max",
          std::to_string(b.c_min) + ", " + std::to_string(b.c_max));
}

void validate(const RobustWeights& w) {
  const double betas[] = {w.beta1, w.beta2, w.beta3, w.beta4};
  for (double b : betas) {
    require(std::isfinite(b) && b >= 0.0, "robust weights must be non-negative", std::to_string(b));
  }
  const double sum = w.beta1 + w.beta2 + w.beta3 + w.beta4;
  require(std::abs(sum - 1.0) <= 1e-12, "robust weights must sum to 1", std::to_string(sum));
}

void validate(const ConstraintSpec& s) {
  require(std::isfinite(s.y_star_kn) && s.y_star_kn >= 0.0, "y_star must be non-negative",
          std::to_string(s.y_star_kn));
  require(s.p_r > 0.0 && s.p_r < 1.0, "reference probability p_r out of (0,1)",
          std::to_string(s.p_r));
}

double classical_objective(const DesignPoint& s, const ClassicalProblem& problem) {
  return mech::braking_force(with_design(problem.geom, s), problem.fric, problem.nominal).fh;
}

RobustProblem make_robust_problem(const uq::Plant& plant, const maxent::InputModel& model,
                                  const uq::UniformMatrix& uniforms, const RobustWeights& weights,
                                  const ConstraintSpec& constraint) {
  return {plant, uq::sample_inputs(model, uniforms), weights, constraint};
}

RobustEvaluation evaluate_robust(const DesignPoint& s, const RobustProblem& problem) {
  const mech::BrakeGeometry geom = with_design(problem.plant.geom, s);
  const auto& in = problem.inputs;
  const double y_star = problem.constraint.y_star_kn;

  std::size_t finite = 0;
  std::size_t satisfied = 0;
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::vector<double> y;
  y.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const mech::LoadCase load{problem.plant.fg_kn, problem.plant.fb_kn, in.fs_kn[i],
                              mech::deg_to_rad(in.alpha_deg[i])};
    mech::EquilibriumSolution sol;
    try {
      sol = mech::braking_force(geom, problem.plant.fric, load);
    } catch (const SingularDenominator&) {
      continue;
    }
    ++finite;
    y.push_back(sol.fh);
    sum += sol.fh;
    lo = std::min(lo, sol.fh);
    hi = std::max(hi, sol.fh);
    const bool counted = std::abs(sol.fh) > y_star &&
                         (sol.valid || !problem.constraint.invalid_is_violation);
    if (counted) ++satisfied;
  }
  if (finite < 2) throw DegenerateEnsemble("fewer than two finite samples at design point");

  RobustEvaluation ev;
  ev.min = lo;
  ev.max = hi;
  ev.mean = sum / static_cast<double>(finite);
  double ss = 0.0;
  for (double v : y) ss += (v - ev.mean) * (v - ev.mean);
  // A constant ensemble has zero spread even if the rounded mean is off by an ulp.
  ev.std = lo == hi ? 0.0 : std::sqrt(ss / static_cast<double>(finite - 1));

  const RobustWeights& w = problem.weights;
  ev.objective = w.beta1 * ev.min + w.beta2 * ev.max + w.beta3 * ev.mean;
  if (w.beta4 > 0.0) {
    if (!(ev.std > 0.0)) throw DegenerateEnsemble("zero output dispersion with beta4 > 0");
    ev.objective += w.beta4 / ev.std;
  }
  ev.probability = static_cast<double>(satisfied) / static_cast<double>(in.size());
  ev.feasible = ev.probability >= 1.0 - problem.constraint.p_r;
  return ev;
}

double robust_objective(const DesignPoint& s, const RobustWeights& weights,
                        const uq::UniformMatrix& uniforms, const maxent::InputModel& model,
                        const uq::Plant& plant) {
  return evaluate_robust(s, make_robust_problem(plant, model, uniforms, weights, {})).objective;
}

double empirical_constraint(const DesignPoint& s, const ConstraintSpec& spec,
                            const uq::UniformMatrix& uniforms, const maxent::InputModel& model,
                            const uq::Plant& plant) {
  // Mean-only weights: the constraint must not fail on a zero-dispersion ensemble.
  const RobustWeights mean_only{0.0, 0.0, 1.0, 0.0};
  return evaluate_robust(s, make_robust_problem(plant, model, uniforms, mean_only, spec))
      .probability;
}

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::kClassical: return "classical";
    case GridKind::kRobust: return "robust";
    case GridKind::kConstraint: return "constraint";
  }
  return "unknown";
}

GridKind parse_grid_kind(const std::string& name) {
  if (name == "classical") return GridKind::kClassical;
  if (name == "robust") return GridKind::kRobust;
  if (name == "constraint") return GridKind::kConstraint;
  throw ValidationError("grid kind must be classical, robust or constraint", name);
}

Grid grid_scan(const DesignBox& box, std::size_t nx, std::size_t ny,
               const ClassicalProblem& problem, unsigned threads) {
  Grid g = make_grid(box, nx, ny);
  parallel_for(nx * ny, threads, [&](std::size_t k) {
    try {
      g.values[k] = classical_objective(g.point(k / ny, k % ny), problem);
    } catch (const Error&) {
      g.values[k] = kNaN;
    }
  });
  return g;
}

namespace {
struct RobustGrids {
  Grid objective;
  Grid probability;
  std::vector<std::uint8_t> feasible;
};

RobustGrids scan_robust(const DesignBox& box, std::size_t nx, std::size_t ny,
                        const RobustProblem& problem, unsigned threads) {
  RobustGrids r{make_grid(box, nx, ny), make_grid(box, nx, ny), {}};
  r.feasible.assign(nx * ny, 0);
  parallel_for(nx * ny, threads, [&](std::size_t k) {
    try {
      const RobustEvaluation ev = evaluate_robust(r.objective.point(k / ny, k % ny), problem);
      r.objective.values[k] = ev.objective;
      r.probability.values[k] = ev.probability;
      r.feasible[k] = ev.feasible ? 1 : 0;
    } catch (const Error&) {
      // Missing cell: NaN in both grids, never feasible.
    }
  });
  return r;
}
}  // namespace

Grid grid_scan(const DesignBox& box, std::size_t nx, std::size_t ny, GridKind kind,
               const RobustProblem& problem, unsigned threads) {
  RobustGrids r = scan_robust(box, nx, ny, problem, threads);
  if (kind == GridKind::kConstraint) return std::move(r.probability);
  if (kind == GridKind::kRobust) return std::move(r.objective);
  throw ValidationError("classical grid needs a ClassicalProblem", to_string(kind));
}

ClassicalRun run_classical(const DesignBox& box, const ClassicalProblem& problem,
                           const OptimizerSettings& settings) {
  validate(box);
  const Evaluator eval = [&](const DesignPoint& s) {
    Probe p;
    try {
      p.value = classical_objective(s, problem);
      p.admissible = std::isfinite(p.value);
    } catch (const SingularDenominator&) {
    }
    return p;
  };
  const AscentSummary ascent = multi_start(box, eval, settings);
  if (!ascent.best) throw AllStartsFailed("every classical start hit a singular design");

  Grid grid = grid_scan(box, settings.grid_nx, settings.grid_ny, problem, settings.threads);
  const std::vector<std::uint8_t> all(grid.values.size(), 1);
  const std::optional<Certificate> cert = grid_best(grid, all);
  OptimizationResult r =
      pick(ascent, cert ? *cert : Certificate{ascent.best->point, ascent.best->value},
           grid.values.size());
  r.feasible = true;
  return {r, std::move(grid)};
}

OptimizationResult optimize_classical(const DesignBox& box, const ClassicalProblem& problem,
                                      const OptimizerSettings& settings) {
  return run_classical(box, problem, settings).result;
}

RobustRun run_robust(const DesignBox& box, const RobustProblem& problem,
                     const OptimizerSettings& settings) {
  validate(box);
  validate(problem.weights);
  validate(problem.constraint);
  const Evaluator eval = [&](const DesignPoint& s) {
    Probe p;
    try {
      const RobustEvaluation ev = evaluate_robust(s, problem);
      p.value = ev.objective;
      p.admissible = ev.feasible;
    } catch (const Error&) {
    }
    return p;
  };
  const AscentSummary ascent = multi_start(box, eval, settings);
  RobustGrids grids =
      scan_robust(box, settings.grid_nx, settings.grid_ny, problem, settings.threads);
  const std::optional<Certificate> cert = grid_best(grids.objective, grids.feasible);
  if (!cert) {
    throw NoFeasiblePoint("no cell of the certificate grid satisfies the probabilistic constraint");
  }
  OptimizationResult r = pick(ascent, *cert, grids.objective.values.size());
  const RobustEvaluation at_opt = evaluate_robust(r.s_opt, problem);
  r.feasible = at_opt.feasible;
  r.probability = at_opt.probability;
  return {r, std::move(grids.objective), std::move(grids.probability)};
}

OptimizationResult optimize_robust(const DesignBox& box, const RobustProblem& problem,
                                   const OptimizerSettings& settings) {
  return run_robust(box, problem, settings).result;
}

}  // namespace brakeopt::opt
