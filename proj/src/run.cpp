#include "brakeopt/run.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "brakeopt/error.hpp"
#include "brakeopt/maxent.hpp"
#include "brakeopt/mc_uq.hpp"
#include "brakeopt/mechmodel.hpp"

namespace brakeopt::io {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Shortest round-trip decimal form; identical on every run.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json provenance(const Config& c) {
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"seed", c.mc.seed},
              {"nu", c.mc.nu},
              {"config_hash", config_hash(c)}};
}

std::string csv_header_line(const Config& c) {
  return std::string("# ") + kToolName + " " + kToolVersion + " seed=" + std::to_string(c.mc.seed) +
         " nu=" + std::to_string(c.mc.nu) + " config_hash=" + config_hash(c) + "\n";
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  return f;
}

void write_json(const fs::path& path, const json& doc) {
  auto f = open_output(path);
  f << doc.dump(2) << "\n";
}

fs::path prepare_dir(const Config& c) {
  const fs::path dir = c.output.directory.empty() ? fs::path(".") : fs::path(c.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

uq::Plant plant_of(const Config& c) { return {c.geometry, c.friction, c.fg_kn, c.fb_kn}; }

// Nominal inputs are the configured means (or frozen values).
mech::LoadCase nominal_load(const Config& c) {
  const auto& r = c.random;
  return {c.fg_kn, c.fb_kn, r.fs_kn.frozen.value_or(r.fs_kn.mean),
          mech::deg_to_rad(r.alpha_deg.frozen.value_or(r.alpha_deg.mean))};
}

json stats_json(const uq::SummaryStats& s) {
  json j{{"n", s.n},
         {"mean", s.mean},
         {"std", s.std},
         {"min", s.min},
         {"max", s.max},
         {"median", s.median},
         {"ci95_quantile", {s.ci95.lo, s.ci95.hi}},
         {"ci95_normal", {s.normal95.lo, s.normal95.hi}},
         {"histogram", {{"edges", s.histogram.edges}, {"counts", s.histogram.counts}}}};
  j["kde_bandwidth"] = s.kde ? json(s.kde->bandwidth) : json(nullptr);
  return j;
}

json marginal_json(const maxent::Marginal& m) {
  if (m.is_frozen()) return json{{"frozen", m.mean()}};
  const auto& d = m.dist();
  return json{{"lo", d.lo}, {"hi", d.hi}, {"rate", d.rate}, {"log_norm", d.log_norm},
              {"mean", maxent::mean_of(d)}};
}

json design_json(const opt::DesignPoint& p) { return json{{"a_mm", p.a_mm}, {"c_mm", p.c_mm}}; }

json optimum_json(const Config& c, const std::string& problem, const opt::OptimizationResult& r,
                  const std::string& unit) {
  json j;
  j["provenance"] = provenance(c);
  j["problem"] = problem;
  j["s_opt"] = design_json(r.s_opt);
  j["objective"] = r.objective;
  j["objective_unit"] = unit;
  j["feasible"] = r.feasible;
  if (problem == "robust") j["constraint_probability"] = r.probability;
  j["evaluations"] = r.evaluations;
  j["source"] = r.source;
  j["certificate"] = {{"s", design_json(r.certificate.point)},
                      {"value", r.certificate.value},
                      {"grid", std::to_string(c.output.grid_nx) + "x" +
                                   std::to_string(c.output.grid_ny)}};
  return j;
}

void write_contour(const fs::path& path, const Config& c, const opt::Grid& g,
                   const std::string& value_column) {
  auto f = open_output(path);
  f << csv_header_line(c) << "a_mm,c_mm," << value_column << "\n";
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      f << num(g.a[i]) << "," << num(g.c[j]) << "," << num(g.at(i, j)) << "\n";
    }
  }
}

std::string contour_column(opt::GridKind kind) {
  switch (kind) {
    case opt::GridKind::kClassical: return "fh_kN";
    case opt::GridKind::kRobust: return "robust_objective";
    case opt::GridKind::kConstraint: return "probability";
  }
  return "value";
}

opt::OptimizerSettings settings_of(const Config& c, unsigned threads) {
  opt::OptimizerSettings s;
  s.grid_nx = c.output.grid_nx;
  s.grid_ny = c.output.grid_ny;
  s.threads = threads;
  return s;
}

opt::RobustProblem robust_problem_of(const Config& c, const maxent::InputModel& model) {
  const uq::UniformMatrix uniforms = uq::draw_uniform_matrix(c.mc.seed, c.mc.nu);
  return opt::make_robust_problem(plant_of(c), model, uniforms, c.design.weights,
                                  c.design.constraint);
}

void cmd_eval(const Config& c, std::ostream& out) {
  const mech::LoadCase load = nominal_load(c);
  const auto sol = mech::braking_force(c.geometry, c.friction, load);
  const auto oracle = mech::equilibrium_oracle(c.geometry, c.friction, load);

  auto rel = [](double x, double y) { return std::abs(x - y) / (1.0 + std::abs(y)); };
  const double discrepancy =
      std::max({rel(oracle.normals.n1, sol.normals.n1), rel(oracle.normals.n2, sol.normals.n2),
                rel(oracle.normals.n3, sol.normals.n3), rel(oracle.normals.n4, sol.normals.n4),
                rel(oracle.fh, sol.fh)});

  json j;
  j["provenance"] = provenance(c);
  j["load"] = {{"alpha_deg", mech::rad_to_deg(load.alpha_rad)},
               {"Fs_kN", load.fs_kn},
               {"Fg_kN", load.fg_kn},
               {"Fb_kN", load.fb_kn}};
  j["N1_kN"] = sol.normals.n1;
  j["N2_kN"] = sol.normals.n2;
  j["N3_kN"] = sol.normals.n3;
  j["N4_kN"] = sol.normals.n4;
  j["T1_kN"] = sol.t1;
  j["T2_kN"] = sol.t2;
  j["T3_kN"] = sol.t3;
  j["T4_kN"] = sol.t4;
  j["Rx_kN"] = sol.rx;
  j["Ry_kN"] = sol.ry;
  j["Fh_kN"] = sol.fh;
  j["valid"] = sol.valid;
  j["oracle_max_rel_discrepancy"] = discrepancy;
  out << j.dump(2) << "\n";
}

void cmd_uq(const Config& c, unsigned threads, std::ostream& out) {
  const fs::path dir = prepare_dir(c);
  const auto model = maxent::build_input_model(c.random);
  const auto uniforms = uq::draw_uniform_matrix(c.mc.seed, c.mc.nu);
  const uq::Ensemble ens = uq::propagate(model, uniforms, plant_of(c), threads);

  {
    auto f = open_output(dir / "ensemble.csv");
    f << csv_header_line(c) << "index,alpha_deg,fs_kN,fh_kN,valid\n";
    for (std::size_t i = 0; i < ens.size(); ++i) {
      f << i << "," << num(ens.inputs.alpha_deg[i]) << "," << num(ens.inputs.fs_kn[i]) << ","
        << num(ens.fh_kn[i]) << "," << static_cast<int>(ens.valid[i]) << "\n";
    }
  }

  const std::vector<double> outputs = ens.finite_outputs();
  const uq::SummaryStats fh = uq::summarize(outputs, c.output.kde_grid);
  const uq::ConvergenceTrace trace = uq::convergence_trace(outputs);
  {
    auto f = open_output(dir / "trace.csv");
    f << csv_header_line(c) << "k,running_mean_fh_kN,running_std_fh_kN\n";
    for (std::size_t k = 0; k < trace.running_mean.size(); ++k) {
      f << k + 1 << "," << num(trace.running_mean[k]) << "," << num(trace.running_std[k]) << "\n";
    }
  }
  {
    auto f = open_output(dir / "kde.csv");
    f << csv_header_line(c) << "fh_kN,density_per_kN\n";
    if (fh.kde) {
      for (std::size_t g = 0; g < fh.kde->x.size(); ++g) {
        f << num(fh.kde->x[g]) << "," << num(fh.kde->density[g]) << "\n";
      }
    }
  }

  json j;
  j["provenance"] = provenance(c);
  j["nu"] = ens.size();
  j["invalid_count"] = ens.invalid_count;
  j["singular_count"] = ens.size() - outputs.size();
  j["input_model"] = {{"alpha_deg", marginal_json(model.alpha_deg)},
                      {"fs_kN", marginal_json(model.fs_kn)}};
  j["alpha_deg"] = stats_json(uq::summarize(ens.inputs.alpha_deg, 0));
  j["fs_kN"] = stats_json(uq::summarize(ens.inputs.fs_kn, 0));
  j["fh_kN"] = stats_json(fh);
  write_json(dir / "stats.json", j);

  out << "uq: nu=" << ens.size() << " mean=" << num(fh.mean) << " kN std=" << num(fh.std)
      << " kN invalid=" << ens.invalid_count << " -> " << dir.string() << "\n";
}

void cmd_opt_classical(const Config& c, unsigned threads, std::ostream& out) {
  const fs::path dir = prepare_dir(c);
  const opt::ClassicalProblem problem{c.geometry, c.friction, nominal_load(c)};
  const opt::ClassicalRun run = opt::run_classical(c.design.box, problem, settings_of(c, threads));
  write_json(dir / "optimum.json", optimum_json(c, "classical", run.result, "kN"));
  write_contour(dir / "contour_classical.csv", c, run.grid, contour_column(opt::GridKind::kClassical));
  out << "opt-classical: a=" << num(run.result.s_opt.a_mm) << " mm c=" << num(run.result.s_opt.c_mm)
      << " mm Fh=" << num(run.result.objective) << " kN\n";
}

void cmd_opt_robust(const Config& c, unsigned threads, std::ostream& out) {
  const fs::path dir = prepare_dir(c);
  const auto model = maxent::build_input_model(c.random);
  const opt::RobustProblem problem = robust_problem_of(c, model);
  const opt::RobustRun run = opt::run_robust(c.design.box, problem, settings_of(c, threads));
  write_json(dir / "optimum.json", optimum_json(c, "robust", run.result, "robust objective"));
  write_contour(dir / "contour_robust.csv", c, run.objective_grid,
                contour_column(opt::GridKind::kRobust));
  write_contour(dir / "contour_constraint.csv", c, run.constraint_grid,
                contour_column(opt::GridKind::kConstraint));
  out << "opt-robust: a=" << num(run.result.s_opt.a_mm) << " mm c=" << num(run.result.s_opt.c_mm)
      << " mm J_R=" << num(run.result.objective) << " P=" << num(run.result.probability) << "\n";
}

void cmd_contour(const Config& c, opt::GridKind kind, unsigned threads, std::ostream& out) {
  const fs::path dir = prepare_dir(c);
  opt::Grid g;
  if (kind == opt::GridKind::kClassical) {
    const opt::ClassicalProblem problem{c.geometry, c.friction, nominal_load(c)};
    g = opt::grid_scan(c.design.box, c.output.grid_nx, c.output.grid_ny, problem, threads);
  } else {
    const auto model = maxent::build_input_model(c.random);
    g = opt::grid_scan(c.design.box, c.output.grid_nx, c.output.grid_ny, kind,
                       robust_problem_of(c, model), threads);
  }
  const fs::path path = dir / ("contour_" + opt::to_string(kind) + ".csv");
  write_contour(path, c, g, contour_column(kind));
  out << "contour: " << path.string() << "\n";
}

}  // namespace

std::pair<std::size_t, std::size_t> parse_grid_spec(const std::string& text) {
  const auto x = text.find_first_of("xX");
  auto parse = [&](std::string_view part) {
    std::size_t v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size() || part.empty()) {
      throw ValidationError("grid must be written NXxNY", text);
    }
    return v;
  };
  if (x == std::string::npos) throw ValidationError("grid must be written NXxNY", text);
  const std::string_view sv(text);
  return {parse(sv.substr(0, x)), parse(sv.substr(x + 1))};
}

Config apply_overrides(Config config, const Overrides& o) {
  if (o.seed) config.mc.seed = *o.seed;
  if (o.nu) config.mc.nu = *o.nu;
  if (o.grid) {
    config.output.grid_nx = o.grid->first;
    config.output.grid_ny = o.grid->second;
  }
  if (o.out_dir) config.output.directory = *o.out_dir;
  validate(config);
  return config;
}

int run(const std::string& command, const Config& base, const Overrides& overrides,
        std::ostream& out, std::ostream& err) {
  try {
    const Config c = apply_overrides(base, overrides);
    if (command == "eval") {
      cmd_eval(c, out);
    } else if (command == "uq") {
      cmd_uq(c, overrides.threads, out);
    } else if (command == "opt-classical") {
      cmd_opt_classical(c, overrides.threads, out);
    } else if (command == "opt-robust") {
      cmd_opt_robust(c, overrides.threads, out);
    } else if (command == "contour") {
      cmd_contour(c, overrides.kind.value_or(opt::GridKind::kClassical), overrides.threads, out);
    } else {
      throw Error("UsageError", "unknown command '" + command + "'", exit_codes::kUsage);
    }
    return exit_codes::kOk;
  } catch (const Error& e) {
    err << json{{"error", e.kind()}, {"message", e.what()}, {"exit_code", e.exit_code()}}.dump()
        << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << json{{"error", "Internal"}, {"message", e.what()}, {"exit_code", exit_codes::kUnknown}}
               .dump()
        << "\n";
    return exit_codes::kUnknown;
  }
}

}  // namespace brakeopt::io
