// brakeopt <command> --config <path> [--seed N] [--nu N] [--grid NXxNY] [--out DIR]
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "brakeopt/config.hpp"
#include "brakeopt/error.hpp"
#include "brakeopt/run.hpp"

int main(int argc, char** argv) {
  using namespace brakeopt;

  CLI::App app{"Elevator brake model, uncertainty propagation and design optimization"};
  app.set_version_flag("--version", std::string(io::kToolVersion));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t nu = 0;
  std::string grid;
  std::string out_dir;
  std::string kind = "classical";
  unsigned threads = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"eval", "Evaluate the deterministic model at the nominal load"},
      {"uq", "Monte Carlo propagation: ensemble.csv, stats.json, trace.csv, kde.csv"},
      {"opt-classical", "Maximize the nominal braking force over the design box"},
      {"opt-robust", "Maximize the robust objective under the probabilistic constraint"},
      {"contour", "Write a contour grid of one objective"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Config file (JSON); defaults built in if omitted")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Monte Carlo seed");
    sub->add_option("--nu", nu, "Monte Carlo sample count");
    sub->add_option("--grid", grid, "Grid resolution NXxNY, e.g. 101x51");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    if (std::string(name) == "contour") {
      sub->add_option("--kind", kind, "classical | robust | constraint")
          ->check(CLI::IsMember({"classical", "robust", "constraint"}));
    }
  }

  CLI11_PARSE(app, argc, argv);

  const CLI::App* sub = app.get_subcommands().front();
  io::Overrides overrides;
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--nu")) overrides.nu = nu;
  if (sub->count("--out")) overrides.out_dir = out_dir;
  overrides.threads = threads;

  try {
    if (sub->count("--grid")) overrides.grid = io::parse_grid_spec(grid);
    if (sub->get_name() == "contour") overrides.kind = opt::parse_grid_kind(kind);
    const io::Config config =
        config_path.empty() ? io::default_config() : io::load_config(config_path);
    return io::run(sub->get_name(), config, overrides, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", e.kind()}, {"message", e.what()},
                                {"exit_code", e.exit_code()}}
                     .dump()
              << "\n";
    return e.exit_code();
  }
}
