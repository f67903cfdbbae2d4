// Run configuration: one flat JSON object whose keys carry their section and
// unit, e.g. "geometry.a_mm" or "loads.Fg_kN". Sections geometry, friction,
// loads and random are required; mc, design and output fall back to
// defaults key by key. Unknown keys are rejected.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "brakeopt/maxent.hpp"
#include "brakeopt/mechmodel.hpp"
#include "brakeopt/optimizer.hpp"

namespace brakeopt::io {

struct McConfig {
  std::size_t nu = 4096;
  std::uint64_t seed = 0;

  bool operator==(const McConfig&) const = default;
};

struct DesignConfig {
  opt::DesignBox box;
  opt::RobustWeights weights;
  opt::ConstraintSpec constraint;

  bool operator==(const DesignConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::size_t grid_nx = 101;
  std::size_t grid_ny = 51;
  std::size_t kde_grid = 512;

  bool operator==(const OutputConfig&) const = default;
};

struct Config {
  mech::BrakeGeometry geometry;
  mech::FrictionSet friction;
  double fg_kn = 50.0;
  double fb_kn = 30.0;
  maxent::RandomModelConfig random;
  McConfig mc;
  DesignConfig design;
  OutputConfig output;

  bool operator==(const Config&) const = default;
};

/// The shipped reference parameter set.
Config default_config();

/// Throws ParseError (malformed text, unknown key, wrong type) or
/// ValidationError (named invariant and offending value).
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const Config& config);

/// Enforces every model, MaxEnt and optimizer invariant.
void validate(const Config& config);

/// FNV-1a 64 of the canonical form, output directory excluded, as 16 hex
/// digits.
std::string config_hash(const Config& config);

}  // namespace brakeopt::io
