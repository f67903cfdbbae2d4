// Command orchestration shared by the CLI and the integration tests.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "brakeopt/config.hpp"
#include "brakeopt/optimizer.hpp"

namespace brakeopt::io {

inline constexpr const char* kToolName = "brakeopt";
inline constexpr const char* kToolVersion = BRAKEOPT_VERSION;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> nu;
  std::optional<std::pair<std::size_t, std::size_t>> grid;
  std::optional<std::string> out_dir;
  std::optional<opt::GridKind> kind;  // contour only; defaults to classical
  unsigned threads = 1;               // 0 = hardware concurrency
};

/// Applies overrides and re-validates.
Config apply_overrides(Config config, const Overrides& overrides);

/// Parses "NXxNY", e.g. "101x51".
std::pair<std::size_t, std::size_t> parse_grid_spec(const std::string& text);

/// Runs one of eval, uq, opt-classical, opt-robust, contour. Errors are
/// written to `err` as a single-line JSON object and mapped to the error's
/// exit code.
int run(const std::string& command, const Config& config, const Overrides& overrides,
        std::ostream& out, std::ostream& err);

}  // namespace brakeopt::io
