#include "brakeopt/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "brakeopt/error.hpp"

namespace brakeopt::io {
namespace {

using json = nlohmann::ordered_json;

// One entry per accepted key, binding it to a Config field.
struct KeyBinding {
  std::string key;
  std::function<void(Config&, const json&)> read;
  std::function<json(Config)> write;
};

bool is_required_section(const std::string& key) {
  static const std::set<std::string> required = {"geometry", "friction", "loads", "random"};
  return required.count(key.substr(0, key.find('.'))) > 0;
}

double as_double(const std::string& key, const json& v) {
  if (!v.is_number()) throw ParseError("key '" + key + "': expected a number");
  return v.get<double>();
}

std::uint64_t as_unsigned(const std::string& key, const json& v) {
  if (!v.is_number_unsigned()) {
    throw ParseError("key '" + key + "': expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

KeyBinding real(std::string key, std::function<double&(Config&)> ref) {
  auto read = [key, ref](Config& c, const json& v) { ref(c) = as_double(key, v); };
  auto write = [ref](Config c) { return json(ref(c)); };
  return {std::move(key), read, write};
}

KeyBinding count(std::string key, std::function<std::size_t&(Config&)> ref) {
  auto read = [key, ref](Config& c, const json& v) {
    ref(c) = static_cast<std::size_t>(as_unsigned(key, v));
  };
  auto write = [ref](Config c) { return json(ref(c)); };
  return {std::move(key), read, write};
}

// Optional number; JSON null means "not frozen".
KeyBinding frozen(std::string key, std::function<std::optional<double>&(Config&)> ref) {
  auto read = [key, ref](Config& c, const json& v) {
    if (v.is_null()) {
      ref(c).reset();
    } else {
      ref(c) = as_double(key, v);
    }
  };
  auto write = [ref](Config c) {
    const auto& o = ref(c);
    return o ? json(*o) : json(nullptr);
  };
  return {std::move(key), read, write};
}

const std::vector<KeyBinding>& bindings() {
  static const std::vector<KeyBinding> table = [] {
    std::vector<KeyBinding> t;
    t.push_back(real("geometry.a_mm", [](Config& c) -> double& { return c.geometry.a; }));
    t.push_back(real("geometry.b_mm", [](Config& c) -> double& { return c.geometry.b; }));
    t.push_back(real("geometry.c_mm", [](Config& c) -> double& { return c.geometry.c; }));
    t.push_back(real("geometry.d_mm", [](Config& c) -> double& { return c.geometry.d; }));
    t.push_back(real("geometry.e_mm", [](Config& c) -> double& { return c.geometry.e; }));
    t.push_back(real("geometry.f_mm", [](Config& c) -> double& { return c.geometry.f; }));
    t.push_back(real("geometry.l_mm", [](Config& c) -> double& { return c.geometry.l; }));
    t.push_back(real("geometry.m_mm", [](Config& c) -> double& { return c.geometry.m; }));
    t.push_back(real("geometry.n_mm", [](Config& c) -> double& { return c.geometry.n; }));
    t.push_back(real("geometry.R_mm", [](Config& c) -> double& { return c.geometry.R; }));
    t.push_back(real("friction.mu1", [](Config& c) -> double& { return c.friction.mu1; }));
    t.push_back(real("friction.mu2", [](Config& c) -> double& { return c.friction.mu2; }));
    t.push_back(real("friction.mu4", [](Config& c) -> double& { return c.friction.mu4; }));
    t.push_back(real("loads.Fg_kN", [](Config& c) -> double& { return c.fg_kn; }));
    t.push_back(real("loads.Fb_kN", [](Config& c) -> double& { return c.fb_kn; }));
    t.push_back(real("random.alpha_min_deg", [](Config& c) -> double& { return c.random.alpha_deg.lo; }));
    t.push_back(real("random.alpha_max_deg", [](Config& c) -> double& { return c.random.alpha_deg.hi; }));
    t.push_back(real("random.alpha_mean_deg", [](Config& c) -> double& { return c.random.alpha_deg.mean; }));
    t.push_back(frozen("random.alpha_frozen_deg",
                       [](Config& c) -> std::optional<double>& { return c.random.alpha_deg.frozen; }));
    t.push_back(real("random.fs_min_kN", [](Config& c) -> double& { return c.random.fs_kn.lo; }));
    t.push_back(real("random.fs_max_kN", [](Config& c) -> double& { return c.random.fs_kn.hi; }));
    t.push_back(real("random.fs_mean_kN", [](Config& c) -> double& { return c.random.fs_kn.mean; }));
    t.push_back(frozen("random.fs_frozen_kN",
                       [](Config& c) -> std::optional<double>& { return c.random.fs_kn.frozen; }));
    t.push_back(count("mc.nu", [](Config& c) -> std::size_t& { return c.mc.nu; }));
    t.push_back({"mc.seed",
                 [](Config& c, const json& v) { c.mc.seed = as_unsigned("mc.seed", v); },
                 [](const Config& c) { return json(c.mc.seed); }});
    t.push_back(real("design.a_min_mm", [](Config& c) -> double& { return c.design.box.a_min; }));
    t.push_back(real("design.a_max_mm", [](Config& c) -> double& { return c.design.box.a_max; }));
    t.push_back(real("design.c_min_mm", [](Config& c) -> double& { return c.design.box.c_min; }));
    t.push_back(real("design.c_max_mm", [](Config& c) -> double& { return c.design.box.c_max; }));
    t.push_back(real("design.beta1", [](Config& c) -> double& { return c.design.weights.beta1; }));
    t.push_back(real("design.beta2", [](Config& c) -> double& { return c.design.weights.beta2; }));
    t.push_back(real("design.beta3", [](Config& c) -> double& { return c.design.weights.beta3; }));
    t.push_back(real("design.beta4", [](Config& c) -> double& { return c.design.weights.beta4; }));
    t.push_back(real("design.y_star_kN", [](Config& c) -> double& { return c.design.constraint.y_star_kn; }));
    t.push_back(real("design.p_r", [](Config& c) -> double& { return c.design.constraint.p_r; }));
    t.push_back({"design.invalid_is_violation",
                 [](Config& c, const json& v) {
                   if (!v.is_boolean()) {
                     throw ParseError("key 'design.invalid_is_violation': expected true or false");
                   }
                   c.design.constraint.invalid_is_violation = v.get<bool>();
                 },
                 [](const Config& c) { return json(c.design.constraint.invalid_is_violation); }});
    t.push_back({"output.directory",
                 [](Config& c, const json& v) {
                   if (!v.is_string()) throw ParseError("key 'output.directory': expected a string");
                   c.output.directory = v.get<std::string>();
                 },
                 [](const Config& c) { return json(c.output.directory); }});
    t.push_back(count("output.grid_nx", [](Config& c) -> std::size_t& { return c.output.grid_nx; }));
    t.push_back(count("output.grid_ny", [](Config& c) -> std::size_t& { return c.output.grid_ny; }));
    t.push_back(count("output.kde_grid", [](Config& c) -> std::size_t& { return c.output.kde_grid; }));
    return t;
  }();
  return table;
}

bool is_optional_key(const std::string& key) {
  return !is_required_section(key) || key == "random.alpha_frozen_deg" ||
         key == "random.fs_frozen_kN";
}

void require(bool ok, const char* invariant, const std::string& detail) {
  if (!ok) throw ValidationError(invariant, std::string(invariant) + ": " + detail);
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void validate_marginal(const maxent::MarginalSpec& m, const std::string& name, double floor,
                       double ceil) {
  require(std::isfinite(m.lo) && std::isfinite(m.hi) && m.lo < m.hi,
          "random variable support must satisfy lo < hi",
          name + " [" + fmt_num(m.lo) + ", " + fmt_num(m.hi) + "]");
  require(m.lo >= floor && m.hi < ceil, "random variable support outside admissible range",
          name + " [" + fmt_num(m.lo) + ", " + fmt_num(m.hi) + "]");
  require(m.mean > m.lo && m.mean < m.hi, "random variable mean must lie inside its support",
          name + " mean " + fmt_num(m.mean));
  if (m.frozen) {
    require(*m.frozen >= floor && *m.frozen < ceil, "frozen value outside admissible range",
            name + " = " + fmt_num(*m.frozen));
  }
}

}  // namespace

Config default_config() { return Config{}; }

void validate(const Config& c) {
  mech::validate(c.geometry);
  mech::validate(c.friction);
  require(std::isfinite(c.fg_kn) && c.fg_kn >= 0.0, "load must be non-negative",
          "Fg = " + fmt_num(c.fg_kn));
  require(std::isfinite(c.fb_kn) && c.fb_kn >= 0.0, "load must be non-negative",
          "Fb = " + fmt_num(c.fb_kn));
  validate_marginal(c.random.alpha_deg, "alpha_deg", 0.0, 90.0);
  validate_marginal(c.random.fs_kn, "fs_kN", 0.0, std::numeric_limits<double>::infinity());
  require(c.mc.nu >= 2, "sample count must be at least 2", std::to_string(c.mc.nu));
  opt::validate(c.design.box);
  opt::validate(c.design.weights);
  opt::validate(c.design.constraint);
  require(c.output.grid_nx >= 2 && c.output.grid_ny >= 2, "grid resolution must be at least 2x2",
          std::to_string(c.output.grid_nx) + "x" + std::to_string(c.output.grid_ny));
  require(c.output.kde_grid >= 2, "kde grid size must be >= 2", std::to_string(c.output.kde_grid));
}

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object of flat keys");

  std::map<std::string, const KeyBinding*> by_key;
  for (const auto& b : bindings()) by_key[b.key] = &b;

  Config cfg;
  std::set<std::string> seen;
  for (const auto& [key, value] : doc.items()) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ParseError("unknown key '" + key + "'");
    it->second->read(cfg, value);
    seen.insert(key);
  }
  for (const auto& b : bindings()) {
    if (!seen.count(b.key) && !is_optional_key(b.key)) {
      throw ParseError("missing required key '" + b.key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const Config& config) {
  json doc = json::object();
  for (const auto& b : bindings()) doc[b.key] = b.write(config);
  return doc.dump(2) + "\n";
}

std::string config_hash(const Config& config) {
  Config canonical = config;
  canonical.output.directory.clear();
  const std::string text = serialize_config(canonical);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace brakeopt::io
