#ifndef DLRWAVE_CONFIG_HPP
#define DLRWAVE_CONFIG_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dlrwave/experiment.hpp"

namespace dlrwave {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

using nlohmann::json;

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline void reject_unknown_keys(const json& node, const std::set<std::string>& allowed,
                                const std::string& where) {
  for (const auto& item : node.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
}

// Overrides use dotted paths into the JSON tree, e.g. grid.N=64 or
// time.M_list=[20,40]. Values parse as JSON when possible, else as strings.
inline void apply_override(json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key=value: " + spec);
  const std::string path = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);

  json* node = &root;
  std::istringstream keys(path);
  std::string key;
  std::vector<std::string> parts;
  while (std::getline(keys, key, '.')) {
    if (key.empty()) throw ConfigError("bad override path: " + path);
    parts.push_back(key);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];

  json parsed = json::parse(value, nullptr, false);
  (*node)[parts.back()] = parsed.is_discarded() ? json(value) : parsed;
}

}  // namespace detail

// Parse, override and validate an experiment configuration. The preset
// supplies defaults for everything except N, the step counts and the ranks;
// unknown keys anywhere are a hard error.
inline ExperimentConfig parse_config(const std::filesystem::path& path,
                                     const std::vector<std::string>& overrides = {}) {
  using detail::json;

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte ? e.byte - 1 : 0);
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  for (const auto& o : overrides) detail::apply_override(root, o);

  try {
    detail::reject_unknown_keys(root,
                                {"preset", "grid", "time", "ranks", "params", "nonlinear",
                                 "reference", "fn_substeps"},
                                "config root");

    if (!root.contains("preset")) throw ConfigError("config: missing \"preset\"");
    ExperimentConfig config;
    config.preset = root.at("preset").get<std::string>();
    const ProblemPreset& preset = find_preset(config.preset);
    config.T = preset.T;
    config.params = preset.params;
    config.grid = {preset.x_lo, preset.x_hi, preset.y_lo, preset.y_hi, 128, 128};

    if (root.contains("grid")) {
      const json& g = root.at("grid");
      detail::reject_unknown_keys(g, {"N", "bounds"}, "grid");
      if (g.contains("N")) {
        config.grid.nx = g.at("N").get<int>();
        config.grid.ny = config.grid.nx;
      }
      if (g.contains("bounds")) {
        const auto b = g.at("bounds").get<std::vector<double>>();
        if (b.size() != 4) throw ConfigError("grid.bounds must be [x_lo, x_hi, y_lo, y_hi]");
        config.grid.x_lo = b[0];
        config.grid.x_hi = b[1];
        config.grid.y_lo = b[2];
        config.grid.y_hi = b[3];
      }
    }

    if (!root.contains("time") || !root.at("time").contains("M_list"))
      throw ConfigError("config: missing time.M_list");
    {
      const json& t = root.at("time");
      detail::reject_unknown_keys(t, {"T", "M_list"}, "time");
      if (t.contains("T")) config.T = t.at("T").get<double>();
      config.M_list = t.at("M_list").get<std::vector<long>>();
    }

    if (!root.contains("ranks")) throw ConfigError("config: missing \"ranks\"");
    config.ranks = root.at("ranks").get<std::vector<int>>();

    if (root.contains("params")) {
      const json& p = root.at("params");
      detail::reject_unknown_keys(p, {"alpha", "beta", "gamma", "delta", "omega"}, "params");
      if (p.contains("alpha")) config.params.alpha = p.at("alpha").get<double>();
      if (p.contains("beta")) config.params.beta = p.at("beta").get<double>();
      if (p.contains("gamma")) config.params.gamma = p.at("gamma").get<double>();
      if (p.contains("delta")) config.params.delta = p.at("delta").get<double>();
      if (p.contains("omega")) {
        const auto w = p.at("omega").get<std::vector<double>>();
        if (w.size() != 3) throw ConfigError("params.omega must have three entries");
        config.params.w1 = w[0];
        config.params.w2 = w[1];
        config.params.w3 = w[2];
      }
    }

    if (root.contains("nonlinear")) {
      const json& n = root.at("nonlinear");
      detail::reject_unknown_keys(n, {"f", "g"}, "nonlinear");
      if (n.contains("f")) config.params.f_kind = n.at("f").get<std::string>();
      if (n.contains("g")) config.params.g_kind = n.at("g").get<std::string>();
    }

    if (root.contains("reference")) {
      const json& r = root.at("reference");
      detail::reject_unknown_keys(r, {"multiplier"}, "reference");
      if (r.contains("multiplier"))
        config.reference_multiplier = r.at("multiplier").get<int>();
    }

    if (root.contains("fn_substeps")) config.fn_substeps = root.at("fn_substeps").get<int>();

    if (const char* cache = std::getenv("DLRWAVE_CACHE")) config.cache_dir = cache;

    make_nonlinear(config.params);  // rejects unknown selector names
    config.validate();
    return config;
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace dlrwave

#endif
