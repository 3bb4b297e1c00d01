#pragma once

// JSON run configuration. Unknown keys are rejected and every error names the
// offending field by its dotted path.

#include "spinring/model.hpp"
#include "spinring/twoqubit.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinring {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Spacing { linear, log };
enum class OutputFormat { csv, json };

struct TemperatureGrid {
  double start = 0.1;
  double stop = 10.0;
  int count = 20;
  Spacing spacing = Spacing::log;

  std::vector<double> values() const {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      t[i] = spacing == Spacing::linear ? start + f * (stop - start) : start * std::pow(stop / start, f);
    }
    if (count > 1) t.back() = stop;
    return t;
  }
};

struct VerifyGrid {
  std::vector<int> n_sites{2, 3, 4, 5, 6, 7, 8};
  std::vector<double> delta{0.0, 0.5, 1.0, 2.0};
  std::vector<double> field_b{0.0, 0.5};
  std::vector<double> j{1.0, -1.0};
  TemperatureGrid temperatures{0.1, 10.0, 12, Spacing::log};
  int bell_frames = 200;
};

struct RunConfig {
  std::optional<ModelSpec> model;
  TemperatureGrid temperatures;
  std::pair<int, int> pair{1, 2};
  std::vector<std::string> outputs;  // empty: default columns
  std::uint64_t seed = 20240229;
  OutputFormat format = OutputFormat::csv;
  std::optional<VerifyGrid> verify;
};

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(join_path(path, key) + ": unknown key");
  }
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + ": must be finite");
  return x;
}

inline int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<int>();
}

inline std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

inline Eigen::MatrixXd get_matrix(const json& v, int n, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) {
    throw ConfigError(path + ": expected " + std::to_string(n) + " rows");
  }
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || static_cast<int>(v[r].size()) != n) {
      throw ConfigError(row_path + ": expected " + std::to_string(n) + " entries");
    }
    for (int c = 0; c < n; ++c) m(r, c) = get_number(v[r][c], row_path + "[" + std::to_string(c) + "]");
  }
  return m;
}

template <class T, class F>
std::vector<T> get_list(const json& v, const std::string& path, F&& element) {
  if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a non-empty array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(element(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline ModelSpec parse_model(const json& m, const std::string& path) {
  reject_unknown(m, path, {"n_sites", "coupling", "field_b", "site_cap"});
  if (!m.contains("n_sites")) throw ConfigError(join_path(path, "n_sites") + ": required");
  if (!m.contains("coupling")) throw ConfigError(join_path(path, "coupling") + ": required");
  ModelSpec spec;
  spec.n_sites = get_int(m["n_sites"], join_path(path, "n_sites"));
  if (m.contains("field_b")) spec.field_b = get_number(m["field_b"], join_path(path, "field_b"));
  if (m.contains("site_cap")) spec.site_cap = get_int(m["site_cap"], join_path(path, "site_cap"));

  const std::string cpath = join_path(path, "coupling");
  const json& c = m["coupling"];
  if (!c.is_object() || !c.contains("type")) throw ConfigError(join_path(cpath, "type") + ": required");
  const std::string type = get_string(c["type"], join_path(cpath, "type"));
  if (type == "uniform") {
    reject_unknown(c, cpath, {"type", "j", "delta"});
    UniformCoupling u;
    if (c.contains("j")) u.j = get_number(c["j"], join_path(cpath, "j"));
    if (c.contains("delta")) u.delta = get_number(c["delta"], join_path(cpath, "delta"));
    spec.coupling = u;
  } else if (type == "general") {
    reject_unknown(c, cpath, {"type", "jx", "jy", "jz"});
    if (spec.n_sites < 2 || spec.n_sites > 30) throw ConfigError(join_path(path, "n_sites") + ": out of range");
    GeneralCoupling g;
    for (const char* key : {"jx", "jy", "jz"}) {
      if (!c.contains(key)) throw ConfigError(join_path(cpath, key) + ": required");
    }
    g.jx = get_matrix(c["jx"], spec.n_sites, join_path(cpath, "jx"));
    g.jy = get_matrix(c["jy"], spec.n_sites, join_path(cpath, "jy"));
    g.jz = get_matrix(c["jz"], spec.n_sites, join_path(cpath, "jz"));
    spec.coupling = std::move(g);
  } else {
    throw ConfigError(join_path(cpath, "type") + ": expected \"uniform\" or \"general\"");
  }
  try {
    validate(spec);
  } catch (const ModelError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return spec;
}

inline TemperatureGrid parse_temperatures(const json& t, const std::string& path) {
  reject_unknown(t, path, {"start", "stop", "count", "spacing"});
  TemperatureGrid g;
  if (t.contains("start")) g.start = get_number(t["start"], join_path(path, "start"));
  if (t.contains("stop")) g.stop = get_number(t["stop"], join_path(path, "stop"));
  if (t.contains("count")) g.count = get_int(t["count"], join_path(path, "count"));
  if (t.contains("spacing")) {
    const std::string s = get_string(t["spacing"], join_path(path, "spacing"));
    if (s == "linear") {
      g.spacing = Spacing::linear;
    } else if (s == "log") {
      g.spacing = Spacing::log;
    } else {
      throw ConfigError(join_path(path, "spacing") + ": expected \"linear\" or \"log\"");
    }
  }
  if (g.count < 1) throw ConfigError(join_path(path, "count") + ": must be >= 1");
  if (g.start < 0.0 || g.stop < 0.0) throw ConfigError(path + ": temperatures must be >= 0");
  if (g.spacing == Spacing::log && !(g.start > 0.0 && g.stop > 0.0)) {
    throw ConfigError(join_path(path, "start") + ": log spacing needs start > 0 and stop > 0");
  }
  return g;
}

inline VerifyGrid parse_verify(const json& v, const std::string& path) {
  reject_unknown(v, path, {"n_sites", "delta", "field_b", "j", "temperatures", "bell_frames"});
  VerifyGrid g;
  auto num = [](const json& x, const std::string& p) { return get_number(x, p); };
  if (v.contains("n_sites")) g.n_sites = get_list<int>(v["n_sites"], join_path(path, "n_sites"), get_int);
  if (v.contains("delta")) g.delta = get_list<double>(v["delta"], join_path(path, "delta"), num);
  if (v.contains("field_b")) g.field_b = get_list<double>(v["field_b"], join_path(path, "field_b"), num);
  if (v.contains("j")) g.j = get_list<double>(v["j"], join_path(path, "j"), num);
  if (v.contains("temperatures")) g.temperatures = parse_temperatures(v["temperatures"], join_path(path, "temperatures"));
  if (v.contains("bell_frames")) {
    g.bell_frames = get_int(v["bell_frames"], join_path(path, "bell_frames"));
    if (g.bell_frames < 0) throw ConfigError(join_path(path, "bell_frames") + ": must be >= 0");
  }
  for (std::size_t i = 0; i < g.n_sites.size(); ++i) {
    if (g.n_sites[i] < 2 || g.n_sites[i] > kFullPathSiteCap) {
      throw ConfigError(join_path(path, "n_sites") + "[" + std::to_string(i) + "]: must lie in [2, " +
                        std::to_string(kFullPathSiteCap) + "]");
    }
  }
  return g;
}

inline OutputFormat parse_format(const std::string& s, const std::string& path) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError(path + ": expected \"csv\" or \"json\"");
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& doc) {
  using detail::join_path;
  detail::reject_unknown(doc, "", {"model", "temperatures", "pair", "outputs", "seed", "format", "verify"});
  RunConfig cfg;
  if (doc.contains("model")) cfg.model = detail::parse_model(doc["model"], "model");
  if (doc.contains("temperatures")) cfg.temperatures = detail::parse_temperatures(doc["temperatures"], "temperatures");
  if (doc.contains("pair")) {
    const auto& p = doc["pair"];
    if (!p.is_array() || p.size() != 2) throw ConfigError("pair: expected [i, j]");
    cfg.pair = {detail::get_int(p[0], "pair[0]"), detail::get_int(p[1], "pair[1]")};
    if (cfg.model) {
      try {
        check_pair(cfg.pair.first, cfg.pair.second, cfg.model->n_sites);
      } catch (const ModelError& e) {
        throw ConfigError(std::string("pair: ") + e.what());
      }
    }
  }
  if (doc.contains("outputs")) {
    cfg.outputs = detail::get_list<std::string>(doc["outputs"], "outputs", detail::get_string);
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("format")) cfg.format = detail::parse_format(detail::get_string(doc["format"], "format"), "format");
  if (doc.contains("verify")) cfg.verify = detail::parse_verify(doc["verify"], "verify");
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON (") + e.what() + ")");
  }
  return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace spinring
