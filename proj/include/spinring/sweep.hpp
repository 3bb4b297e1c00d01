#pragma once

// Temperature sweeps as tables, and their CSV / JSON renderings. Numbers are
// printed with 17 significant digits so both renderings round-trip exactly.

#include "spinring/bell.hpp"
#include "spinring/config.hpp"
#include "spinring/parallel.hpp"
#include "spinring/report.hpp"
#include "spinring/spectral.hpp"
#include "spinring/thermo.hpp"
#include "spinring/twoqubit.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace spinring {

/// Empty cells mark quantities whose preconditions fail.
using Cell = std::variant<std::monostate, double, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline const std::vector<std::string>& default_columns() {
  static const std::vector<std::string> cols{
      "T",       "log_z",   "U",    "U_per_site", "M",          "G_xx",          "G_yy",
      "G_zz",    "u_plus",  "u_minus", "z_re",    "z_im",       "C_wootters",    "C_x_form",
      "C_correlation", "C_energy", "bell_measure", "bell_violates", "max_route_disagreement"};
  return cols;
}

/// Columns that may be requested in addition to the defaults.
inline const std::vector<std::string>& optional_columns() {
  static const std::vector<std::string> cols{"M_per_site",      "w1",        "w2",
                                             "off_structure_norm", "C_anisotropic", "C_field",
                                             "C_from_bell",     "bell_closed_form", "chsh_random_max"};
  return cols;
}

inline bool known_column(const std::string& name) {
  for (const auto* list : {&default_columns(), &optional_columns()}) {
    for (const auto& c : *list) {
      if (c == name) return true;
    }
  }
  return false;
}

inline std::vector<std::string> resolve_columns(const std::vector<std::string>& requested) {
  if (requested.empty()) return default_columns();
  for (std::size_t i = 0; i < requested.size(); ++i) {
    if (!known_column(requested[i])) {
      throw ConfigError("outputs[" + std::to_string(i) + "]: unknown column \"" + requested[i] + "\"");
    }
  }
  return requested;
}

inline constexpr std::size_t kSweepBellFrames = 10000;

struct SweepPoint {
  ThermoPoint thermo;
  EntanglementReport report;
  std::optional<double> chsh_random_max;
};

inline Cell cell_of(const std::string& col, const SweepPoint& p) {
  const auto& tp = p.thermo;
  const auto& r = p.report;
  const auto& g = r.correlations.g;
  auto opt = [](const std::optional<double>& v) -> Cell {
    if (v) return *v;
    return std::monostate{};
  };
  if (col == "T") return tp.temperature;
  if (col == "log_z") return tp.log_z;
  if (col == "U") return tp.u;
  if (col == "U_per_site") return tp.u_per_site;
  if (col == "M") return tp.m;
  if (col == "M_per_site") return tp.m_per_site;
  if (col == "G_xx") return g(0, 0);
  if (col == "G_yy") return g(1, 1);
  if (col == "G_zz") return g(2, 2);
  if (col == "u_plus") return r.rdm.u_plus;
  if (col == "u_minus") return r.rdm.u_minus;
  if (col == "w1") return r.rdm.w1;
  if (col == "w2") return r.rdm.w2;
  if (col == "z_re") return r.rdm.z.real();
  if (col == "z_im") return r.rdm.z.imag();
  if (col == "off_structure_norm") return r.rdm.off_structure_norm;
  if (col == "C_wootters") return r.concurrence.wootters;
  if (col == "C_x_form") return opt(r.concurrence.x_form);
  if (col == "C_correlation") return opt(r.concurrence.correlation_form);
  if (col == "C_energy") return opt(r.concurrence.energy_form);
  if (col == "C_anisotropic") return opt(r.anisotropic_form);
  if (col == "C_field") return opt(r.field_form);
  if (col == "C_from_bell") return opt(r.concurrence_from_bell);
  if (col == "bell_measure") return r.bell.measure;
  if (col == "bell_violates") return r.bell.violates;
  if (col == "bell_closed_form") return opt(r.bell_closed_form);
  if (col == "chsh_random_max") return opt(p.chsh_random_max);
  if (col == "max_route_disagreement") return r.max_disagreement;
  throw ConfigError("unknown column \"" + col + "\"");
}

/// One row per temperature, in grid order, from a single shared spectrum.
inline Table run_sweep(const RunConfig& cfg, unsigned threads = 1) {
  if (!cfg.model) throw ConfigError("model: required for a sweep");
  const ModelSpec& spec = *cfg.model;
  check_pair(cfg.pair.first, cfg.pair.second, spec.n_sites);
  Table table;
  table.columns = resolve_columns(cfg.outputs);
  bool want_frames = false;
  for (const auto& c : table.columns) want_frames = want_frames || c == "chsh_random_max";

  const SpectralDecomposition sd = diagonalize(spec, threads);
  const PairProjection proj(sd, cfg.pair.first, cfg.pair.second, threads);
  const std::vector<double> temps = cfg.temperatures.values();
  table.rows = parallel_map(temps.size(), threads, [&](std::size_t k) {
    SweepPoint p;
    const BoltzmannWeights w = boltzmann_weights(sd, temps[k]);
    p.thermo = thermo_point(sd, w);
    p.report = entanglement_report(spec, thermal_pair_rdm(proj, w), p.thermo);
    if (want_frames) {
      p.chsh_random_max = max_random_chsh(p.report.bell.t_matrix, kSweepBellFrames, frame_seed(cfg.seed, k));
    }
    std::vector<Cell> row;
    row.reserve(table.columns.size());
    for (const auto& c : table.columns) row.push_back(cell_of(c, p));
    return row;
  });
  return table;
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "true" : "false";
  return "";
}

inline std::string json_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double x = std::get<double>(c);
    return std::isfinite(x) ? format_number(x) : "\"" + format_number(x) + "\"";
  }
  if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "true" : "false";
  return "null";
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
    os << '\n';
  }
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

/// {"seed": ..., "columns": [...], "rows": [{...}, ...]}
inline void write_json(std::ostream& os, const Table& t, std::optional<std::uint64_t> seed = std::nullopt) {
  os << "{\n";
  if (seed) os << "  \"seed\": " << *seed << ",\n";
  os << "  \"columns\": [";
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? ", " : "") << json_string(t.columns[c]);
  os << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << (r ? ",\n    {" : "\n    {");
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      os << (c ? ", " : "") << json_string(t.columns[c]) << ": " << json_cell(t.rows[r][c]);
    }
    os << "}";
  }
  os << (t.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

inline void write_table(std::ostream& os, const Table& t, OutputFormat format,
                        std::optional<std::uint64_t> seed = std::nullopt) {
  if (format == OutputFormat::csv) {
    write_csv(os, t);
  } else {
    write_json(os, t, seed);
  }
}

/// Eigenvalues with their 2 S_z labels when the sector path was used.
inline Table spectrum_table(const SpectralDecomposition& sd) {
  Table t;
  t.columns = {"index", "energy", "twice_sz"};
  const auto labels = sd.sector_labels();
  for (std::size_t k = 0; k < sd.dim(); ++k) {
    std::vector<Cell> row{static_cast<double>(k), sd.eigenvalues()(static_cast<Eigen::Index>(k))};
    if (labels) {
      row.emplace_back(static_cast<double>((*labels)[k]));
    } else {
      row.emplace_back(std::monostate{});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace spinring
