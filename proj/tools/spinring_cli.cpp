#include "spinring/spinring.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

using namespace spinring;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
  std::string config_path;
  std::string format;
  std::string out = "-";
  std::optional<std::uint64_t> seed;
  std::string threads = "1";
};

void add_common(CLI::App* sub, CommonOptions& o, bool config_required) {
  auto* cfg = sub->add_option("--config", o.config_path, "JSON configuration file");
  if (config_required) cfg->required();
  sub->add_option("--format", o.format, "csv or json (overrides the config)")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out, "output path, '-' or 'stdout' for standard output");
  sub->add_option("--seed", o.seed, "seed for random CHSH frames");
  sub->add_option("--threads", o.threads, "worker threads, a number or 'auto'");
}

unsigned parse_threads(const std::string& s) {
  if (s == "auto") return resolve_threads(0);
  try {
    std::size_t used = 0;
    const int n = std::stoi(s, &used);
    if (used == s.size() && n >= 1) return static_cast<unsigned>(n);
  } catch (const std::exception&) {
  }
  throw ConfigError("--threads: expected a positive integer or 'auto'");
}

RunConfig load(const CommonOptions& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (!o.format.empty()) cfg.format = o.format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-" && path != "stdout") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("--out: cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

const ModelSpec& require_model(const RunConfig& cfg) {
  if (!cfg.model) throw ConfigError("model: required for this command");
  return *cfg.model;
}

int cmd_sweep(const CommonOptions& o) {
  const RunConfig cfg = load(o);
  const Table t = run_sweep(cfg, parse_threads(o.threads));
  Output out(o.out);
  write_table(out.stream(), t, cfg.format, cfg.seed);
  return kExitOk;
}

int cmd_spectrum(const CommonOptions& o) {
  const RunConfig cfg = load(o);
  const SpectralDecomposition sd = diagonalize(require_model(cfg), parse_threads(o.threads));
  Output out(o.out);
  write_table(out.stream(), spectrum_table(sd), cfg.format);
  return kExitOk;
}

int cmd_verify(const CommonOptions& o) {
  const RunConfig cfg = load(o);
  VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.threads = parse_threads(o.threads);
  if (cfg.verify) {
    opt.grid = *cfg.verify;
  } else if (cfg.model) {
    if (cfg.model->n_sites > kFullPathSiteCap) {
      throw ConfigError("model.n_sites: verify builds dense matrices, at most " + std::to_string(kFullPathSiteCap) +
                        " sites");
    }
    opt.specs = {*cfg.model};
    opt.grid.temperatures = cfg.temperatures;
  }
  const VerifyReport r = run_verify(opt);
  Output out(o.out);
  if (cfg.format == OutputFormat::json) {
    write_verify_json(out.stream(), r);
  } else {
    write_verify_report(out.stream(), r);
  }
  return r.passed() ? kExitOk : kExitInvariant;
}

void write_threshold_json(std::ostream& os, const ThresholdResult& r) {
  auto num = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("null"); };
  os << "{\n  \"status\": \"" << status_name(r.status) << "\",\n  \"t_c\": " << num(r.t_c)
     << ",\n  \"bracket\": [" << format_number(r.bracket.first) << ", " << format_number(r.bracket.second)
     << "],\n  \"iterations\": " << r.iterations << ",\n  \"u_of_n\": " << num(r.u_of_n);
  if (r.t_c) {
    os << ",\n  \"u_of_n_residual\": " << format_number(std::abs(*r.u_of_n - 1.0))
       << ",\n  \"concurrence_below\": " << format_number(r.c_below_relative)
       << ",\n  \"concurrence_above\": " << format_number(r.c_above_relative)
       << ",\n  \"two_sided_check\": " << (r.two_sided_check ? "true" : "false");
  }
  os << "\n}\n";
}

int cmd_threshold(const CommonOptions& o) {
  const RunConfig cfg = load(o);
  ThresholdResult r;
  try {
    r = find_threshold(require_model(cfg), parse_threads(o.threads));
  } catch (const ThresholdError& e) {
    throw ConfigError(std::string("threshold: ") + e.what());
  }
  Output out(o.out);
  std::ostream& os = out.stream();
  if (cfg.format == OutputFormat::json) {
    write_threshold_json(os, r);
  } else {
    os << "status      " << status_name(r.status) << '\n';
    if (r.t_c) {
      os << "t_c         " << format_number(*r.t_c) << '\n'
         << "bracket     [" << format_number(r.bracket.first) << ", " << format_number(r.bracket.second) << "]\n"
         << "iterations  " << r.iterations << '\n'
         << "u(N)        " << format_number(*r.u_of_n) << "  residual " << format_number(std::abs(*r.u_of_n - 1.0))
         << '\n'
         << "C(t_c-)     " << format_number(r.c_below_relative) << "  C(t_c+) "
         << format_number(r.c_above_relative) << (r.two_sided_check ? "  ok" : "  FAILED") << '\n';
    }
  }
  if (r.t_c && !r.two_sided_check) return kExitInvariant;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact diagonalization of spin-1/2 Heisenberg rings: thermal entanglement and Bell violation"};
  app.require_subcommand(1);
  CommonOptions sweep_opt, verify_opt, threshold_opt, spectrum_opt;
  auto* sweep = app.add_subcommand("sweep", "temperature sweep of thermodynamics, concurrence and Bell measure");
  add_common(sweep, sweep_opt, true);
  auto* verify = app.add_subcommand("verify", "run the invariant suite (default grid unless configured)");
  add_common(verify, verify_opt, false);
  auto* threshold = app.add_subcommand("threshold", "threshold temperature of the isotropic antiferromagnetic ring");
  add_common(threshold, threshold_opt, true);
  auto* spectrum = app.add_subcommand("spectrum", "dump the eigenvalues");
  add_common(spectrum, spectrum_opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_opt);
    if (*verify) return cmd_verify(verify_opt);
    if (*threshold) return cmd_threshold(threshold_opt);
    if (*spectrum) return cmd_spectrum(spectrum_opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ModelError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitConfig;
}
