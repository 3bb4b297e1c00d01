#pragma once

// Invariant suite over a grid of rings and temperatures. Each named invariant
// keeps its largest residual and the point where it occurred.

#include "spinring/bell.hpp"
#include "spinring/config.hpp"
#include "spinring/entanglement.hpp"
#include "spinring/model.hpp"
#include "spinring/parallel.hpp"
#include "spinring/report.hpp"
#include "spinring/spectral.hpp"
#include "spinring/sweep.hpp"
#include "spinring/thermo.hpp"
#include "spinring/twoqubit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace spinring {

struct InvariantCheck {
  std::string name;
  double tolerance = 0.0;
  double max_residual = 0.0;
  std::size_t evaluations = 0;
  bool saw_nan = false;
  std::string worst;

  bool passed() const { return !saw_nan && max_residual <= tolerance; }
};

class CheckSet {
 public:
  void record(const std::string& name, double tolerance, double residual, const std::string& where) {
    InvariantCheck& c = find(name, tolerance);
    ++c.evaluations;
    if (std::isnan(residual)) {
      if (!c.saw_nan) c.worst = where + " (nan)";
      c.saw_nan = true;
      return;
    }
    if (c.evaluations == 1 || residual > c.max_residual) {
      c.max_residual = std::max(c.max_residual, residual);
      c.worst = where;
    }
  }

  void merge(const CheckSet& other) {
    for (const auto& o : other.checks_) {
      InvariantCheck& c = find(o.name, o.tolerance);
      if (o.evaluations == 0) continue;
      const bool first = c.evaluations == 0;
      c.evaluations += o.evaluations;
      if (o.saw_nan && !c.saw_nan) {
        c.saw_nan = true;
        c.worst = o.worst;
      }
      if (!c.saw_nan && (first || o.max_residual > c.max_residual)) {
        c.max_residual = std::max(c.max_residual, o.max_residual);
        c.worst = o.worst;
      }
    }
  }

  const std::vector<InvariantCheck>& checks() const { return checks_; }

  bool passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const auto& c) { return c.passed(); });
  }

 private:
  InvariantCheck& find(const std::string& name, double tolerance) {
    for (auto& c : checks_) {
      if (c.name == name) return c;
    }
    checks_.push_back(InvariantCheck{name, tolerance});
    return checks_.back();
  }

  std::vector<InvariantCheck> checks_;
};

struct VerifyOptions {
  VerifyGrid grid;
  std::uint64_t seed = 20240229;
  unsigned threads = 1;
  /// Explicit rings to check instead of the grid product.
  std::vector<ModelSpec> specs;
  /// Test hook: edits the dense Hamiltonian before it is checked and diagonalized.
  std::function<void(OperatorMatrix&)> hamiltonian_override;
};

struct VerifyReport {
  CheckSet checks;
  std::size_t specs = 0;
  std::size_t points = 0;
  bool passed() const { return checks.passed(); }
};

inline std::string describe(const ModelSpec& spec) {
  std::ostringstream os;
  os << "N=" << spec.n_sites;
  if (const auto* u = spec.uniform_coupling()) {
    os << " J=" << u->j << " delta=" << u->delta;
  } else {
    os << " general";
  }
  os << " B=" << spec.field_b;
  return os.str();
}

namespace detail {

inline std::vector<ModelSpec> verify_specs(const VerifyGrid& g) {
  std::vector<ModelSpec> out;
  for (int n : g.n_sites) {
    for (double j : g.j) {
      for (double d : g.delta) {
        for (double b : g.field_b) out.push_back(ModelSpec::uniform(n, j, d, b));
      }
    }
  }
  return out;
}

inline void verify_one(CheckSet& cs, const ModelSpec& spec, const VerifyOptions& opt, std::uint64_t spec_index) {
  const std::string where = describe(spec);
  const int n = spec.n_sites;
  const auto* uc = spec.uniform_coupling();
  const double j = uc ? uc->j : 0.0;
  const bool zero_field = spec.field_b == 0.0;
  const bool xxx = spec.is_xxx();

  OperatorMatrix h = build_hamiltonian(spec);
  if (opt.hamiltonian_override) opt.hamiltonian_override(h);
  cs.record("hamiltonian_hermitian", 1e-12, hermiticity_defect(h.entries), where);
  if (uc) {
    const ModelSpec general = ModelSpec::general(n, ring_pattern(n, uc->j, uc->delta).jx,
                                                 ring_pattern(n, uc->j, uc->delta).jy,
                                                 ring_pattern(n, uc->j, uc->delta).jz, spec.field_b);
    cs.record("uniform_matches_general", 0.0, max_abs(build_hamiltonian(general).entries - h.entries), where);
  }

  const auto sym = symmetry_report(h, n);
  cs.record("commutes_with_sz", kCommutatorTolerance, residual_of(sym, "S_z"), where);
  if (uc) cs.record("commutes_with_shift", kCommutatorTolerance, residual_of(sym, "T_shift"), where);
  if (zero_field) cs.record("commutes_with_flip", kCommutatorTolerance, residual_of(sym, "Q_x"), where);
  if (xxx) {
    cs.record("commutes_with_sx", kCommutatorTolerance, residual_of(sym, "S_x"), where);
    cs.record("commutes_with_sy", kCommutatorTolerance, residual_of(sym, "S_y"), where);
  }

  const SpectralDecomposition full = diagonalize_full(h);
  const SpectralDecomposition sd = diagonalize(spec);
  cs.record("eigen_residual", 1e-9, max_eigen_residual(h.entries, sd), where);
  cs.record("eigen_orthonormality", 1e-9, orthonormality_defect(sd), where);
  cs.record("sector_matches_full", 1e-9, (full.eigenvalues() - sd.eigenvalues()).cwiseAbs().maxCoeff(), where);
  const double tr = h.entries.trace().real();
  cs.record("eigenvalue_sum_is_trace", 1e-8, std::abs(sd.eigenvalues().sum() - tr) / std::max(1.0, std::abs(tr)),
            where);
  if (spec.field_b != 0.0) {
    ModelSpec reversed = spec;
    reversed.field_b = -spec.field_b;
    cs.record("field_reversal_spectrum", 1e-10,
              (diagonalize(reversed).eigenvalues() - sd.eigenvalues()).cwiseAbs().maxCoeff(), where);
  }

  const PairProjection p12(sd, 1, 2);
  const PairProjection p23(sd, 2, n >= 3 ? 3 : 1);

  std::vector<double> temps = opt.grid.temperatures.values();
  std::sort(temps.begin(), temps.end());
  std::optional<double> prev_u;
  std::optional<double> prev_c;
  for (std::size_t ti = 0; ti < temps.size(); ++ti) {
    const double t = temps[ti];
    char buf[64];
    std::snprintf(buf, sizeof buf, " T=%.6g", t);
    const std::string at = where + buf;

    const BoltzmannWeights w = boltzmann_weights(sd, t);
    const ThermoPoint tp = thermo_point(sd, w);
    const GibbsState rho = gibbs_state(sd, t);
    cs.record("gibbs_hermitian", 1e-12, hermiticity_defect(rho.matrix), at);
    cs.record("gibbs_trace", 1e-12, std::abs(rho.matrix.trace() - cplx(1.0)), at);
    cs.record("gibbs_positive", 1e-12, std::max(0.0, -min_eigenvalue(rho.matrix)), at);

    const TwoQubitRDM rdm = thermal_pair_rdm(p12, w);
    const TwoQubitRDM traced = reduce_to_pair(rho, 1, 2);
    const CorrelationSet g = correlations(rho, 1, 2);
    cs.record("pair_state_matches_partial_trace", 1e-12, max_abs(rdm.matrix - traced.matrix), at);
    cs.record("pair_trace", 1e-12, std::abs(rdm.matrix.trace() - cplx(1.0)), at);
    cs.record("pair_positive", 1e-12, std::max(0.0, -min_eigenvalue(rdm.matrix)), at);
    if (conserves_sz(spec)) {
      cs.record("pair_x_form", 1e-10, rdm.off_structure_norm, at);
      cs.record("element_relations", 1e-10, check_element_relations(rdm, g).max(), at);
    }
    cs.record("correlation_bound", 1e-12, std::max(0.0, g.g.cwiseAbs().maxCoeff() - 1.0), at);
    if (uc) {
      cs.record("magnetization_matches_pair", 1e-10, std::abs(tp.m_per_site - (rdm.u_plus - rdm.u_minus)), at);
      cs.record("z_is_real", 1e-10, std::abs(rdm.z.imag()), at);
      if (n >= 3) cs.record("pair_translation", 1e-10, max_abs(thermal_pair_rdm(p23, w).matrix - rdm.matrix), at);
    }
    if (zero_field) {
      cs.record("zero_field_magnetization", 1e-10, std::abs(tp.m), at);
      cs.record("internal_energy_nonpositive", 1e-10, std::max(0.0, tp.u), at);
    }
    if (prev_u) cs.record("internal_energy_monotone", 1e-12, std::max(0.0, *prev_u - tp.u), at);
    prev_u = tp.u;

    if (xxx) {
      cs.record("z_from_energy", 1e-10, std::abs(rdm.z.real() - tp.u / (6.0 * j * n)), at);
      cs.record("gzz_from_energy", 1e-10, std::abs(g.zz() - tp.u / (3.0 * j * n)), at);
      cs.record("isotropic_correlations", 1e-10,
                std::max(std::abs(g.xx() - g.zz()), std::abs(g.yy() - g.zz())), at);
      if (std::abs(rdm.z.real()) > 1e-12) {
        const bool sign_ok = (j > 0.0) ? rdm.z.real() < 0.0 : rdm.z.real() > 0.0;
        cs.record("z_sign_opposes_j", 0.0, sign_ok ? 0.0 : std::abs(rdm.z.real()), at);
      }
    }

    const EntanglementReport rep = entanglement_report(spec, rdm, tp);
    const double c = rep.concurrence.wootters;
    cs.record("concurrence_range", 0.0, std::max({0.0, -c, c - 1.0}), at);
    cs.record("route_agreement", kRouteTolerance, rep.max_disagreement, at);
    if (xxx) {
      if (j > 0.0) {
        if (prev_c) cs.record("concurrence_monotone", 1e-12, std::max(0.0, c - *prev_c), at);
        prev_c = c;
        if (-tp.u_per_site / j - 1.0 <= 0.0) cs.record("energy_clamp_consistency", 1e-9, c, at);
      } else {
        cs.record("ferromagnetic_separable", 1e-12, c, at);
      }
      cs.record("bell_closed_form", 1e-10, std::abs(rep.bell.measure - *rep.bell_closed_form), at);
      cs.record("bell_concurrence_relation", kRouteTolerance, std::abs(*rep.concurrence_from_bell - c), at);
    }
    cs.record("bell_range", 1e-10, std::max(0.0, rep.bell.measure - kTsirelson), at);
    if (rep.bell.violates) cs.record("bell_violation_implies_entanglement", 0.0, c > 0.0 ? 0.0 : 1.0, at);
    cs.record("bell_from_correlations_only", 1e-12,
              std::abs(violation_measure(Eigen::Matrix3d(g.g)).measure - rep.bell.measure), at);
    if (opt.grid.bell_frames > 0) {
      const std::uint64_t s = frame_seed(opt.seed, spec_index * 1000 + ti);
      const double best = max_random_chsh(rep.bell.t_matrix, static_cast<std::size_t>(opt.grid.bell_frames), s);
      cs.record("random_frames_bounded", 1e-8, std::max(0.0, best - rep.bell.measure), at);
    }
  }

  const BoltzmannWeights w0 = boltzmann_weights(sd, 0.0);
  const BoltzmannWeights w_small = boltzmann_weights(sd, 1e-8);
  const double u0 = thermo_point(sd, w0).u;
  const double u_small = thermo_point(sd, w_small).u;
  cs.record("low_temperature_limit", 1e-6, std::isfinite(u_small) ? std::abs(u_small - u0) : std::numeric_limits<double>::quiet_NaN(), where);
  if (xxx && j > 0.0 && n % 2 == 0) {
    const double c0 = concurrence_wootters(thermal_pair_rdm(p12, w0)).wootters;
    cs.record("ground_state_form", kRouteTolerance, std::abs(concurrence_ground_state(sd, j, n) - c0), where);
  }

  const double t_mid = temps[temps.size() / 2];
  if (t_mid > 0.0) {
    const DerivativeResiduals d = check_derivatives(spec, t_mid);
    cs.record("energy_is_log_z_derivative", 1e-5, d.u_residual, where);
    cs.record("magnetization_is_log_z_derivative", 1e-5, d.m_residual, where);
  }
}

}  // namespace detail

inline VerifyReport run_verify(const VerifyOptions& opt) {
  const std::vector<ModelSpec> specs = opt.specs.empty() ? detail::verify_specs(opt.grid) : opt.specs;
  const auto parts = parallel_map(specs.size(), opt.threads, [&](std::size_t k) {
    CheckSet cs;
    try {
      detail::verify_one(cs, specs[k], opt, k);
      cs.record("evaluation_completed", 0.0, 0.0, describe(specs[k]));
    } catch (const std::exception& e) {
      cs.record("evaluation_completed", 0.0, 1.0, describe(specs[k]) + ": " + e.what());
    }
    return cs;
  });
  VerifyReport report;
  for (const auto& p : parts) report.checks.merge(p);
  report.specs = specs.size();
  report.points = specs.size() * static_cast<std::size_t>(opt.grid.temperatures.count);
  return report;
}

inline void write_verify_report(std::ostream& os, const VerifyReport& r) {
  os << "checked " << r.specs << " rings, " << r.points << " temperature points\n";
  for (const auto& c : r.checks.checks()) {
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-36s max=%-12.4g tol=%-8.1g n=%zu", c.passed() ? "PASS" : "FAIL",
                  c.name.c_str(), c.max_residual, c.tolerance, c.evaluations);
    os << line;
    if (!c.passed() || c.max_residual > 0.0) os << "  worst: " << c.worst;
    os << '\n';
  }
  os << (r.passed() ? "all invariants hold\n" : "invariant failures detected\n");
}

inline void write_verify_json(std::ostream& os, const VerifyReport& r) {
  os << "{\n  \"passed\": " << (r.passed() ? "true" : "false") << ",\n  \"rings\": " << r.specs
     << ",\n  \"points\": " << r.points << ",\n  \"invariants\": [";
  const auto& checks = r.checks.checks();
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    os << (i ? ",\n" : "\n") << "    {\"name\": " << json_string(c.name)
       << ", \"passed\": " << (c.passed() ? "true" : "false")
       << ", \"max_residual\": " << (c.saw_nan ? "\"nan\"" : format_number(c.max_residual))
       << ", \"tolerance\": " << format_number(c.tolerance) << ", \"evaluations\": " << c.evaluations
       << ", \"worst\": " << json_string(c.worst) << "}";
  }
  os << "\n  ]\n}\n";
}

}  // namespace spinring
