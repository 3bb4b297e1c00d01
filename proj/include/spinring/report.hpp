#pragma once

// Every concurrence route that applies to a given model and pair, evaluated
// side by side with the Wootters value and the Bell measure.

#include "spinring/bell.hpp"
#include "spinring/entanglement.hpp"
#include "spinring/model.hpp"
#include "spinring/thermo.hpp"
#include "spinring/twoqubit.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace spinring {

struct EntanglementReport {
  TwoQubitRDM rdm;
  CorrelationSet correlations;
  ConcurrenceResult concurrence;
  std::optional<double> anisotropic_form;
  std::optional<double> field_form;
  BellResult bell;
  std::optional<double> bell_closed_form;
  std::optional<double> concurrence_from_bell;
  /// Largest |C_route - C_wootters| over all routes present.
  double max_disagreement = 0.0;
};

inline bool nearest_neighbours(std::pair<int, int> sites, int n) {
  const int d = std::abs(sites.first - sites.second);
  return d == 1 || d == n - 1;
}

struct RouteApplicability {
  bool x_form = false;
  bool correlation_form = false;
  bool energy_form = false;
  bool anisotropic_form = false;
  bool field_form = false;
  bool bell_closed_form = false;
};

inline RouteApplicability applicable_routes(const ModelSpec& spec, const TwoQubitRDM& rdm, double m_per_site) {
  RouteApplicability a;
  const bool nn = nearest_neighbours(rdm.sites, spec.n_sites);
  const auto* u = spec.uniform_coupling();
  const bool j_nonzero = u != nullptr && u->j != 0.0;
  const bool no_field = spec.field_b == 0.0;
  a.x_form = rdm.is_x_form();
  a.correlation_form = no_field && conserves_sz(spec) && std::abs(m_per_site) <= kMagnetizationTolerance &&
                       std::abs(rdm.z.imag()) <= kMagnetizationTolerance;
  a.energy_form = spec.is_xxx() && nn && j_nonzero;
  a.anisotropic_form = u != nullptr && no_field && nn && j_nonzero;
  a.field_form = spec.is_isotropic() && nn && j_nonzero;
  a.bell_closed_form = a.energy_form;
  return a;
}

inline EntanglementReport entanglement_report(const ModelSpec& spec, const TwoQubitRDM& rdm, const ThermoPoint& tp) {
  EntanglementReport r;
  r.rdm = rdm;
  r.correlations = correlations(rdm);
  r.concurrence = concurrence_wootters(rdm);
  const RouteApplicability a = applicable_routes(spec, rdm, r.correlations.m_per_site);
  const auto* u = spec.uniform_coupling();

  if (a.x_form) r.concurrence.x_form = concurrence_x_form(rdm);
  if (a.correlation_form) r.concurrence.correlation_form = concurrence_from_correlations(r.correlations);
  if (a.energy_form) r.concurrence.energy_form = concurrence_xxx_energy(tp.u_per_site, u->j);
  r.concurrence.refresh_disagreement();

  if (a.anisotropic_form) {
    r.anisotropic_form = concurrence_anisotropic(tp.u_per_site, u->j, u->delta, r.correlations.zz());
  }
  if (a.field_form) r.field_form = concurrence_xxx_field(rdm, tp.u_per_site, u->j, spec.field_b);

  r.bell = violation_measure(rdm);
  if (a.bell_closed_form) {
    r.bell_closed_form = violation_xxx(tp.u, u->j, spec.n_sites);
    r.concurrence_from_bell = concurrence_vs_violation(r.bell.measure, regime_of(u->j));
  }

  r.max_disagreement = r.concurrence.max_disagreement;
  for (const auto& route : {r.anisotropic_form, r.field_form, r.concurrence_from_bell}) {
    if (route) r.max_disagreement = std::max(r.max_disagreement, std::abs(*route - r.concurrence.wootters));
  }
  return r;
}

}  // namespace spinring
