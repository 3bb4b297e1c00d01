#pragma once

// Threshold temperature of the isotropic antiferromagnetic ring, the root of
// -U(T)/(N J) - 1, and the scan of u(N) = U/(-N J).

#include "spinring/entanglement.hpp"
#include "spinring/model.hpp"
#include "spinring/parallel.hpp"
#include "spinring/spectral.hpp"
#include "spinring/thermo.hpp"
#include "spinring/twoqubit.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinring {

class ThresholdError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ThresholdStatus { found, never_entangled, entangled_everywhere_in_range };

inline const char* status_name(ThresholdStatus s) {
  switch (s) {
    case ThresholdStatus::found: return "found";
    case ThresholdStatus::never_entangled: return "never_entangled";
    case ThresholdStatus::entangled_everywhere_in_range: return "entangled_everywhere_in_range";
  }
  return "unknown";
}

inline constexpr double kThresholdLowTemperature = 1e-6;
inline constexpr double kThresholdHighCap = 1e6;
inline constexpr double kThresholdRelativeWidth = 1e-8;

struct ThresholdResult {
  std::optional<double> t_c;
  std::pair<double, double> bracket{0.0, 0.0};
  int iterations = 0;
  std::optional<double> u_of_n;  // U(t_c)/(-N J)
  ThresholdStatus status = ThresholdStatus::never_entangled;

  // Wootters concurrence around t_c: relative offsets 1e-3 and absolute 1e-4.
  double c_below_relative = 0.0;
  double c_above_relative = 0.0;
  double c_below_absolute = 0.0;
  double c_above_absolute = 0.0;
  bool two_sided_check = false;
};

/// Wootters concurrence of the nearest-neighbour pair (1, 2) at temperature T.
inline double nearest_neighbour_concurrence(const SpectralDecomposition& sd, const PairProjection& proj,
                                            double temperature) {
  return concurrence_wootters(thermal_pair_rdm(proj, boltzmann_weights(sd, temperature))).wootters;
}

inline ThresholdResult find_threshold(const ModelSpec& spec, const SpectralDecomposition& sd) {
  validate(spec);
  if (!spec.is_xxx()) throw ThresholdError("threshold search needs the isotropic ring without field");
  const double j = spec.uniform_coupling()->j;
  if (!(j > 0.0)) {
    throw ThresholdError("threshold search needs J > 0; ferromagnetic rings carry no pairwise entanglement");
  }
  if (sd.n_sites() != spec.n_sites) throw ThresholdError("spectrum does not belong to this model");

  const int n = spec.n_sites;
  const PairProjection proj(sd, 1, 2);
  auto f = [&](double t) { return -thermo_point(sd, boltzmann_weights(sd, t)).u / (n * j) - 1.0; };

  ThresholdResult out;
  if (nearest_neighbour_concurrence(sd, proj, kThresholdLowTemperature) <= kConcurrenceZeroTolerance) {
    out.status = ThresholdStatus::never_entangled;
    return out;
  }

  double lo = kThresholdLowTemperature;
  double hi = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kThresholdHighCap) {
      out.status = ThresholdStatus::entangled_everywhere_in_range;
      out.bracket = {lo, hi};
      return out;
    }
  }
  while (hi - lo > kThresholdRelativeWidth * std::max(1.0, 0.5 * (lo + hi))) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++out.iterations;
  }

  const double t_c = 0.5 * (lo + hi);
  out.status = ThresholdStatus::found;
  out.t_c = t_c;
  out.bracket = {lo, hi};
  out.u_of_n = f(t_c) + 1.0;
  out.c_below_relative = nearest_neighbour_concurrence(sd, proj, t_c * (1.0 - 1e-3));
  out.c_above_relative = nearest_neighbour_concurrence(sd, proj, t_c * (1.0 + 1e-3));
  out.c_below_absolute = nearest_neighbour_concurrence(sd, proj, std::max(t_c - 1e-4, 0.0));
  out.c_above_absolute = nearest_neighbour_concurrence(sd, proj, t_c + 1e-4);
  out.two_sided_check = out.c_below_relative > 0.0 && out.c_above_relative == 0.0 &&
                        out.c_below_absolute > 0.0 && out.c_above_absolute == 0.0;
  return out;
}

inline ThresholdResult find_threshold(const ModelSpec& spec, unsigned threads = 1) {
  return find_threshold(spec, diagonalize(spec, threads));
}

struct UScanEntry {
  int n = 0;
  double u = 0.0;  // U/(-N J); -E_GS/(N J) at T = 0
};

/// The conjecture under test: u(N) non-increasing along even N >= 4 and
/// non-decreasing along odd N. N = 2 is listed but kept out of the even branch
/// because its doubled bond inflates u(2).
struct UScan {
  double temperature = 0.0;
  std::vector<UScanEntry> entries;
  std::optional<double> u_two;
  bool even_non_increasing = true;
  bool odd_non_decreasing = true;
};

inline UScan u_of_n_scan(const std::vector<int>& n_list, double j, double temperature, unsigned threads = 1) {
  if (!(j > 0.0)) throw ThresholdError("u(N) scan needs J > 0");
  UScan scan;
  scan.temperature = temperature;
  scan.entries = parallel_map(n_list.size(), threads, [&](std::size_t idx) {
    const int n = n_list[idx];
    const SpectralDecomposition sd = diagonalize(ModelSpec::uniform(n, j), 1);
    const double u = temperature == 0.0 ? sd.ground_energy() : thermo_point(sd, boltzmann_weights(sd, temperature)).u;
    return UScanEntry{n, -u / (n * j)};
  });

  std::vector<UScanEntry> sorted = scan.entries;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  std::optional<double> prev_even;
  std::optional<double> prev_odd;
  for (const auto& e : sorted) {
    if (e.n == 2) {
      scan.u_two = e.u;
    } else if (e.n % 2 == 0) {
      if (prev_even && e.u > *prev_even + 1e-12) scan.even_non_increasing = false;
      prev_even = e.u;
    } else {
      if (prev_odd && e.u < *prev_odd - 1e-12) scan.odd_non_decreasing = false;
      prev_odd = e.u;
    }
  }
  return scan;
}

}  // namespace spinring
