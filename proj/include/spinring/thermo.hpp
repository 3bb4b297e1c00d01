#pragma once

// Canonical ensemble over a SpectralDecomposition. Boltzmann weights are always
// taken relative to the ground energy, w_i = exp(-beta (E_i - E_1)), so that
// large beta |E| never overflows.

#include "spinring/model.hpp"
#include "spinring/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinring {

class ThermoError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Normalized Boltzmann weights at one temperature.
struct BoltzmannWeights {
  double temperature = 0.0;
  double beta = 0.0;             // +inf at T = 0, 0 at T = +inf
  std::vector<double> p;         // normalized populations, sum = 1
  double log_weight_sum = 0.0;   // log sum_i exp(-beta (E_i - E_1))
  double energy_shift = 0.0;     // E_1
};

inline double beta_of(double temperature) {
  if (std::isnan(temperature) || temperature < 0.0) {
    throw ThermoError("temperature must be >= 0 (got " + std::to_string(temperature) + ")");
  }
  if (temperature == 0.0) return kInfinity;
  return 1.0 / temperature;
}

inline constexpr double kLevelMergeTolerance = 1e-11;

/// At T = 0 the ground space (within the degeneracy tolerance) is weighted
/// uniformly.
inline BoltzmannWeights boltzmann_weights(const SpectralDecomposition& sd, double temperature) {
  BoltzmannWeights w;
  w.temperature = temperature;
  w.beta = beta_of(temperature);
  w.energy_shift = sd.ground_energy();
  const auto& e = sd.eigenvalues();
  const std::size_t dim = sd.dim();
  w.p.resize(dim);
  if (std::isinf(w.beta)) {
    const int g = sd.ground_degeneracy();
    for (std::size_t k = 0; k < dim; ++k) w.p[k] = k < static_cast<std::size_t>(g) ? 1.0 : 0.0;
  } else {
    // Levels that agree to rounding share one energy, so that a degenerate
    // multiplet keeps equal populations however small T is.
    std::size_t start = 0;
    while (start < dim) {
      const double lead = e(static_cast<Eigen::Index>(start));
      const double tol = kLevelMergeTolerance * std::max(1.0, std::abs(lead));
      std::size_t end = start + 1;
      while (end < dim && e(static_cast<Eigen::Index>(end)) - lead <= tol) ++end;
      const double weight = std::exp(-w.beta * (lead - w.energy_shift));
      for (std::size_t k = start; k < end; ++k) w.p[k] = weight;
      start = end;
    }
  }
  double sum = 0.0;
  for (double x : w.p) sum += x;
  for (double& x : w.p) x /= sum;
  w.log_weight_sum = std::log(sum);
  return w;
}

struct ThermoPoint {
  double temperature = 0.0;
  double beta = 0.0;
  /// log Z = -beta E_1 + log_weight_sum; infinite at T = 0 unless E_1 = 0.
  double log_z = 0.0;
  double log_weight_sum = 0.0;
  double energy_shift = 0.0;
  double u = 0.0;
  double u_per_site = 0.0;
  double m = 0.0;
  double m_per_site = 0.0;
};

inline double log_partition(const BoltzmannWeights& w) {
  if (std::isinf(w.beta)) {
    if (w.energy_shift < 0.0) return kInfinity;
    if (w.energy_shift > 0.0) return -kInfinity;
    return w.log_weight_sum;
  }
  return -w.beta * w.energy_shift + w.log_weight_sum;
}

inline ThermoPoint thermo_point(const SpectralDecomposition& sd, const BoltzmannWeights& w) {
  const int n = sd.n_sites();
  if (n == 0) throw ThermoError("thermo_point needs a 2^N-dimensional spectrum");
  ThermoPoint tp;
  tp.temperature = w.temperature;
  tp.beta = w.beta;
  tp.log_weight_sum = w.log_weight_sum;
  tp.energy_shift = w.energy_shift;
  tp.log_z = log_partition(w);
  const auto& e = sd.eigenvalues();
  const auto& sz = sd.total_sz();
  for (std::size_t k = 0; k < sd.dim(); ++k) {
    if (w.p[k] == 0.0) continue;
    tp.u += w.p[k] * e(static_cast<Eigen::Index>(k));
    tp.m += w.p[k] * sz[k];
  }
  tp.u_per_site = tp.u / n;
  tp.m_per_site = tp.m / n;
  return tp;
}

inline ThermoPoint thermo_point(const SpectralDecomposition& sd, const ModelSpec& spec, double temperature) {
  if (sd.n_sites() != spec.n_sites) throw ThermoError("spectrum does not belong to this model");
  return thermo_point(sd, boltzmann_weights(sd, temperature));
}

struct GibbsState {
  CMatrix matrix;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  int n_sites() const { return detail::log2_exact(dim()); }
};

/// rho = sum_i p_i |v_i><v_i|, assembled block by block.
inline GibbsState gibbs_state(const SpectralDecomposition& sd, double temperature) {
  if (sd.dim() > (std::size_t{1} << kFullPathSiteCap)) {
    throw ThermoError("dense Gibbs state requested beyond 2^" + std::to_string(kFullPathSiteCap));
  }
  const BoltzmannWeights w = boltzmann_weights(sd, temperature);
  std::vector<std::vector<double>> block_p(sd.blocks().size());
  for (std::size_t bi = 0; bi < sd.blocks().size(); ++bi) {
    block_p[bi].assign(sd.blocks()[bi].basis.size(), 0.0);
  }
  for (std::size_t k = 0; k < sd.dim(); ++k) {
    const auto [bi, c] = sd.location(k);
    block_p[bi][static_cast<std::size_t>(c)] = w.p[k];
  }

  const Eigen::Index dim = static_cast<Eigen::Index>(sd.dim());
  GibbsState rho{CMatrix::Zero(dim, dim)};
  for (std::size_t bi = 0; bi < sd.blocks().size(); ++bi) {
    const auto& blk = sd.blocks()[bi];
    const Eigen::Map<const Eigen::VectorXd> p(block_p[bi].data(), static_cast<Eigen::Index>(block_p[bi].size()));
    const CMatrix sub = blk.vectors * p.cast<cplx>().asDiagonal() * blk.vectors.adjoint();
    for (std::size_t c = 0; c < blk.basis.size(); ++c) {
      for (std::size_t r = 0; r < blk.basis.size(); ++r) {
        rho.matrix(blk.basis[r], blk.basis[c]) = sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  return rho;
}

struct DerivativeResiduals {
  double u_residual = 0.0;
  double m_residual = 0.0;
  double u_finite_difference = 0.0;
  double m_finite_difference = 0.0;
};

/// log Z at inverse temperature beta (beta finite).
inline double log_partition_at_beta(const SpectralDecomposition& sd, double beta) {
  const auto& e = sd.eigenvalues();
  const double e0 = sd.ground_energy();
  double sum = 0.0;
  for (Eigen::Index k = 0; k < e.size(); ++k) sum += std::exp(-beta * (e(k) - e0));
  return -beta * e0 + std::log(sum);
}

/// Compares U = -d log Z / d beta and M = (1/beta) d log Z / d(-B) against the
/// expectation values of thermo_point, using central differences with
/// relative step `step` (in beta, and in B after re-diagonalizing at B +- h).
inline DerivativeResiduals check_derivatives(const ModelSpec& spec, double temperature, double step = 1e-4,
                                             unsigned threads = 1) {
  if (!(temperature > 0.0) || std::isinf(temperature)) {
    throw ThermoError("check_derivatives needs a finite temperature > 0");
  }
  const SpectralDecomposition sd = diagonalize(spec, threads);
  const ThermoPoint tp = thermo_point(sd, spec, temperature);
  const double beta = 1.0 / temperature;

  DerivativeResiduals out;
  const double hb = step * std::max(1.0, beta);
  out.u_finite_difference =
      -(log_partition_at_beta(sd, beta + hb) - log_partition_at_beta(sd, beta - hb)) / (2.0 * hb);
  out.u_residual = std::abs(out.u_finite_difference - tp.u);

  const double hf = step * std::max(1.0, std::abs(spec.field_b));
  ModelSpec up = spec;
  up.field_b = spec.field_b + hf;
  ModelSpec down = spec;
  down.field_b = spec.field_b - hf;
  const double lz_up = log_partition_at_beta(diagonalize(up, threads), beta);
  const double lz_down = log_partition_at_beta(diagonalize(down, threads), beta);
  out.m_finite_difference = -(lz_up - lz_down) / (2.0 * hf * beta);
  out.m_residual = std::abs(out.m_finite_difference - tp.m);
  return out;
}

}  // namespace spinring
