#pragma once

// Concurrence of a two-qubit state by every available route: the general
// Wootters procedure plus the closed forms valid for X-shaped, Z2-symmetric
// and isotropic ring states.

#include "spinring/model.hpp"
#include "spinring/spectral.hpp"
#include "spinring/twoqubit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

namespace spinring {

class EntanglementError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kRouteTolerance = 1e-9;
/// Concurrences within this distance of zero are reported as exactly zero.
inline constexpr double kConcurrenceZeroTolerance = 1e-12;
/// Eigenvalues of rho (sy x sy) rho* (sy x sy) below -this are treated as malformed input.
inline constexpr double kWoottersNegativeTolerance = 1e-10;

namespace detail {

/// Zero clamp and cap at 1. Values that really exceed 1 are logged.
inline double finalize_concurrence(double c, const char* route) {
  if (std::abs(c) <= kConcurrenceZeroTolerance || c < 0.0) return 0.0;
  if (c > 1.0) {
    if (c > 1.0 + kConcurrenceZeroTolerance) {
      std::clog << "spinring: " << route << " concurrence " << c << " capped at 1\n";
    }
    return 1.0;
  }
  return c;
}

inline const Matrix4c& spin_flip() {
  static const Matrix4c yy = pauli_pair(Axis::y, Axis::y);
  return yy;
}

}  // namespace detail

struct ConcurrenceResult {
  double wootters = 0.0;
  std::optional<double> x_form;
  std::optional<double> correlation_form;
  std::optional<double> energy_form;
  std::array<double, 4> lambdas{};  // descending
  double max_disagreement = 0.0;

  void refresh_disagreement() {
    max_disagreement = 0.0;
    for (const auto& route : {x_form, correlation_form, energy_form}) {
      if (route) max_disagreement = std::max(max_disagreement, std::abs(*route - wootters));
    }
  }
};

/// Wootters concurrence C = max(0, l1 - l2 - l3 - l4).
///
/// The l_k are the square roots of the eigenvalues of R = rho Y rho* Y. They
/// are obtained as singular values of F^dagger Y F*, where rho = F F^dagger
/// comes from a pivoted LDL^T factorization; this keeps the small l_k accurate
/// to rounding instead of to its square root. The eigenvalues of R itself are
/// still computed to reject malformed input.
inline ConcurrenceResult concurrence_wootters(const TwoQubitRDM& rdm) {
  const Matrix4c rho = 0.5 * (rdm.matrix + rdm.matrix.adjoint());
  const Matrix4c& y = detail::spin_flip();

  const Matrix4c r = rho * y * rho.conjugate() * y;
  Eigen::ComplexEigenSolver<Matrix4c> ces(r, false);
  if (ces.info() != Eigen::Success) throw EntanglementError("eigen decomposition of R failed");
  for (int k = 0; k < 4; ++k) {
    if (ces.eigenvalues()(k).real() < -kWoottersNegativeTolerance) {
      throw EntanglementError("R has eigenvalue " + std::to_string(ces.eigenvalues()(k).real()) +
                              " below -1e-10; input is not a density matrix");
    }
  }

  Eigen::LDLT<Matrix4c> ldlt(rho);
  Eigen::Vector4d d = ldlt.vectorD().real();
  for (int k = 0; k < 4; ++k) {
    if (d(k) < -kWoottersNegativeTolerance) {
      throw EntanglementError("density matrix is not positive semidefinite");
    }
    d(k) = std::sqrt(std::max(d(k), 0.0));
  }
  const Matrix4c lower = Matrix4c(ldlt.matrixL()) * d.cast<cplx>().asDiagonal();
  const Matrix4c f = ldlt.transpositionsP().transpose() * lower;
  if (max_abs(f * f.adjoint() - rho) > 1e-12 * std::max(1.0, max_abs(rho))) {
    throw EntanglementError("density matrix is not positive semidefinite (factorization failed)");
  }
  const Matrix4c k = f.adjoint() * y * f.conjugate();
  Eigen::JacobiSVD<Matrix4c> svd(k);

  ConcurrenceResult out;
  for (int i = 0; i < 4; ++i) out.lambdas[i] = svd.singularValues()(i);
  std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
  out.wootters = detail::finalize_concurrence(
      out.lambdas[0] - out.lambdas[1] - out.lambdas[2] - out.lambdas[3], "wootters");
  return out;
}

/// C = 2 max(0, |z| - sqrt(u+ u-)) for X-shaped states.
inline double concurrence_x_form(const TwoQubitRDM& rdm) {
  if (!rdm.is_x_form()) {
    throw EntanglementError("state is not X-shaped (off-pattern norm " +
                            std::to_string(rdm.off_structure_norm) + ")");
  }
  const double uu = std::max(rdm.u_plus * rdm.u_minus, 0.0);
  return detail::finalize_concurrence(2.0 * (std::abs(rdm.z) - std::sqrt(uu)), "x_form");
}

inline constexpr double kMagnetizationTolerance = 1e-8;

/// C = max(0, |G_xx + G_yy| - G_zz - 1) / 2, valid when the global spin flip
/// is a symmetry (vanishing magnetization, real z).
inline double concurrence_from_correlations(const CorrelationSet& cs) {
  if (std::abs(cs.m_per_site) > kMagnetizationTolerance) {
    throw EntanglementError("correlation form needs zero magnetization (M = " +
                            std::to_string(cs.m_per_site) + ")");
  }
  return detail::finalize_concurrence(0.5 * (std::abs(cs.xx() + cs.yy()) - cs.zz() - 1.0), "correlation");
}

/// Nearest-neighbour concurrence of the isotropic ring from the internal
/// energy per site:
///   J > 0:  C = max(0, -U/(J N) - 1) / 2
///   J < 0:  C = max(0,  U/(3 J N) - 1) / 2
/// cross-checked against the sign-free form max(0, 2|u| - u - 3) / 6, u = U/(J N).
inline double concurrence_xxx_energy(double u_per_site, double j) {
  if (j == 0.0) throw EntanglementError("J must be nonzero");
  const double x = u_per_site / j;
  const double branch = j > 0.0 ? 0.5 * std::max(0.0, -x - 1.0) : 0.5 * std::max(0.0, x / 3.0 - 1.0);
  const double unified = std::max(0.0, 2.0 * std::abs(x) - x - 3.0) / 6.0;
  if (std::abs(branch - unified) > 1e-12 * std::max(1.0, std::abs(x))) {
    throw EntanglementError("energy forms disagree (|U/(JN)| = " + std::to_string(std::abs(x)) +
                            " is outside the physical range)");
  }
  return detail::finalize_concurrence(branch, "energy");
}

/// C = max(0, -E_GS/(J N) - 1) / 2 for the even antiferromagnetic ring.
inline double concurrence_ground_state(const SpectralDecomposition& sd, double j, int n) {
  if (!(j > 0.0)) throw EntanglementError("ground-state form needs J > 0");
  if (n % 2 != 0) throw EntanglementError("ground-state form needs an even ring");
  if (sd.n_sites() != n) throw EntanglementError("spectrum does not belong to an N-site ring");
  return detail::finalize_concurrence(0.5 * std::max(0.0, -sd.ground_energy() / (j * n) - 1.0), "ground_state");
}

/// XXZ ring without field: C = max(0, |U/(JN) - delta G_zz| - G_zz - 1) / 2.
inline double concurrence_anisotropic(double u_per_site, double j, double delta, double g_zz) {
  if (j == 0.0) throw EntanglementError("J must be nonzero");
  const double x = u_per_site / j;
  return detail::finalize_concurrence(0.5 * (std::abs(x - delta * g_zz) - g_zz - 1.0), "anisotropic");
}

/// Isotropic ring in a field B:
///   C = 2 max(0, |z| - sqrt(s^2 - 4 M^2) / 4),  s = U/(JN) - 4 Re z + 1 - (B/J) M,
/// with M = u+ - u- from the reduced state. The field enters in units of J.
inline double concurrence_xxx_field(const TwoQubitRDM& rdm, double u_per_site, double j, double b) {
  if (j == 0.0) throw EntanglementError("J must be nonzero");
  const double m = rdm.u_plus - rdm.u_minus;
  const double s = u_per_site / j - 4.0 * rdm.z.real() + 1.0 - (b / j) * m;
  double arg = s * s - 4.0 * m * m;
  if (arg < -1e-10) {
    throw EntanglementError("field form: negative square-root argument " + std::to_string(arg));
  }
  arg = std::max(arg, 0.0);
  return detail::finalize_concurrence(2.0 * (std::abs(rdm.z) - 0.25 * std::sqrt(arg)), "field");
}

}  // namespace spinring
