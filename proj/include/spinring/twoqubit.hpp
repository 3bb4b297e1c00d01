#pragma once

// Two-site reduced density matrices, their X-form elements and the
// correlation tensor G_ab = <sigma_ia sigma_jb>.
//
// Pair basis {|00>, |01>, |10>, |11>} with site i in the first slot.
// z = <sigma_i^+ sigma_j^-> sits at row |10>, column |01>.

#include "spinring/model.hpp"
#include "spinring/parallel.hpp"
#include "spinring/spectral.hpp"
#include "spinring/thermo.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace spinring {

using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kXFormTolerance = 1e-8;

struct TwoQubitRDM {
  std::pair<int, int> sites{1, 2};
  Matrix4c matrix = Matrix4c::Zero();
  double u_plus = 0.0;
  double u_minus = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  cplx z{};
  /// Largest modulus among the ten entries outside the X pattern.
  double off_structure_norm = 0.0;

  bool is_x_form(double tol = kXFormTolerance) const { return off_structure_norm <= tol; }
};

inline TwoQubitRDM make_rdm(const Matrix4c& m, int i = 1, int j = 2) {
  TwoQubitRDM r;
  r.sites = {i, j};
  r.matrix = m;
  r.u_plus = m(0, 0).real();
  r.w1 = m(1, 1).real();
  r.w2 = m(2, 2).real();
  r.u_minus = m(3, 3).real();
  r.z = m(2, 1);
  double off = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const bool in_pattern = a == b || (a == 1 && b == 2) || (a == 2 && b == 1);
      if (!in_pattern) off = std::max(off, std::abs(m(a, b)));
    }
  }
  r.off_structure_norm = off;
  return r;
}

inline void check_pair(int i, int j, int n) {
  if (i < 1 || i > n || j < 1 || j > n) {
    throw ModelError("pair (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range [1, " +
                     std::to_string(n) + "]");
  }
  if (i == j) throw ModelError("pair sites must differ");
}

/// Partial trace over every site except i and j.
inline TwoQubitRDM reduce_to_pair(const GibbsState& rho, int i, int j) {
  const int n = rho.n_sites();
  if (n == 0) throw ModelError("state dimension is not a power of two");
  check_pair(i, j, n);
  const std::uint32_t mi = site_mask(n, i - 1);
  const std::uint32_t mj = site_mask(n, j - 1);
  const std::uint32_t dim = static_cast<std::uint32_t>(rho.dim());
  Matrix4c out = Matrix4c::Zero();
  for (std::uint32_t rest = 0; rest < dim; ++rest) {
    if (rest & (mi | mj)) continue;
    std::array<std::uint32_t, 4> idx{};
    for (int a = 0; a < 4; ++a) idx[a] = rest | ((a & 2) ? mi : 0u) | ((a & 1) ? mj : 0u);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) out(a, b) += rho.matrix(idx[a], idx[b]);
    }
  }
  return make_rdm(out, i, j);
}

/// Pair reduced matrices of every eigenvector, |v_k><v_k| traced down to (i, j).
/// Thermal pair states are then weighted sums of 4x4 matrices.
class PairProjection {
 public:
  PairProjection(const SpectralDecomposition& sd, int i, int j, unsigned threads = 1) : sites_{i, j} {
    const int n = sd.n_sites();
    if (n == 0) throw ModelError("spectrum dimension is not a power of two");
    check_pair(i, j, n);
    const std::uint32_t mi = site_mask(n, i - 1);
    const std::uint32_t mj = site_mask(n, j - 1);
    per_state_.resize(sd.dim());

    // Group each block's basis states by the spins outside the pair.
    struct Groups {
      std::vector<std::array<std::int32_t, 4>> members;
    };
    std::vector<Groups> groups(sd.blocks().size());
    for (std::size_t bi = 0; bi < sd.blocks().size(); ++bi) {
      const auto& basis = sd.blocks()[bi].basis;
      std::vector<std::int32_t> slot_of_rest(sd.dim(), -1);
      for (std::size_t r = 0; r < basis.size(); ++r) {
        const std::uint32_t b = basis[r];
        const std::uint32_t rest = b & ~(mi | mj);
        const int a = ((b & mi) ? 2 : 0) | ((b & mj) ? 1 : 0);
        std::int32_t& g = slot_of_rest[rest];
        if (g < 0) {
          g = static_cast<std::int32_t>(groups[bi].members.size());
          groups[bi].members.push_back({-1, -1, -1, -1});
        }
        groups[bi].members[g][a] = static_cast<std::int32_t>(r);
      }
    }

    parallel_map(sd.dim(), threads, [&](std::size_t k) {
      const auto [bi, col] = sd.location(k);
      const auto& vec = sd.blocks()[bi].vectors;
      Matrix4c m = Matrix4c::Zero();
      for (const auto& g : groups[bi].members) {
        std::array<cplx, 4> c{};
        for (int a = 0; a < 4; ++a) c[a] = g[a] < 0 ? cplx{} : vec(g[a], col);
        for (int a = 0; a < 4; ++a) {
          if (c[a] == cplx{}) continue;
          for (int b = 0; b < 4; ++b) m(a, b) += c[a] * std::conj(c[b]);
        }
      }
      per_state_[k] = m;
      return 0;
    });
  }

  std::pair<int, int> sites() const { return sites_; }
  const Matrix4c& state(std::size_t k) const { return per_state_.at(k); }
  std::size_t size() const { return per_state_.size(); }

 private:
  std::pair<int, int> sites_;
  std::vector<Matrix4c> per_state_;
};

inline TwoQubitRDM thermal_pair_rdm(const PairProjection& proj, const BoltzmannWeights& w) {
  if (w.p.size() != proj.size()) throw ModelError("weights do not match the projection");
  Matrix4c m = Matrix4c::Zero();
  for (std::size_t k = 0; k < proj.size(); ++k) {
    if (w.p[k] != 0.0) m += w.p[k] * proj.state(k);
  }
  return make_rdm(m, proj.sites().first, proj.sites().second);
}

/// Reduced state of the thermal state at `temperature`, without forming rho.
inline TwoQubitRDM thermal_pair_rdm(const SpectralDecomposition& sd, double temperature, int i, int j) {
  return thermal_pair_rdm(PairProjection(sd, i, j), boltzmann_weights(sd, temperature));
}

// ---------------------------------------------------------------------------
// Correlations

struct CorrelationSet {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();  // g(a, b) = <sigma_ia sigma_jb>, a, b in {x, y, z}
  double m_per_site = 0.0;                      // <sigma_iz>

  double xx() const { return g(0, 0); }
  double yy() const { return g(1, 1); }
  double zz() const { return g(2, 2); }
};

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

inline Eigen::Matrix2cd pauli2(Axis a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case Axis::x: m << 0, 1, 1, 0; break;
    case Axis::y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case Axis::z: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// sigma_a (x) sigma_b on the pair.
inline Matrix4c pauli_pair(Axis a, Axis b) {
  return Eigen::kroneckerProduct(pauli2(a), pauli2(b));
}

/// G from the full state: tr(sigma_ia sigma_jb rho) evaluated by bit action on
/// rho, independent of the partial trace.
inline CorrelationSet correlations(const GibbsState& rho, int i, int j) {
  const int n = rho.n_sites();
  if (n == 0) throw ModelError("state dimension is not a power of two");
  check_pair(i, j, n);
  CorrelationSet cs;
  const std::uint32_t dim = static_cast<std::uint32_t>(rho.dim());
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      cplx acc{};
      for (std::uint32_t col = 0; col < dim; ++col) {
        const auto [mid, amp_j] = pauli_action(kAxes[b], col, n, j - 1);
        const auto [row, amp_i] = pauli_action(kAxes[a], mid, n, i - 1);
        // tr(A rho) = sum_col <col| rho A |col> = sum_col A(row, col) rho(col, row)
        acc += amp_i * amp_j * rho.matrix(col, row);
      }
      cs.g(a, b) = acc.real();
    }
  }
  double m = 0.0;
  for (std::uint32_t b = 0; b < dim; ++b) m += spin_z(b, n, i - 1) * rho.matrix(b, b).real();
  cs.m_per_site = m;
  return cs;
}

inline CorrelationSet correlations(const TwoQubitRDM& rdm) {
  CorrelationSet cs;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) cs.g(a, b) = (rdm.matrix * pauli_pair(kAxes[a], kAxes[b])).trace().real();
  }
  const Matrix4c sz1 = Eigen::kroneckerProduct(pauli2(Axis::z), Eigen::Matrix2cd::Identity());
  cs.m_per_site = (rdm.matrix * sz1).trace().real();
  return cs;
}

/// Residuals of the element relations for an S_z-conserving, translation
/// invariant ring. With z = <sigma_i^+ sigma_j^->, Im z = (G_yx - G_xy) / 4.
struct ElementResiduals {
  double u_plus = 0.0;     // u+ - (1 + 2M + G_zz) / 4
  double u_minus = 0.0;    // u- - (1 - 2M + G_zz) / 4
  double difference = 0.0; // (u+ - u-) - M
  double sum = 0.0;        // (u+ + u-) - (1 + G_zz) / 2
  double re_z = 0.0;       // Re z - (G_xx + G_yy) / 4
  double im_z = 0.0;       // Im z - (G_yx - G_xy) / 4

  double max() const {
    return std::max({std::abs(u_plus), std::abs(u_minus), std::abs(difference), std::abs(sum),
                     std::abs(re_z), std::abs(im_z)});
  }
};

inline ElementResiduals check_element_relations(const TwoQubitRDM& rdm, const CorrelationSet& cs) {
  const double m = cs.m_per_site;
  const auto& g = cs.g;
  ElementResiduals r;
  r.u_plus = rdm.u_plus - 0.25 * (1.0 + 2.0 * m + g(2, 2));
  r.u_minus = rdm.u_minus - 0.25 * (1.0 - 2.0 * m + g(2, 2));
  r.difference = (rdm.u_plus - rdm.u_minus) - m;
  r.sum = (rdm.u_plus + rdm.u_minus) - 0.5 * (1.0 + g(2, 2));
  r.re_z = rdm.z.real() - 0.25 * (g(0, 0) + g(1, 1));
  r.im_z = rdm.z.imag() - 0.25 * (g(1, 0) - g(0, 1));
  return r;
}

/// Minimum eigenvalue of a Hermitian matrix.
inline double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace spinring
