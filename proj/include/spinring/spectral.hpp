#pragma once

// Hermitian eigendecomposition, either of a full matrix or sector by sector in
// blocks of fixed total S_z. Eigenvectors are stored per block so that rings
// up to 14 sites fit in memory.

#include "spinring/model.hpp"
#include "spinring/parallel.hpp"

#include <complex>
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinring {

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input lacks a symmetry the requested path relies on.
class SymmetryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kFullPathSiteCap = 12;
inline constexpr int kSectorPathSiteCap = 14;
/// Relative tolerance for "same energy as the ground state".
inline constexpr double kDegeneracyTolerance = 1e-9;
inline constexpr double kHermitianTolerance = 1e-10;

/// Eigenpairs of one invariant subspace spanned by a set of basis states.
struct SpectralBlock {
  std::vector<std::uint32_t> basis;  // ascending global basis indices
  Eigen::VectorXd values;            // ascending
  CMatrix vectors;                   // columns in the block basis
  std::optional<int> twice_sz;       // N - 2 * popcount when the block is an S_z sector
};

namespace detail {

/// Dense Hermitian eigensolver. Uses the real symmetric driver when the input
/// has no imaginary part.
inline void hermitian_eigen(const CMatrix& a, Eigen::VectorXd& values, CMatrix& vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  values.resize(n);
  if (n == 0) {
    vectors.resize(0, 0);
    return;
  }
  if (n == 1) {
    values(0) = a(0, 0).real();
    vectors = CMatrix::Identity(1, 1);
    return;
  }
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  lapack_int info = 0;
  if (a.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::MatrixXd work = a.real();
    Eigen::MatrixXd z(n, n);
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, work.data(), n, 0.0, 0.0, 0, 0, 0.0,
                          &found, values.data(), z.data(), n, support.data());
    if (info == 0) vectors = z.cast<cplx>();
  } else {
    CMatrix work = a;
    CMatrix z(n, n);
    info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, work.data(), n, 0.0, 0.0, 0, 0, 0.0,
                          &found, values.data(), z.data(), n, support.data());
    if (info == 0) vectors = std::move(z);
  }
  if (info != 0 || found != n) {
    throw SpectralError("eigensolver failed (info = " + std::to_string(info) + ", found " +
                        std::to_string(found) + " of " + std::to_string(n) + " eigenpairs)");
  }
}

/// Makes the first non-negligible amplitude of each column real and positive.
inline void fix_phases(CMatrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double mag = std::abs(vectors(r, c));
      if (mag > 1e-10) {
        vectors.col(c) *= std::conj(vectors(r, c)) / mag;
        break;
      }
    }
  }
}

inline int log2_exact(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) return 0;
  return std::countr_zero(dim);
}

inline void require_hermitian(const CMatrix& h) {
  if (h.rows() != h.cols()) throw SpectralError("matrix is not square");
  const double scale = std::max(1.0, max_abs(h));
  const double defect = hermiticity_defect(h);
  if (!(defect <= kHermitianTolerance * scale)) {
    throw SpectralError("matrix is not Hermitian (max |A - A^dagger| = " + std::to_string(defect) +
                        ")");
  }
}

}  // namespace detail

class SpectralDecomposition {
 public:
  /// Merges blocks into one ascending spectrum. Ties are ordered by sector
  /// label.
  explicit SpectralDecomposition(std::vector<SpectralBlock> blocks, std::size_t dim)
      : blocks_(std::move(blocks)), dim_(dim), n_sites_(detail::log2_exact(dim)) {
    std::size_t total = 0;
    bool labelled = !blocks_.empty();
    for (const auto& b : blocks_) {
      if (b.values.size() != static_cast<Eigen::Index>(b.basis.size()) ||
          b.vectors.rows() != static_cast<Eigen::Index>(b.basis.size()) ||
          b.vectors.cols() != static_cast<Eigen::Index>(b.basis.size())) {
        throw SpectralError("block merge dimension mismatch");
      }
      total += b.basis.size();
      labelled = labelled && b.twice_sz.has_value();
    }
    if (total != dim_) throw SpectralError("block merge dimension mismatch");

    order_.reserve(dim_);
    for (std::uint32_t bi = 0; bi < blocks_.size(); ++bi) {
      for (std::uint32_t c = 0; c < blocks_[bi].basis.size(); ++c) order_.push_back({bi, c});
    }
    std::stable_sort(order_.begin(), order_.end(), [&](const Slot& a, const Slot& b) {
      const double ea = blocks_[a.block].values(a.column);
      const double eb = blocks_[b.block].values(b.column);
      if (ea != eb) return ea < eb;
      return blocks_[a.block].twice_sz.value_or(0) < blocks_[b.block].twice_sz.value_or(0);
    });

    eigenvalues_.resize(static_cast<Eigen::Index>(dim_));
    for (std::size_t k = 0; k < dim_; ++k) {
      eigenvalues_(static_cast<Eigen::Index>(k)) = blocks_[order_[k].block].values(order_[k].column);
    }
    if (labelled) {
      labels_.reserve(dim_);
      for (const auto& s : order_) labels_.push_back(*blocks_[s.block].twice_sz);
    }
    if (dim_ > 0) {
      const double e0 = eigenvalues_(0);
      const double tol = kDegeneracyTolerance * std::max(1.0, std::abs(e0));
      ground_degeneracy_ = static_cast<int>(
          std::count_if(eigenvalues_.begin(), eigenvalues_.end(),
                        [&](double e) { return std::abs(e - e0) <= tol; }));
    }
    if (n_sites_ > 0) compute_total_sz();
  }

  std::size_t dim() const { return dim_; }
  /// Number of sites when dim is a power of two, else 0.
  int n_sites() const { return n_sites_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double ground_energy() const { return eigenvalues_(0); }
  int ground_degeneracy() const { return ground_degeneracy_; }
  /// 2 S_z of every eigenvector, when computed sector by sector.
  std::optional<std::span<const int>> sector_labels() const {
    if (labels_.empty()) return std::nullopt;
    return std::span<const int>(labels_);
  }
  /// <v_k| sum_i sigma_iz |v_k> per eigenvector; empty unless dim = 2^N.
  const std::vector<double>& total_sz() const { return total_sz_; }
  const std::vector<SpectralBlock>& blocks() const { return blocks_; }
  /// (block index, column) holding eigenvector k.
  std::pair<std::size_t, Eigen::Index> location(std::size_t k) const {
    const Slot s = order_.at(k);
    return {s.block, static_cast<Eigen::Index>(s.column)};
  }

  /// Calls fn(basis_index, amplitude) for every stored amplitude of eigenvector k.
  template <class F>
  void for_each_amplitude(std::size_t k, F&& fn) const {
    const Slot s = order_.at(k);
    const auto& blk = blocks_[s.block];
    for (std::size_t r = 0; r < blk.basis.size(); ++r) {
      fn(blk.basis[r], blk.vectors(static_cast<Eigen::Index>(r), s.column));
    }
  }

  CVector eigenvector(std::size_t k) const {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim_));
    for_each_amplitude(k, [&](std::uint32_t b, cplx a) { v(b) = a; });
    return v;
  }

  /// Dense eigenvector matrix (columns ordered like eigenvalues()).
  CMatrix eigenvectors() const {
    if (dim_ > (std::size_t{1} << kFullPathSiteCap)) {
      throw SpectralError("dense eigenvector matrix requested beyond 2^" +
                          std::to_string(kFullPathSiteCap));
    }
    CMatrix v = CMatrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (std::size_t k = 0; k < dim_; ++k) {
      for_each_amplitude(k, [&](std::uint32_t b, cplx a) { v(b, static_cast<Eigen::Index>(k)) = a; });
    }
    return v;
  }

 private:
  struct Slot {
    std::uint32_t block;
    std::uint32_t column;
  };

  void compute_total_sz() {
    total_sz_.resize(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
      const Slot s = order_[k];
      const auto& blk = blocks_[s.block];
      if (blk.twice_sz) {
        total_sz_[k] = *blk.twice_sz;
        continue;
      }
      double acc = 0.0;
      for (std::size_t r = 0; r < blk.basis.size(); ++r) {
        acc += std::norm(blk.vectors(static_cast<Eigen::Index>(r), s.column)) *
               total_sigma_z(blk.basis[r], n_sites_);
      }
      total_sz_[k] = acc;
    }
  }

  std::vector<SpectralBlock> blocks_;
  std::size_t dim_ = 0;
  int n_sites_ = 0;
  std::vector<Slot> order_;
  Eigen::VectorXd eigenvalues_;
  std::vector<int> labels_;
  std::vector<double> total_sz_;
  int ground_degeneracy_ = 0;
};

/// Dense diagonalization of any Hermitian matrix.
inline SpectralDecomposition diagonalize_full(const CMatrix& h) {
  detail::require_hermitian(h);
  const std::size_t dim = static_cast<std::size_t>(h.rows());
  SpectralBlock blk;
  blk.basis.resize(dim);
  std::iota(blk.basis.begin(), blk.basis.end(), std::uint32_t{0});
  detail::hermitian_eigen(h, blk.values, blk.vectors);
  detail::fix_phases(blk.vectors);
  std::vector<SpectralBlock> blocks;
  blocks.push_back(std::move(blk));
  return SpectralDecomposition(std::move(blocks), dim);
}

inline SpectralDecomposition diagonalize_full(const OperatorMatrix& h) {
  return diagonalize_full(h.entries);
}

namespace detail {

/// Basis states with exactly k down spins, ascending.
inline std::vector<std::uint32_t> sector_basis(int n, int k) {
  std::vector<std::uint32_t> out;
  const std::uint32_t dim = std::uint32_t{1} << n;
  for (std::uint32_t b = 0; b < dim; ++b) {
    if (std::popcount(b) == k) out.push_back(b);
  }
  return out;
}

inline SpectralBlock solve_block(const CMatrix& h_block, std::vector<std::uint32_t> basis, int twice_sz) {
  SpectralBlock blk;
  blk.basis = std::move(basis);
  blk.twice_sz = twice_sz;
  detail::hermitian_eigen(h_block, blk.values, blk.vectors);
  detail::fix_phases(blk.vectors);
  return blk;
}

/// The S_z = 0 sector of an even ring, split by parity under the global flip
/// b -> ~b. Exchange terms commute with the flip and the field vanishes in
/// this sector, so each parity block (|r> +- |~r>)/sqrt2, r < ~r, is invariant.
inline SpectralBlock solve_flip_sector(const ModelSpec& spec, const std::vector<Bond>& bond_list) {
  const int n = spec.n_sites;
  const std::uint32_t full_mask = static_cast<std::uint32_t>(spec.dimension() - 1);
  auto basis = sector_basis(n, n / 2);
  std::vector<std::uint32_t> reps;
  for (std::uint32_t b : basis) {
    if (b < (~b & full_mask)) reps.push_back(b);
  }
  std::vector<std::int32_t> rep_of(spec.dimension(), -1);
  for (std::size_t r = 0; r < reps.size(); ++r) {
    rep_of[reps[r]] = static_cast<std::int32_t>(r);
    rep_of[~reps[r] & full_mask] = static_cast<std::int32_t>(r);
  }
  std::vector<std::int32_t> position(spec.dimension(), -1);
  for (std::size_t r = 0; r < basis.size(); ++r) position[basis[r]] = static_cast<std::int32_t>(r);

  const Eigen::Index m = static_cast<Eigen::Index>(reps.size());
  std::array<Eigen::VectorXd, 2> values;
  std::array<CMatrix, 2> vectors;
  for (int parity = 0; parity < 2; ++parity) {
    const double s = parity == 0 ? 1.0 : -1.0;
    CMatrix sub = CMatrix::Zero(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      apply_hamiltonian(spec, bond_list, reps[c], [&](std::uint32_t target, double v) {
        const std::int32_t r = rep_of[target];
        if (r < 0) throw SymmetryError("Hamiltonian term leaves its S_z sector");
        sub(r, c) += reps[r] == target ? v : s * v;
      });
    }
    hermitian_eigen(sub, values[parity], vectors[parity]);
  }

  std::vector<std::pair<double, Eigen::Index>> order;
  for (int parity = 0; parity < 2; ++parity) {
    for (Eigen::Index c = 0; c < m; ++c) order.push_back({values[parity](c), parity * m + c});
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  SpectralBlock blk;
  blk.twice_sz = 0;
  blk.values.resize(2 * m);
  blk.vectors = CMatrix::Zero(2 * m, 2 * m);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index col = 0; col < 2 * m; ++col) {
    const int parity = static_cast<int>(order[col].second / m);
    const Eigen::Index src = order[col].second % m;
    const double s = parity == 0 ? 1.0 : -1.0;
    blk.values(col) = order[col].first;
    for (Eigen::Index r = 0; r < m; ++r) {
      const cplx x = vectors[parity](r, src) * inv_sqrt2;
      blk.vectors(position[reps[r]], col) = x;
      blk.vectors(position[~reps[r] & full_mask], col) = s * x;
    }
  }
  blk.basis = std::move(basis);
  fix_phases(blk.vectors);
  return blk;
}

}  // namespace detail

/// Block diagonalization of a dense Hamiltonian by S_z sector. The input must
/// commute with S_z: no entry may connect basis states of different popcount.
inline SpectralDecomposition diagonalize_sectored(const OperatorMatrix& h, const ModelSpec& spec,
                                                  unsigned threads = 1) {
  detail::require_hermitian(h.entries);
  const int n = spec.n_sites;
  if (h.dim() != (std::size_t{1} << n)) throw SpectralError("Hamiltonian dimension does not match 2^N");
  const double scale = std::max(1.0, max_abs(h.entries));
  double leak = 0.0;
  for (Eigen::Index c = 0; c < h.entries.cols(); ++c) {
    for (Eigen::Index r = 0; r < h.entries.rows(); ++r) {
      if (std::popcount(static_cast<std::uint32_t>(r)) != std::popcount(static_cast<std::uint32_t>(c))) {
        leak = std::max(leak, std::abs(h.entries(r, c)));
      }
    }
  }
  if (leak > kCommutatorTolerance * scale) {
    throw SymmetryError("Hamiltonian does not conserve S_z (sector leakage " + std::to_string(leak) + ")");
  }
  auto blocks = parallel_map(static_cast<std::size_t>(n + 1), threads, [&](std::size_t k) {
    auto basis = detail::sector_basis(n, static_cast<int>(k));
    const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
    CMatrix sub(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      for (Eigen::Index r = 0; r < m; ++r) sub(r, c) = h.entries(basis[r], basis[c]);
    }
    return detail::solve_block(sub, std::move(basis), n - 2 * static_cast<int>(k));
  });
  return SpectralDecomposition(std::move(blocks), h.dim());
}

/// Builds each S_z sector directly from the bond list, without a dense 2^N
/// matrix. Sectors with more than N/2 down spins are obtained from their
/// spin-flipped partners: every exchange term is invariant under the global
/// flip and the uniform field only shifts the energies.
inline SpectralDecomposition diagonalize_sectored(const ModelSpec& spec, unsigned threads = 1) {
  validate(spec);
  const int n = spec.n_sites;
  if (n > kSectorPathSiteCap) {
    throw ModelError("sector path is limited to " + std::to_string(kSectorPathSiteCap) + " sites");
  }
  if (!conserves_sz(spec)) throw SymmetryError("couplings with Jx != Jy do not conserve S_z");
  const auto bond_list = bonds(spec);
  const std::uint32_t full_mask = static_cast<std::uint32_t>(spec.dimension() - 1);

  const int half = n / 2;
  auto solved = parallel_map(static_cast<std::size_t>(half + 1), threads, [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    if (2 * k == n) return detail::solve_flip_sector(spec, bond_list);
    auto basis = detail::sector_basis(n, k);
    std::vector<std::int32_t> position(spec.dimension(), -1);
    for (std::size_t r = 0; r < basis.size(); ++r) position[basis[r]] = static_cast<std::int32_t>(r);
    const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
    CMatrix sub = CMatrix::Zero(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      apply_hamiltonian(spec, bond_list, basis[c], [&](std::uint32_t target, double v) {
        const std::int32_t r = position[target];
        if (r < 0) throw SymmetryError("Hamiltonian term leaves its S_z sector");
        sub(r, c) += v;
      });
    }
    return detail::solve_block(sub, std::move(basis), n - 2 * k);
  });

  std::vector<SpectralBlock> blocks(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= half; ++k) blocks[k] = std::move(solved[k]);
  for (int k = half + 1; k <= n; ++k) {
    const SpectralBlock& src = blocks[n - k];
    SpectralBlock blk;
    blk.twice_sz = n - 2 * k;
    // Complementing every bit reverses the ascending order of the basis.
    blk.basis.resize(src.basis.size());
    std::transform(src.basis.rbegin(), src.basis.rend(), blk.basis.begin(),
                   [&](std::uint32_t b) { return ~b & full_mask; });
    blk.vectors = src.vectors.colwise().reverse();
    detail::fix_phases(blk.vectors);
    // Field energy B (N - 2k') moves from k' = n - k to k.
    const double shift = spec.field_b * static_cast<double>(blk.twice_sz.value() - *src.twice_sz);
    blk.values = src.values.array() + shift;
    blocks[k] = std::move(blk);
  }
  return SpectralDecomposition(std::move(blocks), spec.dimension());
}

/// Sector path when S_z is conserved, full path otherwise.
inline SpectralDecomposition diagonalize(const ModelSpec& spec, unsigned threads = 1) {
  validate(spec);
  if (conserves_sz(spec)) return diagonalize_sectored(spec, threads);
  if (spec.n_sites > kFullPathSiteCap) {
    throw ModelError("full path is limited to " + std::to_string(kFullPathSiteCap) + " sites");
  }
  return diagonalize_full(build_hamiltonian(spec));
}

/// max_k ||H v_k - E_k v_k|| / max(1, |E_k|).
inline double max_eigen_residual(const CMatrix& h, const SpectralDecomposition& sd) {
  double worst = 0.0;
  for (std::size_t k = 0; k < sd.dim(); ++k) {
    const CVector v = sd.eigenvector(k);
    const double e = sd.eigenvalues()(static_cast<Eigen::Index>(k));
    worst = std::max(worst, (h * v - e * v).norm() / std::max(1.0, std::abs(e)));
  }
  return worst;
}

/// max |V^dagger V - I| entry.
inline double orthonormality_defect(const SpectralDecomposition& sd) {
  const CMatrix v = sd.eigenvectors();
  return max_abs(v.adjoint() * v - CMatrix::Identity(v.rows(), v.cols()));
}

}  // namespace spinring
