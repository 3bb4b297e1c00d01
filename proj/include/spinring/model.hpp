#pragma once

// Spin-1/2 ring Hamiltonians and symmetry operators in the computational basis.
//
// Basis convention: index b in [0, 2^N) is read as bits m_1 ... m_N with m_1
// the most significant bit. A zero bit is spin up (sigma_z = +1).

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spinring {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Raised for invalid model descriptions and out-of-range site arguments.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Axis { x, y, z };

inline constexpr const char* axis_name(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

inline constexpr int kDefaultSiteCap = 14;
/// Largest ring for which dense 2^N x 2^N matrices are built.
inline constexpr int kDenseSiteCap = 12;

/// J sum_i [sigma_i . sigma_{i+1} + (delta - 1) sigma_iz sigma_{i+1,z}]
struct UniformCoupling {
  double j = 1.0;
  double delta = 1.0;
};

/// sum_{i != j} (Jx_ij sx_i sx_j + Jy_ij sy_i sy_j + Jz_ij sz_i sz_j), ordered
/// pairs, so every unordered pair contributes (J_ij + J_ji).
struct GeneralCoupling {
  Eigen::MatrixXd jx;
  Eigen::MatrixXd jy;
  Eigen::MatrixXd jz;
};

struct ModelSpec {
  int n_sites = 2;
  std::variant<UniformCoupling, GeneralCoupling> coupling = UniformCoupling{};
  double field_b = 0.0;
  int site_cap = kDefaultSiteCap;

  static ModelSpec uniform(int n, double j, double delta = 1.0, double b = 0.0) {
    ModelSpec s;
    s.n_sites = n;
    s.coupling = UniformCoupling{j, delta};
    s.field_b = b;
    return s;
  }

  static ModelSpec general(int n, Eigen::MatrixXd jx, Eigen::MatrixXd jy, Eigen::MatrixXd jz,
                           double b = 0.0) {
    ModelSpec s;
    s.n_sites = n;
    s.coupling = GeneralCoupling{std::move(jx), std::move(jy), std::move(jz)};
    s.field_b = b;
    return s;
  }

  const UniformCoupling* uniform_coupling() const { return std::get_if<UniformCoupling>(&coupling); }
  const GeneralCoupling* general_coupling() const { return std::get_if<GeneralCoupling>(&coupling); }
  bool is_uniform() const { return uniform_coupling() != nullptr; }

  /// Uniform ring with delta == 1 (any field).
  bool is_isotropic() const {
    const auto* u = uniform_coupling();
    return u != nullptr && u->delta == 1.0;
  }
  /// Isotropic ring without field.
  bool is_xxx() const { return is_isotropic() && field_b == 0.0; }

  std::size_t dimension() const { return std::size_t{1} << n_sites; }
};

/// General-mode couplings that reproduce a uniform ring (including the doubled
/// bond at N = 2).
inline GeneralCoupling ring_pattern(int n, double j, double delta) {
  GeneralCoupling g{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                    Eigen::MatrixXd::Zero(n, n)};
  const double half = j / 2.0;
  const double half_z = (j * delta) / 2.0;
  for (int i = 0; i < n; ++i) {
    const int k = (i + 1) % n;
    g.jx(i, k) += half;
    g.jx(k, i) += half;
    g.jy(i, k) += half;
    g.jy(k, i) += half;
    g.jz(i, k) += half_z;
    g.jz(k, i) += half_z;
  }
  return g;
}

inline void validate(const ModelSpec& spec) {
  if (spec.site_cap < 2 || spec.site_cap > 30) {
    throw ModelError("site_cap must lie in [2, 30]");
  }
  if (spec.n_sites < 2) throw ModelError("n_sites must be >= 2");
  if (spec.n_sites > spec.site_cap) {
    throw ModelError("n_sites " + std::to_string(spec.n_sites) + " exceeds the configured cap " +
                     std::to_string(spec.site_cap));
  }
  if (!std::isfinite(spec.field_b)) throw ModelError("field_b must be finite");
  if (const auto* u = spec.uniform_coupling()) {
    if (!std::isfinite(u->j) || !std::isfinite(u->delta)) {
      throw ModelError("uniform coupling must be finite");
    }
    return;
  }
  const auto& g = *spec.general_coupling();
  const int n = spec.n_sites;
  const std::pair<const Eigen::MatrixXd*, const char*> mats[] = {
      {&g.jx, "jx"}, {&g.jy, "jy"}, {&g.jz, "jz"}};
  for (const auto& [m, name] : mats) {
    if (m->rows() != n || m->cols() != n) {
      throw ModelError(std::string(name) + " must be " + std::to_string(n) + "x" +
                       std::to_string(n));
    }
    if (!m->allFinite()) throw ModelError(std::string(name) + " has non-finite entries");
    for (int i = 0; i < n; ++i) {
      if ((*m)(i, i) != 0.0) throw ModelError(std::string(name) + " must have a zero diagonal");
      for (int k = i + 1; k < n; ++k) {
        if ((*m)(i, k) != (*m)(k, i)) throw ModelError(std::string(name) + " must be symmetric");
      }
    }
  }
}

/// True when the Hamiltonian commutes with total S_z: every flip-flop term
/// has Jx == Jy.
inline bool conserves_sz(const ModelSpec& spec) {
  if (spec.is_uniform()) return true;
  const auto& g = *spec.general_coupling();
  return (g.jx - g.jy).cwiseAbs().maxCoeff() == 0.0;
}

// ---------------------------------------------------------------------------
// Bit-level helpers

/// Bit mask of a 0-based site in an n-site basis index.
inline constexpr std::uint32_t site_mask(int n, int site0) {
  return std::uint32_t{1} << (n - 1 - site0);
}

/// sigma_z eigenvalue of a 0-based site in basis state b.
inline constexpr int spin_z(std::uint32_t b, int n, int site0) {
  return (b & site_mask(n, site0)) ? -1 : 1;
}

/// Sum of sigma_iz over all sites: N - 2 * popcount(b).
inline constexpr int total_sigma_z(std::uint32_t b, int n) {
  return n - 2 * std::popcount(b);
}

/// One exchange bond between 0-based sites i < j.
struct Bond {
  int i = 0;
  int j = 0;
  double jx = 0.0;
  double jy = 0.0;
  double jz = 0.0;
};

/// Unordered bonds sorted by (i, j). Uniform and General descriptions of the
/// same ring produce identical lists.
inline std::vector<Bond> bonds(const ModelSpec& spec) {
  const int n = spec.n_sites;
  std::map<std::pair<int, int>, Bond> acc;
  if (const auto* u = spec.uniform_coupling()) {
    const double jz = u->j * u->delta;
    for (int i = 0; i < n; ++i) {
      const int a = std::min(i, (i + 1) % n);
      const int b = std::max(i, (i + 1) % n);
      auto [it, fresh] = acc.try_emplace({a, b}, Bond{a, b, u->j, u->j, jz});
      if (!fresh) {
        it->second.jx += u->j;
        it->second.jy += u->j;
        it->second.jz += jz;
      }
    }
  } else {
    const auto& g = *spec.general_coupling();
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        Bond bond{a, b, g.jx(a, b) + g.jx(b, a), g.jy(a, b) + g.jy(b, a), g.jz(a, b) + g.jz(b, a)};
        if (bond.jx != 0.0 || bond.jy != 0.0 || bond.jz != 0.0) acc.emplace(std::pair{a, b}, bond);
      }
    }
  }
  std::vector<Bond> out;
  out.reserve(acc.size());
  for (const auto& [key, bond] : acc) out.push_back(bond);
  return out;
}

/// Applies H to basis state |b> and reports every nonzero <target|H|b> via
/// emit(target, value). The diagonal entry is reported once, first.
template <class Emit>
void apply_hamiltonian(const ModelSpec& spec, const std::vector<Bond>& bond_list, std::uint32_t b,
                       Emit&& emit) {
  const int n = spec.n_sites;
  double diag = spec.field_b * total_sigma_z(b, n);
  for (const Bond& bond : bond_list) {
    const int si = spin_z(b, n, bond.i);
    const int sj = spin_z(b, n, bond.j);
    diag += bond.jz * si * sj;
  }
  emit(b, diag);
  for (const Bond& bond : bond_list) {
    // sx sx flips both spins with amplitude 1; sy sy gives -1 for aligned
    // spins and +1 for anti-aligned ones.
    const bool aligned = spin_z(b, n, bond.i) == spin_z(b, n, bond.j);
    const double amp = bond.jx + (aligned ? -bond.jy : bond.jy);
    if (amp != 0.0) emit(b ^ site_mask(n, bond.i) ^ site_mask(n, bond.j), amp);
  }
}

// ---------------------------------------------------------------------------
// Operator matrices

struct OperatorMatrix {
  CMatrix entries;
  bool hermitian = false;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
};

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// max |A - A^dagger| entry.
inline double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

inline void check_dense_size(int n) {
  if (n < 1 || n > kDenseSiteCap) {
    throw ModelError("dense operators are limited to " + std::to_string(kDenseSiteCap) +
                     " sites (requested " + std::to_string(n) + ")");
  }
}

/// Action of sigma_axis on one 0-based site: target state and amplitude.
inline std::pair<std::uint32_t, cplx> pauli_action(Axis axis, std::uint32_t b, int n, int site0) {
  const std::uint32_t m = site_mask(n, site0);
  const bool down = (b & m) != 0;
  switch (axis) {
    case Axis::x: return {b ^ m, cplx{1.0, 0.0}};
    case Axis::y: return {b ^ m, down ? cplx{0.0, -1.0} : cplx{0.0, 1.0}};
    case Axis::z: return {b, down ? cplx{-1.0, 0.0} : cplx{1.0, 0.0}};
  }
  return {b, cplx{}};
}

/// I x ... x sigma_axis x ... x I with sigma at the 1-based `site`.
inline OperatorMatrix pauli_at(int site, Axis axis, int n) {
  check_dense_size(n);
  if (site < 1 || site > n) {
    throw ModelError("site " + std::to_string(site) + " out of range [1, " + std::to_string(n) + "]");
  }
  const std::size_t dim = std::size_t{1} << n;
  OperatorMatrix op{CMatrix::Zero(dim, dim), true};
  for (std::uint32_t b = 0; b < dim; ++b) {
    const auto [target, amp] = pauli_action(axis, b, n, site - 1);
    op.entries(target, b) = amp;
  }
  return op;
}

inline OperatorMatrix build_hamiltonian(const ModelSpec& spec) {
  validate(spec);
  check_dense_size(spec.n_sites);
  const std::size_t dim = spec.dimension();
  const auto bond_list = bonds(spec);
  OperatorMatrix h{CMatrix::Zero(dim, dim), true};
  for (std::uint32_t b = 0; b < dim; ++b) {
    apply_hamiltonian(spec, bond_list, b,
                      [&](std::uint32_t target, double v) { h.entries(target, b) += v; });
  }
  return h;
}

// Sparse forms of the symmetry generators, used for commutators.
namespace detail {

using SparseC = Eigen::SparseMatrix<cplx>;

inline SparseC collective_spin_sparse(Axis axis, int n) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(dim * static_cast<std::size_t>(n));
  for (std::uint32_t b = 0; b < dim; ++b) {
    for (int s = 0; s < n; ++s) {
      const auto [target, amp] = pauli_action(axis, b, n, s);
      trips.emplace_back(static_cast<int>(target), static_cast<int>(b), 0.5 * amp);
    }
  }
  SparseC m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

inline SparseC global_flip_sparse(Axis axis, int n) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(dim);
  for (std::uint32_t b = 0; b < dim; ++b) {
    std::uint32_t target = b;
    cplx amp{1.0, 0.0};
    for (int s = 0; s < n; ++s) {
      const auto [t, a] = pauli_action(axis, target, n, s);
      target = t;
      amp *= a;
    }
    trips.emplace_back(static_cast<int>(target), static_cast<int>(b), amp);
  }
  SparseC m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

/// Right cyclic shift: site k receives the spin of site k - 1, site 1 that of site N.
inline std::uint32_t shift_state(std::uint32_t b, int n) {
  return (b >> 1) | ((b & 1u) << (n - 1));
}

inline SparseC shift_sparse(int n) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(dim);
  for (std::uint32_t b = 0; b < dim; ++b) {
    trips.emplace_back(static_cast<int>(shift_state(b, n)), static_cast<int>(b), cplx{1.0, 0.0});
  }
  SparseC m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace detail

/// S_axis = sum_i sigma_{i,axis} / 2.
inline OperatorMatrix collective_spin(Axis axis, int n) {
  check_dense_size(n);
  return {CMatrix(detail::collective_spin_sparse(axis, n)), true};
}

/// Q_axis = sigma_axis^{(x) N}.
inline OperatorMatrix global_flip(Axis axis, int n) {
  check_dense_size(n);
  return {CMatrix(detail::global_flip_sparse(axis, n)), true};
}

/// Cyclic right shift T.
inline OperatorMatrix shift_operator(int n) {
  check_dense_size(n);
  return {CMatrix(detail::shift_sparse(n)), false};
}

struct SymmetryResidual {
  std::string name;
  double commutator_norm = 0.0;
};

inline constexpr double kCommutatorTolerance = 1e-10;

/// Max-entry norms of [H, X] for X in {S_z, S_x, S_y, Q_x, T_shift}, divided by
/// max |H| (zero for the zero Hamiltonian).
inline std::vector<SymmetryResidual> symmetry_report(const OperatorMatrix& h, int n) {
  check_dense_size(n);
  if (h.dim() != (std::size_t{1} << n)) throw ModelError("Hamiltonian dimension does not match 2^n");
  const double scale = max_abs(h.entries);
  auto norm_of = [&](const detail::SparseC& x) {
    if (scale == 0.0) return 0.0;
    const CMatrix comm = h.entries * x - CMatrix(x * h.entries);
    return max_abs(comm) / scale;
  };
  return {
      {"S_z", norm_of(detail::collective_spin_sparse(Axis::z, n))},
      {"S_x", norm_of(detail::collective_spin_sparse(Axis::x, n))},
      {"S_y", norm_of(detail::collective_spin_sparse(Axis::y, n))},
      {"Q_x", norm_of(detail::global_flip_sparse(Axis::x, n))},
      {"T_shift", norm_of(detail::shift_sparse(n))},
  };
}

inline std::vector<SymmetryResidual> symmetry_report(const ModelSpec& spec) {
  return symmetry_report(build_hamiltonian(spec), spec.n_sites);
}

inline double residual_of(const std::vector<SymmetryResidual>& report, const std::string& name) {
  for (const auto& r : report) {
    if (r.name == name) return r.commutator_norm;
  }
  throw std::out_of_range("no symmetry named " + name);
}

}  // namespace spinring
