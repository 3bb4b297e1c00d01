#pragma once

// CHSH expectation values and the maximal violation measure
// B = 2 sqrt(u + u~), u >= u~ the two largest eigenvalues of T T^T with
// T_nm = tr(rho sigma_n x sigma_m).

#include "spinring/parallel.hpp"
#include "spinring/twoqubit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinring {

class BellError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

struct BellResult {
  Eigen::Matrix3d t_matrix = Eigen::Matrix3d::Zero();
  double u = 0.0;        // largest eigenvalue of T T^T
  double u_tilde = 0.0;  // second largest
  double measure = 0.0;
  bool violates = false;  // measure > 2
};

/// Unit measurement directions a, a' (first qubit) and b, b' (second qubit).
struct MeasurementFrame {
  Eigen::Vector3d a = Eigen::Vector3d::UnitX();
  Eigen::Vector3d a_prime = Eigen::Vector3d::UnitY();
  Eigen::Vector3d b = Eigen::Vector3d::UnitX();
  Eigen::Vector3d b_prime = Eigen::Vector3d::UnitY();

  void validate() const {
    for (const Eigen::Vector3d* v : {&a, &a_prime, &b, &b_prime}) {
      if (std::abs(v->norm() - 1.0) > 1e-12) throw BellError("measurement directions must be unit vectors");
    }
  }
};

inline Eigen::Matrix3d t_matrix(const TwoQubitRDM& rdm) {
  Eigen::Matrix3d t;
  for (int n = 0; n < 3; ++n) {
    for (int m = 0; m < 3; ++m) {
      const cplx v = (rdm.matrix * pauli_pair(kAxes[n], kAxes[m])).trace();
      if (std::abs(v.imag()) > 1e-8) {
        throw BellError("correlation tensor has imaginary residue " + std::to_string(v.imag()));
      }
      t(n, m) = v.real();
    }
  }
  return t;
}

/// <B> = a . T (b + b') + a' . T (b - b').
inline double chsh_expectation(const Eigen::Matrix3d& t, const MeasurementFrame& frame) {
  frame.validate();
  return frame.a.dot(t * (frame.b + frame.b_prime)) + frame.a_prime.dot(t * (frame.b - frame.b_prime));
}

inline double chsh_expectation(const TwoQubitRDM& rdm, const MeasurementFrame& frame) {
  return chsh_expectation(t_matrix(rdm), frame);
}

/// Maximal violation measure from a correlation tensor alone.
inline BellResult violation_measure(const Eigen::Matrix3d& t) {
  BellResult out;
  out.t_matrix = t;
  const Eigen::Matrix3d ttt = t * t.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(ttt, Eigen::EigenvaluesOnly);
  Eigen::Vector3d ev = es.eigenvalues();  // ascending
  for (int k = 0; k < 3; ++k) {
    if (ev(k) < 0.0 && ev(k) >= -1e-12) ev(k) = 0.0;
  }
  out.u = ev(2);
  out.u_tilde = ev(1);
  out.measure = 2.0 * std::sqrt(std::max(out.u + out.u_tilde, 0.0));
  out.violates = out.measure > 2.0;
  return out;
}

inline BellResult violation_measure(const TwoQubitRDM& rdm) { return violation_measure(t_matrix(rdm)); }

/// Isotropic ring closed form: B = -2 sqrt2 U/(3JN) for J > 0 and
/// +2 sqrt2 U/(3JN) for J < 0.
inline double violation_xxx(double internal_energy, double j, int n) {
  if (j == 0.0) throw BellError("J must be nonzero");
  const double g = internal_energy / (3.0 * j * n);
  return j > 0.0 ? -kTsirelson * g : kTsirelson * g;
}

enum class Regime { antiferromagnetic, ferromagnetic };

inline Regime regime_of(double j) { return j > 0.0 ? Regime::antiferromagnetic : Regime::ferromagnetic; }

/// Concurrence of the isotropic ring recovered from the violation measure:
///   AFM: C = max(0, 3B/(2 sqrt2) - 1) / 2,  FM: C = max(0, B/(2 sqrt2) - 1) / 2.
inline double concurrence_vs_violation(double measure, Regime regime) {
  if (!(measure >= -1e-10 && measure <= kTsirelson + 1e-10)) {
    throw BellError("violation measure " + std::to_string(measure) + " outside [0, 2 sqrt2]");
  }
  const double scale = regime == Regime::antiferromagnetic ? 3.0 : 1.0;
  const double c = 0.5 * std::max(0.0, scale * measure / kTsirelson - 1.0);
  if (c <= 1e-12) return 0.0;
  return std::min(c, 1.0);
}

// ---------------------------------------------------------------------------
// Random frames

/// Independent sub-seed for frame `index` (splitmix64 of master + index).
inline std::uint64_t frame_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t x = master + 0x9E3779B97F4A7C15ull * (index + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform point on the unit sphere.
inline Eigen::Vector3d random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
    const double len = v.norm();
    if (len > 1e-12) return v / len;
  }
}

inline MeasurementFrame random_frame(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MeasurementFrame f;
  f.a = random_unit_vector(rng);
  f.a_prime = random_unit_vector(rng);
  f.b = random_unit_vector(rng);
  f.b_prime = random_unit_vector(rng);
  return f;
}

/// Largest |<B>| over `count` random frames derived from `seed`.
inline double max_random_chsh(const Eigen::Matrix3d& t, std::size_t count, std::uint64_t seed,
                              unsigned threads = 1) {
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  const auto partial = parallel_map(chunks, threads, [&](std::size_t c) {
    double best = 0.0;
    const std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      best = std::max(best, std::abs(chsh_expectation(t, random_frame(frame_seed(seed, i)))));
    }
    return best;
  });
  double best = 0.0;
  for (double p : partial) best = std::max(best, p);
  return best;
}

}  // namespace spinring
