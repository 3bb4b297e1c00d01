#include "oracles.hpp"

#include "spinring/bell.hpp"
#include "spinring/entanglement.hpp"
#include "spinring/spectral.hpp"
#include "spinring/thermo.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace spinring;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return t;
}

TwoQubitRDM singlet() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return make_rdm(v * v.adjoint());
}

TwoQubitRDM nn_state(const SpectralDecomposition& sd, double t) {
  return thermal_pair_rdm(PairProjection(sd, 1, 2), boltzmann_weights(sd, t));
}

}  // namespace

TEST(CorrelationTensor, Singlet) {
  EXPECT_LE((t_matrix(singlet()) + Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CorrelationTensor, MatchesOracleExpectations) {
  std::mt19937_64 rng(5);
  const char axes[] = {'x', 'y', 'z'};
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Matrix4cd rho = oracle::random_density(rng);
    const auto t = t_matrix(make_rdm(rho));
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const Eigen::Matrix4cd op = Eigen::kroneckerProduct(oracle::pauli(axes[a]), oracle::pauli(axes[b]));
        EXPECT_NEAR(t(a, b), (rho * op).trace().real(), 1e-14);
      }
    }
  }
}

TEST(Chsh, SingletReachesTsirelsonInTheCanonicalFrame) {
  MeasurementFrame f;
  f.a = Eigen::Vector3d::UnitZ();
  f.a_prime = Eigen::Vector3d::UnitX();
  f.b = -Eigen::Vector3d(1, 0, 1).normalized();
  f.b_prime = Eigen::Vector3d(1, 0, -1).normalized();
  f.validate();
  EXPECT_NEAR(chsh_expectation(singlet(), f), kTsirelson, 1e-12);
  EXPECT_NEAR(violation_measure(singlet()).measure, kTsirelson, 1e-12);
  EXPECT_TRUE(violation_measure(singlet()).violates);
}

TEST(Chsh, ProductStateSitsOnTheClassicalBound) {
  Matrix4c up = Matrix4c::Zero();
  up(0, 0) = 1.0;
  const auto r = violation_measure(make_rdm(up));
  EXPECT_NEAR(r.measure, 2.0, 1e-15);
  EXPECT_FALSE(r.violates);
  EXPECT_NEAR(r.u, 1.0, 1e-15);
  EXPECT_NEAR(r.u_tilde, 0.0, 1e-15);
}

TEST(Chsh, RejectsNonUnitDirections) {
  MeasurementFrame f;
  f.b = Eigen::Vector3d(1, 1, 0);
  EXPECT_THROW(f.validate(), BellError);
  EXPECT_THROW(chsh_expectation(singlet(), f), BellError);
}

TEST(Chsh, RandomFramesNeverExceedTheMeasure) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const auto rdm = make_rdm(oracle::random_density(rng, 1 + rep % 4));
    const auto t = t_matrix(rdm);
    const double measure = violation_measure(t).measure;
    EXPECT_LE(max_random_chsh(t, 10000, frame_seed(42, rep)), measure + 1e-8);
  }
  const auto t = t_matrix(singlet());
  EXPECT_GT(max_random_chsh(t, 10000, 42), 2.5);
}

TEST(Chsh, RandomFramesAreDeterministic) {
  const auto t = t_matrix(singlet());
  EXPECT_EQ(max_random_chsh(t, 3000, 9, 1), max_random_chsh(t, 3000, 9, 4));
  const auto a = random_frame(frame_seed(1, 2));
  const auto b = random_frame(frame_seed(1, 2));
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.b_prime, b.b_prime);
  EXPECT_NE(frame_seed(1, 2), frame_seed(1, 3));
}

TEST(ClosedForm, TwoSiteRing) {
  const ModelSpec spec = ModelSpec::uniform(2, 1.0);
  const auto sd = diagonalize(spec);
  const double u = thermo_point(sd, spec, 1.0).u;
  const double measure = violation_measure(nn_state(sd, 1.0)).measure;
  EXPECT_NEAR(measure, kTsirelson * std::abs(u) / 6.0, 1e-10);
  EXPECT_NEAR(measure, 2.82464, 1e-5);
  EXPECT_NEAR(violation_xxx(u, 1.0, 2), measure, 1e-10);
}

TEST(ClosedForm, ThreeSiteRing) {
  const ModelSpec spec = ModelSpec::uniform(3, 1.0);
  const auto sd = diagonalize(spec);
  const double measure = violation_measure(nn_state(sd, 1.0)).measure;
  EXPECT_NEAR(measure, kTsirelson * std::tanh(3.0) / 3.0, 1e-10);
  EXPECT_FALSE(violation_measure(nn_state(sd, 1e-3)).violates);
}

TEST(ClosedForm, IsotropicGrid) {
  for (int n = 2; n <= 10; ++n) {
    for (double j : {1.0, -1.0}) {
      const ModelSpec spec = ModelSpec::uniform(n, j);
      const auto sd = diagonalize(spec);
      const PairProjection proj(sd, 1, 2);
      for (double t : log_grid(0.05, 50.0, 20)) {
        const auto w = boltzmann_weights(sd, t);
        const auto rdm = thermal_pair_rdm(proj, w);
        const double u = thermo_point(sd, w).u;
        const auto bell = violation_measure(rdm);
        EXPECT_NEAR(bell.measure, kTsirelson * std::abs(u / (3.0 * j * n)), 1e-10);
        EXPECT_NEAR(violation_xxx(u, j, n), bell.measure, 1e-10);
        EXPECT_LE(bell.measure, kTsirelson + 1e-12);
        const double c = concurrence_wootters(rdm).wootters;
        EXPECT_NEAR(concurrence_vs_violation(bell.measure, regime_of(j)), c, 1e-9) << "N=" << n << " T=" << t;
        if (bell.violates) EXPECT_GT(c, 0.0);
      }
    }
  }
}

TEST(Relation, RegimesAndErrors) {
  EXPECT_EQ(regime_of(1.0), Regime::antiferromagnetic);
  EXPECT_EQ(regime_of(-1.0), Regime::ferromagnetic);
  EXPECT_NEAR(concurrence_vs_violation(kTsirelson, Regime::antiferromagnetic), 1.0, 1e-12);
  EXPECT_EQ(concurrence_vs_violation(kTsirelson, Regime::ferromagnetic), 0.0);
  EXPECT_EQ(concurrence_vs_violation(kTsirelson / 3.0, Regime::antiferromagnetic), 0.0);
  EXPECT_THROW(concurrence_vs_violation(3.0, Regime::antiferromagnetic), BellError);
  EXPECT_THROW(concurrence_vs_violation(-0.1, Regime::ferromagnetic), BellError);
  EXPECT_THROW(violation_xxx(-1.0, 0.0, 2), BellError);
}

TEST(Relation, FerromagneticRingNeverViolates) {
  for (int n = 2; n <= 8; ++n) {
    const auto sd = diagonalize(ModelSpec::uniform(n, -1.0));
    for (double t : log_grid(0.05, 50.0, 10)) {
      const auto bell = violation_measure(nn_state(sd, t));
      EXPECT_LE(bell.measure, 2.0 + 1e-12);
      EXPECT_EQ(concurrence_vs_violation(bell.measure, Regime::ferromagnetic), 0.0);
    }
  }
}
