#include "oracles.hpp"

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

}  // namespace

TEST(ThermoPoint, ThreeSiteEnergy) {
  const ModelSpec spec = ModelSpec::uniform(3, 1.0);
  const auto sd = diagonalize(spec);
  EXPECT_NEAR(thermo_point(sd, spec, 1.0).u, -3.0 * std::tanh(3.0), 1e-12);
  EXPECT_NEAR(thermo_point(sd, spec, 1.0).u, -2.98516, 1e-5);
  for (double t : log_grid(0.05, 50.0, 25)) {
    EXPECT_NEAR(thermo_point(sd, spec, t).u, oracle::energy_three_sites(1.0 / t), 1e-12);
  }
}

TEST(ThermoPoint, TwoSiteEnergyAndPartitionFunction) {
  const ModelSpec spec = ModelSpec::uniform(2, 1.0);
  const auto sd = diagonalize(spec);
  const auto tp = thermo_point(sd, spec, 1.0);
  EXPECT_NEAR(tp.u, -5.99196, 1e-5);
  EXPECT_NEAR(tp.u, oracle::energy_two_sites(1.0), 1e-12);
  for (double t : log_grid(0.1, 100.0, 30)) {
    const auto p = thermo_point(sd, spec, t);
    const double ref = oracle::log_z_two_sites(1.0 / t);
    EXPECT_LE(std::abs(p.log_z - ref), 1e-12 * std::abs(ref)) << "T=" << t;
  }
}

TEST(ThermoPoint, InfiniteTemperature) {
  for (int n = 2; n <= 6; ++n) {
    const ModelSpec spec = ModelSpec::uniform(n, 1.0, 0.5);
    const auto sd = diagonalize(spec);
    const auto tp = thermo_point(sd, spec, kInfinity);
    EXPECT_EQ(tp.beta, 0.0);
    EXPECT_NEAR(tp.u, 0.0, 1e-12);
    EXPECT_NEAR(tp.log_z, n * std::log(2.0), 1e-12);
  }
}

TEST(ThermoPoint, LargeTemperatureApproachesZeroEnergy) {
  for (int n = 2; n <= 8; ++n) {
    for (double j : {1.0, -1.0}) {
      const ModelSpec spec = ModelSpec::uniform(n, j);
      EXPECT_LE(std::abs(thermo_point(diagonalize(spec), spec, 1e6).u), 1e-3 * n * std::abs(j));
    }
  }
}

TEST(ThermoPoint, ZeroTemperatureIsGroundSpaceAverage) {
  const ModelSpec spec = ModelSpec::uniform(4, -1.0);
  const auto sd = diagonalize(spec);
  const auto tp = thermo_point(sd, spec, 0.0);
  EXPECT_NEAR(tp.u, sd.ground_energy(), 1e-12);
  EXPECT_NEAR(tp.m, 0.0, 1e-12);  // multiplet average
  EXPECT_TRUE(std::isinf(tp.log_z));
}

TEST(ThermoPoint, LowTemperatureIsStable) {
  for (int n : {2, 3, 6, 10}) {
    for (double j : {1.0, -1.0}) {
      const ModelSpec spec = ModelSpec::uniform(n, j, 1.0, 0.2);
      const auto sd = diagonalize(spec);
      const auto cold = thermo_point(sd, spec, 1e-8);
      const auto zero = thermo_point(sd, spec, 0.0);
      EXPECT_TRUE(std::isfinite(cold.log_z));
      EXPECT_TRUE(std::isfinite(cold.u));
      EXPECT_NEAR(cold.u, zero.u, 1e-6);
      EXPECT_NEAR(cold.m, zero.m, 1e-6);
    }
  }
}

TEST(ThermoPoint, RejectsNegativeTemperature) {
  const ModelSpec spec = ModelSpec::uniform(2, 1.0);
  const auto sd = diagonalize(spec);
  EXPECT_THROW(thermo_point(sd, spec, -1.0), ThermoError);
  EXPECT_THROW(gibbs_state(sd, -0.5), ThermoError);
  EXPECT_THROW(thermo_point(sd, spec, std::nan("")), ThermoError);
}

TEST(ThermoPoint, FreeSpinsInAField) {
  for (int n = 2; n <= 6; ++n) {
    const ModelSpec spec = ModelSpec::uniform(n, 0.0, 1.0, 1.0);
    const auto sd = diagonalize(spec);
    for (double t : {0.3, 1.0, 4.0}) {
      EXPECT_NEAR(thermo_point(sd, spec, t).m, -n * std::tanh(1.0 / t), 1e-8);
    }
  }
}

TEST(ThermoPoint, EnergyIsNonDecreasingInTemperature) {
  for (int n = 2; n <= 8; ++n) {
    for (double d : {0.0, 1.0, 2.0}) {
      for (double b : {0.0, 0.5}) {
        const ModelSpec spec = ModelSpec::uniform(n, 1.0, d, b);
        const auto sd = diagonalize(spec);
        double prev = -kInfinity;
        for (double t : log_grid(0.01, 100.0, 60)) {
          const double u = thermo_point(sd, spec, t).u;
          EXPECT_GE(u, prev - 1e-12);
          prev = u;
        }
      }
    }
  }
}

TEST(ThermoPoint, ZeroFieldEnergyIsNonPositive) {
  for (int n = 2; n <= 8; ++n) {
    for (double j : {1.0, -1.0}) {
      for (double d : {0.0, 0.5, 1.0, 2.0}) {
        const ModelSpec spec = ModelSpec::uniform(n, j, d);
        const auto sd = diagonalize(spec);
        for (double t : log_grid(0.05, 50.0, 20)) EXPECT_LE(thermo_point(sd, spec, t).u, 1e-10);
      }
    }
  }
}

TEST(ThermoPoint, IsotropicZeroFieldHasNoMagnetization) {
  for (int n = 2; n <= 9; ++n) {
    const ModelSpec spec = ModelSpec::uniform(n, 1.0);
    const auto sd = diagonalize(spec);
    for (double t : log_grid(0.05, 50.0, 20)) EXPECT_LE(std::abs(thermo_point(sd, spec, t).m), 1e-10);
  }
}

TEST(Derivatives, ThreeSiteEnergy) {
  EXPECT_LE(check_derivatives(ModelSpec::uniform(3, 1.0), 1.0).u_residual, 1e-5);
}

TEST(Derivatives, AnisotropicRingInField) {
  const auto r = check_derivatives(ModelSpec::uniform(4, 1.0, 0.5, 0.3), 2.0);
  EXPECT_LE(r.m_residual, 1e-5);
  EXPECT_LE(r.u_residual, 1e-5);
}

TEST(Derivatives, RandomSpecs) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_dist(2, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> t_dist(0.2, 5.0);
  for (int rep = 0; rep < 10; ++rep) {
    const ModelSpec spec = ModelSpec::uniform(n_dist(rng), u(rng) > 0 ? 1.0 : -1.0, 1.0 + u(rng), u(rng));
    const auto r = check_derivatives(spec, t_dist(rng));
    EXPECT_LE(r.u_residual, 1e-5);
    EXPECT_LE(r.m_residual, 1e-5);
  }
}

TEST(Derivatives, RequiresPositiveTemperature) {
  EXPECT_THROW(check_derivatives(ModelSpec::uniform(2, 1.0), 0.0), ThermoError);
}

TEST(Gibbs, InfiniteTemperatureIsMaximallyMixed) {
  const auto sd = diagonalize(ModelSpec::uniform(4, 1.0));
  const auto rho = gibbs_state(sd, kInfinity);
  EXPECT_LE(max_abs(rho.matrix - CMatrix::Identity(16, 16) / 16.0), 1e-15);
}

TEST(Gibbs, AntiferromagneticDimerGroundStateIsSinglet) {
  const auto sd = diagonalize(ModelSpec::uniform(2, 1.0));
  EXPECT_EQ(sd.ground_degeneracy(), 1);
  const auto rho = gibbs_state(sd, 0.0);
  CMatrix singlet = CMatrix::Zero(4, 4);
  singlet(1, 1) = singlet(2, 2) = 0.5;
  singlet(1, 2) = singlet(2, 1) = -0.5;
  EXPECT_LE(max_abs(rho.matrix - singlet), 1e-12);
}

TEST(Gibbs, FerromagneticDimerGroundStateIsTripletMixture) {
  const auto sd = diagonalize(ModelSpec::uniform(2, -1.0));
  EXPECT_EQ(sd.ground_degeneracy(), 3);
  const auto rho = gibbs_state(sd, 0.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix);
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(es.eigenvalues()(k), 1.0 / 3.0, 1e-12);
}

TEST(Gibbs, MatchesMatrixExponentialOracle) {
  for (int n = 2; n <= 7; ++n) {
    for (double d : {0.0, 1.0, 2.0}) {
      for (double b : {0.0, 0.5}) {
        const ModelSpec spec = ModelSpec::uniform(n, 1.0, d, b);
        const auto sd = diagonalize(spec);
        const CMatrix h = oracle::ring_hamiltonian(n, 1.0, d, b);
        for (double t : {0.1, 1.0, 10.0}) {
          const auto rho = gibbs_state(sd, t);
          EXPECT_LE(max_abs(rho.matrix - oracle::gibbs(h, t)), 1e-10) << "N=" << n << " T=" << t;
          EXPECT_LE(hermiticity_defect(rho.matrix), 1e-12);
          EXPECT_LE(std::abs(rho.matrix.trace() - cplx(1.0)), 1e-12);
          Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix, Eigen::EigenvaluesOnly);
          EXPECT_GE(es.eigenvalues()(0), -1e-12);
        }
      }
    }
  }
}
