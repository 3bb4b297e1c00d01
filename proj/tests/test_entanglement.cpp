#include "oracles.hpp"

#include "spinring/entanglement.hpp"
#include "spinring/report.hpp"
#include "spinring/spectral.hpp"
#include "spinring/thermo.hpp"
#include "spinring/twoqubit.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace spinring;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return t;
}

Matrix4c bell_state(double sign) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = sign / std::sqrt(2.0);
  return v * v.adjoint();
}

struct Point {
  TwoQubitRDM rdm;
  ThermoPoint tp;
};

Point thermal_point(const ModelSpec& spec, const SpectralDecomposition& sd, double t) {
  const auto w = boltzmann_weights(sd, t);
  return {thermal_pair_rdm(PairProjection(sd, 1, 2), w), thermo_point(sd, w)};
}

}  // namespace

TEST(Wootters, SingletIsMaximallyEntangled) {
  const auto r = concurrence_wootters(make_rdm(bell_state(-1.0)));
  EXPECT_NEAR(r.wootters, 1.0, 1e-12);
  EXPECT_NEAR(concurrence_wootters(make_rdm(bell_state(1.0))).wootters, 1.0, 1e-12);
}

TEST(Wootters, ProductAndMixedStatesAreSeparable) {
  Matrix4c up = Matrix4c::Zero();
  up(0, 0) = 1.0;
  EXPECT_EQ(concurrence_wootters(make_rdm(up)).wootters, 0.0);
  EXPECT_EQ(concurrence_wootters(make_rdm(Matrix4c::Identity() / 4.0)).wootters, 0.0);
}

TEST(Wootters, WernerStateThreshold) {
  for (double p : {0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    const Matrix4c rho = p * bell_state(-1.0) + (1.0 - p) * Matrix4c::Identity() / 4.0;
    EXPECT_NEAR(concurrence_wootters(make_rdm(rho)).wootters, std::max(0.0, (3.0 * p - 1.0) / 2.0), 1e-12);
  }
}

TEST(Wootters, MatchesEigenvalueRecipeOnRandomStates) {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 300; ++rep) {
    const Eigen::Matrix4cd rho = oracle::random_density(rng, 1 + rep % 4);
    const auto r = concurrence_wootters(make_rdm(rho));
    EXPECT_NEAR(r.wootters, oracle::wootters(rho), 1e-7);
    EXPECT_GE(r.wootters, 0.0);
    EXPECT_LE(r.wootters, 1.0);
    for (int k = 1; k < 4; ++k) EXPECT_GE(r.lambdas[k - 1], r.lambdas[k]);
  }
}

TEST(Wootters, RejectsNonPositiveInput) {
  Matrix4c bad = Matrix4c::Zero();
  bad(0, 0) = 1.5;
  bad(3, 3) = -0.5;
  EXPECT_THROW(concurrence_wootters(make_rdm(bad)), EntanglementError);
}

TEST(XForm, MatchesWootters) {
  const auto r = make_rdm(bell_state(-1.0));
  EXPECT_NEAR(concurrence_x_form(r), 1.0, 1e-12);
  Matrix4c non_x = Matrix4c::Identity() / 4.0;
  non_x(0, 1) = non_x(1, 0) = 0.1;
  EXPECT_THROW(concurrence_x_form(make_rdm(non_x)), EntanglementError);
}

TEST(CorrelationForm, RequiresZeroMagnetization) {
  CorrelationSet cs;
  cs.m_per_site = 0.1;
  EXPECT_THROW(concurrence_from_correlations(cs), EntanglementError);
  cs.m_per_site = 0.0;
  cs.g = -Eigen::Matrix3d::Identity();
  EXPECT_NEAR(concurrence_from_correlations(cs), 1.0, 1e-15);
}

TEST(EnergyForm, BranchesAndErrors) {
  EXPECT_NEAR(concurrence_xxx_energy(-3.0, 1.0), 1.0, 1e-15);
  EXPECT_EQ(concurrence_xxx_energy(-1.0, 1.0), 0.0);
  EXPECT_EQ(concurrence_xxx_energy(-1.0, -1.0), 0.0);
  EXPECT_THROW(concurrence_xxx_energy(-1.0, 0.0), EntanglementError);
}

TEST(EnergyForm, TwoSiteClosedForm) {
  const ModelSpec spec = ModelSpec::uniform(2, 1.0);
  const auto sd = diagonalize(spec);
  for (double t : log_grid(0.1, 100.0, 40)) {
    const auto p = thermal_point(spec, sd, t);
    const double ref = oracle::concurrence_two_sites(1.0 / t);
    EXPECT_NEAR(concurrence_wootters(p.rdm).wootters, ref, 1e-10) << "T=" << t;
    EXPECT_NEAR(concurrence_xxx_energy(p.tp.u_per_site, 1.0), ref, 1e-10);
  }
  EXPECT_NEAR(concurrence_wootters(thermal_point(spec, sd, 1.0).rdm).wootters, 0.997989, 1e-6);
}

TEST(EnergyForm, ThreeSiteRingIsNeverEntangled) {
  const ModelSpec spec = ModelSpec::uniform(3, 1.0);
  const auto sd = diagonalize(spec);
  for (double t : log_grid(0.01, 100.0, 40)) {
    const auto p = thermal_point(spec, sd, t);
    const auto rep = entanglement_report(spec, p.rdm, p.tp);
    EXPECT_LE(rep.concurrence.wootters, 1e-12);
    EXPECT_EQ(*rep.concurrence.energy_form, 0.0);
    EXPECT_EQ(*rep.concurrence.x_form, 0.0);
    EXPECT_EQ(*rep.concurrence.correlation_form, 0.0);
  }
}

TEST(Routes, AgreeOnIsotropicGrid) {
  for (int n = 2; n <= 10; ++n) {
    for (double j : {1.0, -1.0}) {
      const ModelSpec spec = ModelSpec::uniform(n, j);
      const auto sd = diagonalize(spec);
      for (double t : log_grid(0.05, 50.0, 40)) {
        const auto p = thermal_point(spec, sd, t);
        const auto rep = entanglement_report(spec, p.rdm, p.tp);
        ASSERT_TRUE(rep.concurrence.energy_form.has_value());
        ASSERT_TRUE(rep.concurrence.correlation_form.has_value());
        EXPECT_LE(rep.max_disagreement, kRouteTolerance) << "N=" << n << " J=" << j << " T=" << t;
        if (j < 0.0) EXPECT_LE(rep.concurrence.wootters, 1e-12);
      }
    }
  }
}

TEST(Routes, AnisotropicFormMatchesWootters) {
  for (int n : {2, 4, 6}) {
    for (double d : {0.0, 0.5, 2.0}) {
      const ModelSpec spec = ModelSpec::uniform(n, 1.0, d);
      const auto sd = diagonalize(spec);
      for (double t : log_grid(0.05, 50.0, 20)) {
        const auto p = thermal_point(spec, sd, t);
        const auto rep = entanglement_report(spec, p.rdm, p.tp);
        ASSERT_TRUE(rep.anisotropic_form.has_value());
        EXPECT_FALSE(rep.concurrence.energy_form.has_value());
        EXPECT_NEAR(*rep.anisotropic_form, rep.concurrence.wootters, kRouteTolerance)
            << "N=" << n << " delta=" << d << " T=" << t;
      }
    }
  }
}

TEST(Routes, FieldFormMatchesWootters) {
  // The B = 3, N = 4 case is omitted here; it is covered by the acceptance run.
  for (int n : {2, 4, 6}) {
    for (double b : {0.5, 1.0}) {
      const ModelSpec spec = ModelSpec::uniform(n, 1.0, 1.0, b);
      const auto sd = diagonalize(spec);
      for (double t : log_grid(0.05, 50.0, 20)) {
        const auto p = thermal_point(spec, sd, t);
        const auto rep = entanglement_report(spec, p.rdm, p.tp);
        ASSERT_TRUE(rep.field_form.has_value());
        EXPECT_FALSE(rep.concurrence.correlation_form.has_value());
        EXPECT_NEAR(*rep.field_form, rep.concurrence.wootters, kRouteTolerance)
            << "N=" << n << " B=" << b << " T=" << t;
      }
    }
  }
}

TEST(Routes, FieldFormUsesFieldInUnitsOfCoupling) {
  const ModelSpec spec = ModelSpec::uniform(4, 2.0, 1.0, 1.0);
  const auto sd = diagonalize(spec);
  for (double t : {0.2, 1.0, 3.0}) {
    const auto p = thermal_point(spec, sd, t);
    const double c = concurrence_wootters(p.rdm).wootters;
    EXPECT_NEAR(concurrence_xxx_field(p.rdm, p.tp.u_per_site, 2.0, 1.0), c, 1e-9);
  }
}

TEST(Routes, FieldExamples) {
  const ModelSpec spec = ModelSpec::uniform(4, 1.0, 1.0, 0.5);
  const auto p = thermal_point(spec, diagonalize(spec), 0.5);
  EXPECT_NEAR(concurrence_xxx_field(p.rdm, p.tp.u_per_site, 1.0, 0.5), concurrence_wootters(p.rdm).wootters,
              1e-9);
  const ModelSpec dimer = ModelSpec::uniform(2, 1.0, 1.0, 3.0);
  const auto q = thermal_point(dimer, diagonalize(dimer), 0.1);
  EXPECT_NEAR(concurrence_xxx_field(q.rdm, q.tp.u_per_site, 1.0, 3.0), concurrence_wootters(q.rdm).wootters,
              1e-9);
}

TEST(Routes, ApplicabilityFollowsTheModel) {
  const ModelSpec xxz = ModelSpec::uniform(4, 1.0, 0.5, 0.0);
  const auto p = thermal_point(xxz, diagonalize(xxz), 1.0);
  const auto a = applicable_routes(xxz, p.rdm, 0.0);
  EXPECT_TRUE(a.x_form);
  EXPECT_TRUE(a.correlation_form);
  EXPECT_FALSE(a.energy_form);
  EXPECT_TRUE(a.anisotropic_form);
  EXPECT_FALSE(a.field_form);

  const ModelSpec far = ModelSpec::uniform(6, 1.0);
  const auto sd = diagonalize(far);
  const auto rdm = thermal_pair_rdm(PairProjection(sd, 1, 4), boltzmann_weights(sd, 1.0));
  const auto b = applicable_routes(far, rdm, 0.0);
  EXPECT_FALSE(b.energy_form);
  EXPECT_FALSE(b.bell_closed_form);
  EXPECT_TRUE(b.correlation_form);
}

TEST(Concurrence, NonIncreasingInTemperatureForIsotropicRings) {
  for (int n = 2; n <= 8; ++n) {
    const ModelSpec spec = ModelSpec::uniform(n, 1.0);
    const auto sd = diagonalize(spec);
    const PairProjection proj(sd, 1, 2);
    double prev = 2.0;
    for (double t : log_grid(0.05, 50.0, 40)) {
      const double c = concurrence_wootters(thermal_pair_rdm(proj, boltzmann_weights(sd, t))).wootters;
      EXPECT_LE(c, prev + 1e-10) << "N=" << n << " T=" << t;
      prev = c;
    }
    EXPECT_EQ(prev, 0.0);
  }
}

TEST(Concurrence, FerromagneticRingsAreSeparable) {
  for (int n = 2; n <= 10; ++n) {
    const ModelSpec spec = ModelSpec::uniform(n, -1.0);
    const auto sd = diagonalize(spec);
    const PairProjection proj(sd, 1, 2);
    for (double t : log_grid(0.05, 50.0, 20)) {
      EXPECT_LE(concurrence_wootters(thermal_pair_rdm(proj, boltzmann_weights(sd, t))).wootters, 1e-12);
    }
    EXPECT_LE(concurrence_wootters(thermal_pair_rdm(proj, boltzmann_weights(sd, 0.0))).wootters, 1e-12);
  }
}

TEST(GroundState, EntangledExceptForThreeSites) {
  for (int n : {2, 4, 5, 6, 7, 8}) {
    const auto sd = diagonalize(ModelSpec::uniform(n, 1.0));
    const auto rdm = thermal_pair_rdm(PairProjection(sd, 1, 2), boltzmann_weights(sd, 0.0));
    EXPECT_GT(concurrence_wootters(rdm).wootters, 1e-3) << "N=" << n;
  }
  const auto sd3 = diagonalize(ModelSpec::uniform(3, 1.0));
  const auto rdm3 = thermal_pair_rdm(PairProjection(sd3, 1, 2), boltzmann_weights(sd3, 0.0));
  EXPECT_LE(concurrence_wootters(rdm3).wootters, 1e-10);
}

TEST(GroundState, EvenRingClosedForm) {
  for (int n : {2, 4, 6, 8}) {
    const auto sd = diagonalize(ModelSpec::uniform(n, 1.0));
    const auto rdm = thermal_pair_rdm(PairProjection(sd, 1, 2), boltzmann_weights(sd, 0.0));
    EXPECT_NEAR(concurrence_ground_state(sd, 1.0, n), concurrence_wootters(rdm).wootters, 1e-10);
  }
  const auto sd = diagonalize(ModelSpec::uniform(2, 1.0));
  EXPECT_NEAR(concurrence_ground_state(sd, 1.0, 2), 1.0, 1e-12);
  EXPECT_THROW(concurrence_ground_state(sd, -1.0, 2), EntanglementError);
  EXPECT_THROW(concurrence_ground_state(diagonalize(ModelSpec::uniform(3, 1.0)), 1.0, 3), EntanglementError);
}
