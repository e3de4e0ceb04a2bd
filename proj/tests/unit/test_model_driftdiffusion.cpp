#include <gtest/gtest.h>

#include <cmath>

#include "netgrad/model_driftdiffusion.hpp"
#include "netgrad/variation.hpp"
#include "test_support.hpp"

using namespace netgrad;
using netgrad::testing::min_order_h;

namespace {

ScalarField bubble(const Domain& d) {
  return ScalarField::sample(d, [&](double x, double y) {
    const double px = x * (1.0 - x);
    return d.dim() == 1 ? px : 4.0 * px * y * (1.0 - y);
  });
}

ScalarField positive_source(const Domain& d) {
  return ScalarField::sample(d, [](double x, double y) { return 1.0 + 0.5 * std::sin(3.0 * x) * std::cos(2.0 * y); });
}

SymTensorField graded_tensor(const Domain& d) {
  SymTensorField D(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double x = d.coord(k, 0);
    D.set(k, {1.0 + 0.3 * x, d.dim() == 2 ? 0.1 * x : 0.0, 1.2});
  }
  return D;
}

DriftDiffusionSetup boltzmann_setup(const Domain& d, double z) {
  return DriftDiffusionSetup(positive_source(d), 1.0, z, bubble(d), EntropyGenerator::make_boltzmann());
}

DriftDiffusionSetup quadratic_setup(const Domain& d, double z) {
  return DriftDiffusionSetup(positive_source(d), 0.0, z, bubble(d), EntropyGenerator::make_quadratic(0.0));
}

ConductanceAnsatz smooth_ansatz(const Domain& d) {
  const ScalarField r = ScalarField::sample(d, [](double x, double) { return 0.5 + 0.2 * x; });
  VectorField m(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double x = d.coord(k, 0);
    m.set(k, {0.8 + 0.3 * std::sin(2.0 * x), 0.4 * std::cos(x)});
  }
  return {r, m};
}

}  // namespace

TEST(DriftDiffusion, SetupValidatesPotential) {
  const Domain d = Domain::line(9);
  EXPECT_THROW(DriftDiffusionSetup(ScalarField(d), 0.0, 1.0, ScalarField(d, 0.1), EntropyGenerator::make_quadratic()),
               InvalidArgument);
  EXPECT_THROW(DriftDiffusionSetup(ScalarField(d), 0.0, 1.0, bubble(d), EntropyGenerator::make_boltzmann()),
               InvalidArgument);
  EXPECT_THROW(ConductanceAnsatz(ScalarField(d), VectorField(d)), InvalidArgument);
}

TEST(DriftDiffusion, ZeroSourceGivesBoltzmannProfile) {
  const Domain d = Domain::rect(9, 9);
  const DriftDiffusionSetup s(ScalarField(d), 2.0, 1.5, bubble(d), EntropyGenerator::make_quadratic(2.0));
  const ScalarField w = solve_w(s, graded_tensor(d));
  EXPECT_LE((w - ScalarField(d, 2.0)).max_abs(), 1e-12);
  const ScalarField u = recover_u(s, w);
  for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(u[k], 2.0 * std::exp(-1.5 * bubble(d)[k]), 1e-12);
  const EnergyPair e = energy_dd(s, graded_tensor(d));
  EXPECT_NEAR(e.dissipation, 0.0, 1e-20);
  EXPECT_NEAR(e.source, 0.0, 1e-20);
}

TEST(DriftDiffusion, RecoverUIsExact) {
  const Domain d = Domain::line(30);
  const DriftDiffusionSetup s = boltzmann_setup(d, 1.0);
  const ScalarField w = solve_w(s, graded_tensor(d));
  const ScalarField u = recover_u(s, w);
  for (std::size_t k = 0; k < d.size(); ++k) EXPECT_EQ(u[k], std::exp(-bubble(d)[k]) * w[k]);
}

TEST(DriftDiffusion, ZeroValenceReducesToDiffusion) {
  for (const Domain& d : {Domain::line(40), Domain::rect(12, 10)}) {
    const DriftDiffusionSetup s = boltzmann_setup(d, 0.0);
    const DiffusionSetup ref(positive_source(d), 1.0, EntropyGenerator::make_boltzmann());
    const SymTensorField D = graded_tensor(d);
    EXPECT_LE((solve_w(s, D) - solve_state(ref, D)).max_abs(), 1e-12);
    const EnergyPair a = energy_dd(s, D);
    const EnergyPair b = energy(ref, D);
    EXPECT_NEAR(a.dissipation, b.dissipation, 1e-12);
    EXPECT_NEAR(a.source, b.source, 1e-12);
    EXPECT_LE((gradient_flow_rhs_dd(s, D) - gradient_flow_rhs(ref, D)).max_abs(), 1e-12);
  }
}

TEST(DriftDiffusion, MatchesDenseOracle) {
  const Domain d = Domain::line(17);
  const double h = d.spacing(0);
  const DriftDiffusionSetup s = quadratic_setup(d, 1.0);
  const SymTensorField D = graded_tensor(d);
  const ScalarField w = solve_w(s, D);
  std::vector<double> a(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) a[k] = std::exp(-d.coord(k, 0) * (1.0 - d.coord(k, 0))) * D.at(k).xx;
  const Eigen::MatrixXd A = netgrad::testing::dense_diffusion_1d(a, h);
  Eigen::VectorXd b(15);
  for (int i = 0; i < 15; ++i) b[i] = s.source()[i + 1];
  const Eigen::VectorXd x = A.lu().solve(b);
  for (int i = 0; i < 15; ++i) EXPECT_NEAR(w[i + 1], x[i], 1e-10);
}

TEST(DriftDiffusion, TwoFormGapConverges) {
  std::vector<double> gaps, hs;
  for (int n : {32, 64, 128}) {
    const Domain d = Domain::line(n);
    const DriftDiffusionSetup s(ScalarField(d, 2.0), 0.0, 1.0, bubble(d), EntropyGenerator::make_quadratic(0.0));
    const EnergyPair e = energy_dd(s, graded_tensor(d));
    gaps.push_back(std::abs(e.dissipation - e.source) / e.source);
    hs.push_back(d.spacing(0));
  }
  EXPECT_GE(min_order_h(gaps, hs), 1.9);
}

TEST(DriftDiffusion, QuadraticRightHandSide) {
  const Domain d = Domain::rect(10, 11);
  const DriftDiffusionSetup s = quadratic_setup(d, 0.7);
  const SymTensorField D = graded_tensor(d);
  const VectorField g = gradient(solve_w(s, D));
  const SymTensorField expected = multiply(s.weight(), sym_outer(g, g));
  EXPECT_LE((gradient_flow_rhs_dd(s, D) - expected).max_abs(), 1e-14);
}

TEST(DriftDiffusion, RightHandSideMatchesFiniteDifferences) {
  const int directions = 5;
  std::vector<std::vector<double>> gaps(directions);
  std::vector<double> hs;
  for (int n : {32, 64, 128}) {
    const Domain d = Domain::line(n);
    hs.push_back(d.spacing(0));
    const DriftDiffusionSetup s = boltzmann_setup(d, 1.0);
    const SymTensorField D = graded_tensor(d);
    const SymTensorField rhs = gradient_flow_rhs_dd(s, D);
    Rng rng(51);
    for (int t = 0; t < directions; ++t) {
      const SymTensorField D1 = random_smooth_tensor(d, rng);
      const double fd = fd_directional([&](const SymTensorField& X) { return energy_dd(s, X).source; }, D, D1, 1e-5);
      gaps[t].push_back(std::abs(inner(rhs, D1) + fd) / std::abs(fd));
    }
  }
  // Individual directions can cross zero under refinement; the order is taken on the worst direction.
  for (int t = 0; t < directions; ++t) EXPECT_LE(gaps[t].back(), 5e-2) << "direction " << t;
  EXPECT_GE(min_order_h(netgrad::testing::worst_over_directions(gaps), hs), 0.9);
}

TEST(DriftDiffusion, RightHandSide2DMatchesFiniteDifferences) {
  std::vector<double> gaps, hs;
  for (int n : {11, 21, 41}) {
    const Domain d = Domain::rect(n, n);
    hs.push_back(d.spacing(0));
    const DriftDiffusionSetup s = boltzmann_setup(d, 1.0);
    const SymTensorField D = graded_tensor(d);
    Rng rng(52);
    const SymTensorField D1 = random_smooth_tensor(d, rng);
    const double fd = fd_directional([&](const SymTensorField& X) { return energy_dd(s, X).source; }, D, D1, 1e-5);
    gaps.push_back(std::abs(inner(gradient_flow_rhs_dd(s, D), D1) + fd) / std::abs(fd));
  }
  EXPECT_LE(gaps.back(), 5e-2);
  EXPECT_GE(min_order_h(gaps, hs), 0.9);
}

TEST(SecondVariation, ZeroDirection) {
  const Domain d = Domain::line(20);
  const SymTensorField D = graded_tensor(d);
  EXPECT_EQ(second_variation_dd(boltzmann_setup(d, 1.0), D, SymTensorField(d)).value, 0.0);
}

// The lemma's general formula is the exact second derivative of the source-form energy;
// in the quadratic case it equals twice the weighted Dirichlet form of w1.
TEST(SecondVariation, QuadraticCaseIsTwiceTheDirichletForm) {
  Rng rng(61);
  for (const Domain& d : {Domain::line(64), Domain::rect(15, 15)}) {
    const DriftDiffusionSetup s = quadratic_setup(d, 1.0);
    for (int t = 0; t < 5; ++t) {
      const SecondVariation sv = second_variation_dd(s, graded_tensor(d), random_smooth_tensor(d, rng));
      EXPECT_GT(sv.dirichlet_form, 0.0);
      EXPECT_NEAR(sv.value, 2.0 * sv.dirichlet_form, 1e-9 * sv.dirichlet_form);
    }
  }
}

TEST(SecondVariation, MatchesFivePointFiniteDifference) {
  Rng rng(62);
  for (int n : {32, 64, 128}) {
    const Domain d = Domain::line(n);
    for (const DriftDiffusionSetup& s : {quadratic_setup(d, 1.0), boltzmann_setup(d, 1.0)}) {
      const SymTensorField D = graded_tensor(d);
      const SymTensorField D1 = 0.3 * random_smooth_tensor(d, rng);
      const double sv = second_variation_dd(s, D, D1).value;
      const double fd = fd_second([&](const SymTensorField& X) { return energy_dd(s, X).source; }, D, D1, 1e-2);
      EXPECT_LE(std::abs(sv - fd), 1e-5 * std::abs(fd)) << "n=" << n << " " << s.entropy().name();
    }
  }
}

TEST(ConvexityCertificate, QuadraticDirectionsAreNonnegative) {
  const Domain d = Domain::line(64);
  const ConvexityCertificate cert = convexity_certificate_quadratic(quadratic_setup(d, 1.0), graded_tensor(d), 20, 7);
  ASSERT_EQ(cert.entries.size(), 20u);
  for (const auto& e : cert.entries) {
    EXPECT_GE(e.second_variation, -1e-10 * e.scale);
    EXPECT_GE(e.dirichlet_form, 0.0);
  }
}

TEST(ConvexityCertificate, RejectsBoltzmannEntropy) {
  const Domain d = Domain::line(16);
  EXPECT_THROW(convexity_certificate_quadratic(boltzmann_setup(d, 1.0), graded_tensor(d), 3), InvalidArgument);
}

TEST(Conductance, EnergyMatchesTensorEnergy) {
  const Domain d = Domain::rect(12, 12);
  const DriftDiffusionSetup s = boltzmann_setup(d, 1.0);
  const ConductanceAnsatz a = smooth_ansatz(d);
  EXPECT_NEAR(energy_m(s, a), energy_dd(s, a.tensor()).dissipation, 1e-12);
  EXPECT_GE(a.tensor().min_eigenvalue(), a.r0() - 1e-14);
}

TEST(Conductance, ZeroConductanceHasZeroFlow) {
  const Domain d = Domain::rect(9, 9);
  const ConductanceAnsatz a(ScalarField(d, 0.7), VectorField(d));
  EXPECT_EQ(gradient_flow_rhs_m(boltzmann_setup(d, 1.0), a).max_abs(), 0.0);
  EXPECT_EQ(gradient_flow_rhs_m(quadratic_setup(d, 1.0), a).max_abs(), 0.0);
}

TEST(Conductance, RightHandSideMatchesFiniteDifferences) {
  std::vector<double> gaps, hs;
  for (int n : {11, 21, 41}) {
    const Domain d = Domain::rect(n, n);
    hs.push_back(d.spacing(0));
    const DriftDiffusionSetup s = boltzmann_setup(d, 1.0);
    const ConductanceAnsatz a = smooth_ansatz(d);
    Rng rng(71);
    const VectorField m1 = random_smooth_vector(d, rng);
    const double fd = fd_directional(
        [&](const VectorField& m) { return energy_dd(s, SymTensorField::from_ansatz(a.r(), m)).source; }, a.m(), m1,
        1e-5);
    gaps.push_back(std::abs(inner(gradient_flow_rhs_m(s, a), m1) + fd) / std::abs(fd));
  }
  EXPECT_LE(gaps.back(), 5e-2);
  EXPECT_GE(min_order_h(gaps, hs), 0.9);
}

TEST(Conductance, SecondVariationZeroDirection) {
  const Domain d = Domain::line(20);
  EXPECT_EQ(second_variation_m(quadratic_setup(d, 1.0), smooth_ansatz(d), VectorField(d)).value, 0.0);
}

TEST(Conductance, SecondVariationMatchesFiniteDifference) {
  Rng rng(72);
  for (const Domain& d : {Domain::line(64), Domain::rect(17, 17)}) {
    const DriftDiffusionSetup s = quadratic_setup(d, 1.0);
    const ConductanceAnsatz a = smooth_ansatz(d);
    const VectorField m1 = 0.3 * random_smooth_vector(d, rng);
    const double sv = second_variation_m(s, a, m1).value;
    const double fd = fd_second(
        [&](const VectorField& m) { return energy_dd(s, SymTensorField::from_ansatz(a.r(), m)).source; }, a.m(), m1,
        1e-2);
    EXPECT_LE(std::abs(sv - fd), 1e-5 * std::abs(fd));
  }
}

TEST(Conductance, OneDimensionalExampleCrossCheck) {
  auto one = [](double) { return 1.0; };
  for (double m0 : {0.0, 0.3, 1.0}) {
    const double closed = example_1d_second_variation(m0, one, one, 1024).value;
    const Example1DCrossCheck pde = example_1d_pde_check(m0, one, one, 1024);
    EXPECT_NEAR(pde.analytic, closed, 1e-3) << "m0=" << m0;
  }
}
