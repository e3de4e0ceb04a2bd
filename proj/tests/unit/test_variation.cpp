#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "netgrad/model_diffusion.hpp"
#include "netgrad/variation.hpp"
#include "test_support.hpp"

using namespace netgrad;

namespace {

double one(double) { return 1.0; }

}  // namespace

TEST(FiniteDifference, CurveStencils) {
  EXPECT_NEAR(fd_second_curve([](double s) { return s * s; }, 1e-3), 2.0, 1e-10);
  EXPECT_NEAR(fd_second_curve([](double s) { return 3.0 * s - 1.0; }, 1e-2), 0.0, 1e-10);
  EXPECT_NEAR(fd_second_curve([](double s) { return s * s * s * s; }, 0.1), 0.0, 1e-12);
  EXPECT_NEAR(fd_first_curve([](double s) { return s * s * s + 2.0 * s; }, 1e-2), 2.0 + 1e-4, 1e-12);
}

TEST(FiniteDifference, LinearFunctionalHasZeroSecondVariation) {
  const Domain d = Domain::rect(9, 9);
  Rng rng(7);
  const SymTensorField base = SymTensorField::identity(d, 3.0);
  const SymTensorField dir = random_smooth_tensor(d, rng);
  const SymTensorField I = SymTensorField::identity(d);
  auto trace_integral = [&](const SymTensorField& D) { return inner(D, I); };
  EXPECT_NEAR(fd_second(trace_integral, base, dir, 1e-2), 0.0, 1e-10);
  EXPECT_NEAR(fd_directional(trace_integral, base, dir, 1e-4), inner(dir, I), 1e-10);
}

TEST(FiniteDifference, InadmissiblePerturbationThrows) {
  const Domain d = Domain::line(9);
  const SymTensorField base = SymTensorField::identity(d, 1.0);
  const SymTensorField dir = SymTensorField::identity(d, -1.0);
  auto f = [](const SymTensorField& D) { return inner(D, D); };
  EXPECT_THROW(fd_second(f, base, dir, 0.6), InadmissiblePerturbation);
  EXPECT_NO_THROW(fd_second(f, base, dir, 0.4));
  EXPECT_THROW(fd_directional(f, base, dir, 0.0), InvalidArgument);
}

TEST(FiniteDifference, DirectionalMatchesDiffusionGradient) {
  // descent convention: <rhs, dir> = -dE/ds
  std::vector<double> gaps, h;
  for (int n : {33, 65, 129}) {
    const Domain d = Domain::line(n);
    const DiffusionSetup s(ScalarField::sample(d, [](double x, double) { return 1.0 + x; }), 1.0,
                           EntropyGenerator::make_boltzmann());
    SymTensorField D = SymTensorField::identity(d, 1.5);
    Rng rng(11);
    const SymTensorField dir = random_smooth_tensor(d, rng);
    auto E = [&](const SymTensorField& X) { return energy(s, X).source; };
    const double fd = fd_directional(E, D, dir, 1e-4);
    const double an = inner(gradient_flow_rhs(s, D), dir);
    gaps.push_back(std::abs(an + fd) / std::abs(fd));
    h.push_back(d.spacing(0));
  }
  EXPECT_LE(gaps.back(), 5e-2);
  EXPECT_GE(netgrad::testing::min_order_h(gaps, h), 0.9);
}

TEST(VariationReport, GapsAndCsv) {
  const VariationReport r = make_report(3, 1.0, 1.1, 1e-4, 2);
  EXPECT_DOUBLE_EQ(r.abs_gap, std::abs(1.0 - 1.1));
  EXPECT_DOUBLE_EQ(r.rel_gap, r.abs_gap / 1.1);
  std::ostringstream os;
  write_csv(os, {r, make_report(4, 2.0, 2.0, 1e-4, 2)});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "direction,level,eps,analytic,fd,abs_gap,rel_gap");
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 4), "3,2,");
  std::getline(is, line);
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
}

TEST(Example1D, ClosedFormValues) {
  const auto s = [](double) { return 1.0; };
  const Example1DResult a = example_1d_second_variation(0.0, one, s, 1024);
  EXPECT_NEAR(a.value, -2.0 / 3.0, 1e-6);
  EXPECT_EQ(a.sign, CurvatureSign::negative);
  EXPECT_EQ(a.classification, "negative (|m0| < 1/sqrt(3))");
  const Example1DResult b = example_1d_second_variation(1.0, one, s, 1024);
  EXPECT_NEAR(b.value, 1.0 / 6.0, 1e-6);
  EXPECT_EQ(b.sign, CurvatureSign::positive);
}

TEST(Example1D, ThresholdIsExactlyZero) {
  const double m0 = 1.0 / std::sqrt(3.0);
  for (auto m1 : {std::function<double(double)>(one), std::function<double(double)>([](double x) { return 1.0 + x * x; })}) {
    for (auto S : {std::function<double(double)>(one), std::function<double(double)>([](double x) { return std::exp(x); })}) {
      const Example1DResult r = example_1d_second_variation(m0, m1, S, 256);
      EXPECT_EQ(r.value, 0.0);
      EXPECT_EQ(r.sign, CurvatureSign::zero);
      EXPECT_EQ(example_1d_second_variation(-m0, m1, S, 256).value, 0.0);
    }
  }
}

TEST(Example1D, QuadratureConvergesAndRejectsCoarse) {
  // m1 = x, S = 1: 2 Int x^4 (-1) = -2/5
  const auto m1 = [](double x) { return x; };
  const double e1 = std::abs(example_1d_second_variation(0.0, m1, one, 64).value + 0.4);
  const double e2 = std::abs(example_1d_second_variation(0.0, m1, one, 127).value + 0.4);
  EXPECT_GT(std::log2(e1 / e2), 1.9);
  EXPECT_THROW(example_1d_second_variation(0.0, one, one, 63), InvalidArgument);
}

TEST(Example1D, PdeCrossCheck) {
  const auto S = [](double) { return 1.0; };
  std::vector<double> gaps, h;
  for (int n : {64, 128, 256}) {
    const Example1DCrossCheck c = example_1d_pde_check(0.0, one, S, n);
    const double closed = example_1d_second_variation(0.0, one, S, 1024).value;
    EXPECT_NEAR(c.fd, c.analytic, 1e-6 * std::abs(closed)) << n;
    gaps.push_back(std::abs(c.fd - closed));
    h.push_back(1.0 / (n - 1));
  }
  EXPECT_LE(gaps.back(), 1e-2);
  EXPECT_GE(netgrad::testing::min_order_h(gaps, h), 0.9);
}

TEST(ConvexityProbe, QuadraticDriftDiffusionIsConvex) {
  const Domain d = Domain::rect(12, 12);
  const DriftDiffusionSetup s(ScalarField::sample(d, [](double x, double y) { return 1.0 + x * y; }), 0.0, 1.0,
                              ScalarField::sample(d, [](double x, double y) { return x * (1 - x) * y * (1 - y); }),
                              EntropyGenerator::make_quadratic(0.0));
  const SymTensorField D0 = SymTensorField::identity(d, 3.0);
  auto E = [&](const SymTensorField& D) { return energy_dd(s, D).source; };
  const ConvexityProbeReport rep = convexity_probe(E, D0, 10, 5);
  ASSERT_EQ(rep.values.size(), 10u);
  const double scale = std::abs(E(D0));
  EXPECT_FALSE(rep.any_negative(1e-8 * scale));
}

TEST(ConvexityProbe, ConductanceEnergySignFollowsThreshold) {
  const int n = 65;
  const DriftDiffusionSetup s = mirrored_example_setup(n, one);
  const Domain& d = s.domain();
  const ScalarField r(d, 1.0);
  auto E = [&](const VectorField& m) { return energy_dd(s, SymTensorField::from_ansatz(r, m)).source; };
  auto even_dirs = [&d](Rng& rng) { return even_part(random_smooth_vector(d, rng)); };

  const ConvexityProbeReport small = convexity_probe<VectorField>(E, VectorField(d, 0.1), 8, 3, 1e-3, even_dirs);
  EXPECT_TRUE(small.any_negative());
  const ConvexityProbeReport large = convexity_probe<VectorField>(E, VectorField(d, 2.0), 8, 3, 1e-3, even_dirs);
  EXPECT_FALSE(large.any_negative());
  EXPECT_FALSE(large.sign_change);
}

TEST(ConvexityProbe, RejectsNonPositiveTrials) {
  const Domain d = Domain::line(5);
  auto f = [](const VectorField& m) { return inner(m, m); };
  EXPECT_THROW(convexity_probe(f, VectorField(d), 0), InvalidArgument);
}
