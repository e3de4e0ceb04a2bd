#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "netgrad/elliptic.hpp"
#include "netgrad/random_fields.hpp"
#include "test_support.hpp"

using namespace netgrad;
using netgrad::testing::dense_diffusion_1d;
using netgrad::testing::min_order;

namespace {

constexpr double kPi = std::numbers::pi;

SymTensorField random_spd(const Domain& d, Rng& rng, double floor = 0.5) {
  SymTensorField D = random_smooth_tensor(d, rng);
  for (std::size_t k = 0; k < d.size(); ++k) {
    Sym2 a = D.at(k);
    if (d.dim() == 1) {
      a.xx = floor + a.xx * a.xx;
    } else {
      // B B^T + floor I
      const double b11 = a.xx;
      const double b12 = a.xy;
      const double b22 = a.yy;
      a = {floor + b11 * b11 + b12 * b12, b11 * b12 + b12 * b22, floor + b12 * b12 + b22 * b22};
    }
    D.set(k, a);
  }
  return D;
}

double manufactured_error_2d(int n) {
  const Domain d = Domain::rect(n, n);
  const ScalarField exact = ScalarField::sample(d, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
  EllipticProblem p{SymTensorField::identity(d), std::nullopt, std::nullopt, 2.0 * kPi * kPi * exact, 0.0};
  return (solve_elliptic(p).solution - exact).max_abs();
}

// u = sin(pi x) sin(pi y) with a = [[1 + x, 0.3], [0.3, 2 + y]]
double anisotropic_error(int n) {
  const Domain d = Domain::rect(n, n);
  SymTensorField a(d);
  for (std::size_t k = 0; k < d.size(); ++k) a.set(k, {1.0 + d.coord(k, 0), 0.3, 2.0 + d.coord(k, 1)});
  const ScalarField exact = ScalarField::sample(d, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
  const ScalarField rhs = ScalarField::sample(d, [](double x, double y) {
    const double s = std::sin(kPi * x), c = std::cos(kPi * x), sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    const double uxx = -kPi * kPi * s * sy, uyy = uxx, uxy = kPi * kPi * c * cy;
    const double ux = kPi * c * sy, uy = kPi * s * cy;
    // -div(a grad u) = -(a_xx u_xx + 2 a_xy u_xy + a_yy u_yy + d_x a_xx u_x + d_y a_yy u_y)
    return -((1.0 + x) * uxx + 2.0 * 0.3 * uxy + (2.0 + y) * uyy + ux + uy);
  });
  EllipticProblem p{a, std::nullopt, std::nullopt, rhs, 0.0};
  return (solve_elliptic(p).solution - exact).max_abs();
}

}  // namespace

TEST(SolveElliptic, ConstantBoundaryValueIsExact) {
  Rng rng(1);
  for (const Domain& d : {Domain::line(20), Domain::rect(9, 11)}) {
    EllipticProblem p{random_spd(d, rng), std::nullopt, std::nullopt, ScalarField(d), 2.5};
    EXPECT_LE((solve_elliptic(p).solution - ScalarField(d, 2.5)).max_abs(), 1e-10);
  }
}

TEST(SolveElliptic, QuadraticSolutionIn1D) {
  const Domain d = Domain::line(128);
  EllipticProblem p{SymTensorField::identity(d), std::nullopt, std::nullopt, ScalarField(d, 2.0), 0.0};
  const ScalarField u = solve_elliptic(p).solution;
  const ScalarField exact = ScalarField::sample(d, [](double x, double) { return x * (1.0 - x); });
  EXPECT_LE((u - exact).max_abs(), 1e-3);
}

TEST(SolveElliptic, ManufacturedSecondOrder2D) {
  const double e1 = manufactured_error_2d(17);
  const double e2 = manufactured_error_2d(33);
  const double e3 = manufactured_error_2d(65);
  EXPECT_GE(e1 / e2, 3.5);
  EXPECT_GE(e2 / e3, 3.5);
}

TEST(SolveElliptic, AnisotropicVariableCoefficientConverges) {
  EXPECT_GE(min_order({anisotropic_error(17), anisotropic_error(33), anisotropic_error(65)}), 1.9);
}

TEST(SolveElliptic, MatchesDenseOracle1D) {
  Rng rng(4);
  const Domain d = Domain::line(17);
  const SymTensorField a = random_spd(d, rng);
  const ScalarField S = random_smooth_scalar(d, rng);
  EllipticProblem p{a, std::nullopt, std::nullopt, S, 0.0};
  const ScalarField u = solve_elliptic(p).solution;
  const Eigen::MatrixXd A = dense_diffusion_1d(netgrad::testing::values_of(a.component(0)), d.spacing(0));
  Eigen::VectorXd b(15);
  for (int i = 0; i < 15; ++i) b[i] = S[i + 1];
  const Eigen::VectorXd x = A.lu().solve(b);
  for (int i = 0; i < 15; ++i) EXPECT_NEAR(u[i + 1], x[i], 1e-10 * (1.0 + std::abs(x[i])));
}

TEST(SolveElliptic, DriftMatchesDenseOracle1D) {
  Rng rng(8);
  const Domain d = Domain::line(17);
  const double h = d.spacing(0);
  const SymTensorField a = random_spd(d, rng);
  const ScalarField S = random_smooth_scalar(d, rng);
  VectorField b(d);
  for (std::size_t k = 0; k < d.size(); ++k) b(k, 0) = std::cos(3.0 * d.coord(k, 0));
  EllipticProblem p{a, std::nullopt, b, S, 0.0};
  const ScalarField u = solve_elliptic(p).solution;
  Eigen::MatrixXd A = dense_diffusion_1d(netgrad::testing::values_of(a.component(0)), h);
  for (int i = 1; i <= 15; ++i) {
    const double c = b(i, 0) * a.at(i).xx / (2.0 * h);
    if (i > 1) A(i - 1, i - 2) -= c;
    if (i < 15) A(i - 1, i) += c;
  }
  Eigen::VectorXd rhs(15);
  for (int i = 0; i < 15; ++i) rhs[i] = S[i + 1];
  const Eigen::VectorXd x = A.lu().solve(rhs);
  for (int i = 0; i < 15; ++i) EXPECT_NEAR(u[i + 1], x[i], 1e-10 * (1.0 + std::abs(x[i])));
}

TEST(SolveElliptic, WeightScalesCoefficient) {
  Rng rng(2);
  const Domain d = Domain::rect(9, 9);
  const SymTensorField a = random_spd(d, rng);
  const ScalarField wgt = random_smooth_scalar(d, rng).map([](double v) { return std::exp(0.3 * v); });
  const ScalarField S = random_smooth_scalar(d, rng);
  const ScalarField u1 = solve_elliptic({a, wgt, std::nullopt, S, 0.0}).solution;
  const ScalarField u2 = solve_elliptic({multiply(wgt, a), std::nullopt, std::nullopt, S, 0.0}).solution;
  EXPECT_LE((u1 - u2).max_abs(), 1e-12);
}

TEST(SolveElliptic, ScalingOfCoefficient) {
  const Domain d = Domain::rect(12, 10);
  Rng rng(3);
  const ScalarField S = random_smooth_scalar(d, rng);
  const ScalarField u1 = solve_elliptic({SymTensorField::identity(d), std::nullopt, std::nullopt, S, 0.0}).solution;
  const ScalarField u2 = solve_elliptic({SymTensorField::identity(d, 2.0), std::nullopt, std::nullopt, S, 0.0}).solution;
  EXPECT_LE((u2 - 0.5 * u1).max_abs(), 1e-10 * u1.max_abs());
}

TEST(SolveElliptic, RejectsIndefiniteCoefficient) {
  const Domain d = Domain::rect(6, 6);
  SymTensorField a = SymTensorField::identity(d);
  a.set(d.index(2, 3), {1.0, 2.0, 1.0});
  EXPECT_THROW(solve_elliptic({a, std::nullopt, std::nullopt, ScalarField(d, 1.0), 0.0}), NonSPDCoefficient);
  EXPECT_THROW(solve_elliptic({SymTensorField::identity(d), std::nullopt, std::nullopt, ScalarField(d), 0.0},
                              SolverOptions{.tol = 0.0}),
               InvalidArgument);
}

TEST(SolveElliptic, IterativePathAgreesWithDirect) {
  Rng rng(6);
  const Domain d = Domain::rect(25, 25);
  const SymTensorField a = random_spd(d, rng);
  const ScalarField S = random_smooth_scalar(d, rng);
  const EllipticProblem p{a, std::nullopt, std::nullopt, S, 0.0};
  const EllipticSolution direct = solve_elliptic(p);
  const EllipticSolution iterative = solve_elliptic(p, SolverOptions{.tol = 1e-12, .direct_limit = 10});
  EXPECT_EQ(iterative.report.method, "bicgstab-jacobi");
  EXPECT_LE(iterative.report.residual, 1e-12);
  EXPECT_LE((direct.solution - iterative.solution).max_abs(), 1e-8 * direct.solution.max_abs());
}

TEST(SolveElliptic, IterationCapReportsDivergence) {
  const Domain d = Domain::rect(40, 40);
  const EllipticProblem p{SymTensorField::identity(d), std::nullopt, std::nullopt, ScalarField(d, 1.0), 0.0};
  EXPECT_THROW(solve_elliptic(p, SolverOptions{.tol = 1e-14, .direct_limit = 10, .max_iterations = 2}), SolverDiverged);
}

TEST(Operator, SymmetricAndPositiveDefinite) {
  Rng rng(9);
  for (const Domain& d : {Domain::line(30), Domain::rect(11, 13)}) {
    const SymTensorField a = random_spd(d, rng);
    const SparseMatrix A = assemble_interior_operator({a, std::nullopt, std::nullopt, ScalarField(d), 0.0});
    const Eigen::MatrixXd M(A);
    const double scale = M.cwiseAbs().maxCoeff();
    EXPECT_LE((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-12 * scale);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (M + M.transpose()));
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Operator, StiffnessIsSelfAdjointAndAnnihilatesConstants) {
  Rng rng(12);
  const Domain d = Domain::rect(10, 8);
  const SymTensorField a = random_spd(d, rng);
  const ScalarField f = random_smooth_scalar(d, rng);
  const ScalarField g = random_smooth_scalar(d, rng);
  const double fg = dirichlet_form(a, f, g);
  EXPECT_NEAR(fg, dirichlet_form(a, g, f), 1e-12 * std::abs(fg));
  EXPECT_NEAR(dirichlet_form(a, ScalarField(d, 1.0), g), 0.0, 1e-12);
}

TEST(Operator, DiscreteMaximumPrinciple1D) {
  Rng rng(13);
  const Domain d = Domain::line(50);
  const SymTensorField a = random_spd(d, rng);
  const ScalarField S = random_smooth_scalar(d, rng).map([](double v) { return v * v; });
  EXPECT_GE(solve_elliptic({a, std::nullopt, std::nullopt, S, 0.0}).solution.min(), 0.0);
}

TEST(Operator, HarmonicAveragingConverges) {
  auto err = [](int n) {
    const Domain d = Domain::line(n);
    SymTensorField a(d);
    for (std::size_t k = 0; k < d.size(); ++k) a.set(k, {1.0 + d.coord(k, 0), 0.0, 0.0});
    // u = sin(pi x): -( (1+x) u')' = (1+x) pi^2 sin - pi cos
    const ScalarField rhs = ScalarField::sample(
        d, [](double x, double) { return (1.0 + x) * kPi * kPi * std::sin(kPi * x) - kPi * std::cos(kPi * x); });
    const ScalarField exact = ScalarField::sample(d, [](double x, double) { return std::sin(kPi * x); });
    const SolverOptions o{.averaging = FaceAveraging::harmonic};
    return (solve_elliptic({a, std::nullopt, std::nullopt, rhs, 0.0}, o).solution - exact).max_abs();
  };
  EXPECT_GE(min_order({err(33), err(65), err(129)}), 1.9);
}

TEST(BlockSystem, ZeroRightHandSide) {
  Rng rng(14);
  const Domain d = Domain::line(20);
  const BlockSolution s =
      solve_block_sigma_eta(random_spd(d, rng), ScalarField(d, 1.0), ScalarField(d), 1.0, ScalarField(d));
  EXPECT_EQ(s.sigma.max_abs(), 0.0);
  EXPECT_EQ(s.eta.max_abs(), 0.0);
}

TEST(BlockSystem, DecouplesAtZeroValence) {
  Rng rng(15);
  const Domain d = Domain::rect(10, 9);
  const SymTensorField D = random_spd(d, rng);
  const ScalarField rhs = random_smooth_scalar(d, rng);
  const ScalarField u = random_smooth_scalar(d, rng).map([](double v) { return 1.0 + 0.2 * std::tanh(v); });
  const BlockSolution s = solve_block_sigma_eta(D, u, random_smooth_scalar(d, rng), 0.0, rhs);
  const ScalarField sigma = solve_elliptic({D, std::nullopt, std::nullopt, rhs, 0.0}).solution;
  EXPECT_LE((s.sigma - sigma).max_abs(), 1e-10 * sigma.max_abs());
}

TEST(BlockSystem, MatchesDenseOracle1D) {
  Rng rng(16);
  const Domain d = Domain::line(17);
  const double h = d.spacing(0);
  const double z = 1.3;
  const SymTensorField D = random_spd(d, rng);
  const ScalarField u(d, 1.0);
  ScalarField phi = ScalarField::sample(d, [](double x, double) { return x * (1.0 - x); });
  const ScalarField rhs = random_smooth_scalar(d, rng);
  const BlockSolution s = solve_block_sigma_eta(D, u, phi, z, rhs);

  const int m = 15;
  const auto dv = netgrad::testing::values_of(D.component(0));
  const Eigen::MatrixXd K = dense_diffusion_1d(dv, h);
  std::vector<double> uD(dv.size());
  for (std::size_t i = 0; i < dv.size(); ++i) uD[i] = u[i] * dv[i];
  const Eigen::MatrixXd KuD = dense_diffusion_1d(uD, h);
  const Eigen::MatrixXd L = dense_diffusion_1d(std::vector<double>(dv.size(), 1.0), h);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  A.topLeftCorner(m, m) = K;
  for (int i = 1; i <= m; ++i) {
    const double dphi = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
    const double c = z * dphi * dv[i] / (2.0 * h);
    if (i > 1) A(i - 1, i - 2) -= c;
    if (i < m) A(i - 1, i) += c;
    A(i - 1, m + i - 1) = -z * z;
  }
  A.bottomLeftCorner(m, m) = KuD;
  A.bottomRightCorner(m, m) = L;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * m);
  for (int i = 0; i < m; ++i) b[i] = rhs[i + 1];
  const Eigen::VectorXd x = A.lu().solve(b);
  for (int i = 0; i < m; ++i) {
    EXPECT_NEAR(s.sigma[i + 1], x[i], 1e-10 * (1.0 + std::abs(x[i])));
    EXPECT_NEAR(s.eta[i + 1], x[m + i], 1e-10 * (1.0 + std::abs(x[m + i])));
  }
}
