#include "netgrad/variation.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace netgrad {

VariationReport make_report(int direction, double analytic, double fd, double eps, int level) {
  VariationReport r{direction, analytic, fd, std::abs(analytic - fd), 0.0, eps, level};
  const double ref = std::abs(fd);
  r.rel_gap = ref > 0.0 ? r.abs_gap / ref : (r.abs_gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return r;
}

void write_csv(std::ostream& os, const std::vector<VariationReport>& reports) {
  os << std::setprecision(17);
  os << "direction,level,eps,analytic,fd,abs_gap,rel_gap\n";
  for (const auto& r : reports) {
    os << r.direction << ',' << r.level << ',' << r.eps << ',' << r.analytic << ',' << r.fd << ',' << r.abs_gap << ','
       << r.rel_gap << '\n';
  }
}

double fd_first_curve(const std::function<double(double)>& f, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  return (f(eps) - f(-eps)) / (2.0 * eps);
}

double fd_second_curve(const std::function<double(double)>& f, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  return (-f(2.0 * eps) + 16.0 * f(eps) - 30.0 * f(0.0) + 16.0 * f(-eps) - f(-2.0 * eps)) / (12.0 * eps * eps);
}

Example1DResult example_1d_second_variation(double m0, const std::function<double(double)>& m1_profile,
                                            const std::function<double(double)>& source_profile, int n_quad) {
  if (n_quad < 64) throw InvalidArgument("example_1d_second_variation: n_quad must be at least 64");
  if (!std::isfinite(m0)) throw InvalidArgument("example_1d_second_variation: m0 is not finite");
  const Domain d = Domain::line(n_quad);
  const ScalarField S = ScalarField::sample(d, [&](double x, double) { return source_profile(x); });

  // B by cumulative trapezoid.
  ScalarField B(d);
  const double h = d.spacing(0);
  for (std::size_t k = 1; k < d.size(); ++k) B[k] = B[k - 1] + 0.5 * h * (S[k - 1] + S[k]);

  double factor = 3.0 * m0 * m0 - 1.0;
  // 3 m0^2 - 1 at m0 = 1/sqrt(3) is a few ulps off zero in floating point.
  if (std::abs(factor) <= 8.0 * std::numeric_limits<double>::epsilon()) factor = 0.0;
  const double denom = std::pow(1.0 + m0 * m0, 3);

  ScalarField integrand(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double m1 = m1_profile(d.coord(k, 0));
    integrand[k] = m1 * m1 * B[k] * B[k];
  }
  Example1DResult r;
  r.value = 2.0 * factor / denom * integrate(integrand);
  if (factor < 0.0) {
    r.sign = CurvatureSign::negative;
    r.classification = "negative (|m0| < 1/sqrt(3))";
  } else if (factor > 0.0) {
    r.sign = CurvatureSign::positive;
    r.classification = "positive (|m0| > 1/sqrt(3))";
  } else {
    r.sign = CurvatureSign::zero;
    r.classification = "zero (|m0| = 1/sqrt(3))";
  }
  return r;
}

ScalarField mirrored_profile(const Domain& d, const std::function<double(double)>& f) {
  return ScalarField::sample(d, [&](double x, double) { return f(std::abs(x)); });
}

DriftDiffusionSetup mirrored_example_setup(int n, const std::function<double(double)>& source_profile) {
  if (n < 3) throw InvalidArgument("mirrored_example_setup: n must be at least 3");
  const Domain d = Domain::line(2 * n - 1, 2.0, -1.0);
  return DriftDiffusionSetup(mirrored_profile(d, source_profile), 0.0, 0.0, ScalarField(d),
                             EntropyGenerator::make_quadratic(0.0));
}

Example1DCrossCheck example_1d_pde_check(double m0, const std::function<double(double)>& m1_profile,
                                         const std::function<double(double)>& source_profile, int n, double eps) {
  const DriftDiffusionSetup setup = mirrored_example_setup(n, source_profile);
  const Domain& d = setup.domain();
  const ScalarField r(d, 1.0);
  const ConductanceAnsatz a0(r, VectorField(d, m0));
  VectorField m1(d);
  const ScalarField m1s = mirrored_profile(d, m1_profile);
  for (std::size_t k = 0; k < d.size(); ++k) m1(k, 0) = m1s[k];

  auto energy = [&](const VectorField& m) { return energy_dd(setup, SymTensorField::from_ansatz(r, m)).source; };
  Example1DCrossCheck out;
  out.fd = 0.5 * fd_second(energy, a0.m(), m1, eps);
  out.analytic = 0.5 * second_variation_m(setup, a0, m1).value;
  return out;
}

}  // namespace netgrad
