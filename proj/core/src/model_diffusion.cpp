#include "netgrad/model_diffusion.hpp"

#include <sstream>

namespace netgrad {

DiffusionSetup::DiffusionSetup(ScalarField source, double c, EntropyGenerator entropy)
    : source_(std::move(source)), c_(c), entropy_(entropy) {
  if (entropy_.equilibrium() != c_) {
    std::ostringstream msg;
    msg << "entropy equilibrium " << entropy_.equilibrium() << " differs from boundary value " << c_;
    throw InvalidArgument(msg.str());
  }
  if (!source_.all_finite()) throw InvalidArgument("source is not finite");
}

ScalarField solve_state(const DiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts) {
  EllipticProblem p{D, std::nullopt, std::nullopt, setup.source(), setup.boundary_value()};
  ScalarField u = solve_elliptic(p, opts).solution;
  if (setup.entropy().kind() == EntropyGenerator::Kind::boltzmann && !(u.min() > 0.0)) {
    std::ostringstream msg;
    msg << "state lost positivity (min u = " << u.min() << ") under the boltzmann entropy";
    throw PositivityLost(msg.str());
  }
  return u;
}

EnergyPair energy_of_state(const DiffusionSetup& setup, const SymTensorField& D, const ScalarField& u) {
  const auto& phi = setup.entropy();
  const VectorField g = gradient(u);
  return {integrate(multiply(phi.d2(u), quadratic_form(g, D, g))), integrate(multiply(setup.source(), phi.d1(u)))};
}

EnergyPair energy(const DiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts) {
  return energy_of_state(setup, D, solve_state(setup, D, opts));
}

ScalarField solve_sigma(const DiffusionSetup& setup, const SymTensorField& D, const ScalarField& u,
                        const SolverOptions& opts) {
  const auto& phi = setup.entropy();
  if (phi.has_zero_third_derivative()) return ScalarField(u.domain());
  const VectorField g = gradient(u);
  EllipticProblem p{D, std::nullopt, std::nullopt, multiply(phi.d3(u), quadratic_form(g, D, g)), 0.0};
  return solve_elliptic(p, opts).solution;
}

SymTensorField gradient_flow_rhs(const DiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts) {
  const ScalarField u = solve_state(setup, D, opts);
  const ScalarField sigma = solve_sigma(setup, D, u, opts);
  const VectorField gu = gradient(u);
  SymTensorField rhs = multiply(setup.entropy().d2(u), sym_outer(gu, gu));
  rhs += sym_outer(gradient(sigma), gu);
  return rhs;
}

}  // namespace netgrad
