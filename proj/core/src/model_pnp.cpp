#include "netgrad/model_pnp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>


namespace netgrad {

namespace {

void validate(const GummelOptions& o) {
  if (!(o.damping > 0.0 && o.damping <= 1.0)) throw InvalidArgument("gummel damping must lie in (0, 1]");
  if (!(o.tolerance > 0.0)) throw InvalidArgument("gummel tolerance must be positive");
  if (o.max_iterations < 1) throw InvalidArgument("gummel iteration cap must be positive");
}

ScalarField solve_poisson(const ScalarField& u, double z, const SolverOptions& opts) {
  EllipticProblem p{SymTensorField::identity(u.domain()), std::nullopt, std::nullopt, z * u, 0.0};
  return solve_elliptic(p, opts).solution;
}

ScalarField exp_weight(const ScalarField& phi, double z) {
  return phi.map([z](double p) { return std::exp(-z * p); });
}

double quadratic_stiffness(const SymTensorField& a, const ScalarField& f) { return dirichlet_form(a, f, f); }

}  // namespace

PNPSetup::PNPSetup(ScalarField source, double z) : source_(std::move(source)), z_(z) {
  if (!source_.all_finite()) throw InvalidArgument("PNP source is not finite");
  if (!std::isfinite(z_)) throw InvalidArgument("valence z is not finite");
}

PNPState gummel_solve(const PNPSetup& setup, const SymTensorField& D, const GummelOptions& opts) {
  validate(opts);
  const Domain& d = setup.domain();
  const double z = setup.z();
  ScalarField phi(d);
  GummelReport report;

  auto solve_continuity = [&](const ScalarField& p) {
    EllipticProblem prob{D, exp_weight(p, z), std::nullopt, setup.source(), 1.0};
    ScalarField w = solve_elliptic(prob, opts.linear).solution;
    if (!(w.min() > 0.0)) {
      std::ostringstream msg;
      msg << "gummel: density lost positivity (min w = " << w.min() << ")";
      throw PositivityLost(msg.str());
    }
    return w;
  };

  bool converged = false;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const ScalarField w = solve_continuity(phi);
    const ScalarField phi_new = solve_poisson(multiply(exp_weight(phi, z), w), z, opts.linear);
    const double residual = std::abs(z) * (phi_new - phi).max_abs();
    report.history.push_back(residual);
    report.iterations = it;
    report.residual = residual;
    phi *= 1.0 - opts.damping;
    phi.axpy(opts.damping, phi_new);
    if (!std::isfinite(residual)) break;
    if (residual <= opts.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "gummel iteration stopped after " << report.iterations << " iterations at residual " << report.residual
        << " (tolerance " << opts.tolerance << ")";
    throw GummelDiverged(msg.str());
  }

  PNPState s;
  s.phi = std::move(phi);
  s.w = solve_continuity(s.phi);
  s.u = multiply(exp_weight(s.phi, z), s.w);
  s.mu = s.w.map([](double v) { return std::log(v); });
  s.report = std::move(report);
  return s;
}

PNPState pnp_state_from_density(const PNPSetup& setup, ScalarField u, const SolverOptions& opts) {
  detail::require_same_domain(setup.domain(), u.domain(), "pnp_state_from_density");
  if (!(u.min() > 0.0)) throw PositivityLost("pnp state: density must be positive");
  const Domain& d = u.domain();
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.on_boundary(k)) u[k] = 1.0;
  }
  PNPState s;
  s.phi = solve_poisson(u, setup.z(), opts);
  s.mu = ScalarField(d);
  for (std::size_t k = 0; k < d.size(); ++k) s.mu[k] = std::log(u[k]) + setup.z() * s.phi[k];
  s.w = s.mu.map([](double v) { return std::exp(v); });
  s.u = std::move(u);
  return s;
}

VectorField chemical_gradient(const PNPState& state) {
  const ScalarField inv_w = state.w.map([](double v) { return 1.0 / v; });
  return multiply(inv_w, gradient(state.w));
}

EnergyPair energy_pnp(const PNPSetup& setup, const SymTensorField& D, const PNPState& state) {
  const VectorField g = chemical_gradient(state);
  return {integrate(multiply(state.u, quadratic_form(g, D, g))), integrate(multiply(setup.source(), state.mu))};
}

double helmholtz(const PNPState& state) {
  if (!(state.u.min() > 0.0)) throw PositivityLost("helmholtz: density must be positive");
  const double entropy = integrate(state.u.map([](double v) { return v * (std::log(v) - 1.0); }));
  return entropy + 0.5 * quadratic_stiffness(SymTensorField::identity(state.phi.domain()), state.phi);
}

double discrete_dissipation(const SymTensorField& D, const PNPState& state) {
  return quadratic_stiffness(multiply(state.u, D), state.mu);
}

PNPState parabolic_step(const PNPSetup& setup, const PNPState& state, const SymTensorField& D, double dt,
                        const SolverOptions& opts) {
  if (!(dt > 0.0)) throw InvalidArgument("parabolic_step: dt must be positive");
  require_spd(D, "parabolic_step");
  const ScalarField flux_div = apply_diffusion_operator(multiply(state.u, D), state.mu);
  ScalarField u = state.u;
  u.axpy(-dt, flux_div);
  if (!(u.min() > 0.0)) {
    // Largest dt keeping every node positive, with a safety margin.
    double limit = dt;
    for (std::size_t k = 0; k < u.node_count(); ++k) {
      if (flux_div[k] > 0.0) limit = std::min(limit, state.u[k] / flux_div[k]);
    }
    std::ostringstream msg;
    msg << "parabolic step with dt = " << dt << " makes the density non-positive";
    throw PositivityLost(msg.str(), 0.5 * limit);
  }
  return pnp_state_from_density(setup, std::move(u), opts);
}

DissipationReport dissipation_check(const PNPSetup& setup, const SymTensorField& D, const PNPState& state0, double dt,
                                    int steps, const SolverOptions& opts) {
  if (steps < 1) throw InvalidArgument("dissipation_check: steps must be positive");
  DissipationReport r;
  PNPState s = state0;
  r.t.push_back(0.0);
  r.helmholtz.push_back(helmholtz(s));
  r.dissipation.push_back(discrete_dissipation(D, s));
  for (int n = 1; n <= steps; ++n) {
    s = parabolic_step(setup, s, D, dt, opts);
    r.t.push_back(n * dt);
    r.helmholtz.push_back(helmholtz(s));
    r.dissipation.push_back(discrete_dissipation(D, s));
    const double dH = r.helmholtz[n] - r.helmholtz[n - 1];
    const double defect = std::abs(dH / dt + 0.5 * (r.dissipation[n] + r.dissipation[n - 1]));
    r.max_defect = std::max(r.max_defect, defect);
    if (dH > 0.0) r.monotone = false;
  }
  r.final_state = std::move(s);
  return r;
}

SymTensorField gradient_flow_rhs_pnp(const PNPSetup& setup, const SymTensorField& D, const GummelOptions& opts) {
  const PNPState s = gummel_solve(setup, D, opts);
  const VectorField gm = chemical_gradient(s);
  const BlockSolution aux = solve_block_sigma_eta(D, s.u, s.phi, setup.z(), quadratic_form(gm, D, gm), opts.linear);
  SymTensorField rhs = sym_outer(gm, gm);
  rhs -= sym_outer(gm, gradient(aux.sigma));
  return multiply(s.u, rhs);
}

VectorField gradient_flow_rhs_pnp_m(const PNPSetup& setup, const ConductanceAnsatz& ansatz,
                                    const GummelOptions& opts) {
  return 2.0 * tensor_apply(gradient_flow_rhs_pnp(setup, ansatz.tensor(), opts), ansatz.m());
}

}  // namespace netgrad
