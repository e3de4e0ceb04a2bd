#include "netgrad/model_driftdiffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "netgrad/random_fields.hpp"

namespace netgrad {

namespace {

void require_quadratic(const EntropyGenerator& e, const char* where) {
  if (!e.has_zero_third_derivative()) {
    throw InvalidArgument(std::string(where) + " requires the quadratic entropy");
  }
}

// The assembled stiffness is linear in the coefficient only for arithmetic averaging.
void require_arithmetic(const SolverOptions& opts, const char* where) {
  if (opts.averaging != FaceAveraging::arithmetic) {
    throw InvalidArgument(std::string(where) + " requires arithmetic face averaging");
  }
}

// Homogeneous-Dirichlet solve of -div(weight a grad v) = rhs.
ScalarField solve_homogeneous(const DriftDiffusionSetup& s, const SymTensorField& a, const ScalarField& rhs,
                              const SolverOptions& opts) {
  EllipticProblem p{a, s.weight(), std::nullopt, rhs, 0.0};
  return solve_elliptic(p, opts).solution;
}

}  // namespace

DriftDiffusionSetup::DriftDiffusionSetup(ScalarField source, double c, double z, ScalarField phi,
                                         EntropyGenerator entropy)
    : source_(std::move(source)), c_(c), z_(z), phi_(std::move(phi)), entropy_(entropy) {
  detail::require_same_domain(source_.domain(), phi_.domain(), "DriftDiffusionSetup");
  if (entropy_.equilibrium() != c_) {
    std::ostringstream msg;
    msg << "entropy equilibrium " << entropy_.equilibrium() << " differs from boundary value " << c_;
    throw InvalidArgument(msg.str());
  }
  if (!source_.all_finite() || !phi_.all_finite()) throw InvalidArgument("source or potential is not finite");
  if (!std::isfinite(z_)) throw InvalidArgument("valence z is not finite");
  const Domain& d = source_.domain();
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!d.on_boundary(k)) continue;
    if (std::abs(phi_[k]) > 1e-12) {
      std::ostringstream msg;
      msg << "potential must vanish on the boundary (phi = " << phi_[k] << " at node " << k << ")";
      throw InvalidArgument(msg.str());
    }
    phi_[k] = 0.0;
  }
  weight_ = phi_.map([z = z_](double p) { return std::exp(-z * p); });
}

ConductanceAnsatz::ConductanceAnsatz(ScalarField r, VectorField m) : r_(std::move(r)), m_(std::move(m)) {
  detail::require_same_domain(r_.domain(), m_.domain(), "ConductanceAnsatz");
  r0_ = r_.min();
  if (!(r0_ > 0.0) || !r_.all_finite()) throw InvalidArgument("ansatz background r must be positive and finite");
  if (!m_.all_finite()) throw InvalidArgument("ansatz conductance m is not finite");
}

ScalarField solve_w(const DriftDiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts) {
  EllipticProblem p{D, setup.weight(), std::nullopt, setup.source(), setup.boundary_value()};
  ScalarField w = solve_elliptic(p, opts).solution;
  if (setup.entropy().kind() == EntropyGenerator::Kind::boltzmann && !(w.min() > 0.0)) {
    std::ostringstream msg;
    msg << "w lost positivity (min w = " << w.min() << ") under the boltzmann entropy";
    throw PositivityLost(msg.str());
  }
  return w;
}

ScalarField recover_u(const DriftDiffusionSetup& setup, const ScalarField& w) { return multiply(setup.weight(), w); }

EnergyPair energy_dd_of_state(const DriftDiffusionSetup& setup, const SymTensorField& D, const ScalarField& w) {
  const auto& phi = setup.entropy();
  const VectorField g = gradient(w);
  const ScalarField density = multiply(setup.weight(), multiply(phi.d2(w), quadratic_form(g, D, g)));
  return {integrate(density), integrate(multiply(setup.source(), phi.d1(w)))};
}

EnergyPair energy_dd(const DriftDiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts) {
  return energy_dd_of_state(setup, D, solve_w(setup, D, opts));
}

SymTensorField gradient_flow_rhs_dd(const DriftDiffusionSetup& setup, const SymTensorField& D,
                                    const SolverOptions& opts) {
  const auto& phi = setup.entropy();
  const ScalarField w = solve_w(setup, D, opts);
  const VectorField gw = gradient(w);
  SymTensorField rhs = multiply(phi.d2(w), sym_outer(gw, gw));
  if (!phi.has_zero_third_derivative()) {
    std::optional<VectorField> drift;
    if (setup.z() != 0.0) drift = setup.z() * gradient(setup.phi());
    EllipticProblem p{D, std::nullopt, drift, multiply(phi.d3(w), quadratic_form(gw, D, gw)), 0.0};
    const ScalarField sigma = solve_elliptic(p, opts).solution;
    rhs += sym_outer(gw, gradient(sigma));
  }
  return multiply(setup.weight(), rhs);
}

SecondVariation second_variation_dd(const DriftDiffusionSetup& setup, const SymTensorField& D0,
                                    const SymTensorField& D1, const SolverOptions& opts) {
  require_arithmetic(opts, "second_variation_dd");
  const auto& phi = setup.entropy();
  const ScalarField& e = setup.weight();
  const SymTensorField eD0 = multiply(e, D0);
  const SymTensorField eD1 = multiply(e, D1);

  SecondVariation out;
  out.w0 = solve_w(setup, D0, opts);
  // c1: -div(e D0 grad w1) = div(e D1 grad w0)
  out.w1 = solve_homogeneous(setup, D0, -1.0 * apply_diffusion_operator(eD1, out.w0), opts);
  // c2 scaled by 2: -div(e D0 grad w2) = 2 div(e D1 grad w1)
  out.w2 = solve_homogeneous(setup, D0, -2.0 * apply_diffusion_operator(eD1, out.w1), opts);

  ScalarField f = multiply(phi.d2(out.w0), out.w2);
  if (!phi.has_zero_third_derivative()) f += multiply(phi.d3(out.w0), multiply(out.w1, out.w1));
  out.value = dirichlet_form(eD0, f, out.w0);
  out.dirichlet_form = dirichlet_form(eD0, out.w1, out.w1);
  return out;
}

ConvexityCertificate convexity_certificate_quadratic(const DriftDiffusionSetup& setup, const SymTensorField& D0,
                                                     int trials, std::uint64_t seed, const SolverOptions& opts) {
  require_quadratic(setup.entropy(), "convexity_certificate_quadratic");
  if (trials < 1) throw InvalidArgument("convexity_certificate_quadratic: trials must be positive");
  const double energy0 = std::abs(energy_dd(setup, D0, opts).source);
  const double lam0 = D0.min_eigenvalue();

  Rng rng(seed);
  ConvexityCertificate cert;
  cert.min_value = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const SymTensorField D1 = random_smooth_tensor(D0.domain(), rng);
    const SecondVariation sv = second_variation_dd(setup, D0, D1, opts);
    const double rel = D1.max_abs() / lam0;
    CertificateEntry entry{t, sv.value, sv.dirichlet_form, energy0 * rel * rel};
    cert.min_value = std::min(cert.min_value, sv.value);
    if (sv.value < -1e-10 * entry.scale) {
      std::ostringstream msg;
      msg << "second variation " << sv.value << " < 0 along random direction " << t << " (seed " << seed << ")";
      throw CertificateFailed(msg.str());
    }
    cert.entries.push_back(entry);
  }
  return cert;
}

double energy_m(const DriftDiffusionSetup& setup, const ConductanceAnsatz& ansatz, const SolverOptions& opts) {
  return energy_dd(setup, ansatz.tensor(), opts).dissipation;
}

VectorField gradient_flow_rhs_m(const DriftDiffusionSetup& setup, const ConductanceAnsatz& ansatz,
                                const SolverOptions& opts) {
  const auto& phi = setup.entropy();
  const SymTensorField D = ansatz.tensor();
  const ScalarField w = solve_w(setup, D, opts);
  const VectorField gw = gradient(w);
  SymTensorField G = multiply(phi.d2(w), sym_outer(gw, gw));
  if (!phi.has_zero_third_derivative()) {
    const ScalarField rhs = multiply(setup.weight(), multiply(phi.d3(w), quadratic_form(gw, D, gw)));
    const ScalarField sigma = solve_homogeneous(setup, D, rhs, opts);
    G += sym_outer(gw, gradient(sigma));
  }
  return 2.0 * tensor_apply(multiply(setup.weight(), G), ansatz.m());
}

SecondVariationM second_variation_m(const DriftDiffusionSetup& setup, const ConductanceAnsatz& ansatz0,
                                    const VectorField& m1, const SolverOptions& opts) {
  require_quadratic(setup.entropy(), "second_variation_m");
  require_arithmetic(opts, "second_variation_m");
  const ScalarField& e = setup.weight();
  const VectorField& m0 = ansatz0.m();
  const SymTensorField D0 = ansatz0.tensor();
  const SymTensorField D1 = 2.0 * sym_outer(m0, m1);
  const SymTensorField D2 = sym_outer(m1, m1);

  SecondVariationM out;
  out.w0 = solve_w(setup, D0, opts);
  out.w1 = solve_homogeneous(setup, D0, -1.0 * apply_diffusion_operator(multiply(e, D1), out.w0), opts);
  out.value = 2.0 * (dirichlet_form(multiply(e, D0), out.w1, out.w1) -
                     dirichlet_form(multiply(e, D2), out.w0, out.w0));
  return out;
}

}  // namespace netgrad
