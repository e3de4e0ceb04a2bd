#pragma once

// Stationary and parabolic Poisson-Nernst-Planck model with u = 1, phi = 0 on
// the boundary:
//   -div(u D grad mu) = S,  -lap phi = z u,  mu = ln u + z phi.

#include <vector>

#include "netgrad/model_driftdiffusion.hpp"

namespace netgrad {

class PNPSetup {
 public:
  PNPSetup(ScalarField source, double z);

  const Domain& domain() const noexcept { return source_.domain(); }
  const ScalarField& source() const noexcept { return source_; }
  double z() const noexcept { return z_; }

 private:
  ScalarField source_;
  double z_;
};

struct GummelReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

struct PNPState {
  ScalarField u;
  ScalarField phi;
  ScalarField mu;
  /// Slotboom variable w = exp(mu) = exp(z phi) u.
  ScalarField w;
  GummelReport report;
};

struct GummelOptions {
  double damping = 0.5;
  int max_iterations = 500;
  /// Bound on ||z (phi_new - phi)||_inf, the mu change of one Poisson update.
  double tolerance = 1e-11;
  SolverOptions linear;
};

PNPState gummel_solve(const PNPSetup& setup, const SymTensorField& D, const GummelOptions& opts = {});

/// Completes a density u (u = 1 on the boundary) to a state by solving the Poisson equation.
PNPState pnp_state_from_density(const PNPSetup& setup, ScalarField u, const SolverOptions& opts = {});

/// grad mu evaluated as grad w / w.
VectorField chemical_gradient(const PNPState& state);

/// (Int u grad mu . D grad mu, Int S mu)
EnergyPair energy_pnp(const PNPSetup& setup, const SymTensorField& D, const PNPState& state);

/// Int u (ln u - 1) dx + 1/2 Int |grad phi|^2 dx; the field energy uses the stiffness form phi^T K phi.
double helmholtz(const PNPState& state);

/// mu^T K_{uD} mu, the rate at which the parabolic step dissipates helmholtz().
double discrete_dissipation(const SymTensorField& D, const PNPState& state);

/// Explicit Euler u <- u + dt div(u D grad mu) followed by the Poisson re-solve.
/// Throws PositivityLost (with a suggested smaller dt) if u would become non-positive.
PNPState parabolic_step(const PNPSetup& setup, const PNPState& state, const SymTensorField& D, double dt,
                        const SolverOptions& opts = {});

struct DissipationReport {
  std::vector<double> t;
  std::vector<double> helmholtz;
  std::vector<double> dissipation;
  /// max over steps of |(H1 - H0) / dt + (E0 + E1) / 2|
  double max_defect = 0.0;
  bool monotone = true;
  PNPState final_state;
};

DissipationReport dissipation_check(const PNPSetup& setup, const SymTensorField& D, const PNPState& state0, double dt,
                                    int steps, const SolverOptions& opts = {});

/// u grad mu (x) grad mu - u sym(grad mu (x) grad sigma), (sigma, eta) from
/// solve_block_sigma_eta with right-hand side grad mu . D grad mu.
SymTensorField gradient_flow_rhs_pnp(const PNPSetup& setup, const SymTensorField& D, const GummelOptions& opts = {});

/// 2 G m for the tensor right-hand side G above at D = r I + m (x) m.
VectorField gradient_flow_rhs_pnp_m(const PNPSetup& setup, const ConductanceAnsatz& ansatz,
                                    const GummelOptions& opts = {});

}  // namespace netgrad
