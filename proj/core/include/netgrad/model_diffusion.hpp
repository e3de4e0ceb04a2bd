#pragma once

// Pure diffusion model: -div(D grad u) = S, u = c on the boundary, with the
// entropy dissipation E[D] = int Phi''(u) grad u . D grad u = int S Phi'(u).

#include "netgrad/elliptic.hpp"
#include "netgrad/entropy.hpp"

namespace netgrad {

struct EnergyPair {
  double dissipation = 0.0;  ///< int Phi''(u) grad u . D grad u (node quadrature)
  double source = 0.0;       ///< int S Phi'(u)
};

class DiffusionSetup {
 public:
  /// Throws InvalidArgument unless entropy.equilibrium() == c and S is finite.
  DiffusionSetup(ScalarField source, double c, EntropyGenerator entropy);

  const Domain& domain() const noexcept { return source_.domain(); }
  const ScalarField& source() const noexcept { return source_; }
  double boundary_value() const noexcept { return c_; }
  const EntropyGenerator& entropy() const noexcept { return entropy_; }

 private:
  ScalarField source_;
  double c_;
  EntropyGenerator entropy_;
};

ScalarField solve_state(const DiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts = {});

EnergyPair energy(const DiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts = {});
EnergyPair energy_of_state(const DiffusionSetup& setup, const SymTensorField& D, const ScalarField& u);

/// -div(D grad sigma) = Phi'''(u) grad u . D grad u, sigma = 0 on the boundary.
ScalarField solve_sigma(const DiffusionSetup& setup, const SymTensorField& D, const ScalarField& u,
                        const SolverOptions& opts = {});

/// Phi''(u) grad u (x) grad u + (grad sigma (x) grad u + grad u (x) grad sigma) / 2,
/// the negative L2 gradient of E with respect to D.
SymTensorField gradient_flow_rhs(const DiffusionSetup& setup, const SymTensorField& D,
                                 const SolverOptions& opts = {});

}  // namespace netgrad
