#pragma once

// Drift-diffusion model with a prescribed potential phi, solved through the
// w-transform w = exp(z phi) u:
//   -div(exp(-z phi) D grad w) = S,  w = c on the boundary.

#include <cstdint>
#include <vector>

#include "netgrad/model_diffusion.hpp"

namespace netgrad {

class DriftDiffusionSetup {
 public:
  /// phi must vanish on boundary nodes (|phi| <= 1e-12 is snapped to 0).
  DriftDiffusionSetup(ScalarField source, double c, double z, ScalarField phi, EntropyGenerator entropy);

  const Domain& domain() const noexcept { return source_.domain(); }
  const ScalarField& source() const noexcept { return source_; }
  double boundary_value() const noexcept { return c_; }
  double z() const noexcept { return z_; }
  const ScalarField& phi() const noexcept { return phi_; }
  const EntropyGenerator& entropy() const noexcept { return entropy_; }
  /// exp(-z phi)
  const ScalarField& weight() const noexcept { return weight_; }

 private:
  ScalarField source_;
  double c_;
  double z_;
  ScalarField phi_;
  EntropyGenerator entropy_;
  ScalarField weight_;
};

/// D = r I + m (x) m with r >= r0 > 0.
class ConductanceAnsatz {
 public:
  ConductanceAnsatz(ScalarField r, VectorField m);

  const ScalarField& r() const noexcept { return r_; }
  const VectorField& m() const noexcept { return m_; }
  double r0() const noexcept { return r0_; }
  SymTensorField tensor() const { return SymTensorField::from_ansatz(r_, m_); }
  ConductanceAnsatz with_m(VectorField m) const { return ConductanceAnsatz(r_, std::move(m)); }

 private:
  ScalarField r_;
  VectorField m_;
  double r0_;
};

ScalarField solve_w(const DriftDiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts = {});
ScalarField recover_u(const DriftDiffusionSetup& setup, const ScalarField& w);

EnergyPair energy_dd(const DriftDiffusionSetup& setup, const SymTensorField& D, const SolverOptions& opts = {});
EnergyPair energy_dd_of_state(const DriftDiffusionSetup& setup, const SymTensorField& D, const ScalarField& w);

/// exp(-z phi) [Phi''(w) grad w (x) grad w + sym(grad w (x) grad sigma)] with
/// -div(D grad sigma) + z grad phi . D grad sigma = Phi'''(w) grad w . D grad w.
SymTensorField gradient_flow_rhs_dd(const DriftDiffusionSetup& setup, const SymTensorField& D,
                                    const SolverOptions& opts = {});

struct SecondVariation {
  double value = 0.0;
  /// Int exp(-z phi) grad w1 . D0 grad w1 (discrete stiffness form).
  double dirichlet_form = 0.0;
  ScalarField w0;
  ScalarField w1;
  ScalarField w2;
};

/// Second derivative of the source-form energy along D0 + eps D1.
SecondVariation second_variation_dd(const DriftDiffusionSetup& setup, const SymTensorField& D0,
                                    const SymTensorField& D1, const SolverOptions& opts = {});

struct CertificateEntry {
  int direction = 0;
  double second_variation = 0.0;
  double dirichlet_form = 0.0;
  double scale = 0.0;
};

struct ConvexityCertificate {
  std::vector<CertificateEntry> entries;
  double min_value = 0.0;
};

/// Random smooth symmetric directions D1 (seeded); throws CertificateFailed on
/// any second variation below -1e-10 * scale. Quadratic entropy only.
ConvexityCertificate convexity_certificate_quadratic(const DriftDiffusionSetup& setup, const SymTensorField& D0,
                                                     int trials, std::uint64_t seed = 1,
                                                     const SolverOptions& opts = {});

/// Dissipation form of the energy under D = r I + m (x) m.
double energy_m(const DriftDiffusionSetup& setup, const ConductanceAnsatz& ansatz, const SolverOptions& opts = {});

/// exp(-z phi) [2 Phi''(w) (grad w . m) grad w + (grad sigma . m) grad w + (grad w . m) grad sigma]
/// with -div(exp(-z phi) D grad sigma) = exp(-z phi) Phi'''(w) grad w . D grad w.
VectorField gradient_flow_rhs_m(const DriftDiffusionSetup& setup, const ConductanceAnsatz& ansatz,
                                const SolverOptions& opts = {});

struct SecondVariationM {
  double value = 0.0;
  ScalarField w0;
  ScalarField w1;
};

/// 2 Int [r |grad w1|^2 + |m0 . grad w1|^2 - |m1 . grad w0|^2] exp(-z phi) dx,
/// assembled with stiffness forms. Quadratic entropy only.
SecondVariationM second_variation_m(const DriftDiffusionSetup& setup, const ConductanceAnsatz& ansatz0,
                                    const VectorField& m1, const SolverOptions& opts = {});

}  // namespace netgrad
