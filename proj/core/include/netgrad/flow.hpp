#pragma once

// Explicit-Euler time integration of the tensor and conductance gradient flows
//   dD/dt = beta lap D + model_rhs(D) - alpha |D|^(gamma-2) D
// with the beta term advanced by backward Euler.

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "netgrad/model_pnp.hpp"

namespace netgrad {

enum class DBoundary { fixed, neumann };

struct FlowParams {
  double dt = 1e-3;
  int steps = 100;
  double beta = 0.0;
  double alpha = 0.0;
  double gamma = 2.0;
  DBoundary boundary = DBoundary::fixed;
  /// Stop early once max |total rhs| <= rhs_tol (0 disables).
  double rhs_tol = 0.0;
};

/// Throws InvalidArgument on dt <= 0, steps < 1, negative beta/alpha, or gamma < 1 with alpha > 0.
void validate(const FlowParams& p);

inline constexpr double kDefaultSafety = 0.05;

struct TensorEvaluation {
  double energy = 0.0;
  SymTensorField rhs;
};

struct ConductanceEvaluation {
  double energy = 0.0;
  VectorField rhs;
};

/// A model as seen by the integrator: its energy and its (negative) L2 gradient.
class TensorFlowModel {
 public:
  virtual ~TensorFlowModel() = default;
  virtual TensorEvaluation evaluate(const SymTensorField& D) const = 0;
  virtual std::string name() const = 0;
};

class ConductanceFlowModel {
 public:
  virtual ~ConductanceFlowModel() = default;
  virtual ConductanceEvaluation evaluate(const ConductanceAnsatz& a) const = 0;
  virtual std::string name() const = 0;
};

// The model energies reported are the source forms, whose gradients the rhs approximate.

class DiffusionFlow final : public TensorFlowModel {
 public:
  explicit DiffusionFlow(DiffusionSetup s, SolverOptions o = {}) : setup_(std::move(s)), opts_(o) {}
  TensorEvaluation evaluate(const SymTensorField& D) const override;
  std::string name() const override { return "diffusion"; }

 private:
  DiffusionSetup setup_;
  SolverOptions opts_;
};

class DriftDiffusionFlow final : public TensorFlowModel {
 public:
  explicit DriftDiffusionFlow(DriftDiffusionSetup s, SolverOptions o = {}) : setup_(std::move(s)), opts_(o) {}
  TensorEvaluation evaluate(const SymTensorField& D) const override;
  std::string name() const override { return "driftdiffusion"; }

 private:
  DriftDiffusionSetup setup_;
  SolverOptions opts_;
};

class PNPFlow final : public TensorFlowModel {
 public:
  explicit PNPFlow(PNPSetup s, GummelOptions o = {}) : setup_(std::move(s)), opts_(o) {}
  TensorEvaluation evaluate(const SymTensorField& D) const override;
  std::string name() const override { return "pnp"; }

 private:
  PNPSetup setup_;
  GummelOptions opts_;
};

class DriftDiffusionMFlow final : public ConductanceFlowModel {
 public:
  explicit DriftDiffusionMFlow(DriftDiffusionSetup s, SolverOptions o = {}) : setup_(std::move(s)), opts_(o) {}
  ConductanceEvaluation evaluate(const ConductanceAnsatz& a) const override;
  std::string name() const override { return "driftdiffusion-m"; }

 private:
  DriftDiffusionSetup setup_;
  SolverOptions opts_;
};

class PNPMFlow final : public ConductanceFlowModel {
 public:
  explicit PNPMFlow(PNPSetup s, GummelOptions o = {}) : setup_(std::move(s)), opts_(o) {}
  ConductanceEvaluation evaluate(const ConductanceAnsatz& a) const override;
  std::string name() const override { return "pnp-m"; }

 private:
  PNPSetup setup_;
  GummelOptions opts_;
};

struct TraceRow {
  int step = 0;
  double t = 0.0;
  double model = 0.0;
  double metabolic = 0.0;
  double diffusion = 0.0;
  double total = 0.0;
  double min_eig = 0.0;
};

class EnergyTrace {
 public:
  void push(TraceRow row);
  const std::vector<TraceRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  /// Index of the first step whose selected column rises by more than rel_slack * |previous|, or -1.
  int first_increase(double TraceRow::*column, double rel_slack = 1e-10) const;

  void write_csv(std::ostream& os) const;

 private:
  std::vector<TraceRow> rows_;
};

struct TensorFlowResult {
  SymTensorField D;
  EnergyTrace trace;
  double final_rhs_norm = 0.0;
};

struct ConductanceFlowResult {
  ConductanceAnsatz ansatz;
  EnergyTrace trace;
  double final_rhs_norm = 0.0;
};

TensorFlowResult evolve(const TensorFlowModel& model, SymTensorField D0, const FlowParams& params);
ConductanceFlowResult evolve_m(const ConductanceFlowModel& model, ConductanceAnsatz a0, const FlowParams& params);

/// alpha |D|_F^(gamma-2) D and its energy alpha/gamma Int |D|_F^gamma.
SymTensorField metabolic_gradient(const SymTensorField& D, double alpha, double gamma);
double metabolic_energy(const SymTensorField& D, double alpha, double gamma);
/// For the conductance flow the metabolic term acts on m (x) m: alpha/gamma Int |m|^(2 gamma).
VectorField metabolic_gradient_m(const VectorField& m, double alpha, double gamma);
double metabolic_energy_m(const VectorField& m, double alpha, double gamma);

/// beta/2 Int |grad D|_F^2 via the stiffness form, the xy component counted twice.
double diffusion_energy(const SymTensorField& D, double beta);
double diffusion_energy(const VectorField& m, double beta);

/// safety * min_eig(D) / max |rhs|_F (infinite when rhs vanishes).
double stable_dt(const SymTensorField& D, const SymTensorField& rhs, double safety = kDefaultSafety);
/// safety * max(|m|_inf, sqrt(r0)) / max |rhs|.
double stable_dt(const ConductanceAnsatz& a, const VectorField& rhs, double safety = kDefaultSafety);

/// Pointwise smallest eigenvalue.
ScalarField spd_monitor(const SymTensorField& D);

struct PLaplaceResidual {
  /// max |grad w (x) grad w - alpha |D|^(gamma-2) D|_F
  double algebraic = 0.0;
  /// max over interior nodes of |-div(|grad w|^(2/(gamma-1)) grad w) - alpha^(1/(gamma-1)) S|
  double pde = 0.0;
  /// 2 gamma / (gamma - 1)
  double p = 0.0;
};

PLaplaceResidual stationary_residual_plaplace(const ScalarField& w, const SymTensorField& D, const ScalarField& source,
                                              double alpha, double gamma);

}  // namespace netgrad
