#include "netgrad/flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace netgrad {

namespace {

using Vector = Eigen::VectorXd;

// Backward Euler for u_t = beta lap u per component: (W + tau K) x = W y, with W
// the trapezoid weights and K the Laplacian stiffness. Fixed boundaries keep
// the values given at construction.
class ImplicitDiffusion {
 public:
  ImplicitDiffusion(const Domain& d, double tau, DBoundary bc) : d_(d), bc_(bc) {
    const SparseMatrix K = stiffness_matrix(SymTensorField::identity(d));
    slot_.assign(d.size(), -1);
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (bc == DBoundary::neumann || !d.on_boundary(k)) {
        slot_[k] = static_cast<int>(nodes_.size());
        nodes_.push_back(k);
      }
    }
    const auto n = static_cast<int>(nodes_.size());
    std::vector<Eigen::Triplet<double>> t;
    coupling_.resize(d.size());
    for (int col = 0; col < K.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
        const int r = slot_[it.row()];
        if (r < 0) continue;
        if (slot_[col] >= 0) {
          t.emplace_back(r, slot_[col], tau * it.value());
        } else {
          coupling_[col].emplace_back(r, tau * it.value());
        }
      }
    }
    for (int r = 0; r < n; ++r) t.emplace_back(r, r, d.weight(nodes_[r]));
    SparseMatrix A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    solver_.compute(A);
    if (solver_.info() != Eigen::Success) throw SolverDiverged("implicit diffusion factorization failed");
  }

  // y holds the explicit predictor; fixed boundary nodes take the values in g.
  ScalarField apply(const ScalarField& y, const ScalarField& g) const {
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    Vector b(n);
    for (Eigen::Index r = 0; r < n; ++r) b[r] = d_.weight(nodes_[r]) * y[nodes_[r]];
    ScalarField out = y;
    if (bc_ == DBoundary::fixed) {
      for (std::size_t k = 0; k < d_.size(); ++k) {
        if (slot_[k] >= 0) continue;
        out[k] = g[k];
        for (const auto& [r, v] : coupling_[k]) b[r] -= v * g[k];
      }
    }
    const Vector x = solver_.solve(b);
    for (Eigen::Index r = 0; r < n; ++r) out[nodes_[r]] = x[r];
    return out;
  }

 private:
  Domain d_;
  DBoundary bc_;
  std::vector<int> slot_;
  std::vector<std::size_t> nodes_;
  std::vector<std::vector<std::pair<int, double>>> coupling_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
};

double stiffness_energy(const ScalarField& f) {
  return dirichlet_form(SymTensorField::identity(f.domain()), f, f);
}

void require_finite(bool ok, int step) {
  if (!ok) {
    std::ostringstream msg;
    msg << "flow step " << step << " produced non-finite values";
    throw StepRejected(msg.str());
  }
}

}  // namespace

void validate(const FlowParams& p) {
  if (!(p.dt > 0.0) || !std::isfinite(p.dt)) throw InvalidArgument("flow dt must be positive");
  if (p.steps < 1) throw InvalidArgument("flow steps must be positive");
  if (!(p.beta >= 0.0)) throw InvalidArgument("flow beta must be nonnegative");
  if (!(p.alpha >= 0.0)) throw InvalidArgument("flow alpha must be nonnegative");
  if (p.alpha > 0.0 && !(p.gamma >= 1.0)) throw InvalidArgument("metabolic exponent gamma must be >= 1 when alpha > 0");
  if (!(p.rhs_tol >= 0.0)) throw InvalidArgument("flow rhs_tol must be nonnegative");
}

TensorEvaluation DiffusionFlow::evaluate(const SymTensorField& D) const {
  return {energy(setup_, D, opts_).source, gradient_flow_rhs(setup_, D, opts_)};
}

TensorEvaluation DriftDiffusionFlow::evaluate(const SymTensorField& D) const {
  return {energy_dd(setup_, D, opts_).source, gradient_flow_rhs_dd(setup_, D, opts_)};
}

TensorEvaluation PNPFlow::evaluate(const SymTensorField& D) const {
  const PNPState s = gummel_solve(setup_, D, opts_);
  return {energy_pnp(setup_, D, s).source, gradient_flow_rhs_pnp(setup_, D, opts_)};
}

ConductanceEvaluation DriftDiffusionMFlow::evaluate(const ConductanceAnsatz& a) const {
  return {energy_dd(setup_, a.tensor(), opts_).source, gradient_flow_rhs_m(setup_, a, opts_)};
}

ConductanceEvaluation PNPMFlow::evaluate(const ConductanceAnsatz& a) const {
  const SymTensorField D = a.tensor();
  const PNPState s = gummel_solve(setup_, D, opts_);
  return {energy_pnp(setup_, D, s).source, gradient_flow_rhs_pnp_m(setup_, a, opts_)};
}

void EnergyTrace::push(TraceRow row) {
  row.total = row.model + row.metabolic + row.diffusion;
  rows_.push_back(row);
}

int EnergyTrace::first_increase(double TraceRow::*column, double rel_slack) const {
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    const double prev = rows_[i - 1].*column;
    if (rows_[i].*column - prev > rel_slack * std::abs(prev)) return static_cast<int>(i);
  }
  return -1;
}

void EnergyTrace::write_csv(std::ostream& os) const {
  os << std::setprecision(17);
  os << "step,t,E_model,E_metabolic,E_diffusionD,E_total,min_eig\n";
  for (const auto& r : rows_) {
    os << r.step << ',' << r.t << ',' << r.model << ',' << r.metabolic << ',' << r.diffusion << ',' << r.total << ','
       << r.min_eig << '\n';
  }
}

SymTensorField metabolic_gradient(const SymTensorField& D, double alpha, double gamma) {
  SymTensorField out(D.domain());
  if (alpha == 0.0) return out;
  const int dim = D.domain().dim();
  for (std::size_t k = 0; k < D.node_count(); ++k) {
    const Sym2 a = D.at(k);
    const double nrm = frobenius_norm(a, dim);
    if (nrm == 0.0) continue;
    const double s = alpha * std::pow(nrm, gamma - 2.0);
    out.set(k, {s * a.xx, s * a.xy, s * a.yy});
  }
  return out;
}

double metabolic_energy(const SymTensorField& D, double alpha, double gamma) {
  if (alpha == 0.0) return 0.0;
  ScalarField f(D.domain());
  for (std::size_t k = 0; k < D.node_count(); ++k) f[k] = std::pow(frobenius_norm(D.at(k), D.domain().dim()), gamma);
  return alpha / gamma * integrate(f);
}

VectorField metabolic_gradient_m(const VectorField& m, double alpha, double gamma) {
  VectorField out(m.domain());
  if (alpha == 0.0) return out;
  for (std::size_t k = 0; k < m.node_count(); ++k) {
    const auto v = m.at(k);
    const double n2 = v[0] * v[0] + v[1] * v[1];
    if (n2 == 0.0) continue;
    const double s = 2.0 * alpha * std::pow(n2, gamma - 1.0);
    out.set(k, {s * v[0], s * v[1]});
  }
  return out;
}

double metabolic_energy_m(const VectorField& m, double alpha, double gamma) {
  if (alpha == 0.0) return 0.0;
  const ScalarField n2 = dot(m, m);
  return alpha / gamma * integrate(n2.map([gamma](double v) { return std::pow(v, gamma); }));
}

double diffusion_energy(const SymTensorField& D, double beta) {
  if (beta == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t c = 0; c < D.components(); ++c) {
    s += (c == 1 ? 2.0 : 1.0) * stiffness_energy(D.component(static_cast<int>(c)));
  }
  return 0.5 * beta * s;
}

double diffusion_energy(const VectorField& m, double beta) {
  if (beta == 0.0) return 0.0;
  double s = 0.0;
  for (int c = 0; c < m.domain().dim(); ++c) s += stiffness_energy(m.component(c));
  return 0.5 * beta * s;
}

double stable_dt(const SymTensorField& D, const SymTensorField& rhs, double safety) {
  double peak = 0.0;
  for (std::size_t k = 0; k < rhs.node_count(); ++k) peak = std::max(peak, frobenius_norm(rhs.at(k), D.domain().dim()));
  if (peak == 0.0) return std::numeric_limits<double>::infinity();
  return safety * D.min_eigenvalue() / peak;
}

double stable_dt(const ConductanceAnsatz& a, const VectorField& rhs, double safety) {
  const double peak = rhs.max_abs();
  if (peak == 0.0) return std::numeric_limits<double>::infinity();
  return safety * std::max(a.m().max_abs(), std::sqrt(a.r0())) / peak;
}

ScalarField spd_monitor(const SymTensorField& D) {
  ScalarField out(D.domain());
  for (std::size_t k = 0; k < D.node_count(); ++k) out[k] = min_eigenvalue(D.at(k), D.domain().dim());
  return out;
}

TensorFlowResult evolve(const TensorFlowModel& model, SymTensorField D0, const FlowParams& params) {
  validate(params);
  std::optional<ImplicitDiffusion> diffusion;
  if (params.beta > 0.0) diffusion.emplace(D0.domain(), params.dt * params.beta, params.boundary);

  SymTensorField D = D0;
  auto row = [&](int step, double model_energy) {
    return TraceRow{step,
                    step * params.dt,
                    model_energy,
                    metabolic_energy(D, params.alpha, params.gamma),
                    diffusion_energy(D, params.beta),
                    0.0,
                    D.min_eigenvalue()};
  };

  TensorEvaluation eval = model.evaluate(D);
  TensorFlowResult result;
  result.trace.push(row(0, eval.energy));
  SymTensorField total = eval.rhs - metabolic_gradient(D, params.alpha, params.gamma);
  for (int step = 1; step <= params.steps; ++step) {
    if (params.rhs_tol > 0.0 && total.max_abs() <= params.rhs_tol) break;
    D.axpy(params.dt, total);
    if (diffusion) {
      for (std::size_t c = 0; c < D.components(); ++c) {
        const int ci = static_cast<int>(c);
        D.set_component(ci, diffusion->apply(D.component(ci), D0.component(ci)));
      }
    }
    require_finite(D.all_finite(), step);
    eval = model.evaluate(D);
    result.trace.push(row(step, eval.energy));
    total = eval.rhs - metabolic_gradient(D, params.alpha, params.gamma);
  }
  result.final_rhs_norm = total.max_abs();
  result.D = std::move(D);
  return result;
}

ConductanceFlowResult evolve_m(const ConductanceFlowModel& model, ConductanceAnsatz a0, const FlowParams& params) {
  validate(params);
  std::optional<ImplicitDiffusion> diffusion;
  if (params.beta > 0.0) diffusion.emplace(a0.r().domain(), params.dt * params.beta, params.boundary);

  const VectorField m0 = a0.m();
  ConductanceAnsatz a = std::move(a0);
  auto row = [&](int step, double model_energy) {
    return TraceRow{step,
                    step * params.dt,
                    model_energy,
                    metabolic_energy_m(a.m(), params.alpha, params.gamma),
                    diffusion_energy(a.m(), params.beta),
                    0.0,
                    a.tensor().min_eigenvalue()};
  };

  ConductanceEvaluation eval = model.evaluate(a);
  ConductanceFlowResult result{a, {}, 0.0};
  result.trace.push(row(0, eval.energy));
  VectorField total = eval.rhs - metabolic_gradient_m(a.m(), params.alpha, params.gamma);
  for (int step = 1; step <= params.steps; ++step) {
    if (params.rhs_tol > 0.0 && total.max_abs() <= params.rhs_tol) break;
    VectorField m = a.m();
    m.axpy(params.dt, total);
    if (diffusion) {
      for (int c = 0; c < m.domain().dim(); ++c) {
        const ScalarField mc = diffusion->apply(m.component(c), m0.component(c));
        for (std::size_t k = 0; k < m.node_count(); ++k) m(k, c) = mc[k];
      }
    }
    require_finite(m.all_finite(), step);
    a = a.with_m(std::move(m));
    eval = model.evaluate(a);
    result.trace.push(row(step, eval.energy));
    total = eval.rhs - metabolic_gradient_m(a.m(), params.alpha, params.gamma);
  }
  result.final_rhs_norm = total.max_abs();
  result.ansatz = std::move(a);
  return result;
}

PLaplaceResidual stationary_residual_plaplace(const ScalarField& w, const SymTensorField& D, const ScalarField& source,
                                              double alpha, double gamma) {
  if (!(gamma > 1.0)) throw InvalidArgument("p-Laplace residual needs gamma > 1");
  if (!(alpha > 0.0)) throw InvalidArgument("p-Laplace residual needs alpha > 0");
  const Domain& d = w.domain();
  const int dim = d.dim();
  const VectorField g = gradient(w);
  const SymTensorField gg = sym_outer(g, g);
  const SymTensorField relax = metabolic_gradient(D, alpha, gamma);

  PLaplaceResidual out;
  out.p = 2.0 * gamma / (gamma - 1.0);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Sym2 a = gg.at(k);
    const Sym2 b = relax.at(k);
    out.algebraic = std::max(out.algebraic, frobenius_norm({a.xx - b.xx, a.xy - b.xy, a.yy - b.yy}, dim));
  }
  const double q = 2.0 / (gamma - 1.0);
  const ScalarField scale = dot(g, g).map([q](double s) { return std::pow(s, 0.5 * q); });
  const ScalarField div = divergence(multiply(scale, g));
  const double ca = std::pow(alpha, 1.0 / (gamma - 1.0));
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!d.on_boundary(k)) out.pde = std::max(out.pde, std::abs(-div[k] - ca * source[k]));
  }
  return out;
}

}  // namespace netgrad
