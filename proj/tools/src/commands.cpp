#include "netgrad_cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>

namespace netgrad::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Artifacts {
 public:
  Artifacts(const fs::path& dir, std::string command, const RunConfig& c) : dir_(dir) {
    fs::create_directories(dir_);
    manifest_["netgrad_version"] = NETGRAD_VERSION;
    manifest_["command"] = std::move(command);
    manifest_["config"] = c.to_json();
    manifest_["warnings"] = c.warnings;
  }

  template <class Writer>
  void write(const std::string& name, Writer&& w) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir_ / name).string());
    os << std::setprecision(17);
    w(os);
    files_.push_back(name);
  }

  json& results() { return manifest_["results"]; }

  void finish(bool pass) {
    manifest_["outputs"] = files_;
    manifest_["status"] = pass ? "PASS" : "FAIL";
    std::ofstream os(dir_ / "manifest.json", std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir_ / "manifest.json").string());
    os << manifest_.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  json manifest_;
  std::vector<std::string> files_;
};

void require_model(const RunConfig& c, const char* command) {
  if (c.model.empty()) throw ConfigError(std::string(command) + ": missing required field \"model\"");
}

DiffusionSetup diffusion_setup(const RunConfig& c, const Domain& d) {
  return DiffusionSetup(c.source.sample(d), c.boundary(), c.make_entropy());
}

DriftDiffusionSetup drift_setup(const RunConfig& c, const Domain& d) {
  return DriftDiffusionSetup(c.source.sample(d), c.boundary(), c.z, c.phi.sample(d), c.make_entropy());
}

PNPSetup pnp_setup(const RunConfig& c, const Domain& d) { return PNPSetup(c.source.sample(d), c.z); }

std::unique_ptr<TensorFlowModel> tensor_model(const RunConfig& c, const Domain& d) {
  if (c.model == "diffusion") return std::make_unique<DiffusionFlow>(diffusion_setup(c, d), c.solver);
  if (c.model == "driftdiffusion") return std::make_unique<DriftDiffusionFlow>(drift_setup(c, d), c.solver);
  return std::make_unique<PNPFlow>(pnp_setup(c, d), c.gummel);
}

std::unique_ptr<ConductanceFlowModel> conductance_model(const RunConfig& c, const Domain& d) {
  if (c.model == "driftdiffusion-m") return std::make_unique<DriftDiffusionMFlow>(drift_setup(c, d), c.solver);
  return std::make_unique<PNPMFlow>(pnp_setup(c, d), c.gummel);
}

// Source-form energy as a function of D; each call re-solves the state.
std::function<double(const SymTensorField&)> tensor_energy(const RunConfig& c, const Domain& d) {
  if (c.model == "diffusion") {
    auto s = std::make_shared<DiffusionSetup>(diffusion_setup(c, d));
    return [s, o = c.solver](const SymTensorField& D) { return energy(*s, D, o).source; };
  }
  if (c.model == "driftdiffusion" || c.model == "driftdiffusion-m") {
    auto s = std::make_shared<DriftDiffusionSetup>(drift_setup(c, d));
    return [s, o = c.solver](const SymTensorField& D) { return energy_dd(*s, D, o).source; };
  }
  auto s = std::make_shared<PNPSetup>(pnp_setup(c, d));
  return [s, o = c.gummel](const SymTensorField& D) { return energy_pnp(*s, D, gummel_solve(*s, D, o)).source; };
}

std::function<double(const VectorField&)> conductance_energy(const RunConfig& c, const Domain& d, const ScalarField& r) {
  auto E = tensor_energy(c, d);
  return [E, r](const VectorField& m) { return E(SymTensorField::from_ansatz(r, m)); };
}

std::string pass_word(bool pass) { return pass ? "PASS" : "FAIL"; }

double order_between(double e0, double e1, double h0, double h1) { return std::log(e0 / e1) / std::log(h0 / h1); }

}  // namespace

// ---------------------------------------------------------------------------

int cmd_run_flow(const RunConfig& c, const fs::path& out, std::ostream& log) {
  require_model(c, "run-flow");
  const Domain d = c.domain.make();
  Artifacts art(out, "run-flow", c);
  FlowParams params = c.flow;
  EnergyTrace trace;
  double final_rhs = 0.0;

  if (!c.conductance_model()) {
    const auto model = tensor_model(c, d);
    const SymTensorField D0 = c.D0.sample(d);
    if (c.auto_dt) {
      params.dt = stable_dt(D0, model->evaluate(D0).rhs - metabolic_gradient(D0, params.alpha, params.gamma), c.safety);
      if (!std::isfinite(params.dt)) params.dt = 1.0;  // zero right-hand side: nothing moves
    }
    TensorFlowResult r = evolve(*model, D0, params);
    trace = r.trace;
    final_rhs = r.final_rhs_norm;
    art.write("D_initial.csv", [&](std::ostream& os) { write_csv(os, D0, "D"); });
    art.write("D_final.csv", [&](std::ostream& os) { write_csv(os, r.D, "D"); });
    art.write("min_eig_final.csv", [&](std::ostream& os) { write_csv(os, spd_monitor(r.D), "min_eig"); });
    if (c.model == "driftdiffusion" && params.alpha > 0.0 && params.gamma > 1.0 && c.z == 0.0) {
      const DriftDiffusionSetup s = drift_setup(c, d);
      const PLaplaceResidual pl =
          stationary_residual_plaplace(solve_w(s, r.D, c.solver), r.D, s.source(), params.alpha, params.gamma);
      art.results()["plaplace"] = {{"algebraic", pl.algebraic}, {"pde", pl.pde}, {"p", pl.p}};
      log << "p-Laplace stationarity: algebraic residual " << pl.algebraic << ", p = " << pl.p << '\n';
    }
  } else {
    const auto model = conductance_model(c, d);
    const ConductanceAnsatz a0 = c.ansatz.sample(d);
    if (c.auto_dt) {
      params.dt = stable_dt(a0, model->evaluate(a0).rhs - metabolic_gradient_m(a0.m(), params.alpha, params.gamma),
                            c.safety);
      if (!std::isfinite(params.dt)) params.dt = 1.0;
    }
    ConductanceFlowResult r = evolve_m(*model, a0, params);
    trace = r.trace;
    final_rhs = r.final_rhs_norm;
    art.write("m_initial.csv", [&](std::ostream& os) { write_csv(os, a0.m(), "m"); });
    art.write("m_final.csv", [&](std::ostream& os) { write_csv(os, r.ansatz.m(), "m"); });
    art.write("r.csv", [&](std::ostream& os) { write_csv(os, r.ansatz.r(), "r"); });
    art.write("D_final.csv", [&](std::ostream& os) { write_csv(os, r.ansatz.tensor(), "D"); });
  }
  art.write("trace.csv", [&](std::ostream& os) { trace.write_csv(os); });

  const auto& rows = trace.rows();
  const bool descent = trace.first_increase(params.alpha > 0.0 || params.beta > 0.0 ? &TraceRow::total : &TraceRow::model) < 0;
  art.results()["dt"] = params.dt;
  art.results()["steps_taken"] = static_cast<int>(rows.size()) - 1;
  art.results()["final_rhs_norm"] = final_rhs;
  art.results()["E_initial"] = rows.front().total;
  art.results()["E_final"] = rows.back().total;
  art.results()["min_eig_final"] = rows.back().min_eig;
  art.results()["energy_nonincreasing"] = descent;
  art.finish(true);
  log << "run-flow " << c.model << ": " << rows.size() - 1 << " steps, dt " << params.dt << ", E " << rows.front().total
      << " -> " << rows.back().total << (descent ? " (nonincreasing)" : " (increase detected)") << '\n';
  return kExitPass;
}

int cmd_check_gradient(const RunConfig& c, const fs::path& out, std::ostream& log) {
  require_model(c, "check-gradient");
  const CheckSpec& spec = c.check;
  std::vector<int> levels = spec.levels;
  if (levels.empty()) levels = c.domain.dim == 1 ? std::vector<int>{32, 64, 128} : std::vector<int>{11, 21, 41};

  Artifacts art(out, "check-gradient", c);
  std::vector<VariationReport> reports;
  std::vector<double> worst(levels.size(), 0.0);
  std::vector<double> hs;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const Domain d = c.domain.with_nodes(levels[l]);
    hs.push_back(d.spacing(0));
    Rng rng(c.seed);
    auto record = [&](int t, double analytic, double fd) {
      reports.push_back(make_report(t, analytic, fd, spec.eps, static_cast<int>(l)));
      worst[l] = std::max(worst[l], reports.back().rel_gap);
    };
    // descent convention: dE/ds along a direction is -<rhs, direction>
    if (!c.conductance_model()) {
      const SymTensorField D = c.D0.sample(d);
      const SymTensorField rhs = tensor_model(c, d)->evaluate(D).rhs;
      const auto E = tensor_energy(c, d);
      for (int t = 0; t < spec.directions; ++t) {
        const SymTensorField dir = random_smooth_tensor(d, rng);
        record(t, -inner(rhs, dir), fd_directional(E, D, dir, spec.eps));
      }
    } else {
      const ConductanceAnsatz a = c.ansatz.sample(d);
      const VectorField rhs = conductance_model(c, d)->evaluate(a).rhs;
      const auto E = conductance_energy(c, d, a.r());
      for (int t = 0; t < spec.directions; ++t) {
        const VectorField dir = random_smooth_vector(d, rng);
        record(t, -inner(rhs, dir), fd_directional(E, a.m(), dir, spec.eps));
      }
    }
  }
  art.write("variation.csv", [&](std::ostream& os) { write_csv(os, reports); });

  double min_order = std::numeric_limits<double>::infinity();
  art.write("convergence.csv", [&](std::ostream& os) {
    os << "level,n,h,worst_rel_gap,order\n";
    for (std::size_t l = 0; l < levels.size(); ++l) {
      os << l << ',' << levels[l] << ',' << hs[l] << ',' << worst[l] << ',';
      if (l > 0) {
        const double o = order_between(worst[l - 1], worst[l], hs[l - 1], hs[l]);
        min_order = std::min(min_order, o);
        os << o;
      }
      os << '\n';
    }
  });
  const bool pass = worst.back() <= spec.max_gap && min_order >= spec.min_order;
  art.results()["finest_worst_rel_gap"] = worst.back();
  art.results()["min_order"] = min_order;
  art.finish(pass);
  log << pass_word(pass) << " check-gradient " << c.model << ": worst relative gap " << worst.back() << " (<= "
      << spec.max_gap << "), order " << std::fixed << std::setprecision(3) << min_order << std::defaultfloat
      << std::setprecision(6) << " (>= " << spec.min_order << ")\n";
  return pass ? kExitPass : kExitNumerical;
}

int cmd_second_variation(const RunConfig& c, const fs::path& out, std::ostream& log) {
  require_model(c, "second-variation");
  const SecondVariationSpec& spec = c.second_variation;
  const Domain d = c.domain.make();
  Artifacts art(out, "second-variation", c);
  Rng rng(c.seed);
  bool pass = true;

  const bool has_analytic =
      c.model == "driftdiffusion" || (c.model == "driftdiffusion-m" && c.entropy == "quadratic");
  std::vector<VariationReport> reports;
  std::vector<double> probes;
  std::vector<std::array<double, 2>> forms;  // (second variation, Dirichlet form)
  double scale = 0.0;

  if (!c.conductance_model()) {
    const SymTensorField D0 = c.D0.sample(d);
    const auto E = tensor_energy(c, d);
    scale = std::abs(E(D0));
    const DriftDiffusionSetup* dd = nullptr;
    std::unique_ptr<DriftDiffusionSetup> dd_store;
    if (c.model == "driftdiffusion") {
      dd_store = std::make_unique<DriftDiffusionSetup>(drift_setup(c, d));
      dd = dd_store.get();
    }
    for (int t = 0; t < spec.directions; ++t) {
      const SymTensorField D1 = spec.direction_scale * random_smooth_tensor(d, rng);
      const double fd = fd_second(E, D0, D1, spec.eps);
      probes.push_back(fd);
      if (dd) {
        const SecondVariation sv = second_variation_dd(*dd, D0, D1, c.solver);
        reports.push_back(make_report(t, sv.value, fd, spec.eps, 0));
        forms.push_back({sv.value, sv.dirichlet_form});
      }
    }
  } else {
    const ConductanceAnsatz a0 = c.ansatz.sample(d);
    const auto E = conductance_energy(c, d, a0.r());
    scale = std::abs(E(a0.m()));
    std::unique_ptr<DriftDiffusionSetup> dd;
    if (has_analytic) dd = std::make_unique<DriftDiffusionSetup>(drift_setup(c, d));
    for (int t = 0; t < spec.directions; ++t) {
      const VectorField m1 = spec.direction_scale * random_smooth_vector(d, rng);
      const double fd = fd_second(E, a0.m(), m1, spec.eps);
      probes.push_back(fd);
      if (dd) reports.push_back(make_report(t, second_variation_m(*dd, a0, m1, c.solver).value, fd, spec.eps, 0));
    }
  }

  double worst_gap = 0.0;
  for (const auto& r : reports) worst_gap = std::max(worst_gap, r.rel_gap);
  double min_probe = std::numeric_limits<double>::infinity();
  double max_probe = -min_probe;
  for (double p : probes) {
    min_probe = std::min(min_probe, p);
    max_probe = std::max(max_probe, p);
  }
  if (has_analytic) pass = pass && worst_gap <= spec.rel_tol;
  if (spec.expect_convex) pass = pass && min_probe >= -spec.convex_tol * scale;

  if (has_analytic) art.write("second_variation.csv", [&](std::ostream& os) { write_csv(os, reports); });
  art.write("probe.csv", [&](std::ostream& os) {
    os << "direction,fd_second\n";
    for (std::size_t t = 0; t < probes.size(); ++t) os << t << ',' << probes[t] << '\n';
  });
  if (!forms.empty()) {
    art.write("dirichlet_form.csv", [&](std::ostream& os) {
      os << "direction,second_variation,dirichlet_form,ratio\n";
      for (std::size_t t = 0; t < forms.size(); ++t) {
        os << t << ',' << forms[t][0] << ',' << forms[t][1] << ',' << forms[t][0] / forms[t][1] << '\n';
      }
    });
  }
  art.results()["min_probe"] = min_probe;
  art.results()["max_probe"] = max_probe;
  art.results()["sign_change"] = min_probe < 0.0 && max_probe > 0.0;
  art.results()["energy_scale"] = scale;
  if (has_analytic) art.results()["worst_rel_gap"] = worst_gap;
  art.finish(pass);

  log << pass_word(pass) << " second-variation " << c.model << ": " << probes.size() << " directions, fd_second in ["
      << min_probe << ", " << max_probe << "]";
  if (has_analytic) log << ", analytic vs FD worst relative gap " << worst_gap << " (<= " << spec.rel_tol << ")";
  log << '\n';
  return pass ? kExitPass : kExitNumerical;
}

int cmd_example_1d(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const Example1DSpec& e = c.example_1d;
  Artifacts art(out, "example-1d", c);
  const auto m1 = [&](double x) { return e.m1.at(x); };
  const auto S = [&](double x) { return e.source.at(x); };
  const Example1DResult r = example_1d_second_variation(e.m0, m1, S, e.n_quad);
  bool pass = true;
  std::optional<Example1DCrossCheck> pde;
  if (e.pde_n > 0) {
    pde = example_1d_pde_check(e.m0, m1, S, e.pde_n);
    pass = std::abs(pde->fd - r.value) <= e.tolerance;
  }
  art.write("example_1d.csv", [&](std::ostream& os) {
    os << "m0,n_quad,value,classification,pde_n,pde_fd,pde_analytic\n";
    os << e.m0 << ',' << e.n_quad << ',' << r.value << ',' << r.classification << ',' << e.pde_n << ',';
    if (pde) os << pde->fd << ',' << pde->analytic;
    os << (pde ? "" : ",") << '\n';
  });
  art.results()["value"] = r.value;
  art.results()["classification"] = r.classification;
  if (pde) {
    art.results()["pde_fd"] = pde->fd;
    art.results()["pde_analytic"] = pde->analytic;
  }
  art.finish(pass);
  log << std::fixed << std::setprecision(6) << "second variation at m0 = " << e.m0 << ": " << r.value << "  "
      << r.classification << '\n';
  if (pde) {
    log << pass_word(pass) << " PDE cross-check (n = " << e.pde_n << "): fd_second " << pde->fd << ", |gap| "
        << std::scientific << std::setprecision(2) << std::abs(pde->fd - r.value) << " (<= " << e.tolerance << ")\n";
  }
  log << std::defaultfloat << std::setprecision(6);
  return pass ? kExitPass : kExitNumerical;
}

int cmd_pnp_dissipation(const RunConfig& c, const fs::path& out, std::ostream& log) {
  if (!c.model.empty() && c.model != "pnp") throw ConfigError("pnp-dissipation: \"model\" must be \"pnp\" when given");
  const DissipationSpec& s = c.dissipation;
  const Domain d = c.domain.make();
  Artifacts art(out, "pnp-dissipation", c);
  const PNPSetup setup = pnp_setup(c, d);
  const SymTensorField D = c.D0.sample(d);
  const PNPState s0 = pnp_state_from_density(setup, s.density.sample(d), c.solver);
  const DissipationReport coarse = dissipation_check(setup, D, s0, s.dt, s.steps, c.solver);
  const DissipationReport fine = dissipation_check(setup, D, s0, 0.5 * s.dt, 2 * s.steps, c.solver);
  auto dump = [](const DissipationReport& r) {
    return [&r](std::ostream& os) {
      os << "step,t,helmholtz,dissipation\n";
      for (std::size_t i = 0; i < r.t.size(); ++i) {
        os << i << ',' << r.t[i] << ',' << r.helmholtz[i] << ',' << r.dissipation[i] << '\n';
      }
    };
  };
  art.write("dissipation.csv", dump(coarse));
  art.write("dissipation_half.csv", dump(fine));
  const double ratio = coarse.max_defect / fine.max_defect;
  const bool pass = coarse.monotone && fine.monotone && ratio >= s.min_ratio;
  art.results()["max_defect"] = coarse.max_defect;
  art.results()["max_defect_half"] = fine.max_defect;
  art.results()["defect_ratio"] = ratio;
  art.results()["monotone"] = coarse.monotone && fine.monotone;
  art.finish(pass);
  log << pass_word(pass) << " pnp-dissipation: H " << (coarse.monotone ? "nonincreasing" : "NOT monotone") << " over "
      << s.steps << " steps, defect " << coarse.max_defect << " -> " << fine.max_defect << " when dt halves (ratio "
      << ratio << ", >= " << s.min_ratio << ")\n";
  return pass ? kExitPass : kExitNumerical;
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"run-flow", "check-gradient", "second-variation", "example-1d",
                                                 "pnp-dissipation"};
  return names;
}

int run_subcommand(const std::string& name, const RunConfig& c, const fs::path& out, std::ostream& log,
                   std::ostream& err) {
  for (const auto& w : c.warnings) err << "warning: " << w << '\n';
  try {
    if (name == "run-flow") return cmd_run_flow(c, out, log);
    if (name == "check-gradient") return cmd_check_gradient(c, out, log);
    if (name == "second-variation") return cmd_second_variation(c, out, log);
    if (name == "example-1d") return cmd_example_1d(c, out, log);
    if (name == "pnp-dissipation") return cmd_pnp_dissipation(c, out, log);
    err << "error: unknown subcommand " << name << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PositivityLost& e) {
    err << "numerical failure: " << e.what();
    if (e.suggested_dt() > 0.0) err << " (try dt <= " << e.suggested_dt() << ")";
    err << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace netgrad::cli
