#pragma once

// Run configuration: a single strict JSON document. Unknown keys, wrong types
// and cross-field inconsistencies raise ConfigError with the file and line.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netgrad/flow.hpp"
#include "netgrad/variation.hpp"

namespace netgrad::cli {

/// Named scalar profiles:
///   zero, constant (value), bump (amplitude, width, center),
///   sine (offset + amplitude * prod sin(mode pi (x - o) / L)),
///   bubble (amplitude * prod 4 (x - o)(o + L - x) / L^2).
struct ScalarProfile {
  std::string kind = "constant";
  double value = 1.0;
  double amplitude = 1.0;
  double offset = 0.0;
  double width = 20.0;
  double mode = 1.0;
  std::optional<std::array<double, 2>> center;

  ScalarField sample(const Domain& d) const;
  /// Evaluates at x on a unit 1D domain.
  double at(double x) const;
  nlohmann::json to_json() const;
};

/// identity (scale), constant (xx, xy, yy), graded (1 + 0.3x, 0.1x, 1.2).
struct TensorProfile {
  std::string kind = "identity";
  double scale = 1.0;
  Sym2 value{1.0, 0.0, 1.0};

  SymTensorField sample(const Domain& d) const;
  nlohmann::json to_json() const;
};

/// r constant; m constant (value) or graded (0.5 + 0.2x, 0.1y).
struct AnsatzProfile {
  double r = 0.5;
  std::string m_kind = "constant";
  std::array<double, 2> m_value{0.5, 0.0};

  ConductanceAnsatz sample(const Domain& d) const;
  nlohmann::json to_json() const;
};

struct DomainSpec {
  int dim = 1;
  std::array<int, 2> n{64, 64};
  std::array<double, 2> lengths{1.0, 1.0};

  Domain make() const;
  /// Same extent with n nodes per axis.
  Domain with_nodes(int nodes) const;
  nlohmann::json to_json() const;
};

struct CheckSpec {
  std::vector<int> levels;  // empty: 32/64/128 in 1D, 11/21/41 in 2D
  int directions = 5;
  double eps = 1e-5;
  double max_gap = 5e-2;
  double min_order = 0.9;
};

struct SecondVariationSpec {
  int directions = 20;
  double eps = 1e-3;
  double direction_scale = 0.3;
  /// Relative analytic-vs-FD tolerance where an analytic value exists.
  double rel_tol = 1e-5;
  /// Fail when a probe is below -convex_tol * |E| (probes without an analytic value).
  bool expect_convex = false;
  double convex_tol = 1e-8;
};

struct Example1DSpec {
  double m0 = 0.0;
  ScalarProfile m1;
  ScalarProfile source;
  int n_quad = 1024;
  /// Nodes per half interval of the PDE cross-check; 0 skips it.
  int pde_n = 256;
  double tolerance = 1e-2;
};

struct DissipationSpec {
  double dt = 5e-5;
  int steps = 200;
  ScalarProfile density{.kind = "sine", .amplitude = 0.5, .offset = 1.0, .center = {}};
  double min_ratio = 1.8;
};

struct RunConfig {
  std::string model;
  DomainSpec domain;
  std::string entropy = "boltzmann";
  std::optional<double> boundary_value;
  double z = 0.0;
  ScalarProfile phi{.kind = "zero", .center = {}};
  ScalarProfile source;
  TensorProfile D0;
  AnsatzProfile ansatz;
  FlowParams flow;
  /// dt chosen by stable_dt at the initial state.
  bool auto_dt = false;
  double safety = kDefaultSafety;
  SolverOptions solver;
  GummelOptions gummel;
  std::string output = "out";
  std::uint64_t seed = 1;
  CheckSpec check;
  SecondVariationSpec second_variation;
  Example1DSpec example_1d;
  DissipationSpec dissipation;

  std::vector<std::string> warnings;

  bool conductance_model() const { return model == "driftdiffusion-m" || model == "pnp-m"; }
  bool pnp_model() const { return model == "pnp" || model == "pnp-m"; }
  EntropyGenerator make_entropy() const;
  double boundary() const { return make_entropy().equilibrium(); }

  /// Fully resolved configuration (defaults filled), as echoed into the manifest.
  nlohmann::json to_json() const;
};

/// Parses and validates. `name` prefixes messages ("name:line: ...").
RunConfig parse_config(const std::string& text, const std::string& name);
RunConfig load_config(const std::string& path);

/// Model names accepted by "model".
const std::vector<std::string>& model_names();

}  // namespace netgrad::cli
