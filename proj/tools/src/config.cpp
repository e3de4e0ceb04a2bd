#include "netgrad_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "netgrad_cli/locate.hpp"

namespace netgrad::cli {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// Typed access to one JSON object with line-precise errors.
class Node {
 public:
  Node(const json& j, std::string ptr, const LineMap& lines, const std::string& file)
      : j_(j), ptr_(std::move(ptr)), lines_(lines), file_(file) {}

  [[noreturn]] void fail(const std::string& sub, const std::string& msg) const {
    const std::string where = sub.empty() ? ptr_ : ptr_ + "/" + sub;
    auto it = lines_.find(where);
    if (it == lines_.end()) it = lines_.find(ptr_);
    std::ostringstream os;
    os << file_;
    if (it != lines_.end()) os << ':' << it->second;
    os << ": " << msg;
    throw ConfigError(os.str());
  }

  std::string name(const std::string& key) const {
    std::string p = ptr_.empty() ? key : ptr_.substr(1) + "." + key;
    std::replace(p.begin(), p.end(), '/', '.');
    return '"' + p + '"';
  }

  void require_object() const {
    if (!j_.is_object()) fail("", "expected an object at " + (ptr_.empty() ? std::string("top level") : '"' + ptr_.substr(1) + '"'));
  }

  void allow(std::initializer_list<const char*> keys) const {
    require_object();
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) fail(k, "unknown key " + name(k));
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  Node child(const std::string& key) const { return Node(j_.at(key), ptr_ + "/" + key, lines_, file_); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(key, name(key) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, name(key) + " must be finite");
    return x;
  }

  double positive(const std::string& key, double fallback) const {
    const double x = number(key, fallback);
    if (!(x > 0.0)) fail(key, name(key) + " must be positive");
    return x;
  }

  double nonnegative(const std::string& key, double fallback) const {
    const double x = number(key, fallback);
    if (x < 0.0) fail(key, name(key) + " must be nonnegative");
    return x;
  }

  int integer(const std::string& key, int fallback, int min_value) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, name(key) + " must be an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > 1'000'000'000) fail(key, name(key) + " must be at least " + std::to_string(min_value));
    return static_cast<int>(x);
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, name(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& options,
                     bool required = false) const {
    if (!has(key)) {
      if (required) fail("", "missing required field " + name(key));
      return fallback;
    }
    const json& v = j_.at(key);
    if (!v.is_string()) fail(key, name(key) + " must be a string");
    const std::string s = v.get<std::string>();
    if (std::find(options.begin(), options.end(), s) == options.end()) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
      fail(key, name(key) + " must be one of: " + list + " (got \"" + s + "\")");
    }
    return s;
  }

  std::vector<double> numbers(const std::string& key, std::size_t min_len, std::size_t max_len) const {
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() < min_len || v.size() > max_len) {
      fail(key, name(key) + " must be an array of " + std::to_string(min_len) +
                    (min_len == max_len ? "" : " to " + std::to_string(max_len)) + " numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key + "/" + std::to_string(i), name(key) + " entries must be numbers");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  const json& raw() const { return j_; }

 private:
  const json& j_;
  std::string ptr_;
  const LineMap& lines_;
  const std::string& file_;
};

ScalarProfile parse_profile(const Node& n, ScalarProfile p) {
  n.require_object();
  p.kind = n.choice("profile", p.kind, {"zero", "constant", "bump", "sine", "bubble"}, true);
  if (p.kind == "zero") {
    n.allow({"profile"});
  } else if (p.kind == "constant") {
    n.allow({"profile", "value"});
    p.value = n.number("value", p.value);
  } else if (p.kind == "bump") {
    n.allow({"profile", "amplitude", "width", "center"});
    p.amplitude = n.number("amplitude", p.amplitude);
    p.width = n.positive("width", p.width);
    if (n.has("center")) {
      const auto c = n.numbers("center", 1, 2);
      p.center = std::array<double, 2>{c[0], c.size() > 1 ? c[1] : 0.0};
    }
  } else if (p.kind == "sine") {
    n.allow({"profile", "amplitude", "offset", "mode"});
    p.amplitude = n.number("amplitude", p.amplitude);
    p.offset = n.number("offset", p.offset);
    p.mode = n.number("mode", p.mode);
  } else {
    n.allow({"profile", "amplitude"});
    p.amplitude = n.number("amplitude", p.amplitude);
  }
  return p;
}

TensorProfile parse_tensor(const Node& n) {
  TensorProfile t;
  n.require_object();
  t.kind = n.choice("profile", t.kind, {"identity", "constant", "graded"}, true);
  if (t.kind == "identity") {
    n.allow({"profile", "scale"});
    t.scale = n.positive("scale", t.scale);
  } else if (t.kind == "constant") {
    n.allow({"profile", "xx", "xy", "yy"});
    t.value = {n.number("xx", 1.0), n.number("xy", 0.0), n.number("yy", 1.0)};
  } else {
    n.allow({"profile"});
  }
  return t;
}

AnsatzProfile parse_ansatz(const Node& n) {
  AnsatzProfile a;
  n.allow({"r", "m"});
  a.r = n.positive("r", a.r);
  if (n.has("m")) {
    const Node m = n.child("m");
    m.require_object();
    a.m_kind = m.choice("profile", a.m_kind, {"constant", "graded"}, true);
    if (a.m_kind == "constant") {
      m.allow({"profile", "value"});
      if (m.has("value")) {
        const auto v = m.numbers("value", 1, 2);
        a.m_value = {v[0], v.size() > 1 ? v[1] : 0.0};
      }
    } else {
      m.allow({"profile"});
    }
  }
  return a;
}

void parse_domain(const Node& n, DomainSpec& d) {
  n.allow({"dim", "n", "lengths"});
  d.dim = n.integer("dim", d.dim, 1);
  if (d.dim > 2) n.fail("dim", "\"domain.dim\" must be 1 or 2");
  if (n.has("n")) {
    if (n.raw().at("n").is_number_integer()) {
      const int k = n.integer("n", 0, 3);
      d.n = {k, k};
    } else {
      const auto v = n.numbers("n", static_cast<std::size_t>(d.dim), static_cast<std::size_t>(d.dim));
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 3 || v[i] != std::floor(v[i])) n.fail("n/" + std::to_string(i), "\"domain.n\" entries must be integers >= 3");
        d.n[i] = static_cast<int>(v[i]);
      }
      if (d.dim == 1) d.n[1] = d.n[0];
    }
  }
  if (n.has("lengths")) {
    const auto v = n.numbers("lengths", static_cast<std::size_t>(d.dim), static_cast<std::size_t>(d.dim));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0)) n.fail("lengths/" + std::to_string(i), "\"domain.lengths\" entries must be positive");
      d.lengths[i] = v[i];
    }
  }
}

void parse_flow(const Node& n, RunConfig& c) {
  n.allow({"dt", "safety", "steps", "beta", "alpha", "gamma", "boundary", "rhs_tol"});
  if (n.has("dt") && n.raw().at("dt").is_string()) {
    if (n.raw().at("dt").get<std::string>() != "auto") n.fail("dt", "\"flow.dt\" must be a positive number or \"auto\"");
    c.auto_dt = true;
  } else {
    c.flow.dt = n.positive("dt", c.flow.dt);
  }
  c.safety = n.positive("safety", c.safety);
  c.flow.steps = n.integer("steps", c.flow.steps, 1);
  c.flow.beta = n.nonnegative("beta", c.flow.beta);
  c.flow.alpha = n.nonnegative("alpha", c.flow.alpha);
  c.flow.gamma = n.number("gamma", c.flow.gamma);
  if (c.flow.alpha > 0.0 && c.flow.gamma < 1.0) n.fail("gamma", "\"flow.gamma\" must be >= 1 when \"flow.alpha\" > 0");
  c.flow.boundary = n.choice("boundary", "fixed", {"fixed", "neumann"}) == "fixed" ? DBoundary::fixed : DBoundary::neumann;
  c.flow.rhs_tol = n.nonnegative("rhs_tol", c.flow.rhs_tol);
}

void parse_solver(const Node& n, SolverOptions& s) {
  n.allow({"tol", "direct_limit", "max_iterations", "averaging"});
  s.tol = n.positive("tol", s.tol);
  s.direct_limit = static_cast<std::size_t>(n.integer("direct_limit", static_cast<int>(s.direct_limit), 0));
  s.max_iterations = n.integer("max_iterations", s.max_iterations, 1);
  s.averaging = n.choice("averaging", "arithmetic", {"arithmetic", "harmonic"}) == "arithmetic" ? FaceAveraging::arithmetic
                                                                                              : FaceAveraging::harmonic;
}

void parse_gummel(const Node& n, GummelOptions& g) {
  n.allow({"damping", "max_iterations", "tolerance"});
  g.damping = n.positive("damping", g.damping);
  if (g.damping > 1.0) n.fail("damping", "\"gummel.damping\" must be in (0, 1]");
  g.max_iterations = n.integer("max_iterations", g.max_iterations, 1);
  g.tolerance = n.positive("tolerance", g.tolerance);
}

void parse_check(const Node& n, CheckSpec& c) {
  n.allow({"levels", "directions", "eps", "max_gap", "min_order"});
  if (n.has("levels")) {
    const auto v = n.numbers("levels", 2, 8);
    for (double x : v) {
      if (x < 3 || x != std::floor(x)) n.fail("levels", "\"check.levels\" entries must be integers >= 3");
      c.levels.push_back(static_cast<int>(x));
    }
    if (!std::is_sorted(c.levels.begin(), c.levels.end()) ||
        std::adjacent_find(c.levels.begin(), c.levels.end()) != c.levels.end()) {
      n.fail("levels", "\"check.levels\" must be strictly increasing");
    }
  }
  c.directions = n.integer("directions", c.directions, 1);
  c.eps = n.positive("eps", c.eps);
  c.max_gap = n.positive("max_gap", c.max_gap);
  c.min_order = n.number("min_order", c.min_order);
}

void parse_second(const Node& n, SecondVariationSpec& s) {
  n.allow({"directions", "eps", "direction_scale", "rel_tol", "expect_convex", "convex_tol"});
  s.directions = n.integer("directions", s.directions, 1);
  s.eps = n.positive("eps", s.eps);
  s.direction_scale = n.positive("direction_scale", s.direction_scale);
  s.rel_tol = n.positive("rel_tol", s.rel_tol);
  s.expect_convex = n.boolean("expect_convex", s.expect_convex);
  s.convex_tol = n.nonnegative("convex_tol", s.convex_tol);
}

void parse_example(const Node& n, Example1DSpec& e) {
  n.allow({"m0", "m1", "source", "n_quad", "pde_n", "tolerance"});
  e.m0 = n.number("m0", e.m0);
  if (n.has("m1")) e.m1 = parse_profile(n.child("m1"), e.m1);
  if (n.has("source")) e.source = parse_profile(n.child("source"), e.source);
  e.n_quad = n.integer("n_quad", e.n_quad, 64);
  e.pde_n = n.integer("pde_n", e.pde_n, 0);
  if (e.pde_n != 0 && e.pde_n < 3) n.fail("pde_n", "\"example_1d.pde_n\" must be 0 or at least 3");
  e.tolerance = n.positive("tolerance", e.tolerance);
}

void parse_dissipation(const Node& n, DissipationSpec& d) {
  n.allow({"dt", "steps", "density", "min_ratio"});
  d.dt = n.positive("dt", d.dt);
  d.steps = n.integer("steps", d.steps, 1);
  if (n.has("density")) d.density = parse_profile(n.child("density"), d.density);
  d.min_ratio = n.positive("min_ratio", d.min_ratio);
}

}  // namespace

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"diffusion", "driftdiffusion", "driftdiffusion-m", "pnp", "pnp-m"};
  return names;
}

// ---------------------------------------------------------------------------
// Profiles

namespace {

double profile_value(const ScalarProfile& p, const Domain& d, double x, double y) {
  const int dim = d.dim();
  const std::array<double, 2> pt{x, y};
  if (p.kind == "zero") return 0.0;
  if (p.kind == "constant") return p.value;
  if (p.kind == "bump") {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double c = p.center ? (*p.center)[a] : d.origin(a) + 0.5 * d.length(a);
      r2 += (pt[a] - c) * (pt[a] - c);
    }
    return p.amplitude * std::exp(-p.width * r2);
  }
  double prod = 1.0;
  for (int a = 0; a < dim; ++a) {
    const double s = (pt[a] - d.origin(a)) / d.length(a);
    prod *= p.kind == "sine" ? std::sin(p.mode * kPi * s) : 4.0 * s * (1.0 - s);
  }
  return p.kind == "sine" ? p.offset + p.amplitude * prod : p.amplitude * prod;
}

}  // namespace

ScalarField ScalarProfile::sample(const Domain& d) const {
  return ScalarField::sample(d, [&](double x, double y) { return profile_value(*this, d, x, y); });
}

double ScalarProfile::at(double x) const {
  static const Domain unit = Domain::line(3);
  return profile_value(*this, unit, x, 0.0);
}

json ScalarProfile::to_json() const {
  json j{{"profile", kind}};
  if (kind == "constant") j["value"] = value;
  if (kind == "bump") {
    j["amplitude"] = amplitude;
    j["width"] = width;
    if (center) j["center"] = *center;
  }
  if (kind == "sine") {
    j["amplitude"] = amplitude;
    j["offset"] = offset;
    j["mode"] = mode;
  }
  if (kind == "bubble") j["amplitude"] = amplitude;
  return j;
}

SymTensorField TensorProfile::sample(const Domain& d) const {
  if (kind == "identity") return SymTensorField::identity(d, scale);
  SymTensorField D(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (kind == "constant") {
      D.set(k, value);
    } else {
      const double x = d.coord(k, 0);
      D.set(k, {1.0 + 0.3 * x, d.dim() == 2 ? 0.1 * x : 0.0, 1.2});
    }
  }
  return D;
}

json TensorProfile::to_json() const {
  json j{{"profile", kind}};
  if (kind == "identity") j["scale"] = scale;
  if (kind == "constant") {
    j["xx"] = value.xx;
    j["xy"] = value.xy;
    j["yy"] = value.yy;
  }
  return j;
}

ConductanceAnsatz AnsatzProfile::sample(const Domain& d) const {
  VectorField m(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (m_kind == "constant") {
      m.set(k, m_value);
    } else {
      m.set(k, {0.5 + 0.2 * d.coord(k, 0), d.dim() == 2 ? 0.1 * d.coord(k, 1) : 0.0});
    }
  }
  return ConductanceAnsatz(ScalarField(d, r), m);
}

json AnsatzProfile::to_json() const {
  json m{{"profile", m_kind}};
  if (m_kind == "constant") m["value"] = m_value;
  return json{{"r", r}, {"m", m}};
}

Domain DomainSpec::make() const {
  return dim == 1 ? Domain::line(n[0], lengths[0]) : Domain::rect(n[0], n[1], lengths[0], lengths[1]);
}

Domain DomainSpec::with_nodes(int nodes) const {
  return dim == 1 ? Domain::line(nodes, lengths[0]) : Domain::rect(nodes, nodes, lengths[0], lengths[1]);
}

json DomainSpec::to_json() const {
  json j{{"dim", dim}};
  if (dim == 1) {
    j["n"] = json::array({n[0]});
    j["lengths"] = json::array({lengths[0]});
  } else {
    j["n"] = n;
    j["lengths"] = lengths;
  }
  return j;
}

EntropyGenerator RunConfig::make_entropy() const {
  if (entropy == "boltzmann") return EntropyGenerator::make_boltzmann();
  return EntropyGenerator::make_quadratic(boundary_value.value_or(0.0));
}

json RunConfig::to_json() const {
  json j;
  if (!model.empty()) j["model"] = model;
  j["domain"] = domain.to_json();
  j["entropy"] = entropy;
  j["boundary_value"] = pnp_model() ? 1.0 : boundary();
  j["z"] = z;
  j["phi"] = phi.to_json();
  j["source"] = source.to_json();
  if (conductance_model()) {
    j["ansatz"] = ansatz.to_json();
  } else {
    j["D0"] = D0.to_json();
  }
  j["flow"] = {{"steps", flow.steps},
               {"beta", flow.beta},
               {"alpha", flow.alpha},
               {"gamma", flow.gamma},
               {"boundary", flow.boundary == DBoundary::fixed ? "fixed" : "neumann"},
               {"rhs_tol", flow.rhs_tol},
               {"safety", safety}};
  if (auto_dt) {
    j["flow"]["dt"] = "auto";
  } else {
    j["flow"]["dt"] = flow.dt;
  }
  j["solver"] = {{"tol", solver.tol},
                 {"direct_limit", solver.direct_limit},
                 {"max_iterations", solver.max_iterations},
                 {"averaging", solver.averaging == FaceAveraging::arithmetic ? "arithmetic" : "harmonic"}};
  j["gummel"] = {{"damping", gummel.damping}, {"max_iterations", gummel.max_iterations}, {"tolerance", gummel.tolerance}};
  j["output"] = output;
  j["seed"] = seed;
  j["check"] = {{"levels", check.levels},   {"directions", check.directions}, {"eps", check.eps},
                {"max_gap", check.max_gap}, {"min_order", check.min_order}};
  j["second_variation"] = {{"directions", second_variation.directions},
                           {"eps", second_variation.eps},
                           {"direction_scale", second_variation.direction_scale},
                           {"rel_tol", second_variation.rel_tol},
                           {"expect_convex", second_variation.expect_convex},
                           {"convex_tol", second_variation.convex_tol}};
  j["example_1d"] = {{"m0", example_1d.m0},         {"m1", example_1d.m1.to_json()},
                     {"source", example_1d.source.to_json()}, {"n_quad", example_1d.n_quad},
                     {"pde_n", example_1d.pde_n},   {"tolerance", example_1d.tolerance}};
  j["dissipation"] = {{"dt", dissipation.dt},
                      {"steps", dissipation.steps},
                      {"density", dissipation.density.to_json()},
                      {"min_ratio", dissipation.min_ratio}};
  return j;
}

RunConfig parse_config(const std::string& text, const std::string& name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    // drop the library's "[json.exception.parse_error.101] parse error at line 1, column 2: " prefix
    if (const auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
    throw ConfigError(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON: " + what);
  }
  const LineMap lines = locate_values(text);
  const Node top(root, "", lines, name);
  top.allow({"model", "domain", "entropy", "boundary_value", "z", "phi", "source", "D0", "ansatz", "flow", "solver",
             "gummel", "output", "seed", "check", "second_variation", "example_1d", "dissipation"});

  RunConfig c;
  if (top.has("model")) c.model = top.choice("model", "", model_names());
  if (top.has("domain")) parse_domain(top.child("domain"), c.domain);
  c.entropy = top.choice("entropy", c.entropy, {"boltzmann", "quadratic"});
  if (top.has("boundary_value")) c.boundary_value = top.number("boundary_value", 0.0);
  c.z = top.number("z", c.z);
  if (top.has("phi")) c.phi = parse_profile(top.child("phi"), c.phi);
  if (top.has("source")) c.source = parse_profile(top.child("source"), c.source);
  if (top.has("D0")) c.D0 = parse_tensor(top.child("D0"));
  if (top.has("ansatz")) c.ansatz = parse_ansatz(top.child("ansatz"));
  if (top.has("flow")) parse_flow(top.child("flow"), c);
  if (top.has("solver")) parse_solver(top.child("solver"), c.solver);
  if (top.has("gummel")) parse_gummel(top.child("gummel"), c.gummel);
  c.gummel.linear = c.solver;
  if (top.has("output")) {
    if (!root.at("output").is_string() || root.at("output").get<std::string>().empty()) {
      top.fail("output", "\"output\" must be a non-empty string");
    }
    c.output = root.at("output").get<std::string>();
  }
  if (top.has("seed")) {
    if (!root.at("seed").is_number_unsigned()) top.fail("seed", "\"seed\" must be a nonnegative integer");
    c.seed = root.at("seed").get<std::uint64_t>();
  }
  if (top.has("check")) parse_check(top.child("check"), c.check);
  if (top.has("second_variation")) parse_second(top.child("second_variation"), c.second_variation);
  if (top.has("example_1d")) parse_example(top.child("example_1d"), c.example_1d);
  if (top.has("dissipation")) parse_dissipation(top.child("dissipation"), c.dissipation);

  // cross-field checks
  const double eq = c.entropy == "boltzmann" ? 1.0 : c.boundary_value.value_or(0.0);
  if (c.boundary_value && *c.boundary_value != eq && !c.pnp_model()) {
    top.fail("boundary_value", "\"boundary_value\" must equal the entropy equilibrium (" + std::to_string(eq) +
                                   " for " + c.entropy + ")");
  }
  if (c.pnp_model()) {
    if (top.has("phi")) c.warnings.push_back("\"phi\" is ignored for pnp models (the potential is solved for)");
    if (top.has("entropy") && c.entropy != "boltzmann") {
      c.warnings.push_back("\"entropy\" is ignored for pnp models (Boltzmann entropy, u = 1 on the boundary)");
    }
    if (top.has("boundary_value") && *c.boundary_value != 1.0) {
      c.warnings.push_back("\"boundary_value\" is ignored for pnp models (u = 1 on the boundary)");
    }
  }
  if (c.model == "diffusion" && top.has("phi") && c.phi.kind != "zero") {
    c.warnings.push_back("\"phi\" is ignored for the diffusion model");
  }
  if (c.phi.kind == "constant" && c.phi.value != 0.0) top.fail("phi", "\"phi\" must vanish on the boundary");
  if (c.phi.kind == "bump") top.fail("phi", "\"phi\" must vanish on the boundary (use zero, sine or bubble)");
  if (c.phi.kind == "sine" && (c.phi.offset != 0.0 || c.phi.mode != std::floor(c.phi.mode))) {
    top.fail("phi", "\"phi\" sine profile needs offset 0 and an integer mode to vanish on the boundary");
  }
  if (c.conductance_model() && top.has("D0")) c.warnings.push_back("\"D0\" is ignored for conductance models");
  if (!c.conductance_model() && !c.model.empty() && top.has("ansatz")) {
    c.warnings.push_back("\"ansatz\" is ignored for tensor models");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace netgrad::cli
