#include "netgrad_cli/app.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "netgrad_cli/commands.hpp"

namespace netgrad::cli {

namespace fs = std::filesystem;

namespace {

struct Invocation {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string sweep;
  std::optional<double> m0;
  std::optional<int> n_quad;
  std::optional<int> pde_n;
};

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  ::globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

unsigned sweep_threads(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NETGRAD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, jobs));
}

void apply_overrides(RunConfig& c, const Invocation& inv) {
  if (inv.seed) c.seed = *inv.seed;
  if (inv.m0) c.example_1d.m0 = *inv.m0;
  if (inv.n_quad) c.example_1d.n_quad = *inv.n_quad;
  if (inv.pde_n) c.example_1d.pde_n = *inv.pde_n;
}

int run_one(const std::string& sub, const std::string& config_path, const std::optional<fs::path>& out_override,
            const Invocation& inv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = config_path.empty() ? parse_config("{}", "<defaults>") : load_config(config_path);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  apply_overrides(c, inv);
  const fs::path dir = out_override ? *out_override : fs::path(c.output);
  return run_subcommand(sub, c, dir, out, err);
}

int run_sweep(const std::string& sub, const Invocation& inv, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> paths = expand_glob(inv.sweep);
  if (paths.empty()) {
    err << "error: --sweep pattern matched no files: " << inv.sweep << '\n';
    return kExitConfig;
  }
  struct Job {
    std::ostringstream out, err;
    int code = 0;
  };
  std::vector<Job> jobs(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      // each config writes to its own directory named after the file
      std::optional<fs::path> dir;
      const std::string stem = fs::path(paths[i]).stem().string();
      if (!inv.out.empty()) dir = fs::path(inv.out) / stem;
      Invocation local = inv;
      if (!dir) {
        // default: "<config output>/<stem>"
        RunConfig c;
        try {
          c = load_config(paths[i]);
        } catch (const ConfigError&) {
        }
        dir = fs::path(c.output) / stem;
      }
      jobs[i].code = run_one(sub, paths[i], dir, local, jobs[i].out, jobs[i].err);
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = sweep_threads(paths.size());
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = kExitPass;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    out << "[" << paths[i] << "] exit " << jobs[i].code << '\n' << jobs[i].out.str();
    err << jobs[i].err.str();
    code = std::max(code, jobs[i].code);
  }
  return code;
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"netgrad: gradient flows for transport-network conductance tensors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NETGRAD_VERSION);

  Invocation inv;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"run-flow", "Integrate a gradient flow and write its energy trace"},
      {"check-gradient", "Compare the flow right-hand side with finite differences of the energy"},
      {"second-variation", "Second variations along seeded directions, analytic and finite-difference"},
      {"example-1d", "Closed-form second variation of the one-dimensional conductance example"},
      {"pnp-dissipation", "Helmholtz energy dissipation of the parabolic PNP system"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* s = app.add_subcommand(name, help);
    auto* cfg = s->add_option("--config", inv.config, "JSON configuration file");
    s->add_option("--out", inv.out, "Output directory (overrides \"output\")");
    s->add_option("--seed", inv.seed, "Random seed (overrides \"seed\")");
    auto* sweep = s->add_option("--sweep", inv.sweep, "Glob of configs to run concurrently, one directory each");
    cfg->excludes(sweep);
    if (name == "example-1d") {
      s->add_option("--m0", inv.m0, "Constant base conductance m0");
      s->add_option("--n-quad", inv.n_quad, "Quadrature nodes (>= 64)");
      s->add_option("--pde-n", inv.pde_n, "Nodes per half interval of the PDE cross-check (0 skips)");
    } else {
      // one of --config / --sweep is required
      s->callback([s, cfg, sweep] {
        if (cfg->count() == 0 && sweep->count() == 0) throw CLI::RequiredError("--config or --sweep");
        (void)s;
      });
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitPass : kExitConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  if (inv.n_quad && *inv.n_quad < 64) {
    err << "error: --n-quad must be at least 64\n";
    return kExitConfig;
  }
  if (!inv.sweep.empty()) return run_sweep(sub, inv, out, err);
  std::optional<fs::path> dir;
  if (!inv.out.empty()) dir = fs::path(inv.out);
  return run_one(sub, inv.config, dir, inv, out, err);
}

}  // namespace netgrad::cli
