#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "carpetperc/error.hpp"
#include "cli_internal.hpp"

namespace carpetperc::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

struct Subcommand {
  const char* name;
  const char* help;
  Output (*fn)(const Context&);
};

const Subcommand kSubcommands[] = {
    {"lattice", "Vertices and edges of a sponge window", cmd_lattice},
    {"dual", "Face-contracted dual of a sponge window", cmd_dual},
    {"sample", "One keyed bond configuration", cmd_sample},
    {"events", "Per-sample indicators of the structural events", cmd_events},
    {"estimate", "Monte Carlo probability of a window event", cmd_estimate},
    {"sweep", "Estimates over an n-list and a p-grid", cmd_sweep},
    {"pc", "Finite-size critical point from half-crossing bisection", cmd_pc},
    {"theta", "Finite-size proxy for theta(p)", cmd_theta},
    {"tau", "Two-point connectivity in an S^T window", cmd_tau},
    {"russo", "Russo formula check or conditional pivotal count", cmd_russo},
    {"recursion", "Tables of the crossing recursions", cmd_recursion},
    {"branching", "Branching boxes: geometry, audit and tree field samples", cmd_branching},
};

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Starvation:
    case ErrorKind::Capacity:
    case ErrorKind::Saturation:
    case ErrorKind::Subcritical:
    case ErrorKind::Io:
      return kRuntime;
    default:
      return kInvalid;
  }
}

std::optional<std::string> config_path(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

void add_options(CLI::App& app, RunConfig& c, std::string& config_file) {
  app.add_option("--config", config_file, "JSON config or run manifest; flags override it");
  app.add_option("--seed", c.seed, "Master seed");
  app.add_option("--out", c.out, "Output path (a manifest is written beside it)");
  app.add_option("--format", c.format, "Output format");
  app.add_option("--workers", c.workers, "Worker threads");
  app.add_option("--max-level", c.max_level, "Largest lattice level to build");
}

void add_sub_options(CLI::App& sub, const std::string& name, RunConfig& c) {
  auto geo = [&] {
    sub.add_option("--n", c.n, "Level");
    sub.add_option("--cols", c.cols, "Copies across");
    sub.add_option("--rows", c.rows, "Copies up");
    sub.add_option("--generator", c.generator, "carpet3, fullL or an explicit cell list");
  };
  auto sampling = [&] {
    sub.add_option("--p", c.p, "Edge probability");
    sub.add_option("--samples", c.samples, "Replicas");
  };
  if (name == "lattice" || name == "dual") geo();
  if (name == "sample") {
    geo();
    sub.add_option("--p", c.p, "Edge probability");
    sub.add_flag("--dual-overlay", c.dual_overlay, "Draw the closed dual crossing");
  }
  if (name == "events") {
    geo();
    sampling();
    sub.add_option("--event", c.event, "delta, chain, surround, e, c-bl, c-all, d-implication, pivotal, lowest");
    sub.add_option("--x", c.x, "Target point x1,x2 (chain, surround)");
    sub.add_option("--m0", c.m0, "Base level of the chain");
  }
  if (name == "estimate" || name == "russo") {
    geo();
    sampling();
    sub.add_option("--event", c.event, "lr, ud, dual-lr, dual-ud, below-hole, circuit, delta, e, theta");
  }
  if (name == "russo") {
    sub.add_option("--h", c.h, "Half-width of the central difference");
    sub.add_flag("--conditional", c.conditional, "Estimate E[N | A] by rejection instead");
    sub.add_option("--budget", c.budget, "Rejection budget (default 100 * samples)");
  }
  if (name == "sweep") {
    sub.add_option("--event", c.event, "Window event");
    sub.add_option("--p-grid", c.p_grid, "start:stop:step or a comma list");
    sub.add_option("--n-list", c.n_list, "Comma list of levels");
    sub.add_option("--cols", c.cols, "Copies across");
    sub.add_option("--rows", c.rows, "Copies up");
    sub.add_option("--generator", c.generator, "Generator set");
    sub.add_option("--samples", c.samples, "Replicas per grid point");
    sub.add_flag("--coupled,!--uncoupled", c.coupled, "Reuse the uniforms across the p-grid");
  }
  if (name == "pc") {
    geo();
    sub.add_option("--samples", c.samples, "Replicas");
    sub.add_option("--tol", c.tol, "Bracket width");
    sub.add_flag("--dual", c.dual, "Use the closed dual crossing and report 1 - q*");
  }
  if (name == "theta") {
    sub.add_option("--n", c.n, "Level");
    sub.add_option("--generator", c.generator, "Generator set");
    sampling();
  }
  if (name == "tau") {
    sub.add_option("--generator", c.generator, "Generator set");
    sampling();
    sub.add_option("--x", c.x, "First point x1,x2");
    sub.add_option("--y", c.y, "Second point x1,x2");
  }
  if (name == "recursion") {
    sub.add_option("--table", c.table, "f, g, phi, psi, xeps, peps, gw");
    sub.add_option("--k", c.k, "Index of f_k or g_k");
    sub.add_option("--grid", c.grid, "start:stop:step or a comma list");
  }
  if (name == "branching") {
    sub.add_option("--N", c.big_n, "Scale N");
    sub.add_option("--m", c.m, "Depth cut: the tree has depth N - m");
    sub.add_option("--generator", c.generator, "Generator set");
    sub.add_flag("--audit", c.audit, "Include the geometry audit");
    sub.add_flag("--sample", c.sample, "Emit the tree field per sample as CSV");
    sampling();
  }
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error(ErrorKind::Io, "cannot write " + path);
  o << body;
  if (!o) throw Error(ErrorKind::Io, "write failed for " + path);
}

void write_manifest(const RunConfig& c, const std::string& body) {
  nlohmann::json m;
  m["tool"] = "carpet_perc";
  m["version"] = kVersion;
  m["config"] = nlohmann::json::parse(config_to_json(c));
  m["artifacts"] = nlohmann::json::array(
      {{{"path", c.out}, {"bytes", body.size()}, {"fnv1a64", hex64(fnv1a64(body))}}});
  write_file(c.out + ".manifest.json", m.dump(2) + "\n");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const auto path = config_path(argc, argv)) {
    try {
      cfg = load_config(*path);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kInvalid;
    }
  }
  std::string config_file;
  CLI::App app{"Bond percolation on generalized Sierpinski carpets", "carpet_perc"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", kVersion);
  add_options(app, cfg, config_file);
  app.require_subcommand(0, 1);
  for (const auto& s : kSubcommands) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->fallthrough();
    add_sub_options(*sub, s.name, cfg);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInvalid;
  }
  for (const auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  if (cfg.subcommand.empty()) {
    err << "error: a subcommand is required\n" << app.help();
    return kInvalid;
  }

  const Subcommand* target = nullptr;
  for (const auto& s : kSubcommands)
    if (cfg.subcommand == s.name) target = &s;
  try {
    if (!target) throw Error(ErrorKind::Argument, "unknown subcommand '" + cfg.subcommand + "'");
    if (cfg.format.empty()) cfg.format = formats_of(cfg.subcommand).front();
    validate(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }

  try {
    Limits limits = Limits::from_env();
    limits.max_level = cfg.max_level;
    const Context ctx{cfg, limits, GeneratorSet::parse(cfg.generator)};
    const Output o = target->fn(ctx);
    if (cfg.out.empty()) {
      out << o.body;
      if (!o.summary.empty()) err << o.summary;
    } else {
      write_file(cfg.out, o.body);
      write_manifest(cfg, o.body);
      if (!o.summary.empty()) out << o.summary;
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kRuntime;
  }
}

}  // namespace carpetperc::cli
