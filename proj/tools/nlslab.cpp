#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlslab/nlslab.hpp>

namespace fs = std::filesystem;
using namespace nlslab;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* sub, CommonOpts& o, bool config_required) {
  CLI::Option* c = sub->add_option("--config", o.config_path, "config file (key = value lines)");
  if (config_required) c->required();
  sub->add_option("--out", o.out_override, "output directory (overrides out_dir)");
  sub->add_option("--seed", o.seed, "seed override for config and initial data")
      ->each([&o](const std::string&) { o.seed_set = true; });
}

RunConfig load_config(const CommonOpts& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : parse_config(o.config_path);
  if (!o.out_override.empty()) cfg.out_dir = o.out_override;
  if (o.seed_set) {
    cfg.seed = o.seed;
    cfg.data.seed = o.seed;
  }
  cfg.sync_and_validate();
  return cfg;
}

int cmd_classify(const CommonOpts& o) {
  RunConfig cfg = load_config(o);
  auto basis = std::make_shared<BesselBasis>(cfg.grid);
  RadialField u0 = make_initial_data(cfg.data, basis);
  DensityTables tables(cfg.evolution.nl);
  GroundStateConstants gc = ground_state_constants(cfg.grid.n, 64);
  AdmissibilityReport adm =
      check_initial_assumptions(u0, cfg.delta, cfg.evolution.nl, cfg.thresholds, tables, gc);
  std::cout << serialize_admissibility(adm, cfg);
  return adm.admissible ? 0 : 2;
}

int cmd_simulate(const CommonOpts& o) {
  RunConfig cfg = load_config(o);
  RunResult res = run(cfg);
  std::cout << "out_dir = " << res.dir.string() << "\n"
            << "status = " << halt_status_name(res.status) << "\n"
            << "halt_time = " << fmt_g17(res.trace.halt_time) << "\n"
            << "trustworthy_horizon = " << fmt_g17(res.trace.trustworthy_horizon) << "\n"
            << "snapshots = " << res.trace.series.size() << "\n"
            << "admissible = " << (res.admissibility.admissible ? "true" : "false") << "\n";
  return 0;
}

int cmd_analyze(const CommonOpts& o, const std::string& trace_arg) {
  std::string trace_path = trace_arg;
  if (trace_path.empty()) {
    if (o.config_path.empty())
      throw ConfigError("analyze needs --trace or a --config naming the run directory");
    trace_path = (resolve_out_dir(load_config(o)) / "trace.csv").string();
  }
  LoadedTrace lt = read_trace(trace_path);
  RunConfig cfg = lt.config;
  if (!o.config_path.empty()) {
    RunConfig ext = load_config(o);
    if (ext.grid.n != cfg.grid.n || ext.grid.num_modes != cfg.grid.num_modes ||
        ext.grid.r_max != cfg.grid.r_max)
      throw ConfigError("analyze: --config grid disagrees with the trace header");
    cfg = ext;
  }
  if (!o.out_override.empty()) cfg.out_dir = o.out_override;

  DensityTables tables(cfg.evolution.nl);
  recompute_reports(lt.trace, tables);
  fs::path dir = o.out_override.empty() && o.config_path.empty()
                     ? fs::path(trace_path).parent_path()
                     : resolve_out_dir(cfg);
  fs::create_directories(dir);
  write_energy_report((dir / "energy.csv").string(), lt.trace, cfg);
  analyze_and_write(lt.trace, cfg, dir, tables);
  std::cout << "analyzed " << lt.trace.series.size() << " snapshots from " << trace_path << "\n"
            << "reports in " << dir.string() << "\n";
  return 0;
}

int cmd_ground_state(const CommonOpts& o) {
  std::vector<int> dims{3, 4, 5};
  if (!o.config_path.empty()) dims = {load_config(o).grid.n};
  std::cout << "n,grad_W_sq,crit_norm_W,sharp_sobolev,Etilde_W,y_W\n";
  for (int n : dims) {
    GroundStateConstants gc = ground_state_constants(n, 64);
    std::cout << n << "," << fmt_g17(gc.grad_W_sq) << "," << fmt_g17(gc.crit_norm_W) << ","
              << fmt_g17(gc.sharp_sobolev) << "," << fmt_g17(gc.Etilde_W) << ","
              << fmt_g17(gc.y_W()) << "\n";
  }
  return 0;
}

int cmd_verify(const CommonOpts& o) {
  std::uint64_t seed = 1;
  if (!o.config_path.empty()) seed = load_config(o).seed;
  if (o.seed_set) seed = o.seed;
  VerifySummary sum = run_verification(seed, std::cout);
  return sum.all_pass() ? 0 : 1;
}

int cmd_sweep(const CommonOpts& o, const std::vector<std::string>& set_exprs) {
  RunConfig base = load_config(o);
  std::vector<SweepAxis> axes;
  for (const std::string& expr : set_exprs) {
    auto eq = expr.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=v1,v2,... got '" + expr + "'");
    SweepAxis ax;
    ax.key = expr.substr(0, eq);
    std::string rest = expr.substr(eq + 1);
    size_t pos = 0;
    while (pos <= rest.size()) {
      size_t comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      ax.values.push_back(rest.substr(pos, comma - pos));
      pos = comma + 1;
    }
    axes.push_back(std::move(ax));
  }
  fs::path index = sweep(base, axes);
  std::cout << "index = " << index.string() << "\n";

  std::ifstream in(index);
  std::string line;
  int failures = 0;
  while (std::getline(in, line))
    if (line.find(",error: ") != std::string::npos) ++failures;
  if (failures > 0) {
    std::cerr << failures << " run(s) failed; see " << index.string() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial spectral laboratory for the focusing log-supercritical NLS"};
  app.set_version_flag("--version", std::string(version_string));
  app.require_subcommand(1);

  CommonOpts o;
  std::string trace_arg;
  std::vector<std::string> set_exprs;

  CLI::App* classify = app.add_subcommand("classify", "admissibility report for the initial data");
  add_common(classify, o, true);
  CLI::App* simulate = app.add_subcommand("simulate", "classify, evolve, analyze, persist");
  add_common(simulate, o, true);
  CLI::App* analyze = app.add_subcommand("analyze", "recompute reports from a stored trace");
  add_common(analyze, o, false);
  analyze->add_option("--trace", trace_arg, "trace file to analyze");
  CLI::App* ground = app.add_subcommand("ground-state", "print ground-state constants");
  add_common(ground, o, false);
  CLI::App* verify = app.add_subcommand("verify", "run the full invariant verification suite");
  add_common(verify, o, false);
  CLI::App* sw = app.add_subcommand("sweep", "cross-product batch of runs with an index table");
  add_common(sw, o, true);
  sw->add_option("--set", set_exprs, "sweep axis as key=v1,v2,... (repeatable)")
      ->type_size(1)
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return cmd_classify(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (analyze->parsed()) return cmd_analyze(o, trace_arg);
    if (ground->parsed()) return cmd_ground_state(o);
    if (verify->parsed()) return cmd_verify(o);
    if (sw->parsed()) return cmd_sweep(o, set_exprs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
