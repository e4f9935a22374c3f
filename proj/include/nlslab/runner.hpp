#pragma once
#include <cstdlib>
#include <filesystem>
#include <future>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "concentration.hpp"
#include "config.hpp"
#include "initial_data.hpp"
#include "threshold.hpp"
#include "trace_io.hpp"
#include "virial.hpp"

namespace nlslab {

inline std::string output_root() {
  const char* env = std::getenv("NLSLAB_OUT");
  return env && *env ? env : ".";
}

inline std::filesystem::path resolve_out_dir(const RunConfig& cfg, const std::string& root = "") {
  std::filesystem::path p(cfg.out_dir);
  if (p.is_absolute()) return p;
  return std::filesystem::path(root.empty() ? output_root() : root) / p;
}

inline std::string serialize_trapping(const TrappingReport& r, const RunConfig& cfg) {
  std::ostringstream out;
  out << file_header("trapping", cfg) << "\n";
  out << "delta_prime = " << fmt_g17(r.delta_prime_used) << "\n";
  out << "worst_kinetic_margin = " << fmt_g17(r.worst_kinetic_margin) << "\n";
  out << "worst_K_margin = " << fmt_g17(r.worst_K_margin) << "\n";
  out << "worst_energy_margin = " << fmt_g17(r.worst_energy_margin) << "\n";
  out << "violations = " << r.violations << "\n";
  out << "first_violation_time = " << fmt_g17(r.first_violation_time) << "\n";
  return out.str();
}

struct ConcentrationArtifacts {
  IntervalPartition partition;
  MassConcentrationReport mass;
  std::vector<std::pair<std::pair<int, int>, IntervalRatioReport>> run_ratios;
  TowerReport tower;
  CountBoundReport counts;
};

inline ConcentrationArtifacts concentration_analysis(const Trace& tr, const RunConfig& cfg) {
  ConcentrationArtifacts art;
  art.partition = partition_intervals(tr, cfg.analysis.eta1);
  double eta2 = std::pow(cfg.analysis.eta1, cfg.analysis.Ctilde1);
  classify_exceptional(tr, art.partition, eta2);
  art.mass = mass_concentration_check(tr, art.partition, cfg.analysis.c_prime, cfg.analysis.C_prime);
  for (const auto& run : unexceptional_runs(art.partition))
    art.run_ratios.emplace_back(
        run, largest_interval_ratio(art.partition, run, cfg.analysis.c_prime, tr.delta));
  art.tower = bourgain_tower_search(art.partition, cfg.tower_eta_effective());
  art.counts = count_bound_report(tr, tr.delta, art.partition);
  return art;
}

inline std::string serialize_concentration(const ConcentrationArtifacts& a, const RunConfig& cfg) {
  std::string s = serialize_concentration_report(a.partition, a.mass, a.tower, a.counts, cfg);
  std::ostringstream out;
  out << "run_first,run_last,largest_ratio,log10_ratio,log10_threshold,holds\n";
  for (const auto& [run, rr] : a.run_ratios)
    out << run.first << "," << run.second << "," << fmt_g17(rr.ratio) << ","
        << fmt_g17(rr.log10_ratio) << "," << fmt_g17(rr.log10_threshold) << ","
        << (rr.holds ? 1 : 0) << "\n";
  return s + out.str();
}

// Analyses enabled by the config, written as report files next to the trace.
inline void analyze_and_write(const Trace& tr, const RunConfig& cfg,
                              const std::filesystem::path& dir, const DensityTables& tables) {
  if (cfg.analysis.virial) {
    for (double m : cfg.analysis.virial_m) {
      std::string name = "virial_m" + fmt_g17(m) + ".csv";
      try {
        VirialReport vr = virial_identity_residual(tr, m, tables, tr.delta);
        detail::write_text((dir / name).string(), serialize_virial_report(vr, cfg));
      } catch (const std::exception& e) {
        detail::write_text((dir / name).string(),
                           file_header("virial-report", cfg) + "\nskipped = " + e.what() + "\n");
      }
    }
  }
  if (cfg.analysis.concentration) {
    try {
      ConcentrationArtifacts art = concentration_analysis(tr, cfg);
      detail::write_text((dir / "concentration.csv").string(), serialize_concentration(art, cfg));
    } catch (const std::exception& e) {
      detail::write_text((dir / "concentration.csv").string(),
                         file_header("concentration-report", cfg) + "\nskipped = " + e.what() + "\n");
    }
  }
  if (cfg.analysis.scattering) {
    try {
      double k = tr.params.k_report > 0 ? tr.params.k_report : default_regularity(tr.spec.n);
      ScatteringReport sr = scattering_detector(tr, k, cfg.analysis.scatter_tol);
      detail::write_text((dir / "scattering.csv").string(), serialize_scattering_report(sr, cfg));
    } catch (const std::exception& e) {
      detail::write_text((dir / "scattering.csv").string(),
                         file_header("scattering-report", cfg) + "\nskipped = " + e.what() + "\n");
    }
  }
}

struct RunResult {
  std::filesystem::path dir;
  HaltStatus status = HaltStatus::Completed;
  AdmissibilityReport admissibility;
  Trace trace;
};

// classify -> evolve -> analyze -> persist
inline RunResult run(const RunConfig& cfg_in, const std::string& root = "") {
  RunConfig cfg = cfg_in;
  cfg.sync_and_validate();
  auto basis = std::make_shared<BesselBasis>(cfg.grid);
  RadialField u0 = make_initial_data(cfg.data, basis);
  DensityTables tables(cfg.evolution.nl);
  GroundStateConstants gc = ground_state_constants(cfg.grid.n, 64);

  RunResult res;
  res.admissibility =
      check_initial_assumptions(u0, cfg.delta, cfg.evolution.nl, cfg.thresholds, tables, gc);
  res.trace = evolve(u0, cfg.evolution);
  res.trace.delta = cfg.delta;
  res.status = res.trace.status;
  cfg.evolution = res.trace.params;  // echo effective dt / stride / k_report

  res.dir = resolve_out_dir(cfg, root);
  std::filesystem::create_directories(res.dir);
  detail::write_text((res.dir / "config.txt").string(), serialize_config(cfg));
  write_admissibility((res.dir / "admissibility.txt").string(), res.admissibility, cfg);
  write_trace((res.dir / "trace.csv").string(), res.trace, cfg);
  write_energy_report((res.dir / "energy.csv").string(), res.trace, cfg);
  detail::write_text((res.dir / "trapping.txt").string(),
                     serialize_trapping(trapping_monitor(res.trace, cfg.delta, gc), cfg));
  analyze_and_write(res.trace, cfg, res.dir, tables);
  return res;
}

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

inline std::vector<RunConfig> expand_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes) {
  if (axes.empty()) return {base};
  std::vector<RunConfig> cfgs{base};
  for (const SweepAxis& ax : axes) {
    if (ax.values.empty()) throw ConfigError("sweep axis '" + ax.key + "' has no values");
    std::vector<RunConfig> next;
    for (const RunConfig& c : cfgs)
      for (const std::string& v : ax.values) {
        RunConfig cc = c;
        if (!detail::apply_key(cc, ax.key, v, 0))
          throw ConfigError("sweep axis key '" + ax.key + "' is unknown");
        next.push_back(std::move(cc));
      }
    cfgs = std::move(next);
  }
  int idx = 0;
  for (RunConfig& c : cfgs) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "run_%04d", idx++);
    c.out_dir = base.out_dir + "/" + buf;
    c.sync_and_validate();
  }
  return cfgs;
}

// Cross-product sweep, concurrent execution, deterministic index table.
inline std::filesystem::path sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                                   const std::string& root = "") {
  std::vector<RunConfig> cfgs = expand_sweep(base, axes);
  std::vector<std::string> status(cfgs.size());
  const size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (size_t lo = 0; lo < cfgs.size(); lo += workers) {
    std::vector<std::future<std::string>> futs;
    for (size_t i = lo; i < std::min(cfgs.size(), lo + workers); ++i)
      futs.push_back(std::async(std::launch::async, [&cfgs, i, &root]() -> std::string {
        try {
          return halt_status_name(run(cfgs[i], root).status);
        } catch (const std::exception& e) {
          return std::string("error: ") + e.what();
        }
      }));
    for (size_t i = 0; i < futs.size(); ++i) status[lo + i] = futs[i].get();
  }

  std::filesystem::path dir = resolve_out_dir(base, root);
  std::filesystem::create_directories(dir);
  std::ostringstream out;
  out << file_header("sweep-index", base) << "\n";
  out << "index";
  for (const SweepAxis& ax : axes) out << "," << ax.key;
  out << ",out_dir,status\n";
  std::vector<size_t> radix(axes.size(), 1);
  for (size_t a = axes.size(); a-- > 1;) radix[a - 1] = radix[a] * axes[a].values.size();
  for (size_t i = 0; i < cfgs.size(); ++i) {
    out << i;
    for (size_t a = 0; a < axes.size(); ++a)
      out << "," << axes[a].values[(i / radix[a]) % axes[a].values.size()];
    out << "," << cfgs[i].out_dir << "," << status[i] << "\n";
  }
  detail::write_text((dir / "index.csv").string(), out.str());
  return dir / "index.csv";
}

}
