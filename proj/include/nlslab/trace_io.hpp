#pragma once
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "concentration.hpp"
#include "config.hpp"
#include "evolution.hpp"
#include "threshold.hpp"
#include "version.hpp"
#include "virial.hpp"

namespace nlslab {

// Every artifact begins with one line: "# <kind> | <version> | config: k = v;..."
inline std::string file_header(const std::string& kind, const RunConfig& c) {
  return "# " + kind + " | " + version_string + " | config: " + config_summary(c);
}

namespace detail {
inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
}
inline std::string fmt_field(double v) { return fmt_g17(v); }
}

inline std::string serialize_trace(const Trace& tr, const RunConfig& cfg) {
  std::ostringstream out;
  out << file_header("trace", cfg) << " | status=" << halt_status_name(tr.status)
      << " | halt_time=" << fmt_g17(tr.halt_time)
      << " | horizon=" << fmt_g17(tr.trustworthy_horizon)
      << " | delta=" << fmt_g17(tr.delta) << " | snapshots=" << tr.series.size() << "\n";
  for (int i = 0; i < tr.series.size(); ++i) {
    out << fmt_g17(tr.series.times[i]);
    const VecC& c = tr.series.fields[i].c;
    for (int j = 0; j < c.size(); ++j)
      out << "," << fmt_g17(c[j].real()) << "," << fmt_g17(c[j].imag());
    out << "\n";
  }
  return out.str();
}

inline void write_trace(const std::string& path, const Trace& tr, const RunConfig& cfg) {
  detail::write_text(path, serialize_trace(tr, cfg));
}

struct LoadedTrace {
  Trace trace;
  RunConfig config;
  std::shared_ptr<const BesselBasis> basis;
};

inline LoadedTrace parse_trace_text(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header) || header.rfind("# trace | ", 0) != 0)
    throw std::runtime_error("trace parse: missing trace header");

  LoadedTrace lt;
  std::vector<std::string> parts;
  {
    std::stringstream ss(header);
    std::string piece;
    while (std::getline(ss, piece, '|')) parts.push_back(detail::trim(piece));
  }
  int snapshots = -1;
  for (const std::string& p : parts) {
    if (p.rfind("config: ", 0) == 0) {
      std::string cfgline = p.substr(8);
      for (char& ch : cfgline)
        if (ch == ';') ch = '\n';
      lt.config = parse_config_text(cfgline);
    } else if (p.rfind("status=", 0) == 0) {
      std::string s = p.substr(7);
      bool found = false;
      for (HaltStatus h : {HaltStatus::Completed, HaltStatus::KineticEscape,
                           HaltStatus::AmplitudeCap, HaltStatus::BoundaryMass})
        if (s == halt_status_name(h)) {
          lt.trace.status = h;
          found = true;
        }
      if (!found) throw std::runtime_error("trace parse: unknown status " + s);
    } else if (p.rfind("halt_time=", 0) == 0) {
      lt.trace.halt_time = std::stod(p.substr(10));
    } else if (p.rfind("horizon=", 0) == 0) {
      lt.trace.trustworthy_horizon = std::stod(p.substr(8));
    } else if (p.rfind("delta=", 0) == 0) {
      lt.trace.delta = std::stod(p.substr(6));
    } else if (p.rfind("snapshots=", 0) == 0) {
      snapshots = std::stoi(p.substr(10));
    }
  }
  lt.trace.spec = lt.config.grid;
  lt.trace.params = lt.config.evolution;
  lt.basis = std::make_shared<BesselBasis>(lt.config.grid);

  std::string line;
  const int N = lt.config.grid.num_modes;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != 1 + 2 * N)
      throw std::runtime_error("trace parse: snapshot column count mismatch");
    SpectralField f{lt.basis, VecC(N)};
    for (int j = 0; j < N; ++j) f.c[j] = Complex(vals[1 + 2 * j], vals[2 + 2 * j]);
    lt.trace.series.times.push_back(vals[0]);
    lt.trace.series.fields.push_back(std::move(f));
  }
  if (snapshots >= 0 && snapshots != lt.trace.series.size())
    throw std::runtime_error("trace parse: snapshot count mismatch");
  return lt;
}

inline LoadedTrace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("trace file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trace_text(buf.str());
}

// The trace file carries only fields; diagnostics are recomputed on demand.
inline void recompute_reports(Trace& tr, const DensityTables& tables) {
  tr.reports.clear();
  double k = tr.params.k_report > 0 ? tr.params.k_report : default_regularity(tr.spec.n);
  for (int i = 0; i < tr.series.size(); ++i)
    tr.reports.push_back(
        energy_row(tr.series.fields[i], tr.series.times[i], tr.params.nl, tables, k));
}

inline std::string serialize_energy_report(const Trace& tr, const RunConfig& cfg) {
  std::ostringstream out;
  out << file_header("energy-report", cfg) << "\n";
  out << "t,mass,kinetic,potential,energy,critical_energy,correction_X,functional_K,"
         "crit_norm,htilde_k\n";
  for (const EnergyRow& r : tr.reports) {
    out << fmt_g17(r.t) << "," << fmt_g17(r.mass) << "," << fmt_g17(r.kinetic) << ","
        << fmt_g17(r.potential) << "," << fmt_g17(r.energy) << "," << fmt_g17(r.critical_energy)
        << "," << fmt_g17(r.correction_X) << "," << fmt_g17(r.functional_K) << ","
        << fmt_g17(r.crit_norm) << "," << fmt_g17(r.htilde_k) << "\n";
  }
  return out.str();
}

inline void write_energy_report(const std::string& path, const Trace& tr, const RunConfig& cfg) {
  detail::write_text(path, serialize_energy_report(tr, cfg));
}

inline std::string serialize_admissibility(const AdmissibilityReport& r, const RunConfig& cfg) {
  std::ostringstream out;
  out << file_header("admissibility", cfg) << "\n";
  auto put = [&out](const char* k, const std::string& v) { out << k << " = " << v << "\n"; };
  put("energy", fmt_g17(r.energy));
  put("critical_energy", fmt_g17(r.critical_energy));
  put("energy_threshold", fmt_g17(r.energy_threshold));
  put("crit_norm_u0", fmt_g17(r.crit_norm_u0));
  put("crit_norm_W", fmt_g17(r.crit_norm_W));
  put("htilde_k", fmt_g17(r.htilde_k));
  put("gamma_lhs_regime1", fmt_g17(r.ass1.lhs));
  put("gamma_margin_regime1", fmt_g17(r.ass1.margin));
  put("gamma_regime1", r.ass1.regime.empty() ? "n/a" : r.ass1.regime);
  put("gamma_lhs_regime2", fmt_g17(r.ass2.lhs));
  put("gamma_margin_regime2", fmt_g17(r.ass2.margin));
  put("gamma_regime2", r.ass2.regime.empty() ? "n/a" : r.ass2.regime);
  put("energy_ok", r.energy_ok ? "true" : "false");
  put("potential_ok", r.potential_ok ? "true" : "false");
  put("gamma_ok", r.gamma_ok ? "true" : "false");
  put("size_ok", r.size_ok ? "true" : "false");
  put("small_data_route", r.small_data_route ? "true" : "false");
  put("admissible", r.admissible ? "true" : "false");
  return out.str();
}

inline void write_admissibility(const std::string& path, const AdmissibilityReport& r,
                                const RunConfig& cfg) {
  detail::write_text(path, serialize_admissibility(r, cfg));
}

inline std::string serialize_virial_report(const VirialReport& vr, const RunConfig& cfg) {
  std::ostringstream out;
  out << file_header("virial-report", cfg) << "\n";
  out << "m = " << fmt_g17(vr.m) << "\n";
  out << "error_constant = " << fmt_g17(vr.error_constant) << "\n";
  out << "inequality_holds = " << (vr.inequality_holds ? "true" : "false") << "\n";
  out << "worst_margin = " << fmt_g17(vr.worst_margin) << "\n";
  out << "max_residual = " << fmt_g17(vr.max_residual) << "\n";
  out << "t,Ma,rhs_exact,fd_dMa,residual,main_K8,hterm8,Xm,Ym,smallness_ratio,"
         "inequality_margin\n";
  for (const VirialRow& r : vr.rows) {
    out << fmt_g17(r.t) << "," << fmt_g17(r.Ma) << "," << fmt_g17(r.rhs_exact) << ","
        << fmt_g17(r.fd_dMa) << "," << fmt_g17(r.residual) << "," << fmt_g17(r.main_K8) << ","
        << fmt_g17(r.hterm8) << "," << fmt_g17(r.Xm) << "," << fmt_g17(r.Ym) << ","
        << fmt_g17(r.smallness_ratio) << "," << fmt_g17(r.inequality_margin) << "\n";
  }
  return out.str();
}

inline void write_virial_report(const std::string& path, const VirialReport& vr,
                                const RunConfig& cfg) {
  detail::write_text(path, serialize_virial_report(vr, cfg));
}

inline std::string serialize_concentration_report(const IntervalPartition& part,
                                                  const MassConcentrationReport& mc,
                                                  const TowerReport& tower,
                                                  const CountBoundReport& cb,
                                                  const RunConfig& cfg) {
  std::ostringstream out;
  out << file_header("concentration-report", cfg) << "\n";
  out << "eta1 = " << fmt_g17(part.eta1) << "\n";
  out << "eta2 = " << fmt_g17(part.eta2) << "\n";
  out << "q = " << fmt_g17(part.q) << "\n";
  out << "total_mass = " << fmt_g17(part.total_mass) << "\n";
  out << "single_flagged = " << (part.single_flagged ? "true" : "false") << "\n";
  out << "L = " << cb.L << "\n";
  out << "exceptional_count = " << cb.exceptional_count << "\n";
  out << "exceptional_cap = " << fmt_g17(cb.exceptional_cap) << "\n";
  out << "run_count = " << cb.run_count << "\n";
  out << "log10_log10_L_bound = " << fmt_g17(cb.log10_log10_L_bound) << "\n";
  out << "log10_log10_C0_bound = " << fmt_g17(cb.log10_log10_C0_bound) << "\n";
  out << "tower_anchor = " << fmt_g17(tower.anchor) << "\n";
  out << "tower_K = " << tower.K << "\n";
  out << "tower_lower_bound = " << fmt_g17(tower.lower_bound) << "\n";
  out << "tower_meets_bound = " << (tower.meets_bound ? "true" : "false") << "\n";
  out << "tower_size_ok = " << (tower.size_ok ? "true" : "false") << "\n";
  out << "tower_dist_ok = " << (tower.dist_ok ? "true" : "false") << "\n";
  out << "concentration_worst_ratio = " << fmt_g17(mc.worst_ratio) << "\n";
  out << "concentration_max_lipschitz = " << fmt_g17(mc.max_lipschitz_ratio) << "\n";
  out << "concentration_checked = " << mc.checked << "\n";
  out << "concentration_unverifiable = " << mc.unverifiable << "\n";
  out << "t_lo,t_hi,mass,exceptional,free_mass_sum,min_conc_ratio,conc_radius,unverifiable\n";
  for (const IntervalRecord& r : part.intervals) {
    out << fmt_g17(r.t_lo) << "," << fmt_g17(r.t_hi) << "," << fmt_g17(r.mass) << ","
        << (r.exceptional ? 1 : 0) << "," << fmt_g17(r.free_mass_sum) << ","
        << fmt_g17(r.min_conc_ratio) << "," << fmt_g17(r.conc_radius) << ","
        << (r.unverifiable ? 1 : 0) << "\n";
  }
  return out.str();
}

inline std::string serialize_scattering_report(const ScatteringReport& sr, const RunConfig& cfg) {
  std::ostringstream out;
  out << file_header("scattering-report", cfg) << "\n";
  out << "scattered = " << (sr.scattered ? "true" : "false") << "\n";
  out << "t,cauchy_residual\n";
  for (size_t i = 0; i < sr.cauchy_residuals.size(); ++i)
    out << fmt_g17(sr.dyadic_times[i + 1]) << "," << fmt_g17(sr.cauchy_residuals[i]) << "\n";
  return out.str();
}

}
