#pragma once
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "functionals.hpp"
#include "grid.hpp"
#include "ground_state.hpp"
#include "nonlinearity.hpp"

namespace nlslab {

enum class HaltStatus { Completed, KineticEscape, AmplitudeCap, BoundaryMass };

inline const char* halt_status_name(HaltStatus s) {
  switch (s) {
    case HaltStatus::Completed: return "completed";
    case HaltStatus::KineticEscape: return "kinetic-escape";
    case HaltStatus::AmplitudeCap: return "amplitude-cap";
    case HaltStatus::BoundaryMass: return "boundary-mass";
  }
  return "?";
}

struct EvolutionParams {
  double dt = 0;                 // 0: derived from the grid (see default_dt)
  double t_end = 1.0;
  int snapshot_stride = 0;       // steps per snapshot; 0: ~100 snapshots per run
  double amplitude_cap_factor = 1e3;       // times sup|u0|
  double kinetic_cap_factor = 5.0;         // times ||grad W||^2
  double boundary_shell_fraction = 1e-6;   // halt threshold for mass in r >= 0.9 R
  bool linear_only = false;                // drop the phase substep entirely
  double k_report = 0;           // regularity for trace reports; 0: default_regularity(n)
  NonlinearityParams nl;

  void validate() const {
    nl.validate();
    if (dt < 0 || t_end <= 0) throw std::invalid_argument("EvolutionParams: bad dt or t_end");
    if (amplitude_cap_factor <= 0 || kinetic_cap_factor <= 0 || boundary_shell_fraction <= 0)
      throw std::invalid_argument("EvolutionParams: caps must be positive");
  }
};

// 1e-3 (R/N)^2, capped so the stiffest retained mode advances less than pi/4
// of phase per step.
inline double default_dt(const BesselBasis& b) {
  double h = b.spec.r_max / b.spec.num_modes;
  double lam_max = b.lambda[b.spec.num_modes - 1];
  return std::min(1e-3 * h * h, 0.25 * M_PI / lam_max);
}

struct Trace {
  GridSpec spec;
  EvolutionParams params;
  double delta = 0.05;  // carried through for downstream analyses
  SnapshotSeries series;
  std::vector<EnergyRow> reports;
  HaltStatus status = HaltStatus::Completed;
  double halt_time = 0;
  double trustworthy_horizon = 0;  // first time shell mass fraction exceeds 1e-8; t_end if never
};

inline RadialField nonlinear_phase_step(const RadialField& f, double tau,
                                        const NonlinearityParams& p) {
  if (!std::isfinite(tau)) throw std::invalid_argument("nonlinear_phase_step: non-finite tau");
  const double pw = 4.0 / (p.n - 2.0);
  RadialField out{f.basis, VecC(f.u.size())};
  for (int i = 0; i < f.u.size(); ++i) {
    double amp = std::abs(f.u[i]);
    out.u[i] = f.u[i] * std::polar(1.0, tau * std::pow(amp, pw) * g_of(amp, p));
  }
  return out;
}

inline RadialField strang_step(const RadialField& f, double dt, const NonlinearityParams& p,
                               bool linear_only = false) {
  SpectralField c = free_propagator_spectral(to_spectral(f), dt / 2);
  if (linear_only) return from_spectral(free_propagator_spectral(c, dt / 2));
  RadialField mid = nonlinear_phase_step(from_spectral(c), dt, p);
  return from_spectral(free_propagator_spectral(to_spectral(mid), dt / 2));
}

inline Trace evolve(const RadialField& u0, EvolutionParams params) {
  params.validate();
  const auto& b = *u0.basis;
  const int N = b.spec.num_modes, n = b.spec.n;
  const double pw = 4.0 / (n - 2.0);
  if (params.dt == 0) params.dt = default_dt(b);
  if (params.k_report == 0) params.k_report = default_regularity(n);
  if (params.snapshot_stride == 0)
    params.snapshot_stride = std::max(1, static_cast<int>(std::llround(params.t_end / params.dt / 100)));

  DensityTables tables(params.nl);
  const double grad_W_sq = ground_state_constants(n, 64).grad_W_sq;
  const double kinetic_cap = params.kinetic_cap_factor * grad_W_sq;
  double sup0 = 0;
  for (int i = 0; i < N; ++i) sup0 = std::max(sup0, std::abs(u0.u[i]));
  const double amplitude_cap = sup0 > 0 ? params.amplitude_cap_factor * sup0 : HUGE_VAL;

  Trace tr;
  tr.spec = b.spec;
  tr.params = params;
  SpectralField c = to_spectral(u0);
  if (shell_mass_fraction(c) > params.boundary_shell_fraction && parseval_mass(c) > 0)
    throw std::invalid_argument("evolve: initial data fails the boundary-mass check");

  const long nsteps = std::llround(params.t_end / params.dt);
  VecC halfk(N);
  for (int j = 0; j < N; ++j) halfk[j] = std::polar(1.0, -params.dt / 2 * b.lambda[j]);

  double horizon = params.t_end;
  bool horizon_set = false;
  auto record = [&](double t) {
    tr.series.times.push_back(t);
    tr.series.fields.push_back(c);
    tr.reports.push_back(energy_row(c, t, params.nl, tables, params.k_report));
    if (!horizon_set && parseval_mass(c) > 0 && shell_mass_fraction(c) > 1e-8) {
      horizon = t;
      horizon_set = true;
    }
  };
  record(0.0);

  tr.status = HaltStatus::Completed;
  tr.halt_time = params.t_end;
  for (long s = 0; s < nsteps; ++s) {
    const double t_next = (s + 1) * params.dt;
    for (int j = 0; j < N; ++j) c.c[j] *= halfk[j];
    VecC u = real_matvec(b.synth, c.c);
    double sup = 0;
    if (params.linear_only) {
      for (int i = 0; i < N; ++i) sup = std::max(sup, std::abs(u[i]));
    } else {
      for (int i = 0; i < N; ++i) {
        double amp = std::abs(u[i]);
        sup = std::max(sup, amp);
        u[i] *= std::polar(1.0, params.dt * std::pow(amp, pw) * g_of(amp, params.nl));
      }
    }
    c.c = real_matvec(b.analysis, u);
    for (int j = 0; j < N; ++j) c.c[j] *= halfk[j];

    if (!c.c.allFinite()) throw std::runtime_error("evolve: non-finite state at t=" + std::to_string(t_next));
    if (sup > amplitude_cap) {
      tr.status = HaltStatus::AmplitudeCap;
      tr.halt_time = t_next;
      record(t_next);
      break;
    }
    double kin = 0;
    for (int j = 0; j < N; ++j) kin += b.lambda[j] * std::norm(c.c[j]);
    if (kin > kinetic_cap) {
      tr.status = HaltStatus::KineticEscape;
      tr.halt_time = t_next;
      record(t_next);
      break;
    }
    if ((s + 1) % params.snapshot_stride == 0 || s + 1 == nsteps) {
      record(t_next);
      if (parseval_mass(c) > 0 &&
          shell_mass_fraction(c) > params.boundary_shell_fraction) {
        tr.status = HaltStatus::BoundaryMass;
        tr.halt_time = t_next;
        break;
      }
    }
  }
  tr.trustworthy_horizon = horizon;
  return tr;
}

struct ScatteringReport {
  std::vector<double> dyadic_times;
  std::vector<double> cauchy_residuals;  // consecutive dyadic pairs
  bool scattered = false;
  SpectralField u_plus;
};

// Cauchy test on v(t) = e^{-it Delta} u(t) at dyadic times 1, 2, 4, ...
inline ScatteringReport scattering_detector(const Trace& tr, double k, double tol) {
  if (tr.status != HaltStatus::Completed)
    throw std::invalid_argument("scattering_detector: trace halted early");
  if (tr.params.t_end < 4)
    throw std::invalid_argument("scattering_detector: need t_end >= 4");
  ScatteringReport rep;
  for (double t = 1; t <= tr.params.t_end * (1 + 1e-12); t *= 2) rep.dyadic_times.push_back(t);

  auto profile_at = [&](double t) {
    int best = 0;
    for (int i = 1; i < tr.series.size(); ++i)
      if (std::abs(tr.series.times[i] - t) < std::abs(tr.series.times[best] - t)) best = i;
    // v = e^{-itDelta} u(t): conjugate propagator, multiplier e^{+i lambda t}
    return free_propagator_spectral(tr.series.fields[best], -tr.series.times[best]);
  };
  SpectralField prev = profile_at(rep.dyadic_times[0]);
  for (size_t d = 1; d < rep.dyadic_times.size(); ++d) {
    SpectralField cur = profile_at(rep.dyadic_times[d]);
    SpectralField diff{cur.basis, cur.c - prev.c};
    rep.cauchy_residuals.push_back(htilde_norm_spectral(diff, k));
    prev = cur;
  }
  SpectralField last = profile_at(tr.params.t_end);
  rep.u_plus = last;

  // once residuals converge to the transform roundoff floor they fluctuate
  // instead of decreasing; increases below the floor are not Cauchy violations
  const double noise = 1e-11 * std::max(1.0, htilde_norm_spectral(rep.u_plus, k));
  bool monotone = true;
  for (size_t i = 1; i < rep.cauchy_residuals.size(); ++i)
    if (rep.cauchy_residuals[i] > rep.cauchy_residuals[i - 1] + noise) monotone = false;
  rep.scattered = monotone && !rep.cauchy_residuals.empty() && rep.cauchy_residuals.back() < tol;
  return rep;
}

}
