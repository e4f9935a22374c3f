#pragma once
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "evolution.hpp"
#include "functionals.hpp"
#include "ground_state.hpp"

namespace nlslab {

struct GammaSmallness {
  double lhs = 0;
  double margin = 0;            // delta/10 - lhs ("much less than" = one tenth)
  bool overflow = false;        // literal value exceeds double range
  bool complex_regime = false;  // tower log non-positive: literal formula leaves the reals
  double log10_log10_arg = 0;   // size of the tower argument, double-log scale
  std::string regime;           // "Ass1" or "Ass2"
};

// Literal smallness left-hand side with the triple tower C_a^{C_a^{C_a^{1/sqrt(delta)}}},
// evaluated in nested log-space. The low-regularity regime (k < 1.1) carries the
// extra factor Xi = (k_2* - 1_2*)^{-gamma} inside and outside the log.
inline GammaSmallness gamma_smallness(double gamma, double delta, double norm_u0, double k, int n,
                                      const ThresholdConstants& tc) {
  if (gamma < 0 || delta <= 0 || delta >= 1) throw std::invalid_argument("gamma_smallness: bad gamma/delta");
  if (norm_u0 < 0) throw std::invalid_argument("gamma_smallness: bad norm");
  GammaSmallness out;
  out.regime = k < 1.1 ? "Ass1" : "Ass2";
  double xi = 1.0;
  if (out.regime == "Ass1") {
    if (k >= n / 2.0) throw std::invalid_argument("gamma_smallness: k_2* undefined");
    double k2s = 2.0 * n / (n - 2 * k);
    xi = std::pow(k2s - crit_exponent(n), -gamma);
  }

  if (gamma == 0) {  // log^0 = 1 regardless of the tower
    out.lhs = tc.C_a - 1.0;
    out.margin = delta / 10.0 - out.lhs;
    return out;
  }

  const double L = std::log(tc.C_a);
  const double T1 = 1.0 / std::sqrt(delta);
  const double lnT2 = T1 * L;
  double lnlnA;  // ln ln of the full tower argument, the quantity that survives overflow
  double lnA = HUGE_VAL;
  if (lnT2 > 700) {
    lnlnA = lnT2 + std::log(L);  // already astronomically past double range
  } else {
    double lnT3 = std::exp(lnT2) * L;
    if (lnT3 > 700) {
      lnlnA = lnT3 + std::log(L);
    } else {
      lnA = std::exp(lnT3) * L + std::log(xi * norm_u0);
      if (lnA <= 0) {
        out.complex_regime = true;
        out.lhs = std::numeric_limits<double>::quiet_NaN();
        out.margin = -HUGE_VAL;
        return out;
      }
      lnlnA = std::log(lnA);
    }
  }
  out.log10_log10_arg = (lnlnA - std::log(std::log(10.0))) / std::log(10.0);

  double log_pow = gamma * lnlnA;  // ln( ln^gamma A )
  if (log_pow > 700) {
    out.overflow = true;
    out.lhs = HUGE_VAL;
    out.margin = -HUGE_VAL;
  } else {
    out.lhs = tc.C_a * xi * std::exp(log_pow) - 1.0;
    out.margin = delta / 10.0 - out.lhs;
  }
  return out;
}

inline bool constg_check(double M, double delta, double gamma, const ThresholdConstants& tc) {
  if (M < 1) throw std::invalid_argument("constg_check: M must be >= 1");
  double arg = M / delta * std::pow(tc.eps_breve(), -gamma);
  return tc.h_breve(arg, gamma) <= delta / 10.0;
}

// Largest margin delta' such that every y on the variational curve with
// F(y) <= (1 - delta) F(y_W), y < y_W, satisfies both trapping lines.
inline double delta_prime(double delta, const GroundStateConstants& gc) {
  double dmax = 0.5 * gc.grad_W_sq / gc.Etilde_W;
  if (!(delta > 0) || delta >= std::min(1.0, dmax))
    throw std::invalid_argument("delta_prime: delta outside valid range");
  const double p12 = crit_exponent(gc.n), yW = gc.y_W();
  const double target = (1 - delta) * gc.Etilde_W;
  double lo = 0, hi = yW;
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    (variational_curve_F(mid, gc) < target ? lo : hi) = mid;
  }
  double yd = (lo + hi) / 2;
  double kinetic_line = 1 - (2 * target + (2 / p12) * std::pow(yd, p12)) / gc.grad_W_sq;
  double sobolev_line = 1 - gc.sharp_sobolev * gc.sharp_sobolev * std::pow(yd, p12 - 2);
  return std::min(kinetic_line, sobolev_line);
}

struct AdmissibilityReport {
  double energy = 0;
  double critical_energy = 0;
  double energy_threshold = 0;  // (1 - 2 delta) Etilde(W)
  double crit_norm_u0 = 0;      // ||u0||_{1_2*}
  double crit_norm_W = 0;       // ||W||_{1_2*}
  double htilde_k = 0;
  GammaSmallness ass1, ass2;
  bool energy_ok = false;
  bool potential_ok = false;
  bool gamma_ok = false;
  bool size_ok = false;          // ||u0||_{H~k} >= 0.1 (the ">~ 1" reading)
  bool small_data_route = false; // size failed: the small-data theory applies instead
  bool admissible = false;
};

inline AdmissibilityReport check_initial_assumptions(const RadialField& u0, double delta,
                                                     const NonlinearityParams& p,
                                                     const ThresholdConstants& tc,
                                                     const DensityTables& tables,
                                                     const GroundStateConstants& gc) {
  double dmax = 0.5 * gc.grad_W_sq / gc.Etilde_W;
  if (!(delta > 0) || delta >= dmax)
    throw std::invalid_argument("check_initial_assumptions: delta outside valid range");
  AdmissibilityReport rep;
  SpectralField c = to_spectral(u0);
  EnergyRow row = energy_row(c, 0.0, p, tables, tc.k);
  rep.energy = row.energy;
  rep.critical_energy = row.critical_energy;
  rep.energy_threshold = (1 - 2 * delta) * gc.Etilde_W;
  rep.crit_norm_u0 = std::pow(row.crit_norm, 1.0 / crit_exponent(p.n));
  rep.crit_norm_W = gc.y_W();
  rep.htilde_k = row.htilde_k;

  double safe_norm = rep.htilde_k > 0 ? rep.htilde_k : std::numeric_limits<double>::min();
  GammaSmallness sel = gamma_smallness(p.gamma, delta, safe_norm, tc.k, p.n, tc);
  GammaSmallness na;
  na.regime = "n/a";
  na.lhs = na.margin = std::numeric_limits<double>::quiet_NaN();
  if (sel.regime == "Ass1") {
    rep.ass1 = sel;
    rep.ass2 = na;
  } else {
    rep.ass2 = sel;
    rep.ass1 = na;
  }

  rep.energy_ok = rep.energy < rep.energy_threshold;
  rep.potential_ok = rep.crit_norm_u0 < rep.crit_norm_W;
  rep.gamma_ok = !sel.complex_regime && !sel.overflow && sel.margin >= 0;
  rep.size_ok = rep.htilde_k >= 0.1;
  rep.small_data_route = !rep.size_ok;
  rep.admissible = rep.energy_ok && rep.potential_ok && rep.gamma_ok && rep.size_ok;
  return rep;
}

struct TrappingReport {
  std::vector<bool> snapshot_ok;
  double worst_kinetic_margin = HUGE_VAL;   // (1-d') |grad W|^2 - |grad u|^2
  double worst_K_margin = HUGE_VAL;         // K~(u) - d' |grad u|^2
  double worst_energy_margin = HUGE_VAL;    // (1-d) Et(W) - Et(u)
  double first_violation_time = std::numeric_limits<double>::quiet_NaN();
  int violations = 0;
  double delta_prime_used = 0;
};

inline TrappingReport trapping_monitor(const Trace& tr, double delta,
                                       const GroundStateConstants& gc) {
  TrappingReport rep;
  rep.delta_prime_used = delta_prime(delta, gc);
  const double dp = rep.delta_prime_used;
  for (const EnergyRow& row : tr.reports) {
    double m1 = (1 - dp) * gc.grad_W_sq - row.kinetic;
    double m2 = row.functional_K - dp * row.kinetic;
    double m3 = (1 - delta) * gc.Etilde_W - row.critical_energy;
    rep.worst_kinetic_margin = std::min(rep.worst_kinetic_margin, m1);
    rep.worst_K_margin = std::min(rep.worst_K_margin, m2);
    rep.worst_energy_margin = std::min(rep.worst_energy_margin, m3);
    bool ok = m1 >= 0 && m2 >= 0 && m3 > 0;
    rep.snapshot_ok.push_back(ok);
    if (!ok) {
      ++rep.violations;
      if (std::isnan(rep.first_violation_time)) rep.first_violation_time = row.t;
    }
  }
  return rep;
}

}
