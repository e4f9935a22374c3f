#pragma once
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "nonlinearity.hpp"
#include "params.hpp"

namespace nlslab {

struct EnergyRow {
  double t = 0;
  double mass = 0;             // ||f||_2^2
  double kinetic = 0;          // ||grad f||_2^2
  double potential = 0;        // int F(|f|)
  double energy = 0;           // E = kinetic/2 - potential
  double critical_energy = 0;  // Etilde = kinetic/2 - crit_norm/1_2*
  double correction_X = 0;     // Etilde - E, by its own quadrature
  double functional_K = 0;     // kinetic - crit_norm
  double crit_norm = 0;        // ||f||_{1_2*}^{1_2*}
  double htilde_k = 0;
};

inline double htilde_norm_spectral(const SpectralField& sf, double k) {
  if (k < 1.0) throw std::invalid_argument("htilde_norm: k must be >= 1");
  double a = 0, b = 0;
  for (int j = 0; j < sf.c.size(); ++j) {
    double w = std::norm(sf.c[j]);
    a += sf.basis->lambda[j] * w;
    b += std::pow(sf.basis->lambda[j], k) * w;
  }
  return std::sqrt(a) + std::sqrt(b);
}

inline double htilde_norm(const RadialField& f, double k) {
  return htilde_norm_spectral(to_spectral(f), k);
}

inline EnergyRow energy_row(const SpectralField& sf, double t, const NonlinearityParams& p,
                            const DensityTables& tables, double k_report) {
  const auto& b = *sf.basis;
  EnergyRow row;
  row.t = t;
  double a1 = 0, ak = 0;
  for (int j = 0; j < sf.c.size(); ++j) {
    double w = std::norm(sf.c[j]);
    row.mass += w;
    a1 += b.lambda[j] * w;
    ak += std::pow(b.lambda[j], k_report) * w;
  }
  row.kinetic = a1;
  row.htilde_k = std::sqrt(a1) + std::sqrt(ak);

  VecC uf = eval_fine(sf);
  const double p12 = crit_exponent(p.n);
  for (int i = 0; i < uf.size(); ++i) {
    double amp = std::abs(uf[i]);
    row.potential += b.wq[i] * tables.F(amp);
    row.correction_X += b.wq[i] * tables.Xinner(amp);
    row.crit_norm += b.wq[i] * std::pow(amp, p12);
  }
  row.energy = 0.5 * row.kinetic - row.potential;
  row.critical_energy = 0.5 * row.kinetic - row.crit_norm / p12;
  row.functional_K = row.kinetic - row.crit_norm;
  return row;
}

inline double energy(const RadialField& f, const NonlinearityParams& p, const DensityTables& tables) {
  return energy_row(to_spectral(f), 0.0, p, tables, default_regularity(p.n)).energy;
}
inline double critical_energy(const RadialField& f, const NonlinearityParams& p,
                              const DensityTables& tables) {
  return energy_row(to_spectral(f), 0.0, p, tables, default_regularity(p.n)).critical_energy;
}
inline double correction_X(const RadialField& f, const NonlinearityParams& p,
                           const DensityTables& tables) {
  return energy_row(to_spectral(f), 0.0, p, tables, default_regularity(p.n)).correction_X;
}
inline double functional_K(const RadialField& f, const NonlinearityParams& p,
                           const DensityTables& tables) {
  return energy_row(to_spectral(f), 0.0, p, tables, default_regularity(p.n)).functional_K;
}

inline double local_mass(const SpectralField& f, double R) {
  const auto& b = *f.basis;
  if (!(R > 0)) throw std::invalid_argument("local_mass: R must be > 0");
  if (R > b.spec.r_max) throw std::invalid_argument("local_mass: R exceeds grid radius");
  double m2 = integrate_radial(f, 0.0, R,
                               [](Complex u, Complex, double) { return std::norm(u); });
  return std::sqrt(std::max(0.0, m2));
}
inline double local_mass(const RadialField& f, double R) { return local_mass(to_spectral(f), R); }

// Snapshot sequence: the time-sampled object all trace functionals consume.
struct SnapshotSeries {
  std::vector<double> times;
  std::vector<SpectralField> fields;
  int size() const { return static_cast<int>(times.size()); }
};

template <class F>
double trapezoid_time(const SnapshotSeries& s, F&& value_at) {
  if (s.size() < 2) throw std::invalid_argument("time quadrature needs >= 2 snapshots");
  double acc = 0, prev = value_at(0);
  for (int i = 1; i < s.size(); ++i) {
    double cur = value_at(i);
    acc += 0.5 * (prev + cur) * (s.times[i] - s.times[i - 1]);
    prev = cur;
  }
  return acc;
}

inline double spacetime_norm(const SnapshotSeries& s, double q) {
  if (q < 1.0) throw std::invalid_argument("spacetime_norm: q must be >= 1");
  double acc = trapezoid_time(s, [&](int i) {
    double v = lp_norm_spectral(s.fields[i], q);
    return std::pow(v, q);
  });
  return std::pow(acc, 1.0 / q);
}

// sup_t ||u||_{H~k} plus the mixed L_t^m L_x^m norms of D^1 u and D^k u with
// m = 2(n+2)/n.
inline double q_functional(const SnapshotSeries& s, double k) {
  if (s.size() < 2) throw std::invalid_argument("q_functional needs >= 2 snapshots");
  const int n = s.fields[0].basis->spec.n;
  const double m = 2.0 * (n + 2) / n;
  double sup = 0;
  for (int i = 0; i < s.size(); ++i)
    sup = std::max(sup, htilde_norm_spectral(s.fields[i], k));
  auto mixed = [&](double order) {
    double acc = trapezoid_time(s, [&](int i) {
      SpectralField d = fractional_derivative_spectral(s.fields[i], order);
      return std::pow(lp_norm_spectral(d, m), m);
    });
    return std::pow(acc, 1.0 / m);
  };
  return sup + mixed(1.0) + mixed(k);
}

// Remark-chain for the above-threshold part of X. Lines, in order:
//   0: X_2 = int over {|f|>=2} of int_2^{|f|} h(s) s^{1_2*-1} ds
//   1: pointwise h(s) <= hbreve(s^{2*eps}) plus inner Jensen
//   2: global Jensen over the P_2 dx measure
//   3: numerator enlarged to the full L^{1_2*+2eps} norm
//   4: Hoelder interpolation between 1_2* and kbar_2*
//   5: final calibrated form C ||f||^{1_2*} hbreve(C ||f||_{H~k}^{1/2} / ||f||^{2c 1_2*})
struct ChainReport {
  std::array<double, 6> line{};
  bool holds = false;
  bool degenerate = false;  // vanishing critical norm with nonzero X_2
};

inline ChainReport jensen_chain_check(const RadialField& f, const NonlinearityParams& p,
                                      const ThresholdConstants& tc, const DensityTables& tables) {
  if (p.gamma > 1.65)
    throw std::invalid_argument("jensen_chain_check: hbreve loses concavity for gamma > 1.65");
  const auto& b = *f.basis;
  SpectralField sf = to_spectral(f);
  VecC uf = eval_fine(sf);

  const double p12 = crit_exponent(p.n), pk = tc.k_bar_2star();
  const double eps = tc.eps_breve(), pm = p12 + 2 * eps, th = tc.theta();
  auto hb = [&](double s) { return tc.h_breve(s, p.gamma); };

  double X2 = 0, P2 = 0, N2 = 0, L1 = 0;
  double n6p = 0, n8p = 0, Spm = 0;
  const double two_p12 = std::pow(2.0, p12), two_pm = std::pow(2.0, pm);
  const double Xin2 = tables.Xinner(2.0);
  for (int i = 0; i < uf.size(); ++i) {
    double amp = std::abs(uf[i]), w = b.wq[i];
    n6p += w * std::pow(amp, p12);
    n8p += w * std::pow(amp, pk);
    Spm += w * std::pow(amp, pm);
    if (amp <= 2.0) continue;
    double P = (std::pow(amp, p12) - two_p12) / p12;
    double N = (std::pow(amp, pm) - two_pm) / pm;
    X2 += w * (tables.Xinner(amp) - Xin2);
    P2 += w * P;
    N2 += w * N;
    L1 += w * hb(N / P) * P;
  }

  ChainReport rep;
  rep.line[0] = X2;
  rep.line[1] = L1;
  if (P2 > 0) {
    rep.line[2] = hb(N2 / P2) * P2;
    rep.line[3] = hb(Spm / (pm * P2)) * P2;
  }
  double n6 = std::pow(n6p, 1.0 / p12), n8 = std::pow(n8p, 1.0 / pk);
  if (n6 == 0) {
    rep.degenerate = X2 != 0;
    rep.holds = !rep.degenerate;
    return rep;
  }
  if (P2 > 0)
    rep.line[4] = hb(std::pow(n6, th * pm) * std::pow(n8, (1 - th) * pm) / (pm * P2)) * P2;
  double ht = htilde_norm_spectral(sf, tc.k);
  rep.line[5] = tc.C_breve * n6p *
                hb(tc.C_breve * std::sqrt(ht) / std::pow(n6, 2 * tc.c_breve * p12));
  double scale = std::max({1.0, std::abs(rep.line[5]), std::abs(rep.line[0])});
  rep.holds = true;
  for (int l = 0; l + 1 < 6; ++l)
    if (rep.line[l] > rep.line[l + 1] + 1e-10 * scale) rep.holds = false;
  return rep;
}

// Annular measure: weight(r) = sum_{j=0..Kbar} (2^{-j} m / r) on r >= 2^{-j} m.
struct HolderMeasureReport {
  double lhs = 0, rhs = 0;
  double norm_p12 = 0, norm_pk = 0;
};

inline HolderMeasureReport measure_holder_check(const RadialField& f, double m, int Kbar,
                                                const NonlinearityParams& p,
                                                const ThresholdConstants& tc) {
  const auto& b = *f.basis;
  if (!(m > 0) || Kbar < 0) throw std::invalid_argument("measure_holder_check: bad measure family");
  if (std::ldexp(m, -Kbar) >= b.spec.r_max)
    throw std::invalid_argument("measure_holder_check: degenerate measure (no support on grid)");
  SpectralField sf = to_spectral(f);
  VecC uf = eval_fine(sf);
  const double p12 = crit_exponent(p.n), pk = tc.k_bar_2star();
  const double pm = p12 + 2 * tc.eps_breve(), th = tc.theta();

  double sm = 0, s12 = 0, sk = 0;
  for (int i = 0; i < uf.size(); ++i) {
    double r = b.rf[i], wgt = 0;
    for (int j = 0; j <= Kbar; ++j) {
      double mj = std::ldexp(m, -j);
      if (r >= mj) wgt += mj / r;
    }
    if (wgt == 0) continue;
    double wa = b.wq[i] * wgt, amp = std::abs(uf[i]);
    sm += wa * std::pow(amp, pm);
    s12 += wa * std::pow(amp, p12);
    sk += wa * std::pow(amp, pk);
  }
  HolderMeasureReport rep;
  rep.norm_p12 = std::pow(s12, 1.0 / p12);
  rep.norm_pk = std::pow(sk, 1.0 / pk);
  rep.lhs = std::pow(sm, 1.0 / pm);
  rep.rhs = std::pow(rep.norm_p12, th) * std::pow(rep.norm_pk, 1 - th);
  return rep;
}

}
