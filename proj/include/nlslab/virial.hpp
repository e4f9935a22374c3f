#pragma once
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "evolution.hpp"
#include "functionals.hpp"
#include "grid.hpp"
#include "nonlinearity.hpp"

namespace nlslab {

// Radial weight a(r) = m^2 phi(r/m): phi = rho^2 inside, a C^2 quintic blend on
// [1,2], constant 1.9 outside. Closed forms keep Delta Delta a exact.
namespace detail {
struct PhiDerivs { double p0, p1, p2, p3, p4; };
inline PhiDerivs phi_derivs(double rho) {
  if (rho <= 1.0) return {rho * rho, 2 * rho, 2.0, 0.0, 0.0};
  if (rho >= 2.0) return {1.9, 0.0, 0.0, 0.0, 0.0};
  double s = rho - 2.0;
  double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  return {1.9 - 2.5 * s4 - 1.6 * s5, -10 * s3 - 8 * s4, -30 * s2 - 32 * s3, -60 * s - 96 * s2,
          -60 - 192 * s};
}
}

struct VirialWeight {
  double m = 0;
  GridSpec spec;
  VecD a, a1, a2, bilap_a, chi;  // node samples for inspection

  double a_at(double r) const { return m * m * detail::phi_derivs(r / m).p0; }
  double a1_at(double r) const { return m * detail::phi_derivs(r / m).p1; }
  double a2_at(double r) const { return detail::phi_derivs(r / m).p2; }
  double bilap_at(double r) const {
    auto d = detail::phi_derivs(r / m);
    double a3 = d.p3 / m, a4 = d.p4 / (m * m);
    int n = spec.n;
    return a4 + 2.0 * (n - 1) * a3 / r +
           (n - 1.0) * (n - 3.0) * (d.p2 / (r * r) - m * d.p1 / (r * r * r));
  }
  // quintic smoothstep from 1 at r=m down to 0 at r=2m
  double chi_at(double r) const {
    double t = std::clamp(r / m - 1.0, 0.0, 1.0);
    return 1.0 - (10 * t * t * t - 15 * t * t * t * t + 6 * t * t * t * t * t);
  }
  double chi1_at(double r) const {
    double t = std::clamp(r / m - 1.0, 0.0, 1.0);
    return -(30 * t * t - 60 * t * t * t + 30 * t * t * t * t) / m;
  }
};

inline VirialWeight build_weight(double m, const GridSpec& spec,
                                 std::shared_ptr<const BesselBasis> basis) {
  if (!(m > 0) || 2 * m >= spec.r_max)
    throw std::invalid_argument("build_weight: need 0 < 2m < r_max");
  VirialWeight w;
  w.m = m;
  w.spec = spec;
  int N = spec.num_modes;
  w.a.resize(N); w.a1.resize(N); w.a2.resize(N); w.bilap_a.resize(N); w.chi.resize(N);
  for (int i = 0; i < N; ++i) {
    double r = basis->nodes[i];
    w.a[i] = w.a_at(r);
    w.a1[i] = w.a1_at(r);
    w.a2[i] = w.a2_at(r);
    w.bilap_a[i] = w.bilap_at(r);
    w.chi[i] = w.chi_at(r);
  }
  return w;
}

inline double virial_functional(const RadialField& f, const VirialWeight& w) {
  SpectralField c = to_spectral(f);
  return integrate_radial(c, 0.0, f.basis->spec.r_max, [&](Complex u, Complex du, double r) {
    return 2.0 * w.a1_at(r) * std::imag(std::conj(u) * du);
  });
}

struct VirialRow {
  double t = 0;
  double Ma = 0;
  double rhs_exact = 0;    // int -DDa|u|^2 + 4a''|u_r|^2 - 2a' H'(|u|^2) d_r|u|^2
  double main_K8 = 0;      // 8 K~(chi u)
  double hterm8 = 0;       // 8 int_{r<=m} h(|u|)|u|^{1_2*}
  double Xm = 0;
  double Ym = 0;
  double smallness_ratio = 0;  // Xm / (sqrt(delta) int_{r<=2m} |u|^{1_2*})
  double inequality_margin = 0;
  double fd_dMa = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
};

inline VirialRow virial_rhs(const SpectralField& c, const VirialWeight& w,
                            const NonlinearityParams& p, const DensityTables& tables,
                            double delta, double error_constant = 8.0) {
  const auto& b = *c.basis;
  const double R = b.spec.r_max, p12 = crit_exponent(p.n), m = w.m;
  VirialRow row;
  row.Ma = integrate_radial(c, 0.0, R, [&](Complex u, Complex du, double r) {
    return 2.0 * w.a1_at(r) * std::imag(std::conj(u) * du);
  });
  row.rhs_exact = integrate_radial(c, 0.0, R, [&](Complex u, Complex du, double r) {
    double y = std::norm(u);
    double dy = 2.0 * std::real(std::conj(u) * du);
    return -w.bilap_at(r) * y + 4.0 * w.a2_at(r) * std::norm(du) -
           2.0 * w.a1_at(r) * H_prime(y, p) * dy;
  });
  double kin_chi = integrate_radial(c, 0.0, 2 * m, [&](Complex u, Complex du, double r) {
    return std::norm(w.chi1_at(r) * u + w.chi_at(r) * du);
  });
  double crit_chi = integrate_radial(c, 0.0, 2 * m, [&](Complex u, Complex, double r) {
    return std::pow(w.chi_at(r) * std::abs(u), p12);
  });
  row.main_K8 = 8.0 * (kin_chi - crit_chi);
  row.hterm8 = 8.0 * integrate_radial(c, 0.0, m, [&](Complex u, Complex, double) {
    double amp = std::abs(u);
    return h_of(amp, p) * std::pow(amp, p12);
  });
  row.Xm = integrate_radial(c, 0.0, 2 * m, [&](Complex u, Complex, double) {
    return tables.Ginner(std::norm(u));
  });
  row.Ym = integrate_radial(c, m, R, [&](Complex u, Complex du, double r) {
    double y = std::norm(u);
    return (m / r) * (std::norm(du) + y / (r * r) + std::pow(std::abs(u), p12) * g_of(std::abs(u), p));
  });
  double crit_2m = integrate_radial(c, 0.0, 2 * m, [&](Complex u, Complex, double) {
    return std::pow(std::abs(u), p12);
  });
  row.smallness_ratio = crit_2m > 0 ? row.Xm / (std::sqrt(delta) * crit_2m) : 0.0;
  row.inequality_margin =
      row.rhs_exact - (row.main_K8 - row.hterm8 - error_constant * (row.Xm + row.Ym));
  return row;
}

inline VirialRow virial_rhs(const RadialField& f, const VirialWeight& w,
                            const NonlinearityParams& p, const DensityTables& tables,
                            double delta, double error_constant = 8.0) {
  return virial_rhs(to_spectral(f), w, p, tables, delta, error_constant);
}

struct VirialReport {
  double m = 0;
  double error_constant = 8.0;
  std::vector<VirialRow> rows;
  bool inequality_holds = true;
  double worst_margin = HUGE_VAL;
  double max_residual = 0;
};

// Identity check along a trace: forward differences of M_a against the exact
// instantaneous right-hand side (first-order in the snapshot spacing, so the
// residual halves under spacing refinement).
inline VirialReport virial_identity_residual(const Trace& tr, double m,
                                             const DensityTables& tables, double delta,
                                             double error_constant = 8.0,
                                             double inequality_atol = 1e-9) {
  if (tr.series.size() < 3)
    throw std::invalid_argument("virial_identity_residual: need >= 3 snapshots");
  auto basis = tr.series.fields[0].basis;
  VirialWeight w = build_weight(m, basis->spec, basis);
  VirialReport rep;
  rep.m = m;
  rep.error_constant = error_constant;
  for (int i = 0; i < tr.series.size(); ++i) {
    VirialRow row = virial_rhs(tr.series.fields[i], w, tr.params.nl, tables, delta, error_constant);
    row.t = tr.series.times[i];
    rep.rows.push_back(row);
  }
  for (size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    double dT = rep.rows[i + 1].t - rep.rows[i].t;
    rep.rows[i].fd_dMa = (rep.rows[i + 1].Ma - rep.rows[i].Ma) / dT;
    rep.rows[i].residual = std::abs(rep.rows[i].fd_dMa - rep.rows[i].rhs_exact);
    rep.max_residual = std::max(rep.max_residual, rep.rows[i].residual);
  }
  for (const VirialRow& row : rep.rows) {
    rep.worst_margin = std::min(rep.worst_margin, row.inequality_margin);
    if (row.inequality_margin < -inequality_atol) rep.inequality_holds = false;
  }
  return rep;
}

}
