#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/ground_state.hpp"
#include "nlslab/initial_data.hpp"
#include "nlslab/virial.hpp"

using namespace nlslab;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("H forms agree and match reference values") {
  // reference values from 50-digit quadrature of both closed forms
  struct Row {
    double y, gamma;
    int n;
    double H;
  };
  const Row rows[] = {
      {3.0, 0.5, 4, -6.16694513179476084835},
      {10.0, 1.0, 3, -1742.9375190518365046},
      {100.0, 0.1, 5, -1025.76433461447456347},
      {1000.0, 0.1, 3, -810863946.53452491559},
  };
  for (const Row& row : rows) {
    HForms h = H_of(row.y, NonlinearityParams{row.gamma, row.n});
    CHECK(tst::rel(h.form1, row.H) < 1e-9);
    CHECK(tst::rel(h.form2, row.H) < 1e-9);
  }

  // the two antiderivative routes must agree across the whole parameter box
  double worst = 0;
  for (int n : {3, 4, 5})
    for (double gamma : {0.0, 0.1, 0.5, 1.0}) {
      NonlinearityParams p{gamma, n};
      for (double y : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 1000.0}) {
        HForms h = H_of(y, p);
        worst = std::max(worst, std::abs(h.form1 - h.form2) / std::max(1.0, std::abs(h.form1)));
      }
    }
  CHECK(worst <= 1e-9);
}

TEST_CASE("H is zero at the origin, strictly decreasing, with consistent derivative") {
  NonlinearityParams p{0.5, 4};
  HForms z = H_of(0.0, p);
  CHECK(z.form1 == 0.0);
  CHECK(z.form2 == 0.0);
  CHECK(H_prime(0.0, p) == 0.0);

  double prev = 0.0;
  for (double y : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    double cur = H_of(y, p).form1;
    CHECK(cur < prev);
    prev = cur;
  }

  for (int n : {3, 5})
    for (double y : {0.5, 3.0, 40.0}) {
      NonlinearityParams q{0.5, n};
      double h = 1e-5 * std::max(1.0, y);
      double fd = (H_of(y + h, q).form1 - H_of(y - h, q).form1) / (2 * h);
      CHECK(tst::rel(H_prime(y, q), fd) < 1e-5);
    }

  CHECK_THROWS_AS(H_of(-1.0, p), std::invalid_argument);
}

TEST_CASE("virial weight geometry") {
  auto b = tst::basis();
  VirialWeight w = build_weight(10.0, b->spec, b);

  // inner region: pure r^2, second derivative 2, unit cutoff
  CHECK(tst::rel(w.a_at(3.0), 9.0) < 1e-14);
  CHECK(tst::rel(w.a1_at(3.0), 6.0) < 1e-14);
  CHECK(w.a2_at(3.0) == 2.0);
  CHECK(w.chi_at(3.0) == 1.0);
  CHECK(w.chi1_at(3.0) == 0.0);

  // outer plateau: constant 1.9 m^2, everything else flat
  CHECK(tst::rel(w.a_at(25.0), 190.0) < 1e-14);
  CHECK(w.a1_at(25.0) == 0.0);
  CHECK(w.a2_at(25.0) == 0.0);
  CHECK(w.bilap_at(25.0) == 0.0);
  CHECK(w.chi_at(25.0) == 0.0);
  CHECK(w.chi1_at(25.0) == 0.0);

  // cutoff midpoint is exactly one half, and the ramp is monotone
  CHECK(w.chi_at(15.0) == 0.5);
  double prev = 1.0;
  for (int i = 1; i <= 40; ++i) {
    double c = w.chi_at(10.0 + 0.25 * i);
    CHECK(c <= prev + 1e-15);
    CHECK(w.chi1_at(10.0 + 0.25 * i) <= 0.0);
    prev = c;
  }
  CHECK(prev == 0.0);

  // blend is C^2: one-sided limits of a, a', a'' agree at both seams
  for (double seam : {10.0, 20.0}) {
    double eps = 1e-8;
    CHECK(std::abs(w.a_at(seam - eps) - w.a_at(seam + eps)) < 1e-6);
    CHECK(std::abs(w.a1_at(seam - eps) - w.a1_at(seam + eps)) < 1e-6);
    CHECK(std::abs(w.a2_at(seam - eps) - w.a2_at(seam + eps)) < 1e-5);
  }

  // global bounds the localized estimates rely on: 0 <= a' <= 2r+eps, a'' <= 2
  for (int i = 0; i < 400; ++i) {
    double r = 40.0 * (i + 0.5) / 400.0;
    CHECK(w.a1_at(r) >= 0.0);
    CHECK(w.a1_at(r) <= 2.0 * r * (1 + 1e-12));
    CHECK(w.a2_at(r) <= 2.0 + 1e-12);
  }

  // the bilaplacian vanishes identically where a = r^2, in every dimension
  for (int n : {3, 4, 5}) {
    GridSpec spec{n, 40.0, 16};
    VirialWeight v;
    v.m = 10.0;
    v.spec = spec;
    for (double r : {0.5, 2.0, 5.0, 7.0, 9.9}) CHECK(std::abs(v.bilap_at(r)) < 1e-15);
  }

  CHECK_THROWS_AS(build_weight(0.0, b->spec, b), std::invalid_argument);
  CHECK_THROWS_AS(build_weight(25.0, b->spec, b), std::invalid_argument);
  CHECK_THROWS_WITH(build_weight(20.0, b->spec, b), ContainsSubstring("r_max"));
}

TEST_CASE("virial functional: zero on real data, reference value on a chirp") {
  auto b = tst::basis();
  VirialWeight w = build_weight(10.0, b->spec, b);

  RadialField real_data = tst::gaussian(b, 1.0, 2.0);
  CHECK(virial_functional(real_data, w) == 0.0);

  // u = e^{-r^2} e^{i r^2}: 2 a' Im(bar u u_r) = 8 r^2 e^{-2 r^2} inside the
  // quadratic region, so Ma equals the gradient square of e^{-r^2}
  RadialField chirp;
  chirp.basis = b;
  chirp.u.resize(b->nodes.size());
  for (int i = 0; i < chirp.u.size(); ++i) {
    double r = b->nodes[i], r2 = r * r;
    chirp.u[i] = std::exp(-r2) * std::complex<double>(std::cos(r2), std::sin(r2));
  }
  CHECK(tst::rel(virial_functional(chirp, w), 11.8122074592918148082) < 1e-8);
}

TEST_CASE("localized functionals of the ground state at m = 10") {
  auto b = tst::basis();
  VirialWeight w = build_weight(10.0, b->spec, b);
  NonlinearityParams p{0.0, 3};
  DensityTables tab(p);

  RadialField W = ground_state_profile(b, 1.0, 0.0);
  VirialRow row = virial_rhs(W, w, p, tab, 0.05);

  // reference values from direct quadrature of the analytic profile
  const double kin_ref = 18.0897182491066356151;
  const double crit_ref = 12.7643383656092469058;
  const double Ktilde_ref = 5.32537988349738870926;

  CHECK(tst::rel(row.main_K8 / 8.0, Ktilde_ref) < 2e-4);

  // recompute the two pieces of K~(chi u) independently on the grid
  SpectralField c = to_spectral(W);
  double kin_chi = integrate_radial(c, 0.0, 20.0, [&](Complex u, Complex du, double r) {
    return std::norm(w.chi1_at(r) * u + w.chi_at(r) * du);
  });
  double crit_chi = integrate_radial(c, 0.0, 20.0, [&](Complex u, Complex du, double r) {
    (void)du;
    return std::pow(w.chi_at(r) * std::abs(u), 6.0);
  });
  CHECK(tst::rel(kin_chi, kin_ref) < 2e-4);
  CHECK(tst::rel(crit_chi, crit_ref) < 2e-4);
  CHECK(tst::rel(kin_chi - crit_chi, row.main_K8 / 8.0) < 1e-10);

  // gamma = 0 kills the h-correction, W is real so Ma vanishes
  CHECK(row.hterm8 == 0.0);
  CHECK(row.Ma == 0.0);
  CHECK(row.Xm >= 0.0);
  CHECK(row.Ym >= 0.0);
}

TEST_CASE("remainder terms carry signs and scale with gamma") {
  auto b = tst::basis();
  VirialWeight w = build_weight(10.0, b->spec, b);
  RadialField u0 = tst::gaussian(b, 1.0, 2.0);

  NonlinearityParams p{0.05, 3};
  DensityTables tab(p);
  VirialRow row = virial_rhs(u0, w, p, tab, 0.05);
  CHECK(row.Xm >= 0.0);
  CHECK(row.Ym > 0.0);
  CHECK(std::isfinite(row.rhs_exact));
  CHECK(std::isnan(row.fd_dMa));
  CHECK(std::isnan(row.residual));

  NonlinearityParams p0{0.0, 3};
  DensityTables tab0(p0);
  VirialRow row0 = virial_rhs(u0, w, p0, tab0, 0.05);
  CHECK(row0.Xm == 0.0);
  CHECK(row.Xm > row0.Xm);
}

TEST_CASE("virial identity residual halves under snapshot refinement") {
  auto b = tst::basis();
  RadialField u0 = tst::gaussian(b, 1.0, 2.0);
  EvolutionParams ep;
  ep.dt = 1e-3;
  ep.t_end = 0.2;
  ep.snapshot_stride = 10;
  ep.nl = NonlinearityParams{0.05, 3};
  Trace tr = evolve(u0, ep);
  REQUIRE(tr.status == HaltStatus::Completed);
  REQUIRE(tr.series.size() == 21);

  DensityTables tab(ep.nl);
  VirialReport fine = virial_identity_residual(tr, 10.0, tab, 0.05);

  Trace half = tr;
  half.series.times.clear();
  half.series.fields.clear();
  half.reports.clear();
  for (int i = 0; i < tr.series.size(); i += 2) {
    half.series.times.push_back(tr.series.times[i]);
    half.series.fields.push_back(tr.series.fields[i]);
  }
  VirialReport coarse = virial_identity_residual(half, 10.0, tab, 0.05);

  REQUIRE(fine.rows.size() == 21);
  CHECK(fine.rows.front().Ma == 0.0);        // real initial data carries no current
  CHECK(std::abs(fine.rows[1].Ma) > 0.0);    // the flow generates one immediately
  CHECK(std::isnan(fine.rows.back().fd_dMa));
  for (const VirialRow& row : fine.rows) {
    CHECK(std::isfinite(row.rhs_exact));
    CHECK(std::isfinite(row.inequality_margin));
  }

  // forward differences converge at first order in the snapshot spacing
  double ratio = coarse.max_residual / fine.max_residual;
  CHECK(ratio > 1.3);
  CHECK(ratio < 2.7);

  CHECK(fine.inequality_holds);
  CHECK(coarse.inequality_holds);
  CHECK(fine.worst_margin > -1e-9);

  Trace stub = tr;
  stub.series.times.resize(2);
  stub.series.fields.resize(2);
  CHECK_THROWS_WITH(virial_identity_residual(stub, 10.0, tab, 0.05),
                    ContainsSubstring("3 snapshots"));
}
