#include "helpers.hpp"

#include <cmath>

using namespace nlslab;

TEST_CASE("energy row of exp(-r^2/4) against 40-digit references, gamma = 0.05") {
  auto b = tst::basis();
  NonlinearityParams nl{0.05, 3};
  DensityTables tab(nl);
  EnergyRow row = energy_row(to_spectral(tst::gaussian(b, 1.0, 2.0)), 0.0, nl, tab, 2.0);

  CHECK(tst::rel(row.mass, 15.7496099457224197443) < 1e-9);
  CHECK(tst::rel(row.kinetic, 11.8122074592918148082) < 1e-9);
  CHECK(tst::rel(row.crit_norm, 3.03101384726481542179) < 1e-9);
  CHECK(tst::rel(row.potential, 0.502630883214090019133) < 1e-8);
  CHECK(tst::rel(row.energy, 5.40347284643181738498) < 1e-9);
  CHECK(tst::rel(row.critical_energy, 5.40093475510177150048) < 1e-9);
  CHECK(tst::rel(row.htilde_k, 7.27944816773312570919) < 1e-9);
  CHECK(std::abs(row.correction_X - -0.00253809133004588449896) < 1e-8);

  // X has its own quadrature; it must still reproduce Etilde - E
  CHECK(std::abs(row.correction_X - (row.critical_energy - row.energy)) < 1e-8);
  CHECK(std::abs(row.functional_K - (row.kinetic - row.crit_norm)) < 1e-13 * row.kinetic);
  CHECK(std::abs(row.energy - (0.5 * row.kinetic - row.potential)) < 1e-13 * row.kinetic);
}

TEST_CASE("density tables reproduce reference antiderivatives") {
  struct Row { double a, F, X; };
  const Row rows_005[] = {
      {0.1, 1.63684264827761497689e-7, -2.98240183890516897805e-9},
      {0.5, 0.00257237766707379248828, -3.17889995928741783847e-5},
      {1.0, 0.166719394168861427173, 5.2727502194760506833e-5},
      {2.0, 10.9154924736861136599, 0.248825807019446993195},
      {10.0, 179252.342401138360581, 12585.6757344716939147},
      {64.0, 12706435056.7512967948, 1253188934.08463012815},
      {100.0, 185886336892.109048752, 19219670225.4423820852},
  };
  const Row rows_05[] = {
      {0.1, 1.39133166331253042614e-7, -2.75335003354136240527e-8},
      {0.5, 0.00230339869853856648175, -0.000300767968128100184919},
      {1.0, 0.167300586011769437386, 0.000633919345102770719228},
      {2.0, 13.4532800286102483395, 2.78661336194358167286},
      {10.0, 345399.078791702806786, 178732.41212503614012},
      {64.0, 32357254492.8931948428, 20904008370.2265281762},
      {100.0, 496489047159.572608432, 329822380492.905941765},
  };
  auto run = [](double gamma, const Row* rows, int count) {
    DensityTables tab(NonlinearityParams{gamma, 3});
    for (int i = 0; i < count; ++i) {
      const Row& r = rows[i];
      CAPTURE(gamma, r.a);
      bool interpolated = r.a >= 0.25 && r.a <= 64.0;
      double ftol = interpolated ? 1e-9 : 1e-11;
      CHECK(tst::rel(tab.F(r.a), r.F) < ftol);
      double xtol = interpolated ? 1e-9 * std::max(1.0, std::abs(r.X)) : 1e-11 * std::abs(r.X);
      CHECK(std::abs(tab.Xinner(r.a) - r.X) < std::max(xtol, 1e-13));
      // F - Xin = int s^5 ds = a^6/6 pointwise
      CHECK(tst::rel(tab.F(r.a) - tab.Xinner(r.a), std::pow(r.a, 6.0) / 6.0) < 1e-9);
    }
  };
  run(0.05, rows_005, 7);
  run(0.5, rows_05, 7);

  SECTION("X changes sign near amplitude 0.85 where log(2+s^2) crosses 1") {
    DensityTables tab(NonlinearityParams{0.05, 3});
    CHECK(tab.Xinner(0.5) < 0.0);
    CHECK(tab.Xinner(2.0) > 0.0);
  }

  SECTION("virial antiderivative Gin, gamma = 0.05") {
    DensityTables tab(NonlinearityParams{0.05, 3});
    CHECK(tst::rel(tab.Ginner(0.5), 0.000371128578953073428246) < 1e-9);
    CHECK(tst::rel(tab.Ginner(1.0), 0.00439709996066783066673) < 1e-9);
    CHECK(tst::rel(tab.Ginner(4.0), 0.400755032270886617202) < 1e-9);
    CHECK(tst::rel(tab.Ginner(30.0), 138.057850657575271159) < 1e-9);
  }

  SECTION("gamma = 0 collapses to the pure power") {
    DensityTables tab(NonlinearityParams{0.0, 3});
    for (double a : {0.1, 0.7, 3.0, 80.0}) {
      // inside [0.25, 64] the lookup interpolates, outside it integrates directly
      double tol = (a >= 0.25 && a <= 64.0) ? 1e-9 : 1e-12;
      CHECK(tst::rel(tab.F(a), std::pow(a, 6.0) / 6.0) < tol);
      CHECK(std::abs(tab.Xinner(a)) < 1e-14 * std::pow(a, 6.0));
      CHECK(tab.Ginner(a) == 0.0);
    }
  }

  SECTION("seam continuity at the table edge and the domain guard") {
    DensityTables tab(NonlinearityParams{0.05, 3});
    CHECK(std::abs(tab.F(64.0 - 1e-7) - tab.F(64.0 + 1e-7)) < 1e-7 * tab.F(64.0));
    CHECK_THROWS_AS(tab.F(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(tab.Xinner(-2.0), std::invalid_argument);
  }
}

TEST_CASE("local mass: clipped quadrature against a reference and basic monotony") {
  auto b5 = tst::basis(5, 128);
  RadialField w = ground_state_profile(b5, 1.0, 0.0);
  // int_{|x|<1} W^2 in n=5, reference 2.14085655993573503907^2; the profile
  // does not vanish at the wall, and the interpolant's ringing costs ~1.5e-5
  CHECK(tst::rel(local_mass(w, 1.0), 2.14085655993573503907) < 5e-5);

  auto b = tst::basis();
  SpectralField g = to_spectral(tst::gaussian(b, 1.0, 2.0));
  CHECK(tst::rel(local_mass(g, 40.0), std::sqrt(parseval_mass(g))) < 1e-10);
  double prev = 0;
  for (double R : {1.0, 2.0, 5.0, 10.0, 40.0}) {
    double m = local_mass(g, R);
    REQUIRE(m >= prev);
    prev = m;
  }
  CHECK_THROWS_AS(local_mass(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(local_mass(g, 41.0), std::invalid_argument);
}

TEST_CASE("htilde norm: k = 1 degenerates to twice the H^1 seminorm") {
  auto b = tst::basis();
  SpectralField sf = to_spectral(tst::ring(b, 0.7, 5.0, 1.5));
  double a1 = 0;
  for (int j = 0; j < sf.c.size(); ++j) a1 += b->lambda[j] * std::norm(sf.c[j]);
  CHECK(tst::rel(htilde_norm_spectral(sf, 1.0), 2.0 * std::sqrt(a1)) < 1e-14);
  CHECK_THROWS_AS(htilde_norm_spectral(sf, 0.5), std::invalid_argument);
}

TEST_CASE("time quadrature: two-snapshot series against closed forms") {
  auto b = tst::basis();
  SpectralField sf = to_spectral(tst::gaussian(b, 0.8, 2.0));
  SnapshotSeries s;
  s.times = {0.0, 0.3};
  s.fields = {sf, sf};

  double q = 10.0 / 3.0;
  double direct = std::pow(std::pow(lp_norm_spectral(sf, q), q) * 0.3, 1.0 / q);
  CHECK(tst::rel(spacetime_norm(s, q), direct) < 1e-12);

  double m = 2.0 * 5.0 / 3.0;
  auto mixed = [&](double o) {
    SpectralField d = fractional_derivative_spectral(sf, o);
    return std::pow(std::pow(lp_norm_spectral(d, m), m) * 0.3, 1.0 / m);
  };
  double want = htilde_norm_spectral(sf, 2.0) + mixed(1.0) + mixed(2.0);
  CHECK(tst::rel(q_functional(s, 2.0), want) < 1e-12);

  SnapshotSeries one;
  one.times = {0.0};
  one.fields = {sf};
  CHECK_THROWS_AS(spacetime_norm(one, q), std::invalid_argument);
  CHECK_THROWS_AS(q_functional(one, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(spacetime_norm(s, 0.7), std::invalid_argument);
}

TEST_CASE("above-threshold chain on 5 exp(-r^2): frozen lines, order, final form") {
  auto b = tst::basis();
  NonlinearityParams nl{0.5, 3};
  DensityTables tab(nl);
  ThresholdConstants tc;
  ChainReport rep = jensen_chain_check(tst::gaussian(b, 5.0, 1.0), nl, tc, tab);

  const double want[6] = {578.737826899869449674, 13488.9128865900624835, 13489.5151681513248652,
                          13598.8733113075200866, 13613.4771326783676725, 3230566.16997580097401};
  for (int l = 0; l < 5; ++l) {
    CAPTURE(l);
    CHECK(tst::rel(rep.line[l], want[l]) < 1e-3);
  }
  CHECK(tst::rel(rep.line[5], want[5]) < 1e-8);
  CHECK(rep.holds);
  CHECK_FALSE(rep.degenerate);
  for (int l = 0; l + 1 < 6; ++l) REQUIRE(rep.line[l] <= rep.line[l + 1] * (1 + 1e-12));
}

TEST_CASE("chain edge cases: zero field, all-small field, concavity guard") {
  auto b = tst::basis();
  NonlinearityParams nl{0.5, 3};
  DensityTables tab(nl);
  ThresholdConstants tc;

  RadialField zero{b, VecC::Zero(b->spec.num_modes)};
  ChainReport z = jensen_chain_check(zero, nl, tc, tab);
  CHECK(z.holds);
  CHECK_FALSE(z.degenerate);
  CHECK(z.line[0] == 0.0);

  // amplitudes below 2: every above-threshold line vanishes but line 5 stays positive
  ChainReport sm = jensen_chain_check(tst::gaussian(b, 1.0, 2.0), nl, tc, tab);
  CHECK(sm.line[0] == 0.0);
  CHECK(sm.line[1] == 0.0);
  CHECK(sm.line[5] > 0.0);
  CHECK(sm.holds);

  CHECK_THROWS_AS(jensen_chain_check(zero, NonlinearityParams{1.7, 3}, tc, tab),
                  std::invalid_argument);
}

TEST_CASE("annular-measure Hoelder bound holds on assorted fields") {
  auto b = tst::basis();
  NonlinearityParams nl{0.1, 3};
  ThresholdConstants tc;
  for (const RadialField& f : {tst::gaussian(b, 1.5, 2.0), tst::ring(b, 1.2, 6.0, 2.0),
                               random_smooth_field(b, 42, 2.0, 2.0)}) {
    for (int Kbar : {0, 3}) {
      HolderMeasureReport rep = measure_holder_check(f, 8.0, Kbar, nl, tc);
      CAPTURE(Kbar, rep.lhs, rep.rhs);
      REQUIRE(rep.lhs > 0);
      CHECK(rep.lhs <= rep.rhs * (1 + 1e-10) + 1e-12);
      double th = tc.theta();
      CHECK(tst::rel(rep.rhs, std::pow(rep.norm_p12, th) * std::pow(rep.norm_pk, 1 - th)) < 1e-13);
    }
  }
  RadialField g = tst::gaussian(b, 1.0, 2.0);
  CHECK_THROWS_AS(measure_holder_check(g, -1.0, 2, nl, tc), std::invalid_argument);
  CHECK_THROWS_AS(measure_holder_check(g, 8.0, -1, nl, tc), std::invalid_argument);
  CHECK_THROWS_AS(measure_holder_check(g, 45.0, 0, nl, tc), std::invalid_argument);
}
