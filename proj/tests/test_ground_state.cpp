#include "helpers.hpp"

#include <cmath>

using namespace nlslab;

namespace {
struct Frozen {
  int n;
  double grad, cstar, Etilde, yW;
};
// 40-digit references for ||grad W||^2, C*, Etilde(W), y_W
const Frozen frozen[] = {
    {3, 12.8209922049691268361, 0.427260542862526664988, 4.27366406832304227869,
     1.52986675074727071074},
    {4, 105.275780278286491934, 0.312189205697777951677, 26.3189450695716229836,
     3.20318570196841893376},
    {5, 844.360264762738559694, 0.259833080684934311938, 168.872052952547711939,
     7.55019791822061319155},
};
}

TEST_CASE("ground-state constants match high-precision references in n = 3, 4, 5") {
  for (const Frozen& f : frozen) {
    CAPTURE(f.n);
    GroundStateConstants gc = ground_state_constants(f.n, 64);
    CHECK(tst::rel(gc.grad_W_sq, f.grad) < 1e-9);
    CHECK(tst::rel(gc.sharp_sobolev, f.cstar) < 1e-9);
    CHECK(tst::rel(gc.Etilde_W, f.Etilde) < 1e-9);
    CHECK(tst::rel(gc.y_W(), f.yW) < 1e-9);
    CHECK(gc.half_grad_sq == 0.5 * gc.grad_W_sq);
    // Pohozaev: the gradient and critical-norm routes agree
    CHECK(tst::rel(gc.grad_W_sq, gc.crit_norm_W) < 1e-8);
  }
}

TEST_CASE("n = 3 closed forms: pi^2 3^{3/2}/4 and its powers") {
  GroundStateConstants gc = ground_state_constants(3, 64);
  double X = M_PI * M_PI * std::pow(3.0, 1.5) / 4.0;
  CHECK(tst::rel(gc.grad_W_sq, X) < 1e-9);
  CHECK(tst::rel(gc.sharp_sobolev, std::pow(X, -1.0 / 3.0)) < 1e-9);
  CHECK(tst::rel(gc.Etilde_W, X / 3.0) < 1e-9);
  CHECK(tst::rel(gc.y_W(), std::pow(X, 1.0 / 6.0)) < 1e-9);
}

TEST_CASE("constants are stable under resolution doubling") {
  for (int n : {3, 4, 5}) {
    GroundStateConstants a = ground_state_constants(n, 32);
    GroundStateConstants b = ground_state_constants(n, 64);
    CHECK(tst::rel(a.grad_W_sq, b.grad_W_sq) < 1e-9);
    CHECK(tst::rel(a.crit_norm_W, b.crit_norm_W) < 1e-9);
  }
}

TEST_CASE("ground_state_constants rejects bad dimensions and resolutions") {
  CHECK_THROWS_AS(ground_state_constants(2, 64), std::invalid_argument);
  CHECK_THROWS_AS(ground_state_constants(6, 64), std::invalid_argument);
  CHECK_THROWS_AS(ground_state_constants(3, 2), std::invalid_argument);
}

TEST_CASE("profile W: pointwise values and derivative consistency") {
  for (int n : {3, 4, 5}) {
    CAPTURE(n);
    CHECK(ground_state_W(0.0, n) == 1.0);
    double c = n * (n - 2.0);
    CHECK(tst::rel(ground_state_W(std::sqrt(c), n), std::pow(2.0, -(n - 2.0) / 2.0)) < 1e-14);
    CHECK(ground_state_W_deriv(0.0, n) == 0.0);
    for (double r : {0.5, 2.0, 11.0}) {
      double h = 1e-5;
      double fd = (ground_state_W(r + h, n) - ground_state_W(r - h, n)) / (2 * h);
      CHECK(tst::rel(fd, ground_state_W_deriv(r, n)) < 1e-8);
    }
  }
}

TEST_CASE("ground_state_profile: sampling, phase, and scaling") {
  auto b = tst::basis();
  RadialField w = ground_state_profile(b, 1.0, 0.0);
  for (int i : {0, 100, 511})
    REQUIRE(std::abs(w.u[i] - ground_state_W(b->nodes[i], 3)) < 1e-15);

  RadialField wp = ground_state_profile(b, 1.0, M_PI / 3.0);
  Complex ph = std::polar(1.0, M_PI / 3.0);
  CHECK(std::abs(wp.u[10] - ph * w.u[10]) < 1e-15);

  RadialField w2 = ground_state_profile(b, 2.0, 0.0);
  double want = std::pow(2.0, -0.5) * ground_state_W(b->nodes[10] / 2.0, 3);
  CHECK(tst::rel(w2.u[10].real(), want) < 1e-14);

  CHECK_THROWS_AS(ground_state_profile(b, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ground_state_profile(b, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("variational curve: peak location, peak height, monotone rise") {
  GroundStateConstants gc = ground_state_constants(3, 64);
  double yW = gc.y_W();
  CHECK(tst::rel(variational_curve_F(yW, gc), gc.Etilde_W) < 1e-9);
  // F'(y) = C*^{-2} y - y^5 vanishes at y_W
  double scale = std::pow(gc.sharp_sobolev, -2.0) * yW;
  CHECK(std::abs(scale - std::pow(yW, 5.0)) < 1e-8 * scale);
  double h = 1e-5;
  CHECK(std::abs(variational_curve_F(yW + h, gc) - variational_curve_F(yW - h, gc)) / (2 * h) <
        1e-7);
  double prev = 0.0;
  for (double y = 0.1; y < yW; y += 0.1) {
    double v = variational_curve_F(y, gc);
    REQUIRE(v > prev);
    REQUIRE(v < gc.Etilde_W);
    prev = v;
  }
  CHECK_THROWS_AS(variational_curve_F(-0.1, gc), std::invalid_argument);
}

TEST_CASE("stationarity residual: small on W at any scale, order one off the family") {
  auto b = tst::basis();
  RadialField w = ground_state_profile(b, 1.0, 0.0);
  CHECK(stationarity_residual(w) < 1e-4);
  RadialField w2 = ground_state_profile(b, 2.0, 0.0);
  CHECK(stationarity_residual(w2) < 1e-4);

  RadialField twice = w;
  twice.u *= 2.0;
  CHECK(stationarity_residual(twice) > 0.1);

  RadialField zero{b, VecC::Zero(b->spec.num_modes)};
  CHECK(stationarity_residual(zero) == 0.0);
}

TEST_CASE("wall-zeroed surrogate: small boundary value, tolerable shell mass") {
  auto b = tst::basis();
  RadialField bump = ground_state_profile_zeroed(b, 0.8);
  int N = b->spec.num_modes;
  double want = 0.8 * (ground_state_W(b->nodes[N - 1], 3) - ground_state_W(40.0, 3));
  CHECK(std::abs(bump.u[N - 1].real() - want) < 1e-15);
  CHECK(std::abs(bump.u[N - 1]) < 1e-3);
  double shell = shell_mass_fraction(to_spectral(bump));
  CHECK(shell < 0.5);   // passes the relaxed guard used for these runs
  CHECK(shell > 1e-4);  // but not the strict default: the slow tail is real
}
