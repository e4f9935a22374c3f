#pragma once
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>

#include "functionals.hpp"
#include "ground_state.hpp"
#include "grid.hpp"

namespace nlslab {

struct DataDescriptor {
  std::string family = "gaussian";  // gaussian | ground_state | ring | random_smooth
  double a = 1.0;
  double sigma = 2.0;
  double lambda = 1.0;
  double theta = 0.0;
  double r0 = 5.0;
  std::uint64_t seed = 1;
  double target = 1.0;  // htilde norm for random_smooth
};

namespace detail {
// explicit Box-Muller so streams are identical across standard libraries
struct GaussianStream {
  std::mt19937_64 rng;
  explicit GaussianStream(std::uint64_t seed) : rng(seed) {}
  double uniform() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  }
  std::pair<double, double> pair() {
    double u1 = uniform(), u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    return {rad * std::cos(2 * M_PI * u2), rad * std::sin(2 * M_PI * u2)};
  }
};
}

inline RadialField random_smooth_field(std::shared_ptr<const BesselBasis> basis,
                                       std::uint64_t seed, double target, double k) {
  const int N = basis->spec.num_modes;
  detail::GaussianStream gs(seed);
  SpectralField sf{basis, VecC::Zero(N)};
  const double j0 = N / 8.0;
  for (int j = 0; j < N; ++j) {
    auto [x, y] = gs.pair();
    double env = std::exp(-std::pow((j + 1) / j0, 2));
    sf.c[j] = Complex(x, y) * env;
  }
  double norm = htilde_norm_spectral(sf, k);
  if (target != 0 && norm > 0) sf.c *= target / norm;
  else sf.c.setZero();
  return from_spectral(sf);
}

// W shifted to vanish at the wall: a (W(r) - W(r_max)). Keeps the soliton
// shape representable on the Dirichlet basis.
inline RadialField ground_state_profile_zeroed(std::shared_ptr<const BesselBasis> basis,
                                               double amplitude) {
  const int n = basis->spec.n;
  const double wall = ground_state_W(basis->spec.r_max, n);
  RadialField f{basis, VecC(basis->spec.num_modes)};
  for (int i = 0; i < basis->spec.num_modes; ++i)
    f.u[i] = amplitude * (ground_state_W(basis->nodes[i], n) - wall);
  return f;
}

inline RadialField make_initial_data(const DataDescriptor& d,
                                     std::shared_ptr<const BesselBasis> basis) {
  const auto& nodes = basis->nodes;
  RadialField f{basis, VecC(basis->spec.num_modes)};
  if (d.family == "gaussian") {
    if (!(d.sigma > 0)) throw std::invalid_argument("make_initial_data: gaussian sigma must be > 0");
    for (int i = 0; i < nodes.size(); ++i)
      f.u[i] = d.a * std::exp(-nodes[i] * nodes[i] / (d.sigma * d.sigma));
  } else if (d.family == "ground_state") {
    f = ground_state_profile(basis, d.lambda, d.theta);
    f.u *= d.a;
  } else if (d.family == "ring") {
    if (!(d.sigma > 0)) throw std::invalid_argument("make_initial_data: ring sigma must be > 0");
    for (int i = 0; i < nodes.size(); ++i) {
      double s = (nodes[i] - d.r0) / d.sigma;
      f.u[i] = d.a * std::exp(-s * s);
    }
  } else if (d.family == "random_smooth") {
    f = random_smooth_field(basis, d.seed, d.target, default_regularity(basis->spec.n));
  } else {
    throw std::invalid_argument("make_initial_data: unknown family '" + d.family + "'");
  }
  return f;
}

}
