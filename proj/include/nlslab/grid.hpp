#pragma once
#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <complex>
#include <memory>
#include <stdexcept>

#include "bessel.hpp"
#include "params.hpp"

namespace nlslab {

using Complex = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;
using MatD = Eigen::MatrixXd;

inline VecC real_matvec(const MatD& A, const VecC& x) {
  VecC out(A.rows());
  out.real() = A * x.real();
  out.imag() = A * x.imag();
  return out;
}

// Collocation grid on the ball B(0, r_max) with the orthonormal Fourier-Bessel
// basis phi_j(r) = C_j r^{-nu} J_nu(alpha_j r / r_max). The analysis transform
// is the exact matrix inverse of the synthesis matrix, so grid round trips are
// identity to rounding; a composite Gauss-Legendre fine grid carries all
// Lebesgue-norm quadrature.
class BesselBasis {
 public:
  GridSpec spec;
  VecD alpha;      // first N+1 zeros of J_nu
  VecD nodes;      // r_i = alpha_i * r_max / alpha_{N+1}
  VecD lambda;     // (alpha_j / r_max)^2
  MatD synth;      // N x N, phi_j(r_i)
  MatD analysis;   // inverse of synth
  VecD rf, wq;     // fine grid nodes and weights (weights include omega r^{n-1})
  MatD synth_fine; // M x N
  MatD deriv_fine; // M x N, d/dr phi_j
  int panels = 0;
  double panel_width = 0;

  explicit BesselBasis(const GridSpec& s) : spec(s) {
    spec.validate();
    const int N = spec.num_modes;
    const double R = spec.r_max, nu = spec.nu(), omega = sphere_area(spec.n);

    alpha.resize(N + 1);
    for (int m = 0; m < N + 1; ++m) alpha[m] = bessel_zero(nu, m + 1);
    const double S = alpha[N];
    nodes = alpha.head(N) * (R / S);
    lambda = (alpha.head(N) / R).array().square();

    norm_const.resize(N);
    for (int j = 0; j < N; ++j)
      norm_const[j] = std::sqrt(2.0 / omega) / (R * std::abs(bessel_j(nu + 1.0, alpha[j])));

    synth.resize(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) synth(i, j) = basis_value(j, nodes[i]);
    analysis = synth.partialPivLu().inverse();

    panels = std::max(32, N / 2);
    panel_width = R / panels;
    const auto& gx = boost::math::quadrature::gauss<double, 16>::abscissa();
    const auto& gw = boost::math::quadrature::gauss<double, 16>::weights();
    gl_x.resize(16);
    gl_w.resize(16);
    for (int q = 0; q < 8; ++q) { // boost stores the non-negative half
      gl_x[8 + q] = gx[q];
      gl_x[7 - q] = -gx[q];
      gl_w[8 + q] = gw[q];
      gl_w[7 - q] = gw[q];
    }
    const int M = 16 * panels;
    rf.resize(M);
    wq.resize(M);
    for (int p = 0; p < panels; ++p) {
      double a = p * panel_width, half = panel_width / 2, mid = a + half;
      for (int q = 0; q < 16; ++q) {
        double r = mid + half * gl_x[q];
        rf[16 * p + q] = r;
        wq[16 * p + q] = omega * half * gl_w[q] * std::pow(r, spec.n - 1);
      }
    }
    synth_fine.resize(M, N);
    deriv_fine.resize(M, N);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < N; ++j) {
        synth_fine(i, j) = basis_value(j, rf[i]);
        deriv_fine(i, j) = basis_deriv(j, rf[i]);
      }
  }

  double basis_value(int j, double r) const {
    return norm_const[j] * std::pow(r, -spec.nu()) * bessel_j(spec.nu(), alpha[j] * r / spec.r_max);
  }
  // d/dr [r^{-nu} J_nu(b r)] = -b r^{-nu} J_{nu+1}(b r)
  double basis_deriv(int j, double r) const {
    double b = alpha[j] / spec.r_max;
    return -norm_const[j] * b * std::pow(r, -spec.nu()) * bessel_j(spec.nu() + 1.0, b * r);
  }

  VecD gl_x, gl_w; // 16-point Gauss-Legendre rule on [-1,1]
 private:
  VecD norm_const;
};

struct RadialField {
  std::shared_ptr<const BesselBasis> basis;
  VecC u;
};

struct SpectralField {
  std::shared_ptr<const BesselBasis> basis;
  VecC c;
};

inline void require_same_basis(const BesselBasis* a, const BesselBasis* b) {
  if (a != b) throw std::invalid_argument("field/basis mismatch");
}

inline SpectralField to_spectral(const RadialField& f) {
  if (f.u.size() != f.basis->spec.num_modes) throw std::invalid_argument("sample count mismatch");
  if (!f.u.allFinite()) throw std::invalid_argument("non-finite samples");
  return {f.basis, real_matvec(f.basis->analysis, f.u)};
}

inline RadialField from_spectral(const SpectralField& f) {
  if (f.c.size() != f.basis->spec.num_modes) throw std::invalid_argument("coefficient count mismatch");
  return {f.basis, real_matvec(f.basis->synth, f.c)};
}

// D^s with multiplier lambda_j^{s/2} = |xi|^s; D^2 = -Laplacian.
inline SpectralField fractional_derivative_spectral(const SpectralField& f, double s) {
  if (s < 0) throw std::invalid_argument("fractional_derivative: s must be >= 0");
  SpectralField out = f;
  out.c.array() *= f.basis->lambda.array().pow(s / 2.0);
  return out;
}

inline RadialField fractional_derivative(const RadialField& f, double s) {
  return from_spectral(fractional_derivative_spectral(to_spectral(f), s));
}

inline SpectralField free_propagator_spectral(const SpectralField& f, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("free_propagator: non-finite time");
  SpectralField out = f;
  const Complex i(0.0, 1.0);
  for (int j = 0; j < out.c.size(); ++j) out.c[j] *= std::exp(-i * t * f.basis->lambda[j]);
  return out;
}

inline RadialField free_propagator(const RadialField& f, double t) {
  return from_spectral(free_propagator_spectral(to_spectral(f), t));
}

inline double parseval_mass(const SpectralField& f) { return f.c.squaredNorm(); }

inline VecC eval_fine(const SpectralField& f) { return real_matvec(f.basis->synth_fine, f.c); }
inline VecC eval_fine_deriv(const SpectralField& f) { return real_matvec(f.basis->deriv_fine, f.c); }

inline Complex eval_at(const SpectralField& f, double r) {
  Complex acc = 0;
  for (int j = 0; j < f.c.size(); ++j) acc += f.c[j] * f.basis->basis_value(j, r);
  return acc;
}
inline Complex eval_deriv_at(const SpectralField& f, double r) {
  Complex acc = 0;
  for (int j = 0; j < f.c.size(); ++j) acc += f.c[j] * f.basis->basis_deriv(j, r);
  return acc;
}

// Integral of density(u, u', r) against omega r^{n-1} dr over [lo, hi].
// Panels fully inside use the precomputed fine grid; panels cut by lo or hi
// get a dedicated Gauss-Legendre rule on the clipped piece, with the
// interpolant evaluated directly, so indicator boundaries cost no accuracy.
template <class F>
double integrate_radial(const SpectralField& f, double lo, double hi, F&& density) {
  const auto& b = *f.basis;
  lo = std::max(lo, 0.0);
  hi = std::min(hi, b.spec.r_max);
  if (hi <= lo) return 0.0;
  const double omega = sphere_area(b.spec.n);
  VecC uf = eval_fine(f), duf = eval_fine_deriv(f);

  double acc = 0.0;
  auto clipped_panel = [&](double a2, double b2) {
    double half = (b2 - a2) / 2, mid = (a2 + b2) / 2, s = 0;
    if (half <= 0) return 0.0;
    for (int q = 0; q < 16; ++q) {
      double r = mid + half * b.gl_x[q];
      s += half * b.gl_w[q] * omega * std::pow(r, b.spec.n - 1) *
           density(eval_at(f, r), eval_deriv_at(f, r), r);
    }
    return s;
  };
  for (int p = 0; p < b.panels; ++p) {
    double pa = p * b.panel_width, pb = pa + b.panel_width;
    if (pb <= lo || pa >= hi) continue;
    if (pa >= lo && pb <= hi) {
      for (int q = 0; q < 16; ++q) {
        int i = 16 * p + q;
        acc += b.wq[i] * density(uf[i], duf[i], b.rf[i]);
      }
    } else {
      acc += clipped_panel(std::max(pa, lo), std::min(pb, hi));
    }
  }
  return acc;
}

inline double lp_norm_spectral(const SpectralField& f, double p) {
  if (p < 1) throw std::invalid_argument("lp_norm: p must be >= 1");
  VecC uf = eval_fine(f);
  double acc = 0;
  for (int i = 0; i < uf.size(); ++i) acc += f.basis->wq[i] * std::pow(std::abs(uf[i]), p);
  return std::pow(acc, 1.0 / p);
}

inline double lp_norm(const RadialField& f, double p) {
  return lp_norm_spectral(to_spectral(f), p);
}

// Fraction of the spectral mass sitting in the shell r >= frac * r_max.
inline double shell_mass_fraction(const SpectralField& f, double frac = 0.9) {
  double total = parseval_mass(f);
  if (total == 0) return 0.0;
  double shell = integrate_radial(f, frac * f.basis->spec.r_max, f.basis->spec.r_max,
                                  [](Complex u, Complex, double) { return std::norm(u); });
  return shell / total;
}

}
