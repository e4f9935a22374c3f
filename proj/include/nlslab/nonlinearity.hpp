#pragma once
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "params.hpp"

namespace nlslab {

namespace detail {
template <class F>
double adaptive_integral(F&& f, double a, double b) {
  if (b <= a) return 0.0;
  double err = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13, &err);
  if (!(std::isfinite(v))) throw std::runtime_error("density quadrature failed");
  return v;
}
}

// Antiderivative tables for the three density integrals that are evaluated
// once per grid point per snapshot:
//   F(A)      = int_0^A s^{1_2*-1} g(s) ds        (potential density)
//   Xin(A)    = int_0^A s^{1_2*-1} h(s) ds        (critical-energy correction)
//   Gin(y)    = int_0^y t^{n/(n-2)} g_tilde'(t) dt (virial error term X_m)
// Cubic Hermite interpolation with exact endpoint derivatives on [lo, hi];
// outside that range (tiny or huge amplitudes) each call falls back to
// adaptive quadrature. Interpolation error is below 1e-10 relative.
class DensityTables {
 public:
  explicit DensityTables(const NonlinearityParams& p, double hi = 64.0)
      : p_(p), lo_(0.25), hi_(hi), cells_(32768) {
    p_.validate();
    pow_ = crit_exponent(p.n) - 1.0;      // = (n+2)/(n-2)
    pow_g_ = p.n / (p.n - 2.0);
    build();
  }

  double F(double amplitude) const { return lookup(tab_F_, amplitude, f_direct_); }
  double Xinner(double amplitude) const { return lookup(tab_X_, amplitude, x_direct_); }
  double Ginner(double y) const { return lookup(tab_G_, y, g_direct_); }

  const NonlinearityParams& params() const { return p_; }

 private:
  enum Which { f_direct_, x_direct_, g_direct_ };
  NonlinearityParams p_;
  double lo_, hi_, pow_, pow_g_;
  int cells_;
  double step_ = 0;
  // value and exact derivative at each knot
  std::vector<double> tab_F_, tab_X_, tab_G_, der_F_, der_X_, der_G_;

  double dF(double s) const { return std::pow(s, pow_) * g_of(s, p_); }
  double dX(double s) const { return std::pow(s, pow_) * h_of(s, p_); }
  double dG(double y) const { return std::pow(y, pow_g_) * g_tilde_prime(y, p_.gamma); }

  double direct(Which w, double a, double b) const {
    if (b <= a) return 0.0;
    if (a == 0.0) {
      // substitute s = b u: the unit-interval integrand stays O(1), so the
      // adaptive rule meets its relative tolerance even when the integral
      // itself underflows (far-field amplitudes)
      double P = w == g_direct_ ? pow_g_ : pow_;
      auto unit = [&](double u) {
        double up = std::pow(u, P), s = b * u;
        switch (w) {
          case f_direct_: return up * g_of(s, p_);
          case x_direct_: return up * h_of(s, p_);
          default: return up * g_tilde_prime(s, p_.gamma);
        }
      };
      return std::pow(b, P + 1.0) * detail::adaptive_integral(unit, 0.0, 1.0);
    }
    switch (w) {
      case f_direct_: return detail::adaptive_integral([&](double s) { return dF(s); }, a, b);
      case x_direct_: return detail::adaptive_integral([&](double s) { return dX(s); }, a, b);
      default: return detail::adaptive_integral([&](double y) { return dG(y); }, a, b);
    }
  }

  void build() {
    step_ = (hi_ - lo_) / cells_;
    tab_F_.resize(cells_ + 1);
    tab_X_.resize(cells_ + 1);
    tab_G_.resize(cells_ + 1);
    der_F_.resize(cells_ + 1);
    der_X_.resize(cells_ + 1);
    der_G_.resize(cells_ + 1);
    tab_F_[0] = direct(f_direct_, 0.0, lo_);
    tab_X_[0] = direct(x_direct_, 0.0, lo_);
    tab_G_[0] = direct(g_direct_, 0.0, lo_);
    for (int i = 0; i <= cells_; ++i) {
      double s = lo_ + i * step_;
      der_F_[i] = dF(s);
      der_X_[i] = dX(s);
      der_G_[i] = dG(s);
      if (i == 0) continue;
      // one 16-point panel per cell, then prefix sums
      tab_F_[i] = tab_F_[i - 1] + cell(f_direct_, s - step_, s);
      tab_X_[i] = tab_X_[i - 1] + cell(x_direct_, s - step_, s);
      tab_G_[i] = tab_G_[i - 1] + cell(g_direct_, s - step_, s);
    }
  }

  double cell(Which w, double a, double b) const {
    static const double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double half = (b - a) / 2, mid = (a + b) / 2, acc = 0;
    for (int q = 0; q < 8; ++q) {
      double xp = mid + half * gx[q], xm = mid - half * gx[q];
      switch (w) {
        case f_direct_: acc += gw[q] * (dF(xp) + dF(xm)); break;
        case x_direct_: acc += gw[q] * (dX(xp) + dX(xm)); break;
        default: acc += gw[q] * (dG(xp) + dG(xm)); break;
      }
    }
    return half * acc;
  }

  double lookup(const std::vector<double>& tab, double s, Which w) const {
    if (s < 0) throw std::invalid_argument("density argument must be >= 0");
    if (s < lo_ || s > hi_) return direct(w, 0.0, s);
    double x = (s - lo_) / step_;
    int i = std::min(static_cast<int>(x), cells_ - 1);
    double t = x - i;
    const std::vector<double>* der = w == f_direct_ ? &der_F_ : (w == x_direct_ ? &der_X_ : &der_G_);
    double y0 = tab[i], y1 = tab[i + 1], d0 = (*der)[i] * step_, d1 = (*der)[i + 1] * step_;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
  }
};

inline double potential_density_F(double amplitude, const DensityTables& tables) {
  return tables.F(amplitude);
}

// H(y), the antiderivative pair entering the virial right-hand side, in both
// stated forms: direct and after one integration by parts. They must agree to
// 1e-9 relative and behave like -y^{n/(n-2)} g_tilde(y) for y >= 1.
struct HForms {
  double form1, form2;
};

inline HForms H_of(double y, const NonlinearityParams& p) {
  if (y < 0) throw std::invalid_argument("H_of: y must be >= 0");
  double gam = p.gamma;
  double a = p.n / (p.n - 2.0);      // outer power
  double b = 2.0 / (p.n - 2.0);      // integrand power, form1
  double head = std::pow(y, a) * g_tilde(y, gam);
  double i1 = detail::adaptive_integral([&](double s) { return std::pow(s, b) * g_tilde(s, gam); }, 0.0, y);
  double i2 = detail::adaptive_integral([&](double s) { return std::pow(s, a) * g_tilde_prime(s, gam); }, 0.0, y);
  double inv_a = (p.n - 2.0) / p.n;
  return {-head + i1, (inv_a - 1.0) * head - inv_a * i2};
}

inline double H_prime(double y, const NonlinearityParams& p) {
  if (y <= 0) return 0.0;
  double b = 2.0 / (p.n - 2.0), a = p.n / (p.n - 2.0);
  return -b * std::pow(y, b) * g_tilde(y, p.gamma) - std::pow(y, a) * g_tilde_prime(y, p.gamma);
}

}
