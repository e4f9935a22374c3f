#pragma once
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlslab {

// Surface area of the unit sphere S^{n-1}.
inline double sphere_area(int n) {
  switch (n) {
    case 3: return 4.0 * M_PI;
    case 4: return 2.0 * M_PI * M_PI;
    case 5: return 8.0 * M_PI * M_PI / 3.0;
    default: throw std::invalid_argument("dimension must be 3, 4 or 5");
  }
}

// Critical Sobolev exponent 2n/(n-2), written 1_2* below.
inline double crit_exponent(int n) {
  if (n < 3 || n > 5) throw std::invalid_argument("dimension must be 3, 4 or 5");
  return 2.0 * n / (n - 2.0);
}

// m_r* with 1/m_r* = 1/r - m/n.
inline double sobolev_exponent(double m, double r, int n) {
  if (m >= n / r) throw std::invalid_argument("sobolev_exponent: need m < n/r");
  return 1.0 / (1.0 / r - m / n);
}

// Default regularity: any k in (1,inf) for n=3,4 and (1,4/3) for n=5.
inline double default_regularity(int n) { return n == 5 ? 7.0 / 6.0 : 2.0; }

inline void check_regularity(double k, int n) {
  bool ok = n == 5 ? (k > 1.0 && k < 4.0 / 3.0) : (k > 1.0);
  if (!ok) throw std::invalid_argument("regularity k outside admissible range for n=" + std::to_string(n));
}

struct GridSpec {
  int n = 3;
  double r_max = 40.0;
  int num_modes = 512;

  double nu() const { return n / 2.0 - 1.0; }
  void validate() const {
    if (n < 3 || n > 5) throw std::invalid_argument("GridSpec: n must be 3, 4 or 5");
    if (num_modes < 8) throw std::invalid_argument("GridSpec: need at least 8 modes");
    if (!(r_max > 0)) throw std::invalid_argument("GridSpec: r_max must be positive");
  }
};

struct NonlinearityParams {
  double gamma = 0.0;
  int n = 3;

  void validate() const {
    if (gamma < 0) throw std::invalid_argument("NonlinearityParams: gamma must be >= 0");
    if (n < 3 || n > 5) throw std::invalid_argument("NonlinearityParams: n must be 3, 4 or 5");
  }
};

// g(s) = log^gamma(2 + s^2), h = g - 1, g_breve(s) = g(sqrt(s)), g_tilde(y) = log^gamma(2 + y).
inline double g_tilde(double y, double gamma) {
  return gamma == 0.0 ? 1.0 : std::pow(std::log(2.0 + y), gamma);
}
inline double g_tilde_prime(double y, double gamma) {
  if (gamma == 0.0) return 0.0;
  return gamma * std::pow(std::log(2.0 + y), gamma - 1.0) / (2.0 + y);
}
inline double g_of(double amplitude, const NonlinearityParams& p) {
  return g_tilde(amplitude * amplitude, p.gamma);
}
inline double h_of(double amplitude, const NonlinearityParams& p) {
  return g_of(amplitude, p) - 1.0;
}
inline double g_breve(double s, double gamma) { return g_tilde(s, gamma); }

// Calibration constants for the smallness/trapping machinery. The source
// material leaves c_breve, C_breve, C_a as "small/large enough"; these
// defaults are engineering choices and every report header echoes them.
struct ThresholdConstants {
  double k = 2.0;        // regularity of the data class
  double c_breve = 0.05;
  double C_breve = 20.0;
  double C_a = 1e3;
  int n = 3;

  void validate() const {
    check_regularity(k, n);
    if (!(c_breve > 0 && C_breve > 0 && C_a > 1))
      throw std::invalid_argument("ThresholdConstants: need c_breve, C_breve > 0 and C_a > 1");
  }

  // k_bar = 1 + min(k-1, (n+2)/4 - 1)/2 satisfies 1 < k_bar < min((n+2)/4, k).
  double k_bar() const { return 1.0 + std::min(k - 1.0, (n + 2.0) / 4.0 - 1.0) / 2.0; }
  double k_bar_2star() const { return sobolev_exponent(k_bar(), 2.0, n); }
  double eps_breve() const { return c_breve * (k_bar_2star() - crit_exponent(n)); }
  // Interpolation exponent: 1/(1_2* + 2 eps) = theta/1_2* + (1-theta)/k_bar_2*.
  double theta() const {
    double p1 = crit_exponent(n), pk = k_bar_2star(), pm = p1 + 2.0 * eps_breve();
    return p1 * (pk - pm) / (pm * (pk - p1));
  }
  // h_breve(s) = (C_breve/eps_breve)^gamma * g_breve(s) - 1.
  double h_breve(double s, double gamma) const {
    return std::pow(C_breve / eps_breve(), gamma) * g_breve(s, gamma) - 1.0;
  }
};

}
