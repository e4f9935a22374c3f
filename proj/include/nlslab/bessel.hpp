#pragma once
#include <boost/math/special_functions/bessel.hpp>
#include <stdexcept>

namespace nlslab {

inline double bessel_j(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return boost::math::cyl_bessel_j(nu, x);
}

// m-th positive zero of J_nu, m >= 1.
inline double bessel_zero(double nu, int m) {
  if (m < 1) throw std::invalid_argument("bessel_zero: index must be >= 1");
  return boost::math::cyl_bessel_j_zero(nu, m);
}

}
