#pragma once
#include <catch2/catch_amalgamated.hpp>
#include <nlslab/nlslab.hpp>

#include <map>
#include <memory>

namespace tst {

// one basis per (n, num_modes) per test binary; construction is the expensive part
inline std::shared_ptr<const nlslab::BesselBasis> basis(int n = 3, int num_modes = 512,
                                                        double r_max = 40.0) {
  static std::map<std::pair<int, int>, std::shared_ptr<const nlslab::BesselBasis>> cache;
  auto key = std::make_pair(n, num_modes);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache
             .emplace(key, std::make_shared<nlslab::BesselBasis>(
                               nlslab::GridSpec{n, r_max, num_modes}))
             .first;
  return it->second;
}

inline nlslab::RadialField gaussian(std::shared_ptr<const nlslab::BesselBasis> b, double a,
                                    double sigma) {
  nlslab::DataDescriptor d;
  d.family = "gaussian";
  d.a = a;
  d.sigma = sigma;
  return nlslab::make_initial_data(d, b);
}

inline nlslab::RadialField ring(std::shared_ptr<const nlslab::BesselBasis> b, double a, double r0,
                                double sigma) {
  nlslab::DataDescriptor d;
  d.family = "ring";
  d.a = a;
  d.r0 = r0;
  d.sigma = sigma;
  return nlslab::make_initial_data(d, b);
}

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

}
