#pragma once

#include <random>

#include "photon_src/qmodel.hpp"

namespace testing {

// Fig. 2 baseline, Omega_2 = 3.2.
inline photon_src::SystemParams baseline() {
  photon_src::SystemParams p;
  p.g = 1.0;
  p.kappa_in = 0.01;
  p.gamma_u = 0.1;
  p.gamma_o = 0.01;
  p.kappa_ex = photon_src::optimal_kappa_ex(p.g, p.kappa_in, p.gamma_u + p.gamma_o);
  p.omega2 = 3.2;
  return p;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random valid four-level parameters (rates in units of g).
inline photon_src::SystemParams random_params(std::mt19937_64& rng, bool extended = false) {
  photon_src::SystemParams p;
  p.g = uniform(rng, 0.2, 3.0);
  p.kappa_ex = uniform(rng, 0.01, 2.0);
  p.kappa_in = uniform(rng, 0.0, 0.5);
  p.gamma_u = uniform(rng, 0.001, 1.0);
  p.gamma_o = uniform(rng, 0.0, 0.5);
  p.delta_e = uniform(rng, -2.0, 2.0);
  p.delta_e2 = uniform(rng, -2.0, 2.0);
  p.omega2 = uniform(rng, 0.1, 10.0);
  if (extended) {
    p.gamma_o2 = uniform(rng, 0.0, 0.2);
    p.gamma_e = uniform(rng, 0.0, 0.2);
  }
  return p;
}

}  // namespace testing
