#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "horolab/group_flow.hpp"

namespace horolab::testing {

// Random SL(2,R) element as a product of bounded flow steps.
inline GroupElement random_element(std::mt19937_64& rng, double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  return exp_U(u(rng)) * exp_X(u(rng)) * exp_V(u(rng));
}

inline double max_entry_diff(const GroupElement& x, const GroupElement& y) {
  return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c),
                   std::abs(x.d - y.d)});
}

}  // namespace horolab::testing
