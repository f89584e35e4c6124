#pragma once

#include <complex>
#include <string>
#include <vector>

#include "horolab/group_flow.hpp"

namespace horolab {

// The level-one cusp form of weight 12 (the discriminant), evaluated
// through the eta product. Other weights are rejected.
struct CuspFormSpec {
  int weight = 12;
  int eta_terms = 40;
};

// Exact q-expansion coefficients tau(1..N) of q prod (1 - q^n)^24.
struct QExpansionOracle {
  int max_index = 0;
  std::vector<__int128> coefficients;  // coefficients[n - 1] = tau(n)

  __int128 tau(int n) const;
  double tau_double(int n) const { return static_cast<double>(tau(n)); }
};

std::string to_string(__int128 value);

inline constexpr int kMaxOracleIndex = 10'000;

// Exact integer arithmetic: the cube of the eta product is a lacunary
// series with known coefficients, and three squarings give the 24th power.
// Throws ResourceLimit for N > kMaxOracleIndex.
QExpansionOracle tau_oracle(int N);

// q^{1/24} prod_{n <= trunc} (1 - q^n), q = exp(2 pi i z).
std::complex<double> eta(std::complex<double> z, int trunc);

// Reduces z first; returns (cz + d)^{-k} f(z_red) with [[a,b],[c,d]]z = z_red.
std::complex<double> evaluate_form(const CuspFormSpec& spec, std::complex<double> z);

// f(g i) (c i + d)^{-k}; invariant under left multiplication by SL(2,Z).
std::complex<double> lift(const CuspFormSpec& spec, const GroupElement& g);

}  // namespace horolab
