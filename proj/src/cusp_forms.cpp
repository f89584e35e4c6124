#include "horolab/cusp_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "horolab/errors.hpp"
#include "horolab/modular_surface.hpp"

namespace horolab {

namespace {

using Series = std::vector<__int128>;

Series square_truncated(const Series& x) {
  const std::size_t n = x.size();
  Series out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; i + j < n; ++j) out[i + j] += x[i] * x[j];
  }
  return out;
}

void check_spec(const CuspFormSpec& spec) {
  if (spec.weight != 12) throw std::invalid_argument("cusp form: only weight 12 is supported");
  if (spec.eta_terms < 1) throw std::invalid_argument("cusp form: eta_terms must be >= 1");
}

// q prod_{n <= terms} (1 - q^n)^24 at a reduced point.
std::complex<double> discriminant_reduced(std::complex<double> z, int terms) {
  const std::complex<double> q = std::exp(2.0 * std::numbers::pi * std::complex<double>(0, 1) * z);
  std::complex<double> product = 1.0;
  std::complex<double> qn = q;
  for (int n = 1; n <= terms; ++n) {
    product *= 1.0 - qn;
    qn *= q;
  }
  const std::complex<double> p2 = product * product;
  const std::complex<double> p4 = p2 * p2;
  const std::complex<double> p8 = p4 * p4;
  const std::complex<double> p16 = p8 * p8;
  return q * p16 * p8;
}

}  // namespace

__int128 QExpansionOracle::tau(int n) const {
  if (n < 1 || n > max_index) throw std::out_of_range("tau: index outside oracle range");
  return coefficients[static_cast<std::size_t>(n) - 1];
}

std::string to_string(__int128 value) {
  if (value == 0) return "0";
  const bool negative = value < 0;
  unsigned __int128 magnitude =
      negative ? static_cast<unsigned __int128>(-(value + 1)) + 1 : static_cast<unsigned __int128>(value);
  std::string digits;
  while (magnitude > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(magnitude % 10)));
    magnitude /= 10;
  }
  if (negative) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

QExpansionOracle tau_oracle(int N) {
  if (N < 1) throw std::invalid_argument("tau_oracle: N must be >= 1");
  if (N > kMaxOracleIndex) throw ResourceLimit("tau_oracle: N exceeds 10^4");
  // tau(n) is the coefficient of q^{n-1} in prod (1 - q^n)^24.
  const auto length = static_cast<std::size_t>(N);
  Series cube(length, 0);
  for (std::int64_t k = 0;; ++k) {
    const std::int64_t exponent = k * (k + 1) / 2;
    if (exponent >= N) break;
    cube[static_cast<std::size_t>(exponent)] = (k % 2 == 0 ? 1 : -1) * (2 * k + 1);
  }
  const Series sixth = square_truncated(cube);
  const Series twelfth = square_truncated(sixth);
  QExpansionOracle oracle;
  oracle.max_index = N;
  oracle.coefficients = square_truncated(twelfth);
  return oracle;
}

std::complex<double> eta(std::complex<double> z, int trunc) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("eta: Im z must be positive");
  if (trunc < 0) throw std::invalid_argument("eta: truncation must be >= 0");
  const std::complex<double> i(0, 1);
  const std::complex<double> q = std::exp(2.0 * std::numbers::pi * i * z);
  std::complex<double> product = std::exp(std::numbers::pi * i * z / 12.0);
  std::complex<double> qn = q;
  for (int n = 1; n <= trunc; ++n) {
    product *= 1.0 - qn;
    qn *= q;
  }
  return product;
}

std::complex<double> evaluate_form(const CuspFormSpec& spec, std::complex<double> z) {
  check_spec(spec);
  if (!(z.imag() > 0.0)) throw std::invalid_argument("evaluate_form: Im z must be positive");
  IntMatrix gamma;
  const std::complex<long double> reduced = reduce_upper_half_plane(
      {static_cast<long double>(z.real()), static_cast<long double>(z.imag())}, &gamma);
  const std::complex<double> z_red(static_cast<double>(reduced.real()),
                                   static_cast<double>(reduced.imag()));
  const std::complex<double> factor =
      static_cast<double>(gamma.c) * z + static_cast<double>(gamma.d);
  return discriminant_reduced(z_red, spec.eta_terms) / std::pow(factor, spec.weight);
}

std::complex<double> lift(const CuspFormSpec& spec, const GroupElement& g) {
  const std::complex<double> i(0, 1);
  const std::complex<double> denom = g.c * i + g.d;
  const std::complex<double> z = (g.a * i + g.b) / denom;
  return evaluate_form(spec, z) / std::pow(denom, spec.weight);
}

}  // namespace horolab
