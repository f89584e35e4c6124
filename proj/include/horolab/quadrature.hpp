#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "horolab/errors.hpp"

namespace horolab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes, computed by Newton iteration on the
// Legendre recurrence. Cached per n; thread-safe.
const GaussRule& gauss_legendre(int n);

inline constexpr int kPanelOrder = 16;
inline constexpr std::int64_t kMaxQuadratureNodes = std::int64_t{1} << 20;

// Composite Gauss-Legendre over `panels` equal panels of [a, b].
template <class T, class F>
T composite_gauss(F&& f, double a, double b, std::int64_t panels, int order = kPanelOrder) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = (b - a) / static_cast<double>(panels);
  T total{};
  for (std::int64_t p = 0; p < panels; ++p) {
    const double left = a + width * static_cast<double>(p);
    const double mid = left + 0.5 * width;
    T panel{};
    for (int i = 0; i < order; ++i) {
      panel += rule.weights[static_cast<std::size_t>(i)] *
               f(mid + 0.5 * width * rule.nodes[static_cast<std::size_t>(i)]);
    }
    total += panel * (0.5 * width);
  }
  return total;
}

template <class T>
struct QuadratureResult {
  T value{};
  double err_est = 0.0;
  std::int64_t nodes = 0;
  bool converged = false;
};

// Doubles the panel count until successive estimates agree to rel_tol
// (or abs_floor in absolute terms). Throws ResourceLimit past max_nodes.
template <class T, class F>
QuadratureResult<T> adaptive_gauss(F&& f, double a, double b, double rel_tol,
                                   std::int64_t initial_panels = 1, double abs_floor = 0.0,
                                   std::int64_t max_nodes = kMaxQuadratureNodes) {
  QuadratureResult<T> result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  std::int64_t panels = std::max<std::int64_t>(1, initial_panels);
  if (panels * kPanelOrder > max_nodes) throw ResourceLimit("quadrature: node cap exceeded");
  T previous = composite_gauss<T>(f, a, b, panels);
  while (true) {
    panels *= 2;
    if (panels * kPanelOrder > max_nodes) {
      result.value = previous;
      result.nodes = panels / 2 * kPanelOrder;
      result.converged = false;
      return result;
    }
    T current = composite_gauss<T>(f, a, b, panels);
    const double diff = std::abs(current - previous);
    result.value = current;
    result.err_est = diff;
    result.nodes = panels * kPanelOrder;
    if (diff <= rel_tol * std::abs(current) || diff <= abs_floor) {
      result.converged = true;
      return result;
    }
    previous = current;
  }
}

// Integral of w(x) g(x) over [0, b] with w(x) = x^{-p}, 0 <= p < 1, using
// x = s^q, q = 2/(1-p), which makes the transformed integrand smooth.
template <class F>
QuadratureResult<double> singular_weight_gauss(F&& g, double b, double p, double rel_tol) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("singular weight exponent out of range");
  const double q = 2.0 / (1.0 - p);
  const double s_max = std::pow(b, 1.0 / q);
  auto transformed = [&](double s) {
    if (s <= 0.0) return 0.0;
    return q * std::pow(s, q - 1.0 - q * p) * g(std::pow(s, q));
  };
  return adaptive_gauss<double>(transformed, 0.0, s_max, rel_tol);
}

}  // namespace horolab
