#include "horolab/twisted_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "horolab/errors.hpp"
#include "horolab/quadrature.hpp"

namespace horolab {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};
constexpr std::int64_t kMaxOrbitNodes = std::int64_t{1} << 24;

struct Level {
  cplx value;
  double mass = 0.0;  // integral of |integrand|, for the absolute floor
};

template <class F>
Level composite_level(F&& g, double a, double b, std::int64_t panels) {
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  const double width = (b - a) / static_cast<double>(panels);
  Level level;
  for (std::int64_t p = 0; p < panels; ++p) {
    const double mid = a + width * (static_cast<double>(p) + 0.5);
    cplx panel{};
    double mass = 0.0;
    for (int i = 0; i < kPanelOrder; ++i) {
      const cplx v = g(mid + 0.5 * width * rule.nodes[static_cast<std::size_t>(i)]);
      panel += rule.weights[static_cast<std::size_t>(i)] * v;
      mass += rule.weights[static_cast<std::size_t>(i)] * std::abs(v);
    }
    level.value += panel * (0.5 * width);
    level.mass += mass * 0.5 * width;
  }
  return level;
}

std::int64_t initial_panels(double lambda, double length, const QuadratureSpec& spec) {
  const double by_phase =
      std::ceil(std::abs(lambda) * length / (2.0 * std::numbers::pi) * spec.min_panels_per_period);
  const double by_time = std::ceil(length);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::max(by_phase, by_time)));
}

void check_spec(const QuadratureSpec& spec) {
  if (spec.min_panels_per_period < 8) {
    throw std::invalid_argument("quadrature spec: need >= 8 panels per period");
  }
  if (!(spec.rel_tol > 0.0 && spec.rel_tol <= 1e-3)) {
    throw std::invalid_argument("quadrature spec: tolerance must lie in (0, 1e-3]");
  }
  if (spec.max_depth < 1) throw std::invalid_argument("quadrature spec: max_depth must be >= 1");
}

template <class F>
ScalarIntegral refine(F&& integrand, double lambda, double a, double b, const QuadratureSpec& spec) {
  check_spec(spec);
  ScalarIntegral out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::int64_t panels = initial_panels(lambda, b - a, spec);
  if (panels * kPanelOrder > kMaxOrbitNodes) {
    throw ResourceLimit("twisted integral: initial grid too large");
  }
  Level previous = composite_level(integrand, a, b, panels);
  for (int depth = 0; depth < spec.max_depth; ++depth) {
    panels *= 2;
    const Level current = composite_level(integrand, a, b, panels);
    const double diff = std::abs(current.value - previous.value);
    out.value = current.value;
    out.err_est = diff;
    out.nodes = panels * kPanelOrder;
    const double floor = 1e-3 * spec.rel_tol * current.mass;
    if (diff <= spec.rel_tol * std::abs(current.value) || diff <= floor) {
      out.converged = true;
      return out;
    }
    previous = current;
  }
  return out;
}

}  // namespace

ScalarIntegral twisted_scalar_integral(const std::function<cplx(double)>& g, double lambda,
                                       double a, double b, const QuadratureSpec& spec) {
  return refine([&](double t) { return std::exp(kI * (lambda * t)) * g(t); }, lambda, a, b, spec);
}

TwistedIntegral twisted_path_integral(const OrbitPath& path, const Observable& obs, double lambda,
                                      double T, const QuadratureSpec& spec) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("twisted integral: T must be > 0");
  const ScalarIntegral r = twisted_scalar_integral(
      [&](double t) { return cplx(obs(path(t))); }, lambda, 0.0, T, spec);
  TwistedIntegral out;
  out.x = path(0.0);
  out.lambda = lambda;
  out.T = T;
  out.value = r.value;
  out.err_est = r.err_est;
  out.converged = r.converged;
  out.nodes = r.nodes;
  return out;
}

TwistedIntegral twisted_orbit_integral(const SurfacePoint& x, const Observable& obs, double lambda,
                                       double T, const QuadratureSpec& spec) {
  if (lambda == 0.0) throw UseUntwistedPath("twisted_orbit_integral: lambda = 0");
  TwistedIntegral out = twisted_path_integral(
      [&](double t) { return horocycle_point(x, t); }, obs, lambda, T, spec);
  out.x = x;
  return out;
}

TwistedIntegral orbit_integral(const SurfacePoint& x, const Observable& obs, double T,
                               const QuadratureSpec& spec) {
  TwistedIntegral out = twisted_path_integral(
      [&](double t) { return horocycle_point(x, t); }, obs, 0.0, T, spec);
  out.x = x;
  return out;
}

ScalarIntegral cusp_coefficient_estimate(int n, const CuspFormSpec& spec,
                                         const QuadratureSpec& quad) {
  if (n < 1) throw std::invalid_argument("cusp_coefficient: n must be >= 1");
  const double nd = n;
  auto f = [&](double t) { return evaluate_form(spec, cplx(t, 1.0) / nd); };
  ScalarIntegral r = twisted_scalar_integral(f, -2.0 * std::numbers::pi, 0.0, nd, quad);
  const double scale = std::exp(2.0 * std::numbers::pi) / nd;
  r.value *= scale;
  r.err_est *= scale;
  return r;
}

cplx cusp_coefficient(int n, const CuspFormSpec& spec, const QuadratureSpec& quad) {
  return cusp_coefficient_estimate(n, spec, quad).value;
}

double closed_horocycle_shift_check(int n, double s, const CuspFormSpec& spec,
                                    const QuadratureSpec& quad) {
  if (n < 1) throw std::invalid_argument("closed_horocycle_shift_check: n must be >= 1");
  const double nd = n;
  const double lambda = -2.0 * std::numbers::pi;
  auto at = [&](double shift) {
    return twisted_scalar_integral(
               [&](double t) { return evaluate_form(spec, cplx(t + shift, 1.0) / nd) / nd; },
               lambda, 0.0, nd, quad)
        .value;
  };
  const double base = std::abs(at(0.0));
  if (s == 0.0) return 0.0;
  return std::abs(base - std::abs(at(s))) / base;
}

ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 4) throw std::invalid_argument("exponent_fit: need >= 4 samples");
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [T, magnitude] : samples) {
    if (!(T > 0.0) || !(magnitude > 0.0)) {
      throw std::invalid_argument("exponent_fit: samples must be positive");
    }
    lx.push_back(std::log(T));
    ly.push_back(std::log(magnitude));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("exponent_fit: degenerate abscissae");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.samples = static_cast<int>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    fit.residual_max =
        std::max(fit.residual_max, std::abs(ly[i] - (fit.intercept + fit.slope * lx[i])));
  }
  return fit;
}

double small_lambda_identity_check(const SurfacePoint& x, const Observable& obs, double lambda,
                                   double T, const QuadratureSpec& quad) {
  if (std::abs(lambda * T) > std::numbers::e) {
    throw OutOfRegime("small_lambda_identity_check: |lambda T| > e");
  }
  if (!(T > 0.0)) throw std::invalid_argument("small_lambda_identity_check: T must be > 0");
  auto f = [&](double t) { return obs(horocycle_point(x, t)); };
  const cplx direct = twisted_scalar_integral([&](double t) { return cplx(f(t)); }, lambda, 0.0,
                                              T, quad)
                          .value;

  // Cumulative integral F on a fixed grid: panel sums plus a local Gauss
  // rule from the panel start to each node.
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  auto cumulative_side = [&](std::int64_t panels) {
    const double width = T / static_cast<double>(panels);
    double F_left = 0.0;
    cplx outer{};
    for (std::int64_t p = 0; p < panels; ++p) {
      const double left = width * static_cast<double>(p);
      cplx panel{};
      for (int i = 0; i < kPanelOrder; ++i) {
        const double t = left + 0.5 * width * (rule.nodes[static_cast<std::size_t>(i)] + 1.0);
        const double partial = composite_gauss<double>(f, left, t, 1);
        panel += rule.weights[static_cast<std::size_t>(i)] * std::exp(kI * (lambda * t)) *
                 (F_left + partial);
      }
      outer += panel * (0.5 * width);
      F_left += composite_gauss<double>(f, left, left + width, 1);
    }
    return std::pair<cplx, double>{outer, F_left};
  };
  std::int64_t panels = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(T)));
  auto [outer, F_T] = cumulative_side(panels);
  for (int depth = 0; depth < quad.max_depth; ++depth) {
    panels *= 2;
    auto [next_outer, next_F] = cumulative_side(panels);
    const double diff = std::abs(next_outer - outer) + std::abs(next_F - F_T);
    outer = next_outer;
    F_T = next_F;
    if (diff <= quad.rel_tol * (std::abs(outer) + std::abs(F_T)) || diff < 1e-14 * T) break;
  }
  const cplx via_parts = std::exp(kI * (lambda * T)) * F_T - kI * lambda * outer;
  return std::abs(direct - via_parts);
}

Observable constant_observable(double c) {
  return [c](const SurfacePoint&) { return c; };
}

Observable cusp_observable(const CuspFormSpec& spec, double normalization) {
  return [spec, normalization](const SurfacePoint& x) {
    return lift(spec, x.reduced).real() / normalization;
  };
}

}  // namespace horolab
