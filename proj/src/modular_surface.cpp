#include "horolab/modular_surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "horolab/errors.hpp"

namespace horolab {

namespace {

using ld = long double;

constexpr int kMaxReductionSteps = 1'000'000;

struct LdMatrix {
  ld a, b, c, d;
};

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t out;
  if (__builtin_mul_overflow(x, y, &out)) throw InternalError("reducer overflow");
  return out;
}

std::int64_t checked_sub(std::int64_t x, std::int64_t y) {
  std::int64_t out;
  if (__builtin_sub_overflow(x, y, &out)) throw InternalError("reducer overflow");
  return out;
}

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t out;
  if (__builtin_add_overflow(x, y, &out)) throw InternalError("reducer overflow");
  return out;
}

// Applies T^-n on the left.
void translate(LdMatrix& m, IntMatrix& gamma, std::int64_t n) {
  m.a -= static_cast<ld>(n) * m.c;
  m.b -= static_cast<ld>(n) * m.d;
  gamma.a = checked_sub(gamma.a, checked_mul(n, gamma.c));
  gamma.b = checked_sub(gamma.b, checked_mul(n, gamma.d));
}

// Applies S = [[0,-1],[1,0]] on the left.
void invert(LdMatrix& m, IntMatrix& gamma) {
  m = {-m.c, -m.d, m.a, m.b};
  gamma = {-gamma.c, -gamma.d, gamma.a, gamma.b};
}

SurfacePoint reduce_ld(const GroupElement& raw, LdMatrix m) {
  IntMatrix gamma;
  for (int step = 0; step < kMaxReductionSteps; ++step) {
    const ld norm = m.c * m.c + m.d * m.d;
    const ld det = m.a * m.d - m.b * m.c;
    const ld re = (m.a * m.c + m.b * m.d) / norm;
    const ld im = det / norm;
    if (std::fabs(re) > 0.5L + kBoundaryTolerance) {
      const ld n = std::round(re);
      if (!(std::fabs(n) < 9.0e18L)) throw InternalError("reduce: translation out of range");
      translate(m, gamma, static_cast<std::int64_t>(n));
      continue;
    }
    if (re * re + im * im < 1.0L - kBoundaryTolerance) {
      invert(m, gamma);
      continue;
    }
    SurfacePoint out;
    out.raw = raw;
    out.reduced = {static_cast<double>(m.a), static_cast<double>(m.b),
                   static_cast<double>(m.c), static_cast<double>(m.d)};
    out.reducer = gamma;
    return out;
  }
  throw InternalError("reduce: iteration cap reached");
}

}  // namespace

IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
  return {checked_add(checked_mul(x.a, y.a), checked_mul(x.b, y.c)),
          checked_add(checked_mul(x.a, y.b), checked_mul(x.b, y.d)),
          checked_add(checked_mul(x.c, y.a), checked_mul(x.d, y.c)),
          checked_add(checked_mul(x.c, y.b), checked_mul(x.d, y.d))};
}

std::complex<double> SurfacePoint::base_point() const {
  const auto p = reduced.base_point();
  return {p[0], p[1]};
}

SurfacePoint reduce(const GroupElement& g) {
  return reduce_ld(g, {g.a, g.b, g.c, g.d});
}

SurfacePoint horocycle_point(const SurfacePoint& x, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("horocycle_point: t must be finite");
  const GroupElement& g = x.reduced;
  const ld tl = t;
  LdMatrix m{g.a, static_cast<ld>(g.a) * tl + g.b, g.c, static_cast<ld>(g.c) * tl + g.d};
  SurfacePoint out = reduce_ld(horocycle(x.raw, t), m);
  out.reducer = out.reducer * x.reducer;
  return out;
}

double height_distance(const SurfacePoint& x) {
  const double c = x.reduced.c;
  const double d = x.reduced.d;
  const double im = x.reduced.det() / (c * c + d * d);
  return std::max(0.0, std::log(im));
}

std::complex<double> mobius(const GroupElement& g, std::complex<double> z) {
  return (g.a * z + g.b) / (g.c * z + g.d);
}

std::complex<double> mobius(const IntMatrix& g, std::complex<double> z) {
  return mobius(g.to_real(), z);
}

std::complex<long double> reduce_upper_half_plane(std::complex<long double> z,
                                                  IntMatrix* reducer) {
  if (!(z.imag() > 0.0L)) throw std::invalid_argument("reduce: Im z must be positive");
  IntMatrix gamma;
  for (int step = 0; step < kMaxReductionSteps; ++step) {
    if (std::fabs(z.real()) > 0.5L + kBoundaryTolerance) {
      const ld n = std::round(z.real());
      z -= n;
      gamma.a = checked_sub(gamma.a, checked_mul(static_cast<std::int64_t>(n), gamma.c));
      gamma.b = checked_sub(gamma.b, checked_mul(static_cast<std::int64_t>(n), gamma.d));
      continue;
    }
    if (std::norm(z) < 1.0L - kBoundaryTolerance) {
      z = -1.0L / z;
      gamma = {-gamma.c, -gamma.d, gamma.a, gamma.b};
      continue;
    }
    if (reducer != nullptr) *reducer = gamma;
    return z;
  }
  throw InternalError("reduce: iteration cap reached");
}

namespace {

// Walks the geodesic orbit in increments of `step`, calling visit(t, d_M)
// at t = 0, step, 2 step, ... while t <= t_max.
template <class Visit>
void walk_geodesic(const SurfacePoint& x, double t_max, double step, Visit&& visit) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be > 0");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be >= 0");
  const auto count = static_cast<std::int64_t>(std::floor(t_max / step * (1.0 + 1e-12)));
  const GroupElement increment = exp_X(0.5 * step);
  SurfacePoint current = reduce(x.reduced);
  visit(0.0, height_distance(current));
  for (std::int64_t k = 1; k <= count; ++k) {
    current = reduce((current.reduced * increment).renormalized());
    visit(static_cast<double>(k) * step, height_distance(current));
  }
}

}  // namespace

DiophantineReport diophantine_check(const SurfacePoint& x, const DiophantineClass& cls,
                                    double t_max, double step) {
  if (!(t_max > 0.0)) throw std::invalid_argument("diophantine_check: t_max must be > 0");
  if (!(cls.A >= 0.0 && cls.A < 1.0) || !(cls.Q > 0.0 || cls.Q == 0.0)) {
    throw std::invalid_argument("diophantine_check: need 0 <= A < 1 and Q >= 0");
  }
  DiophantineReport report;
  report.max_excess = -std::numeric_limits<double>::infinity();
  walk_geodesic(x, t_max, step, [&](double t, double dm) {
    const double excess = dm - (cls.A * t + cls.Q);
    report.max_excess = std::max(report.max_excess, excess);
  });
  report.holds = report.max_excess <= 0.0;
  return report;
}

std::vector<double> loglaw_profile(const SurfacePoint& x, const std::vector<double>& horizons,
                                   double step) {
  if (horizons.empty()) return {};
  for (double T : horizons) {
    if (!(T >= std::numbers::e)) throw std::invalid_argument("loglaw: T must be >= e");
  }
  const double t_max = *std::max_element(horizons.begin(), horizons.end());
  std::vector<double> best(horizons.size(), 0.0);
  walk_geodesic(x, t_max, step, [&](double t, double dm) {
    if (t < step * (1.0 - 1e-12)) return;
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      if (t <= horizons[i] * (1.0 + 1e-12)) best[i] = std::max(best[i], dm);
    }
  });
  for (std::size_t i = 0; i < horizons.size(); ++i) best[i] /= std::log(horizons[i]);
  return best;
}

double loglaw_statistic(const SurfacePoint& x, double T, double step) {
  return loglaw_profile(x, {T}, step).front();
}

SurfacePoint sample_point(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double u = uniform01() - 0.5;
  // Inverse CDF of v^-2 on [1, 10].
  const double v = 1.0 / (1.0 - 0.9 * uniform01());
  const double theta = std::numbers::pi * uniform01();
  const double sv = std::sqrt(v);
  const GroupElement frame{sv, u / sv, 0.0, 1.0 / sv};
  const GroupElement rotation{std::cos(theta), -std::sin(theta), std::sin(theta),
                              std::cos(theta)};
  return reduce(frame * rotation);
}

double frame_angle(const GroupElement& g) {
  double theta = std::atan2(g.c, g.d);
  theta = std::fmod(theta, std::numbers::pi);
  if (theta < 0.0) theta += std::numbers::pi;
  return theta;
}

}  // namespace horolab
