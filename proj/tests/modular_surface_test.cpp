#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "horolab/modular_surface.hpp"
#include "support.hpp"

using namespace horolab;
using horolab::testing::random_element;

namespace {

// Frame over z = x + i y with angle 0.
GroupElement frame_over(std::complex<double> z) {
  const double sy = std::sqrt(z.imag());
  return {sy, z.real() / sy, 0.0, 1.0 / sy};
}

bool in_fundamental_domain(std::complex<double> z, double tol) {
  return std::abs(z.real()) <= 0.5 + tol && std::abs(z) >= 1.0 - tol;
}

// The reduced point has the largest imaginary part in its orbit:
// max over coprime (c, d) of Im z / |c z + d|^2, with d scanned around -c Re z.
double max_orbit_height(std::complex<double> z, int bound) {
  double best = 0.0;
  for (int c = 0; c <= bound; ++c) {
    const int center = static_cast<int>(std::lround(-c * z.real()));
    for (int d = center - bound; d <= center + bound; ++d) {
      if (std::gcd(c, d) != 1) continue;
      best = std::max(best, z.imag() / std::norm(double(c) * z + double(d)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("reduce leaves reduced points alone") {
  const SurfacePoint x = reduce(frame_over({0.3, 5.0}));
  CHECK(x.reducer == IntMatrix{});
  CHECK(std::abs(x.base_point() - std::complex<double>(0.3, 5.0)) < 1e-14);
}

TEST_CASE("reduce maps into the fundamental domain consistently with its reducer") {
  const std::complex<double> z(5.3, 0.8);
  const SurfacePoint x = reduce(frame_over(z));
  CHECK(x.reducer.det() == 1);
  CHECK(in_fundamental_domain(x.base_point(), kBoundaryTolerance));
  CHECK(std::abs(mobius(x.reducer, z) - x.base_point()) < 1e-10);
  CHECK(x.base_point().imag() == doctest::Approx(max_orbit_height(z, 20)).epsilon(1e-12));
}

TEST_CASE("reduce agrees with the orbit-height oracle on random points") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> re(-40.0, 40.0);
  std::uniform_real_distribution<double> logim(std::log(0.01), std::log(3.0));
  for (int i = 0; i < 200; ++i) {
    const std::complex<double> z(re(rng), std::exp(logim(rng)));
    const SurfacePoint x = reduce(frame_over(z));
    CHECK(in_fundamental_domain(x.base_point(), kBoundaryTolerance));
    CHECK(x.base_point().imag() == doctest::Approx(max_orbit_height(z, 120)).epsilon(1e-9));
    // reduced == reducer * raw as matrices.
    CHECK(relative_distance(x.reducer.to_real() * x.raw, x.reduced) < 1e-12);
  }
}

TEST_CASE("reduce is idempotent") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 10'000; ++i) {
    const SurfacePoint x = reduce(random_element(rng, 3.0));
    const SurfacePoint y = reduce(x.reduced);
    CHECK(relative_distance(x.reduced, y.reduced) < 1e-12);
  }
}

TEST_CASE("surface operations ignore the lattice representative") {
  std::mt19937_64 rng(23);
  const IntMatrix gammas[] = {{1, 7, 0, 1}, {0, -1, 1, 0}, {2, 1, 1, 1}, {5, 3, 3, 2}};
  for (int i = 0; i < 20; ++i) {
    const GroupElement g = random_element(rng, 1.5);
    const SurfacePoint x = reduce(g);
    for (const IntMatrix& gamma : gammas) {
      const SurfacePoint y = reduce(gamma.to_real() * g);
      CHECK(height_distance(y) == doctest::Approx(height_distance(x)).epsilon(1e-12));
      CHECK(std::abs(y.base_point() - x.base_point()) < 1e-9);
    }
  }
  const SurfacePoint x = sample_point(5);
  const SurfacePoint y = reduce(IntMatrix{2, 1, 1, 1}.to_real() * x.raw);
  // Rounding differences grow like e^t along the geodesic, so the horizon is short.
  CHECK(loglaw_statistic(x, 10.0, 0.05) ==
        doctest::Approx(loglaw_statistic(y, 10.0, 0.05)).epsilon(1e-9));
}

TEST_CASE("height distance uses the log of the reduced height") {
  CHECK(height_distance(reduce(GroupElement::identity())) == 0.0);
  const SurfacePoint x = reduce(geodesic(GroupElement::identity(), 3.0));
  CHECK(height_distance(x) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("cusp excursions grow at most at unit speed") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SurfacePoint x = sample_point(seed);
    const double d0 = height_distance(x);
    for (double t = 0.0; t <= 20.0; t += 0.25) {
      const double dt = height_distance(reduce(geodesic(x.reduced, t)));
      CHECK(dt - d0 <= std::abs(t) + 1.0);
    }
  }
}

TEST_CASE("diophantine check") {
  const SurfacePoint x = sample_point(3);
  const DiophantineReport loose = diophantine_check(x, {0.0, 20.0}, 10.0, 0.05);
  CHECK(loose.holds);
  const SurfacePoint high = reduce(geodesic(GroupElement::identity(), 2.0));
  const DiophantineReport tight = diophantine_check(high, {0.0, 0.0}, 1.0, 0.05);
  CHECK_FALSE(tight.holds);
  CHECK(tight.max_excess >= height_distance(high) - 1e-12);
  CHECK_THROWS_AS(diophantine_check(x, {1.5, 1.0}, 10.0, 0.05), std::invalid_argument);
}

TEST_CASE("loglaw statistic decays along a closed geodesic") {
  // Axis of the hyperbolic element [[2,1],[1,1]]: the orbit stays below
  // height sqrt(5)/2. Orbits separate like e^t numerically, so the horizons
  // stay short enough for the computed orbit to track the exact one.
  const double fixed_plus = (1.0 + std::sqrt(5.0)) / 2.0;
  const double fixed_minus = (1.0 - std::sqrt(5.0)) / 2.0;
  const double scale = std::sqrt(fixed_plus - fixed_minus);
  const GroupElement g{fixed_plus / scale, fixed_minus / scale, 1.0 / scale, 1.0 / scale};
  CHECK(g.det() == doctest::Approx(1.0));
  const SurfacePoint x = reduce(g);
  const double bound = std::log(std::sqrt(5.0) / 2.0) + 1e-6;
  const double short_run = loglaw_statistic(x, 10.0, 0.05);
  const double long_run = loglaw_statistic(x, 20.0, 0.05);
  CHECK(short_run * std::log(10.0) <= bound);
  CHECK(long_run * std::log(20.0) <= bound);
  CHECK(long_run < short_run);
  CHECK_THROWS_AS(loglaw_statistic(x, 2.0, 0.05), std::invalid_argument);
}

TEST_CASE("sample point is deterministic and reduced") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SurfacePoint x = sample_point(seed);
    const SurfacePoint y = sample_point(seed);
    CHECK(x.reduced == y.reduced);
    CHECK(in_fundamental_domain(x.base_point(), kBoundaryTolerance));
    CHECK(std::abs(x.reduced.det() - 1.0) < 1e-12);
    const double angle = frame_angle(x.reduced);
    CHECK(angle >= 0.0);
    CHECK(angle < 3.1415926535897932);
  }
}

TEST_CASE("reduce_upper_half_plane matches the frame reduction") {
  IntMatrix gamma;
  const auto z = reduce_upper_half_plane({-3.7L, 0.05L}, &gamma);
  CHECK(gamma.det() == 1);
  const auto w = mobius(gamma, std::complex<double>(-3.7, 0.05));
  CHECK(std::abs(std::complex<double>(z) - w) < 1e-10);
  CHECK(in_fundamental_domain(std::complex<double>(z), kBoundaryTolerance));
}

TEST_CASE("horocycle point reduces the long double product") {
  const SurfacePoint x = sample_point(9);
  const SurfacePoint y = horocycle_point(x, 123.25);
  const SurfacePoint z = reduce(horocycle(x.reduced, 123.25));
  CHECK(std::abs(y.base_point() - z.base_point()) < 1e-9);
}
