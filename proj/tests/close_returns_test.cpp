#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "horolab/close_returns.hpp"
#include "lattice_oracle.hpp"

using namespace horolab;

namespace {

const Calibration kCal{0.15539010624041835, 0.33232574286277183, 9001, "", ""};

double oracle_c(const SurfacePoint& x, double T) {
  const GroupElement h = geodesic(x.reduced, std::log(T));
  double best = 1.0;
  testing::enumerate_conjugates(h, testing::normalized_collision_box(), [&](const IntMatrix& m) {
    if (m.b == 0 && m.c == 0) return;  // +-identity
    best = std::max(best, collision_threshold(h.inverse() * m.to_real() * h));
  });
  return best;
}

}  // namespace

TEST_CASE("collision threshold of a pure V displacement") {
  const double e = std::exp(1.0);
  CHECK(collision_threshold(exp_V(0.5)) == doctest::Approx(4.0 * e));
  CHECK(collision_threshold(exp_V(-2.0)) == doctest::Approx(e));
  // A large U displacement cannot be absorbed by the box.
  CHECK(collision_threshold(exp_U(100.0)) == 0.0);
  // Zero V component inside the box collides for every c.
  CHECK(std::isinf(collision_threshold(exp_U(3.0))));
}

TEST_CASE("injectivity search matches the lattice enumeration") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const SurfacePoint x = sample_point(seed);
    for (double T : {1.0, 10.0}) {
      const InjectivityEstimate est = injectivity_search(x, T);
      CHECK_FALSE(est.unbounded);
      CHECK(est.c == doctest::Approx(oracle_c(x, T)).epsilon(1e-12));
    }
  }
}

TEST_CASE("injectivity estimates respect the geodesic upper bound") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const SurfacePoint x = sample_point(seed);
    for (double T : {1.0, 10.0}) {
      const double c = injectivity_search(x, T).c;
      const UpperBound ub = c_gamma_upper(x, T, std::log(T) + 1.0, kCal);
      CHECK(c >= 1.0);
      CHECK(c <= ub.bound);
    }
  }
  // Bounded height along the probe gives the bare constant.
  const SurfacePoint low = reduce(GroupElement{1.0, 0.0, 0.0, 1.0});
  const UpperBound ub = c_gamma_upper(low, 1.0, 0.0, kCal);
  CHECK(ub.bound == doctest::Approx(std::pow(10.0 / kCal.C_Gamma, 2)));
  CHECK_THROWS_AS(c_gamma_upper(low, 1.0, 1.0, Calibration{}), std::invalid_argument);
}

TEST_CASE("injectivity scale is covariant under geodesic rescaling") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const SurfacePoint x = sample_point(seed);
    const double y = 1.5;
    const SurfacePoint shifted = reduce(geodesic(x.reduced, y));
    const double T = 20.0;
    const double direct = injectivity_search(x, T).c;
    const double moved = injectivity_search(shifted, T * std::exp(-y)).c;
    CHECK(moved == doctest::Approx(direct).epsilon(1e-6));
  }
}

TEST_CASE("deep cusp points need larger injectivity scales") {
  double previous = 0.0;
  for (double height : {0.5, 1.5, 2.5}) {
    // Rotated frame so the horocycle leaves the cusp instead of wrapping it.
    const GroupElement rotation{std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7)};
    const SurfacePoint x = reduce(geodesic(exp_U(0.2), 2.0 * height) * rotation);
    const double c = injectivity_search(x, 1.0).c;
    CHECK(c >= previous);
    previous = c;
  }
  CHECK(previous > 10.0);
}

TEST_CASE("fundamental box scale shrinks in the cusp") {
  // Frames over i e^h sit at height distance exactly h.
  const SurfacePoint low = reduce(geodesic(GroupElement::identity(), 1.0));
  const SurfacePoint deep = reduce(geodesic(GroupElement::identity(), 4.0));
  const double rho_low = fund_box_scale(low);
  const double rho_deep = fund_box_scale(deep);
  CHECK(rho_low > 0.0);
  CHECK(rho_deep < rho_low);
  const SurfacePoint thick = sample_point(9001);
  CHECK(fund_box_scale(thick) * std::exp(height_distance(thick)) >= kCal.C_Gamma);
}

TEST_CASE("returns below the injectivity scale are absent") {
  const SurfacePoint x = sample_point(3);
  const double c = injectivity_search(x, 1.0).c;
  const std::vector<ReturnEvent> events =
      find_beta_returns(x, 1.0, 1.0, max_return_spacing(1.0, c), c);
  CHECK(events.empty());
}

TEST_CASE("detected returns respect their shells and pair up") {
  const SurfacePoint x = sample_point(2);
  const double T = 30.0;
  const double c = injectivity_search(x, T).c;
  const double dt = max_return_spacing(1.0, c);
  const std::vector<ReturnEvent> events = find_beta_returns(x, 1.0, T, dt, c);
  REQUIRE_FALSE(events.empty());
  for (const ReturnEvent& e : events) {
    CHECK(std::abs(e.z) * c <= std::exp(-e.beta) * (1.0 + 1e-9));
    CHECK(std::abs(e.z) * c > std::exp(-(e.beta + 1)) * (1.0 - 1e-9));
    CHECK(e.degenerate == (std::abs(e.t0 - e.t1) < dt));
    // x h_{t1} = x h_{t0} v_z.
    const GroupElement lhs = horocycle(x.reduced, e.t1);
    const GroupElement rhs = horocycle(x.reduced, e.t0) * exp_V(e.z);
    CHECK(std::abs(reduce(lhs).base_point() - reduce(rhs).base_point()) < 1e-6);
  }
  // Swapped times appear too, within the sampling resolution.
  for (const ReturnEvent& e : events) {
    if (e.degenerate || std::abs(e.t0) > 8.0 * T || std::abs(e.t1) > 8.0 * T) continue;
    const bool mirrored = std::any_of(events.begin(), events.end(), [&](const ReturnEvent& f) {
      return f.beta == e.beta && std::abs(f.t0 - e.t1) <= 2.0 * dt &&
             std::abs(f.t1 - e.t0) <= 2.0 * dt;
    });
    CHECK(mirrored);
  }
}

TEST_CASE("separation check") {
  CHECK(separation_check({}, 0, 1.0, kCal).pass);
  CHECK(separation_check({ReturnEvent{0.0, 5.0, 0.5, 0, false}}, 0, 1.0, kCal).pass);
  const std::vector<ReturnEvent> close = {{0.0, 5.0, 0.5, 0, false}, {0.01, 5.01, 0.5, 0, false}};
  const SeparationReport r = separation_check(close, 0, 1.0, kCal);
  CHECK_FALSE(r.pass);
  CHECK(r.min_gap == doctest::Approx(0.01));
  CHECK(r.threshold == doctest::Approx(1.0 / (2.0 * kCal.C_Gamma)));
}

TEST_CASE("count bounds") {
  const auto rows = count_bound_check({}, 1.0, 30.0, kCal);
  CHECK(static_cast<int>(rows.size()) == max_return_beta(1.0, 30.0) + 1);
  for (const CountRow& row : rows) {
    CHECK(row.pass);
    CHECK(row.degenerate_pass);
    CHECK(row.bound == doctest::Approx(400.0 * kCal.C_Gamma * kCal.C_Gamma *
                                       std::exp(-2.0 * row.beta) * 900.0));
  }
}

TEST_CASE("width integral closed forms") {
  const SurfacePoint x = sample_point(1);
  const double c = 1.5, T = 100.0;
  const double baseline = std::pow(100.0 * c, 2);
  CHECK(width_integral(x, 1.0, T, {}, c).integral == doctest::Approx(baseline));
  // One beta = 2 event at S = 1: the side is pinched to e^{-2}/(100 c) for
  // |t - t0| <= 1 and grows linearly out to |t - t0| = e^2.
  const double e2 = std::exp(2.0);
  const ReturnEvent event{50.0, 60.0, 0.0, 2, false};
  const double expected = baseline * (T + 4.0 * e2 * e2 - 4.0 * e2) / T;
  CHECK(width_integral(x, 1.0, T, {event}, c).integral == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(width_integral(x, 1.0, T, {}, 0.5), std::invalid_argument);
}

TEST_CASE("width integral is monotone in the events") {
  const SurfacePoint x = sample_point(1);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> times(-5.0, 45.0);
  std::uniform_int_distribution<int> betas(0, 3);
  std::vector<ReturnEvent> events;
  double previous = width_integral(x, 2.0, 40.0, events, 2.0).integral;
  for (int i = 0; i < 30; ++i) {
    events.push_back({times(rng), 0.0, 0.0, betas(rng), false});
    const double current = width_integral(x, 2.0, 40.0, events, 2.0).integral;
    CHECK(current >= previous * (1.0 - 1e-14));
    previous = current;
  }
}
