#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "horolab/errors.hpp"
#include "horolab/twisted_integrals.hpp"

using namespace horolab;

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::complex<double> constant_closed_form(double lambda, double T) {
  return (std::exp(kI * (lambda * T)) - 1.0) / (kI * lambda);
}

}  // namespace

TEST_CASE("twisted integral of a constant") {
  const SurfacePoint x = sample_point(4);
  const QuadratureSpec quad;
  const Observable one = constant_observable(1.0);
  const TwistedIntegral full = twisted_orbit_integral(x, one, 1.0, 6.0 * std::numbers::pi, quad);
  CHECK(std::abs(full.value) < 1e-9);
  for (double lambda : {0.3, -1.7, 5.0}) {
    const TwistedIntegral I = twisted_orbit_integral(x, one, lambda, 13.1, quad);
    CHECK(I.converged);
    CHECK(std::abs(I.value - constant_closed_form(lambda, 13.1)) < 1e-9);
  }
  CHECK_THROWS_AS(twisted_orbit_integral(x, one, 0.0, 1.0, quad), UseUntwistedPath);
}

TEST_CASE("cusp observable integral is self-convergent") {
  const SurfacePoint x = sample_point(2);
  const Observable obs = cusp_observable(CuspFormSpec{});
  QuadratureSpec quad;
  const TwistedIntegral coarse = twisted_orbit_integral(x, obs, 1.0, 100.0, quad);
  quad.min_panels_per_period *= 2;
  const TwistedIntegral fine = twisted_orbit_integral(x, obs, 1.0, 100.0, quad);
  CHECK(coarse.converged);
  CHECK(std::abs(coarse.value - fine.value) <= 1e-8 * std::max(1.0, std::abs(fine.value)));
  // Tightening the tolerance moves the value by less than the reported error.
  QuadratureSpec tight;
  tight.rel_tol = 1e-11;
  const TwistedIntegral tighter = twisted_orbit_integral(x, obs, 1.0, 100.0, tight);
  CHECK(std::abs(tighter.value - coarse.value) <= coarse.err_est + 1e-12);
}

TEST_CASE("twisted integrals are additive along the orbit") {
  const SurfacePoint x = sample_point(6);
  const Observable obs = cusp_observable(CuspFormSpec{});
  const QuadratureSpec quad;
  const double lambda = 0.8, T1 = 17.0, T2 = 23.5;
  const TwistedIntegral whole = twisted_orbit_integral(x, obs, lambda, T1 + T2, quad);
  const TwistedIntegral first = twisted_orbit_integral(x, obs, lambda, T1, quad);
  const TwistedIntegral second =
      twisted_orbit_integral(horocycle_point(x, T1), obs, lambda, T2, quad);
  const std::complex<double> joined = first.value + std::exp(kI * (lambda * T1)) * second.value;
  CHECK(std::abs(whole.value - joined) <=
        1e-8 * std::max(1.0, std::abs(whole.value)) + whole.err_est + first.err_est + second.err_est);
}

TEST_CASE("twisted integrals rescale through the geodesic flow") {
  // int_0^T e^{i lambda t} f(h_t x) dt
  //   = |lambda|^{-1} int_0^{|lambda| T} e^{i sign(lambda) t} f(x a_{-y} h_t a_y) dt,
  // y = log |lambda|, since a_{-y} h_t a_y = h_{t / |lambda|}.
  const SurfacePoint x = sample_point(8);
  const Observable obs = cusp_observable(CuspFormSpec{});
  const QuadratureSpec quad;
  const double T = 30.0;
  for (double lambda : {0.1, 0.5}) {
    const double y = std::log(lambda);
    const TwistedIntegral direct = twisted_orbit_integral(x, obs, lambda, T, quad);
    const OrbitPath conjugated = [&](double t) {
      return reduce(geodesic(horocycle(geodesic(x.reduced, -y), t), y));
    };
    const TwistedIntegral rescaled = twisted_path_integral(conjugated, obs, 1.0, lambda * T, quad);
    const std::complex<double> rhs = rescaled.value / lambda;
    CHECK(std::abs(direct.value - rhs) <=
          1e-8 * std::max(1.0, std::abs(direct.value)) + direct.err_est + rescaled.err_est / lambda);
  }
}

TEST_CASE("cusp coefficients recover tau") {
  const CuspFormSpec spec;
  const QuadratureSpec quad;
  CHECK(std::abs(cusp_coefficient(1, spec, quad) - 1.0) < 1e-6);
  CHECK(std::abs(cusp_coefficient(2, spec, quad) + 24.0) < 1e-4);
  CHECK(std::abs(cusp_coefficient(5, spec, quad) - 4830.0) < 4830.0 * 1e-6);
}

TEST_CASE("closed horocycle shift invariance") {
  const CuspFormSpec spec;
  const QuadratureSpec quad;
  CHECK(closed_horocycle_shift_check(3, 0.0, spec, quad) == 0.0);
  CHECK(closed_horocycle_shift_check(3, 3.0, spec, quad) < 1e-8);
  CHECK(closed_horocycle_shift_check(3, 0.37 * 3, spec, quad) < 1e-8);
}

TEST_CASE("exponent fit recovers exact power laws") {
  for (double slope : {0.5, 5.0 / 6.0}) {
    std::vector<std::pair<double, double>> samples;
    for (double T : {10.0, 20.0, 40.0, 80.0, 160.0}) samples.emplace_back(T, 3.0 * std::pow(T, slope));
    const ExponentFit fit = exponent_fit(samples);
    CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-12));
    CHECK(fit.samples == 5);
    CHECK(fit.residual_max < 1e-12);
  }
  CHECK_THROWS_AS(exponent_fit({{1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}, {4.0, 2.0}}),
                  std::invalid_argument);
}

TEST_CASE("small lambda identity") {
  const SurfacePoint x = sample_point(10);
  const QuadratureSpec quad;
  CHECK(small_lambda_identity_check(x, constant_observable(0.0), 0.01, 100.0, quad) == 0.0);
  CHECK(small_lambda_identity_check(x, constant_observable(1.0), 0.01, 100.0, quad) < 1e-9);
  const Observable obs = cusp_observable(CuspFormSpec{});
  CHECK(small_lambda_identity_check(x, obs, 0.01, 100.0, quad) <= 1e-7);
  CHECK_THROWS_AS(small_lambda_identity_check(x, obs, 1.0, 100.0, quad), OutOfRegime);
}

TEST_CASE("scalar twisted integral") {
  const QuadratureSpec quad;
  const ScalarIntegral I = twisted_scalar_integral(
      [](double t) { return std::complex<double>(t, 0.0); }, 2.0, 0.0, 5.0, quad);
  // int_0^5 t e^{2 i t} dt by parts.
  const std::complex<double> e = std::exp(kI * 10.0);
  const std::complex<double> ref = 5.0 * e / (2.0 * kI) + (e - 1.0) / 4.0;
  CHECK(std::abs(I.value - ref) < 1e-12);
}
