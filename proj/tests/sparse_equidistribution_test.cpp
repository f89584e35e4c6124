#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "doctest.h"
#include "horolab/errors.hpp"
#include "horolab/sparse_equidistribution.hpp"

using namespace horolab;

TEST_CASE("deterministic sum does not depend on the thread count") {
  auto term = [](std::int64_t i) { return std::sin(0.001 * double(i)) / (1.0 + double(i)); };
  const double one = deterministic_sum(100'003, term, 1);
  for (int jobs : {2, 3, 8, 64, 100}) CHECK(deterministic_sum(100'003, term, jobs) == one);
  CHECK(deterministic_sum(0, term, 4) == 0.0);
  CHECK(deterministic_sum(5, [](std::int64_t i) { return double(i); }) == 10.0);
}

TEST_CASE("shah average of a constant is exactly one") {
  const Observable one = constant_observable(1.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (double delta : {0.0, 0.05, 0.3}) {
      for (std::int64_t N : {1, 7, 1000}) {
        CHECK(shah_average(one, sample_point(seed), delta, N).average == 1.0);
      }
    }
  }
}

TEST_CASE("shah average at delta zero is the time-one Birkhoff average") {
  const Observable obs = cusp_observable(CuspFormSpec{});
  const SurfacePoint x = sample_point(4);
  double sum = 0.0;
  for (int n = 0; n < 500; ++n) sum += obs(horocycle_point(x, double(n)));
  const SparseRecord rec = shah_average(obs, x, 0.0, 500, "lift", 3);
  CHECK(rec.average == doctest::Approx(sum / 500.0).epsilon(1e-12));
  CHECK(rec.N == 500);
  CHECK(rec.observable == "lift");
}

TEST_CASE("shah average refuses unresolvable orbit times") {
  const Observable one = constant_observable(1.0);
  CHECK_THROWS_AS(shah_average(one, sample_point(1), 0.9, 10'000'000), PrecisionLimit);
  CHECK_THROWS_AS(shah_average(one, sample_point(1), 1.0, 10), std::invalid_argument);
}

TEST_CASE("block decomposition") {
  const BlockDecomposition b = venkatesh_blocks(1'000'000, 0.05, 0.01);
  CHECK(b.starts.front() == 870964);
  CHECK(b.starts.size() == 217);
  const double gap_exp = (1.0 - 0.05) / 2.0 - 0.01;
  for (std::size_t j = 0; j < b.starts.size(); ++j) {
    CHECK(b.steps[j] == doctest::Approx(1.05 * std::pow(double(b.starts[j]), 0.05)));
    if (j + 1 < b.starts.size()) {
      CHECK(b.length(j) == static_cast<std::int64_t>(std::floor(std::pow(double(b.starts[j]), gap_exp))));
      CHECK(b.length(j) > 0);
    }
  }
  const std::int64_t last = b.starts.back();
  CHECK(last <= b.N);
  CHECK(b.N < last + static_cast<std::int64_t>(std::floor(std::pow(double(last), gap_exp))));
  // The blocks tile [N_1, N_J) exactly.
  std::int64_t covered = 0;
  for (std::size_t j = 0; j + 1 < b.starts.size(); ++j) covered += b.length(j);
  CHECK(covered == last - b.starts.front());

  const BlockDecomposition flat = venkatesh_blocks(1'000'000, 0.0, 0.001);
  for (std::size_t j = 0; j + 1 < flat.starts.size(); ++j) {
    CHECK(double(flat.length(j)) == doctest::Approx(std::pow(double(flat.starts[j]), 0.499)).epsilon(0.01));
  }
  CHECK_THROWS_AS(venkatesh_blocks(1000, 0.05, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(venkatesh_blocks(1000, 1.2, 0.1), std::invalid_argument);
}

TEST_CASE("linearization error") {
  CHECK(linearization_error(1000, 0, 0.05) == 0.0);
  const double direct = std::pow(105.0, 1.5) - std::pow(100.0, 1.5) - 5.0 * 1.5 * 10.0;
  CHECK(linearization_error(100, 5, 0.5) == doctest::Approx(direct).epsilon(1e-12));
  // Second-order behaviour: doubling k roughly quadruples the error.
  const double e1 = linearization_error(1'000'000, 100, 0.05);
  const double e2 = linearization_error(1'000'000, 200, 0.05);
  CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(1e-3));
  CHECK_THROWS_AS(linearization_error(10, 11, 0.05), std::invalid_argument);
  // Larger eps means shorter blocks and smaller linearization error.
  double previous = INFINITY;
  for (double eps : {0.01, 0.05, 0.1, 0.2}) {
    const double worst = max_linearization_error(venkatesh_blocks(1'000'000, 0.05, eps));
    CHECK(worst < previous);
    previous = worst;
  }
}

TEST_CASE("progression comparison") {
  const SurfacePoint x = sample_point(5);
  CHECK(progression_vs_sparse(constant_observable(2.0), x, 0.05, 0.02, 100'000) == 0.0);
  const Observable obs = cusp_observable(CuspFormSpec{});
  const double coarse = progression_vs_sparse(obs, x, 0.05, 0.02, 100'000);
  const double fine = progression_vs_sparse(obs, x, 0.05, 0.2, 100'000);
  CHECK(std::isfinite(coarse));
  CHECK(fine <= coarse + 1e-12);
}

TEST_CASE("map sum against the flow integral") {
  const SurfacePoint x = sample_point(6);
  CHECK(map_sum_vs_flow(constant_observable(3.0), x, 1.0, 256) < 1e-9);
  CHECK(map_sum_vs_flow(constant_observable(3.0), x, 0.5, 100) < 1e-9);
  CHECK_THROWS_AS(map_sum_vs_flow(constant_observable(1.0), x, 0.0, 10), std::invalid_argument);
}

TEST_CASE("empirical constants are deterministic") {
  const Observable obs = cusp_observable(CuspFormSpec{});
  const double sup = empirical_sup(obs, 500, 7);
  CHECK(sup > 0.0);
  CHECK(empirical_sup(obs, 500, 7) == sup);
  const double lip = empirical_lipschitz(obs, 50, 7);
  CHECK(lip > 0.0);
  CHECK(empirical_lipschitz(obs, 50, 7) == lip);
}
