#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "horolab/twisted_integrals.hpp"

namespace horolab {

// Block starts for the linearized sparse sum.
// Invariants: starts[0] = floor(N^{1-eps}) + 1, starts strictly increasing,
// starts.back() <= N < starts.back() + floor(starts.back()^{(1-delta)/2-eps}),
// steps[j] = (1 + delta) starts[j]^delta.
struct BlockDecomposition {
  double delta = 0.0;
  double eps = 0.0;
  std::int64_t N = 0;
  std::vector<std::int64_t> starts;
  std::vector<double> steps;

  // Length of block j (indices starts[j] .. starts[j + 1] - 1); j < starts.size() - 1.
  std::int64_t length(std::size_t j) const { return starts[j + 1] - starts[j]; }
};

struct SparseRecord {
  std::int64_t N = 0;
  double average = 0.0;
  std::string observable;
  SurfacePoint x;
  double delta = 0.0;
};

// Orbit times above this are not resolved to the accuracy the reduction needs.
inline constexpr double kMaxOrbitTime = 1e12;

// sum_{i < n} term(i), split into a fixed number of contiguous chunks whose
// partial sums are combined pairwise. The result does not depend on `jobs`.
double deterministic_sum(std::int64_t n, const std::function<double(std::int64_t)>& term,
                         int jobs = 1);

// (1/N) sum_{n < N} obs(h_{n^{1+delta}} x).
SparseRecord shah_average(const Observable& obs, const SurfacePoint& x, double delta,
                          std::int64_t N, const std::string& observable_id = "", int jobs = 1);

BlockDecomposition venkatesh_blocks(std::int64_t N, double delta, double eps);

// |(N_j + k)^{1+delta} - N_j^{1+delta} - k (1 + delta) N_j^delta|.
double linearization_error(std::int64_t Nj, std::int64_t k, double delta);

// Largest linearization error over all blocks of the decomposition.
double max_linearization_error(const BlockDecomposition& blocks);

// (1/N) |sparse sum over [N_1, N_J) - sum of the block progressions|.
double progression_vs_sparse(const Observable& obs, const SurfacePoint& x, double delta,
                             double eps, std::int64_t N, int jobs = 1);

// |sum_{k < N} obs(h_{L k} x) - (1/L) int_0^{N L} obs(h_t x) dt|.
double map_sum_vs_flow(const Observable& obs, const SurfacePoint& x, double L, std::int64_t N,
                       const QuadratureSpec& quad = {}, int jobs = 1);

// max |obs| over `samples` points drawn by sample_point(seed + i).
double empirical_sup(const Observable& obs, int samples, std::uint64_t seed);

// max |obs(h_{step} y) - obs(y)| / step over sampled y and orbit offsets.
double empirical_lipschitz(const Observable& obs, int samples, std::uint64_t seed,
                           double step = 1e-4);

}  // namespace horolab
