#include "horolab/sparse_equidistribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <exception>
#include <mutex>
#include <thread>

#include "horolab/errors.hpp"

namespace horolab {

namespace {

// Chunk count is fixed so the summation tree is independent of thread count.
constexpr std::int64_t kChunks = 64;

long double sparse_time(std::int64_t n, double delta) {
  return std::pow(static_cast<long double>(n), 1.0L + delta);
}

void check_sparse_args(double delta, std::int64_t N) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("sparse: delta must be in [0,1)");
  if (N < 1) throw std::invalid_argument("sparse: N must be >= 1");
}

void check_time(long double t) {
  if (t > kMaxOrbitTime) throw PrecisionLimit("sparse: orbit time exceeds 1e12");
}

}  // namespace

double deterministic_sum(std::int64_t n, const std::function<double(std::int64_t)>& term,
                         int jobs) {
  if (n <= 0) return 0.0;
  const std::int64_t chunks = std::min(n, kChunks);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  auto run_chunk = [&](std::int64_t c) {
    const std::int64_t lo = n * c / chunks;
    const std::int64_t hi = n * (c + 1) / chunks;
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  };
  const int workers = static_cast<int>(std::clamp<std::int64_t>(jobs, 1, chunks));
  if (workers == 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::int64_t c = w; c < chunks; c += workers) run_chunk(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  for (std::size_t width = 1; width < partial.size(); width *= 2) {
    for (std::size_t i = 0; i + width < partial.size(); i += 2 * width) {
      partial[i] += partial[i + width];
    }
  }
  return partial[0];
}

SparseRecord shah_average(const Observable& obs, const SurfacePoint& x, double delta,
                          std::int64_t N, const std::string& observable_id, int jobs) {
  check_sparse_args(delta, N);
  check_time(sparse_time(N - 1, delta));
  const double total = deterministic_sum(
      N,
      [&](std::int64_t n) {
        return obs(horocycle_point(x, static_cast<double>(sparse_time(n, delta))));
      },
      jobs);
  SparseRecord rec;
  rec.N = N;
  rec.average = total / static_cast<double>(N);
  rec.observable = observable_id;
  rec.x = x;
  rec.delta = delta;
  return rec;
}

BlockDecomposition venkatesh_blocks(std::int64_t N, double delta, double eps) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("venkatesh_blocks: delta");
  if (!(eps > 0.0 && eps < (1.0 - delta) / 2.0)) {
    throw std::invalid_argument("venkatesh_blocks: eps must be in (0, (1-delta)/2)");
  }
  if (N < 1) throw std::invalid_argument("venkatesh_blocks: N must be >= 1");
  BlockDecomposition out;
  out.delta = delta;
  out.eps = eps;
  out.N = N;
  const double gap_exponent = (1.0 - delta) / 2.0 - eps;
  std::int64_t start =
      static_cast<std::int64_t>(std::floor(std::pow(static_cast<long double>(N), 1.0L - eps))) + 1;
  if (start > N) throw std::invalid_argument("venkatesh_blocks: N too small for eps");
  while (true) {
    out.starts.push_back(start);
    out.steps.push_back((1.0 + delta) * std::pow(static_cast<double>(start), delta));
    const auto gap = static_cast<std::int64_t>(
        std::floor(std::pow(static_cast<long double>(start), gap_exponent)));
    if (start + gap > N) break;
    start += gap;
  }
  return out;
}

double linearization_error(std::int64_t Nj, std::int64_t k, double delta) {
  if (Nj < 1 || k < 0 || k > Nj) throw std::invalid_argument("linearization_error: 0 <= k <= N_j");
  const long double n = static_cast<long double>(Nj);
  const long double ratio = static_cast<long double>(k) / n;
  const long double p = 1.0L + delta;
  // n^p ((1 + r)^p - 1 - p r), formed without cancelling the leading terms.
  const long double bracket = std::expm1(p * std::log1p(ratio)) - p * ratio;
  return static_cast<double>(std::fabs(std::pow(n, p) * bracket));
}

double max_linearization_error(const BlockDecomposition& blocks) {
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < blocks.starts.size(); ++j) {
    // Convex in k, so the last index of the block dominates.
    worst = std::max(worst, linearization_error(blocks.starts[j], blocks.length(j) - 1,
                                                blocks.delta));
  }
  return worst;
}

double progression_vs_sparse(const Observable& obs, const SurfacePoint& x, double delta,
                             double eps, std::int64_t N, int jobs) {
  const BlockDecomposition blocks = venkatesh_blocks(N, delta, eps);
  const std::int64_t first = blocks.starts.front();
  const std::int64_t last = blocks.starts.back();
  if (last > first) check_time(sparse_time(last - 1, delta));
  // Index i in [first, last) sits in exactly one block; both sums share that map.
  std::vector<std::size_t> block_of(static_cast<std::size_t>(last - first));
  for (std::size_t j = 0; j + 1 < blocks.starts.size(); ++j) {
    for (std::int64_t i = blocks.starts[j]; i < blocks.starts[j + 1]; ++i) {
      block_of[static_cast<std::size_t>(i - first)] = j;
    }
  }
  const double diff = deterministic_sum(
      last - first,
      [&](std::int64_t offset) {
        const std::int64_t n = first + offset;
        const std::size_t j = block_of[static_cast<std::size_t>(offset)];
        const std::int64_t k = n - blocks.starts[j];
        const long double linear = sparse_time(blocks.starts[j], delta) +
                                   static_cast<long double>(k) * blocks.steps[j];
        return obs(horocycle_point(x, static_cast<double>(sparse_time(n, delta)))) -
               obs(horocycle_point(x, static_cast<double>(linear)));
      },
      jobs);
  return std::fabs(diff) / static_cast<double>(N);
}

double map_sum_vs_flow(const Observable& obs, const SurfacePoint& x, double L, std::int64_t N,
                       const QuadratureSpec& quad, int jobs) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("map_sum_vs_flow: L > 0");
  if (N < 1) throw std::invalid_argument("map_sum_vs_flow: N >= 1");
  check_time(static_cast<long double>(L) * static_cast<long double>(N));
  const double sum = deterministic_sum(
      N, [&](std::int64_t k) { return obs(horocycle_point(x, L * static_cast<double>(k))); },
      jobs);
  const TwistedIntegral flow = orbit_integral(x, obs, L * static_cast<double>(N), quad);
  return std::fabs(sum - flow.value.real() / L);
}

double empirical_sup(const Observable& obs, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("empirical_sup: samples >= 1");
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    sup = std::max(sup, std::fabs(obs(sample_point(seed + static_cast<std::uint64_t>(i)))));
  }
  return sup;
}

double empirical_lipschitz(const Observable& obs, int samples, std::uint64_t seed, double step) {
  if (samples < 1 || !(step > 0.0)) throw std::invalid_argument("empirical_lipschitz");
  double lip = 0.0;
  for (int i = 0; i < samples; ++i) {
    const SurfacePoint y = sample_point(seed + static_cast<std::uint64_t>(i));
    for (double offset : {0.0, 0.25, 0.5, 0.75}) {
      const double a = obs(horocycle_point(y, offset));
      const double b = obs(horocycle_point(y, offset + step));
      lip = std::max(lip, std::fabs(b - a) / step);
    }
  }
  return lip;
}

}  // namespace horolab
