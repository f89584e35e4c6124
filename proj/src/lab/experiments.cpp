#include "horolab/lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "horolab/cusp_forms.hpp"
#include "horolab/errors.hpp"
#include "horolab/lab/calibration.hpp"
#include "horolab/lab/parallel.hpp"
#include "horolab/rep_models.hpp"
#include "horolab/sparse_equidistribution.hpp"
#include "horolab/twisted_integrals.hpp"

#ifndef HOROLAB_COMMIT
#define HOROLAB_COMMIT "unknown"
#endif
#ifndef HOROLAB_COMMIT_DATE
#define HOROLAB_COMMIT_DATE "unknown"
#endif

namespace horolab::lab {

namespace {

using I64 = std::int64_t;

// Independent seed streams derived from the run seed.
constexpr std::uint64_t kSupSeedOffset = 1'000'000;
constexpr std::uint64_t kLipschitzSeedOffset = 2'000'000;
constexpr std::uint64_t kWidthSeedOffset = 500;
constexpr int kLipschitzSamples = 200;

std::uint64_t point_seed(const ExperimentConfig& cfg, std::size_t i) {
  return cfg.seed + static_cast<std::uint64_t>(i);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------- tau

void run_tau(const ExperimentConfig& cfg, ExperimentResult& out) {
  const I64 n_max = cfg.get_int("n_max");
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  const double tol = cfg.get_real("rel_tol");
  const CuspFormSpec spec;
  const QuadratureSpec quad;
  const QExpansionOracle oracle = tau_oracle(static_cast<int>(n_max));
  const auto estimates = parallel_map<ScalarIntegral>(
      static_cast<std::size_t>(n_max), cfg.jobs,
      [&](std::size_t i) { return cusp_coefficient_estimate(static_cast<int>(i + 1), spec, quad); });
  Table& t = out.table("coefficients",
                       {"n", "computed", "computed_imag", "oracle", "rel_err", "err_est", "pass"});
  for (I64 n = 1; n <= n_max; ++n) {
    const ScalarIntegral& e = estimates[static_cast<std::size_t>(n - 1)];
    const double ref = oracle.tau_double(static_cast<int>(n));
    const double rel = std::abs(e.value - ref) / std::abs(ref);
    t.add_row({n, e.value.real(), e.value.imag(), ref, rel, e.err_est, rel <= tol});
  }

  const auto periods = cfg.get_int_list("shift_periods");
  const double fraction = cfg.get_real("shift_fraction");
  const double shift_tol = cfg.get_real("shift_tol");
  Table& s = out.table("shift", {"period", "shift", "rel_diff", "tol", "pass"});
  for (I64 n : periods) {
    const double shift = fraction * static_cast<double>(n);
    const double d = closed_horocycle_shift_check(static_cast<int>(n), shift, spec, quad);
    s.add_row({n, shift, d, shift_tol, d <= shift_tol});
  }
}

// ---------------------------------------------------------- good-bound

void run_good_bound(const ExperimentConfig& cfg, ExperimentResult& out) {
  const I64 j_max = cfg.get_int("j_max");
  if (j_max < 4) throw ConfigError("j_max must be >= 4 for a slope fit");
  const CuspFormSpec spec;
  const QuadratureSpec quad;
  const QExpansionOracle oracle = tau_oracle(1 << j_max);
  const auto values = parallel_map<std::complex<double>>(
      static_cast<std::size_t>(j_max), cfg.jobs,
      [&](std::size_t i) { return cusp_coefficient(1 << (i + 1), spec, quad); });
  const double k = spec.weight;
  Table& t = out.table("coefficients", {"n", "computed", "oracle", "abs", "normalized"});
  std::vector<std::pair<double, double>> raw, normalized;
  for (I64 j = 1; j <= j_max; ++j) {
    const int n = 1 << j;
    const double a = std::abs(values[static_cast<std::size_t>(j - 1)]);
    // |a_n| e^{-2 pi} n^{1 - k/2} is the closed-horocycle twisted integral size.
    const double twisted = a * std::exp(-2.0 * std::numbers::pi) * std::pow(n, 1.0 - k / 2.0);
    raw.emplace_back(n, a);
    normalized.emplace_back(n, twisted);
    t.add_row({static_cast<I64>(n), values[static_cast<std::size_t>(j - 1)].real(),
               oracle.tau_double(n), a, twisted});
  }
  const ExponentFit fit = exponent_fit(raw);
  const ExponentFit fit_twisted = exponent_fit(normalized);
  const double bound = cfg.get_real("slope_max");
  const double bound_twisted = cfg.get_real("normalized_slope_max");
  Table& f = out.table("fit", {"quantity", "slope", "intercept", "residual_max", "reference_slope",
                               "slope_max", "pass"});
  f.add_row({std::string("abs_coefficient"), fit.slope, fit.intercept, fit.residual_max,
             (k - 1.0) / 2.0, bound, fit.slope <= bound});
  f.add_row({std::string("twisted_integral"), fit_twisted.slope, fit_twisted.intercept,
             fit_twisted.residual_max, 0.5, bound_twisted, fit_twisted.slope <= bound_twisted});
}

// ------------------------------------------------------------- scaling

void run_scaling(const ExperimentConfig& cfg, ExperimentResult& out) {
  const I64 points = cfg.get_int("points");
  const double lambda = cfg.get_real("lambda");
  const auto horizons = cfg.get_real_list("horizons");
  if (points < 1 || horizons.size() < 4) throw ConfigError("scaling: need points >= 1, 4 horizons");
  const Observable obs = cusp_observable(CuspFormSpec{});
  const QuadratureSpec quad;
  struct Cell2 {
    double value = 0.0, err = 0.0;
    bool converged = false;
  };
  const std::size_t n_h = horizons.size();
  const auto cells = parallel_map<Cell2>(
      static_cast<std::size_t>(points) * n_h, cfg.jobs, [&](std::size_t idx) {
        const SurfacePoint x = sample_point(point_seed(cfg, idx / n_h));
        const TwistedIntegral I = twisted_orbit_integral(x, obs, lambda, horizons[idx % n_h], quad);
        return Cell2{std::abs(I.value), I.err_est, I.converged};
      });
  Table& t = out.table("integrals", {"point_seed", "T", "abs_value", "err_est", "converged"});
  std::vector<double> mean(n_h, 0.0);
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const std::size_t p = idx / n_h, h = idx % n_h;
    t.add_row({static_cast<I64>(point_seed(cfg, p)), horizons[h], cells[idx].value,
               cells[idx].err, cells[idx].converged});
    mean[h] += cells[idx].value / static_cast<double>(points);
  }
  std::vector<std::pair<double, double>> samples;
  for (std::size_t h = 0; h < n_h; ++h) samples.emplace_back(horizons[h], mean[h]);
  const ExponentFit fit = exponent_fit(samples);
  const double bound = cfg.get_real("slope_max");
  Table& f = out.table("fit", {"lambda", "slope", "intercept", "residual_max", "slope_max", "pass"});
  f.add_row({lambda, fit.slope, fit.intercept, fit.residual_max, bound, fit.slope <= bound});
}

// ---------------------------------------------------------------- utau

void run_utau(const ExperimentConfig& cfg, ExperimentResult& out) {
  const auto nus = cfg.get_real_list("nus");
  const auto taus = cfg.get_real_list("taus");
  const I64 bumps = cfg.get_int("bumps");
  const double lambda = cfg.get_real("lambda");
  const double slack = cfg.get_real("bound_slack");
  const double iso_tol = cfg.get_real("isometry_tol");
  if (bumps < 1 || lambda == 0.0) throw ConfigError("utau: bumps >= 1 and lambda != 0 required");
  // Bumps inside I_lambda = [lambda - |lambda|/2, lambda + |lambda|/2].
  const double lo_end = lambda - std::abs(lambda) / 2.0;
  const double width = std::abs(lambda);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::pair<double, double>> supports;
  for (I64 b = 0; b < bumps; ++b) {
    const double a = lo_end + 0.8 * width * uniform01(rng);
    const double len = (0.1 + 0.9 * uniform01(rng)) * (lo_end + width - a);
    supports.emplace_back(a, a + len);
  }
  struct Job {
    Series series;
    cplx nu;
    double tau;
    std::size_t bump;
  };
  std::vector<Job> jobs;
  for (double nu : nus) {
    for (double tau : taus) {
      for (std::size_t b = 0; b < supports.size(); ++b) {
        jobs.push_back({Series::complementary, cplx(nu, 0.0), tau, b});
      }
    }
  }
  const double principal_nu = cfg.get_real("principal_nu");
  for (double tau : taus) {
    for (std::size_t b = 0; b < supports.size(); ++b) {
      jobs.push_back({Series::principal, cplx(0.0, principal_nu), tau, b});
    }
  }
  const auto ratios = parallel_map<double>(jobs.size(), cfg.jobs, [&](std::size_t i) {
    const Job& j = jobs[i];
    const auto [a, b] = supports[j.bump];
    const SpectralFunction f = make_spectral(j.series, j.nu, 1, profiles::bump(a, b));
    return l2nu_norm(u_tau(f, j.tau, lambda)) / l2nu_norm(f);
  });
  Table& t = out.table("ratios", {"series", "nu_re", "nu_im", "tau", "bump", "lo", "hi", "ratio",
                                  "lower", "upper", "pass"});
  const double lower = 1.0 / std::sqrt(3.0) - slack;
  const double upper = std::sqrt(3.0) + slack;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& j = jobs[i];
    const auto [a, b] = supports[j.bump];
    const bool principal = j.series == Series::principal;
    const double lo = principal ? 1.0 - iso_tol : lower;
    const double hi = principal ? 1.0 + iso_tol : upper;
    t.add_row({to_string(j.series), j.nu.real(), j.nu.imag(), j.tau, static_cast<I64>(j.bump), a,
               b, ratios[i], lo, hi, ratios[i] >= lo && ratios[i] <= hi});
  }
}

// --------------------------------------------------------------- coeqn

// Annihilated test family: vanishes at -lambda m.
Profile coeqn_family(const std::string& name, double lm) {
  if (name == "gaussian-zero") {
    const double half = 12.0;
    return profiles::product(profiles::polynomial({cplx(lm), cplx(1.0)}, -lm - half, -lm + half),
                             profiles::gaussian(-lm, 1.0));
  }
  return profiles::bump(-lm + 0.5, -lm + 1.5);  // "bump-offset": support avoids -lambda m
}

void run_coeqn(const ExperimentConfig& cfg, ExperimentResult& out) {
  const auto scales = cfg.get_real_list("scales");
  const auto lms = cfg.get_real_list("lambda_ms");
  const auto orders = cfg.get_int_list("orders");
  const cplx nu(0.0, cfg.get_real("principal_nu"));
  const std::vector<std::string> families = {"gaussian-zero", "bump-offset"};
  struct Job {
    std::size_t family;
    double lm, scale;
    int s;
  };
  std::vector<Job> jobs;
  for (std::size_t f = 0; f < families.size(); ++f) {
    for (double lm : lms) {
      for (I64 s : orders) {
        for (double scale : scales) jobs.push_back({f, lm, scale, static_cast<int>(s)});
      }
    }
  }
  struct Norms {
    double g = 0.0, f = 0.0;
  };
  const auto norms = parallel_map<Norms>(jobs.size(), cfg.jobs, [&](std::size_t i) {
    const Job& j = jobs[i];
    const SpectralFunction f =
        make_spectral(Series::principal, nu, 1, coeqn_family(families[j.family], j.lm));
    const SpectralFunction g = solve_flow_coeqn(f, TwistParams{j.lm, 1, j.scale});
    return Norms{foliated_norm(g, {0.0, j.s}, j.scale),
                 foliated_norm_upper(f, static_cast<double>(j.s), j.s + 1, j.scale)};
  });
  Table& t = out.table("ratios", {"family", "lambda_m", "scale", "s", "g_norm", "f_norm", "ratio"});
  std::vector<double> ratio(jobs.size());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& j = jobs[i];
    const double lm = std::abs(j.lm);
    ratio[i] = norms[i].g * std::cbrt(j.scale) * lm /
               ((1.0 + std::pow(lm, -j.s)) * norms[i].f);
    finite = finite && std::isfinite(ratio[i]) && ratio[i] > 0.0;
    lo = std::min(lo, ratio[i]);
    hi = std::max(hi, ratio[i]);
    t.add_row({families[j.family], j.lm, j.scale, static_cast<I64>(j.s), norms[i].g, norms[i].f,
               ratio[i]});
  }
  // Diagnostic only: spread over the rescaling time with the other parameters fixed.
  Table& d = out.table("scale_spread", {"family", "lambda_m", "s", "spread"});
  for (std::size_t i = 0; i < jobs.size(); i += scales.size()) {
    const auto [mn, mx] = std::minmax_element(ratio.begin() + static_cast<std::ptrdiff_t>(i),
                                              ratio.begin() + static_cast<std::ptrdiff_t>(i + scales.size()));
    d.add_row({families[jobs[i].family], jobs[i].lm, static_cast<I64>(jobs[i].s), *mx / *mn});
  }
  const double spread_max = cfg.get_real("spread_max");
  Table& s = out.table("spread", {"min_ratio", "max_ratio", "spread", "spread_max", "pass"});
  s.add_row({lo, hi, hi / lo, spread_max, finite && hi / lo <= spread_max});

  // Multiplier residuals away from the filled regions.
  const double tol = cfg.get_real("residual_tol");
  Table& r = out.table("residuals", {"equation", "lambda_m", "max_residual", "tol", "pass"});
  for (double lm : lms) {
    const SpectralFunction f =
        make_spectral(Series::principal, nu, 1, coeqn_family("gaussian-zero", lm));
    const SpectralFunction g = solve_flow_coeqn(f, TwistParams{lm, 1, 1.0});
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double xi = f.lo() + (f.hi() - f.lo()) * k / 200.0;
      if (std::abs(xi + lm) <= kSingularRadius) continue;
      const cplx rebuilt = cplx(0.0, 1.0) * (xi + lm) * g.value(xi);
      worst = std::max(worst, std::abs(rebuilt - f.value(xi)));
    }
    r.add_row({std::string("flow"), lm, worst, tol, worst <= tol});
  }
  const double L = cfg.get_real("map_period");
  const double period = 2.0 * std::numbers::pi / L;
  {
    const SpectralFunction f =
        make_spectral(Series::principal, nu, 1, profiles::bump(0.1 * period, 0.9 * period));
    const SpectralFunction g = solve_map_coeqn(f, L);
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double xi = f.lo() + (f.hi() - f.lo()) * k / 200.0;
      const cplx rebuilt = (std::exp(cplx(0.0, L * xi)) - 1.0) * g.value(xi);
      worst = std::max(worst, std::abs(rebuilt - f.value(xi)));
    }
    r.add_row({std::string("map"), 0.0, worst, tol, worst <= tol});
  }
}

// ------------------------------------------------------------- returns

struct ReturnRun {
  double c = 1.0;
  std::vector<ReturnEvent> events;
};

ReturnRun detect_returns(const SurfacePoint& x, double scale, double T) {
  const InjectivityEstimate est = injectivity_search(x, scale * T);
  if (est.unbounded) throw OutOfRegime("returns: unbounded injectivity estimate");
  return {est.c, find_beta_returns(x, scale, T, max_return_spacing(scale, est.c), est.c)};
}

void run_returns(const ExperimentConfig& cfg, const Calibration& cal, ExperimentResult& out) {
  const I64 points = cfg.get_int("points");
  const double scale = cfg.get_real("scale");
  const auto horizons = cfg.get_real_list("horizons");
  const std::size_t n_h = horizons.size();
  const auto runs = parallel_map<ReturnRun>(
      static_cast<std::size_t>(points) * n_h, cfg.jobs, [&](std::size_t idx) {
        return detect_returns(sample_point(point_seed(cfg, idx / n_h)), scale, horizons[idx % n_h]);
      });
  Table& counts = out.table("counts", {"point_seed", "T", "c", "beta", "nondegenerate", "bound",
                                       "pass", "degenerate", "degenerate_bound",
                                       "degenerate_pass"});
  Table& sep = out.table("separation",
                         {"point_seed", "T", "beta", "events", "min_gap", "threshold", "pass"});
  for (std::size_t idx = 0; idx < runs.size(); ++idx) {
    const I64 seed = static_cast<I64>(point_seed(cfg, idx / n_h));
    const double T = horizons[idx % n_h];
    const ReturnRun& run = runs[idx];
    for (const CountRow& row : count_bound_check(run.events, scale, T, cal)) {
      counts.add_row({seed, T, run.c, static_cast<I64>(row.beta),
                      static_cast<I64>(row.nondegenerate), row.bound, row.pass,
                      static_cast<I64>(row.degenerate), row.degenerate_bound, row.degenerate_pass});
      std::vector<ReturnEvent> level;
      for (const auto& e : run.events) {
        if (e.beta == row.beta && !e.degenerate) level.push_back(e);
      }
      const SeparationReport rep = separation_check(level, row.beta, scale, cal);
      sep.add_row({seed, T, static_cast<I64>(row.beta), static_cast<I64>(level.size()),
                   rep.min_gap, rep.threshold, rep.pass});
    }
  }

  const I64 width_points = cfg.get_int("width_points");
  const auto w_scales = cfg.get_real_list("width_scales");
  const auto w_horizons = cfg.get_real_list("width_horizons");
  struct WidthCell {
    double c = 1.0, integral = 0.0, reference = 0.0;
    std::size_t events = 0;
  };
  const std::size_t grid = w_scales.size() * w_horizons.size();
  const auto cells = parallel_map<WidthCell>(
      static_cast<std::size_t>(width_points) * grid, cfg.jobs, [&](std::size_t idx) {
        const SurfacePoint x = sample_point(cfg.seed + kWidthSeedOffset + idx / grid);
        const double S = w_scales[(idx % grid) / w_horizons.size()];
        const double T = w_horizons[idx % w_horizons.size()];
        const ReturnRun run = detect_returns(x, S, T);
        const WidthProfile w = width_integral(x, S, T, run.events, run.c);
        return WidthCell{run.c, w.integral, width_reference(S, T, run.c), run.events.size()};
      });
  Table& wt = out.table("width", {"point_seed", "scale", "T", "c", "events", "integral",
                                  "reference", "ratio"});
  std::vector<double> K(grid, 0.0);
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const std::size_t g = idx % grid;
    const double S = w_scales[g / w_horizons.size()];
    const double T = w_horizons[g % w_horizons.size()];
    const double ratio = cells[idx].integral / cells[idx].reference;
    K[g] = std::max(K[g], ratio);
    wt.add_row({static_cast<I64>(cfg.seed + kWidthSeedOffset + idx / grid), S, T, cells[idx].c,
                static_cast<I64>(cells[idx].events), cells[idx].integral, cells[idx].reference,
                ratio});
  }
  Table& kt = out.table("width_fit", {"scale", "T", "K"});
  for (std::size_t g = 0; g < grid; ++g) {
    kt.add_row({w_scales[g / w_horizons.size()], w_horizons[g % w_horizons.size()], K[g]});
  }
  const auto [kmin, kmax] = std::minmax_element(K.begin(), K.end());
  const double spread_max = cfg.get_real("width_spread_max");
  Table& ks = out.table("width_spread", {"K_min", "K_max", "spread", "spread_max", "pass"});
  ks.add_row({*kmin, *kmax, *kmax / *kmin, spread_max, *kmax / *kmin <= spread_max});
}

// -------------------------------------------------------------- sparse

void run_sparse(const ExperimentConfig& cfg, ExperimentResult& out) {
  const I64 points = cfg.get_int("points");
  const double delta = cfg.get_real("delta");
  const I64 n_small = cfg.get_int("n_small");
  const I64 n_large = cfg.get_int("n_large");
  const double eps = cfg.get_real("eps");
  const CuspFormSpec spec;
  const double sup = empirical_sup(cusp_observable(spec), static_cast<int>(cfg.get_int("sup_samples")),
                                   cfg.seed + kSupSeedOffset);
  const Observable obs = cusp_observable(spec, sup);
  const double lip = empirical_lipschitz(obs, kLipschitzSamples, cfg.seed + kLipschitzSeedOffset);

  struct Decay {
    double small = 0.0, large = 0.0, progression = 0.0;
  };
  const auto decay = parallel_map<Decay>(static_cast<std::size_t>(points), cfg.jobs, [&](std::size_t i) {
    const SurfacePoint x = sample_point(point_seed(cfg, i));
    return Decay{shah_average(obs, x, delta, n_small).average,
                 shah_average(obs, x, delta, n_large).average,
                 progression_vs_sparse(obs, x, delta, eps, n_large)};
  });
  const double ratio = cfg.get_real("decay_ratio");
  const double floor = cfg.get_real("decay_floor");
  Table& t = out.table("decay", {"point_seed", "delta", "n_small", "average_small", "n_large",
                                 "average_large", "threshold", "pass"});
  const BlockDecomposition blocks = venkatesh_blocks(n_large, delta, eps);
  const double lin = max_linearization_error(blocks);
  const double bound = 10.0 * std::pow(static_cast<double>(n_large), -2.0 * eps * (1.0 - eps)) * lip;
  Table& p = out.table("progression", {"point_seed", "N", "eps", "blocks", "max_linearization",
                                       "value", "lipschitz", "bound", "pass"});
  for (std::size_t i = 0; i < decay.size(); ++i) {
    const I64 seed = static_cast<I64>(point_seed(cfg, i));
    const double threshold = std::max(ratio * std::abs(decay[i].small), floor);
    t.add_row({seed, delta, n_small, decay[i].small, n_large, decay[i].large, threshold,
               std::abs(decay[i].large) <= threshold});
    p.add_row({seed, n_large, eps, static_cast<I64>(blocks.starts.size()), lin,
               decay[i].progression, lip, bound, decay[i].progression <= bound});
  }

  const I64 map_points = cfg.get_int("map_points");
  const double L = cfg.get_real("map_step");
  const I64 j_min = cfg.get_int("map_log2_min");
  const I64 j_max = cfg.get_int("map_log2_max");
  if (j_max - j_min < 3) throw ConfigError("sparse: need at least 4 map sizes");
  const std::size_t n_j = static_cast<std::size_t>(j_max - j_min + 1);
  const auto diffs = parallel_map<double>(
      static_cast<std::size_t>(map_points) * n_j, cfg.jobs, [&](std::size_t idx) {
        const SurfacePoint x = sample_point(point_seed(cfg, idx / n_j));
        return map_sum_vs_flow(obs, x, L, I64{1} << (j_min + static_cast<I64>(idx % n_j)));
      });
  Table& m = out.table("map_sum", {"point_seed", "L", "N", "value"});
  std::vector<double> mean(n_j, 0.0);
  for (std::size_t idx = 0; idx < diffs.size(); ++idx) {
    const I64 N = I64{1} << (j_min + static_cast<I64>(idx % n_j));
    m.add_row({static_cast<I64>(point_seed(cfg, idx / n_j)), L, N, diffs[idx]});
    mean[idx % n_j] += diffs[idx] / static_cast<double>(map_points);
  }
  std::vector<std::pair<double, double>> samples;
  for (std::size_t j = 0; j < n_j; ++j) {
    samples.emplace_back(static_cast<double>(I64{1} << (j_min + static_cast<I64>(j))), mean[j]);
  }
  const ExponentFit fit = exponent_fit(samples);
  const double slope_max = cfg.get_real("map_slope_max");
  Table& f = out.table("map_fit", {"L", "slope", "intercept", "residual_max", "slope_max", "pass"});
  f.add_row({L, fit.slope, fit.intercept, fit.residual_max, slope_max, fit.slope <= slope_max});
}

// -------------------------------------------------------------- loglaw

void run_loglaw(const ExperimentConfig& cfg, ExperimentResult& out) {
  const I64 points = cfg.get_int("points");
  auto horizons = cfg.get_real_list("horizons");
  std::sort(horizons.begin(), horizons.end());
  const double step = cfg.get_real("step");
  const double band_horizon = cfg.get_real("band_horizon");
  if (std::find(horizons.begin(), horizons.end(), band_horizon) == horizons.end()) {
    throw ConfigError("loglaw: band_horizon must be one of the horizons");
  }
  const auto stats = parallel_map<std::vector<double>>(
      static_cast<std::size_t>(points), cfg.jobs,
      [&](std::size_t i) { return loglaw_profile(sample_point(point_seed(cfg, i)), horizons, step); });
  Table& t = out.table("statistics", {"point_seed", "horizon", "statistic"});
  std::vector<std::vector<double>> columns(horizons.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      t.add_row({static_cast<I64>(point_seed(cfg, i)), horizons[h], stats[i][h]});
      columns[h].push_back(stats[i][h]);
    }
  }
  Table& m = out.table("medians", {"horizon", "median"});
  std::vector<double> med;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    med.push_back(median(columns[h]));
    m.add_row({horizons[h], med.back()});
  }
  const double lo = cfg.get_real("band_lo");
  const double hi = cfg.get_real("band_hi");
  const double tol = cfg.get_real("growth_tol");
  const std::size_t b = static_cast<std::size_t>(
      std::find(horizons.begin(), horizons.end(), band_horizon) - horizons.begin());
  Table& c = out.table("checks", {"check", "value", "limit", "pass"});
  c.add_row({std::string("band_lower"), med[b], lo, med[b] >= lo});
  c.add_row({std::string("band_upper"), med[b], hi, med[b] <= hi});
  const double growth = med.back() - med.front();
  c.add_row({std::string("slow_growth"), growth, tol, growth <= tol});
}

// ----------------------------------------------------------- calibrate

void run_calibrate(const ExperimentConfig& cfg, ExperimentResult& out) {
  CalibrationPlan plan;
  plan.box_points = static_cast<int>(cfg.get_int("box_points"));
  plan.thick_height = cfg.get_real("thick_height");
  plan.u_samples = static_cast<int>(cfg.get_int("u_samples"));
  plan.return_points = static_cast<int>(cfg.get_int("return_points"));
  plan.scale = cfg.get_real("scale");
  plan.horizons = cfg.get_real_list("horizons");
  plan.seed = cfg.seed;
  plan.date = cfg.get_text("date").empty() ? HOROLAB_COMMIT_DATE : cfg.get_text("date");
  plan.commit = cfg.get_text("commit").empty() ? HOROLAB_COMMIT : cfg.get_text("commit");
  plan.jobs = cfg.jobs;
  const CalibrationRun run = calibrate(plan);

  Table& b = out.table("box", {"point_seed", "height", "box_scale", "normalized"});
  for (const auto& s : run.box) {
    b.add_row({static_cast<I64>(s.seed), s.height, s.scale, s.normalized});
  }
  Table& d = out.table("degenerate", {"point_seed", "T", "beta", "degenerate", "unit_bound"});
  for (const auto& s : run.degenerate) {
    d.add_row({static_cast<I64>(s.seed), s.T, static_cast<I64>(s.beta),
               static_cast<I64>(s.degenerate), s.unit_bound});
  }
  const bool in_unit = run.cal.C_Gamma > 0.0 && run.cal.C_Gamma < 1.0;
  Table& c = out.table("constants", {"C_Gamma", "C_Gamma_prime", "calibration_seed", "pass"});
  c.add_row({run.cal.C_Gamma, run.cal.C_Gamma_prime, static_cast<I64>(run.cal.seed), in_unit});

  const std::filesystem::path path = calibration_output_path(cfg);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << format_calibration(run.cal);
  out.messages.push_back("calibration written to " + path.string());
}

}  // namespace

std::filesystem::path calibration_output_path(const ExperimentConfig& config) {
  const std::string& p = config.get_text("output");
  return p.empty() ? config.out_dir / "calibration.txt" : std::filesystem::path(p);
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<Calibration>& cal) {
  ExperimentResult result;
  result.id = config.id;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (config.id == "tau") {
      run_tau(config, result);
    } else if (config.id == "good-bound") {
      run_good_bound(config, result);
    } else if (config.id == "scaling") {
      run_scaling(config, result);
    } else if (config.id == "utau") {
      run_utau(config, result);
    } else if (config.id == "coeqn") {
      run_coeqn(config, result);
    } else if (config.id == "returns") {
      if (!cal) throw ConfigError("returns: a calibration file is required");
      run_returns(config, *cal, result);
    } else if (config.id == "sparse") {
      run_sparse(config, result);
    } else if (config.id == "loglaw") {
      run_loglaw(config, result);
    } else if (config.id == "calibrate") {
      run_calibrate(config, result);
    } else {
      throw ConfigError("unknown experiment id '" + config.id + "'");
    }
  } catch (const ResourceLimit& e) {
    result.partial = true;
    result.messages.push_back(std::string("resource limit: ") + e.what());
  } catch (const PrecisionLimit& e) {
    result.partial = true;
    result.messages.push_back(std::string("precision limit: ") + e.what());
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace horolab::lab
