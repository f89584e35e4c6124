// Acceptance runner: one PASS/FAIL line per criterion. Exits 0 only when the
// failing criteria are exactly the ones named by --expect-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "horolab/cusp_forms.hpp"
#include "horolab/group_flow.hpp"
#include "horolab/lab/calibration.hpp"
#include "horolab/lab/experiments.hpp"
#include "horolab/modular_surface.hpp"
#include "support.hpp"

using namespace horolab;
using namespace horolab::lab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

const Table& find_table(const ExperimentResult& r, const std::string& name) {
  for (const Table& t : r.tables)
    if (t.name == name) return t;
  throw std::runtime_error("missing table " + r.id + "/" + name);
}

std::size_t column(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw std::runtime_error("missing column " + t.name + "." + name);
  return static_cast<std::size_t>(it - t.columns.begin());
}

double number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw std::runtime_error("non-numeric cell");
}

// Largest value of a numeric column.
double column_max(const Table& t, const std::string& name) {
  const std::size_t k = column(t, name);
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& row : t.rows) m = std::max(m, number(row[k]));
  return m;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// Runs an experiment at its default parameters.
ExperimentResult run_default(const std::string& id, const std::optional<Calibration>& cal = {}) {
  const ExperimentConfig config = make_config(id, {}, 1);
  return run_experiment(config, cal);
}

bool within_budget(const ExperimentResult& r, double seconds) {
  return r.wall_seconds <= seconds;
}

Verdict tau_recovery(const ExperimentResult& r) {
  const Table& t = find_table(r, "coefficients");
  const bool ok = t.all_pass() && !r.partial && within_budget(r, 60.0);
  return {ok, fmt("max rel_err %.3g over n=1..20, %.1f s", column_max(t, "rel_err"), r.wall_seconds)};
}

Verdict good_bound(const ExperimentResult& r) {
  const Table& t = find_table(r, "fit");
  const bool ok = t.all_pass() && !r.partial && within_budget(r, 600.0);
  const std::size_t q = column(t, "quantity");
  const std::size_t s = column(t, "slope");
  std::string detail;
  for (const auto& row : t.rows)
    detail += std::get<std::string>(row[q]) + " slope " + fmt("%.4f", number(row[s])) + "; ";
  return {ok, detail + fmt("%.1f s", r.wall_seconds)};
}

Verdict utau_bounds(const ExperimentResult& r) {
  const Table& t = find_table(r, "ratios");
  const bool ok = t.all_pass() && !r.partial && within_budget(r, 60.0);
  return {ok, fmt("%.0f ratios checked, max ratio %.6f, %.1f s", static_cast<double>(t.rows.size()),
                  column_max(t, "ratio"), r.wall_seconds)};
}

Verdict coeqn_spread(const ExperimentResult& r) {
  const Table& t = find_table(r, "spread");
  const bool ok = t.all_pass() && !r.partial && within_budget(r, 120.0);
  return {ok, fmt("spread %.3g (limit %.0f), %.1f s", column_max(t, "spread"),
                  column_max(t, "spread_max"), r.wall_seconds)};
}

// Determinant, commutators, renormalization, automorphy and coeqn residuals.
Verdict algebraic_identities(const ExperimentResult& coeqn) {
  bool ok = true;
  std::string detail;

  OrbitWalker walker(GroupElement::identity());
  const GroupElement step = exp_U(1e-3) * exp_X(1e-4) * exp_V(-1e-3);
  for (int i = 0; i < 1'000'000; ++i) walker.step(step);
  const double det_err = std::abs(walker.current().det() - 1.0);
  ok = ok && det_err <= 1e-12;
  detail += fmt("det err %.2g; ", det_err);

  const Matrix2 xu = commutator(kGenX, kGenU);
  const Matrix2 xv = commutator(kGenX, kGenV);
  const Matrix2 uv = commutator(kGenU, kGenV);
  bool exact = true;
  for (int i = 0; i < 4; ++i)
    exact = exact && xu[i] == 2.0 * kGenU[i] && xv[i] == -2.0 * kGenV[i] && uv[i] == kGenX[i];
  ok = ok && exact;
  detail += exact ? "commutators exact; " : "commutators differ; ";

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ys(-20.0, 20.0);
  std::uniform_real_distribution<double> ts(-1e6, 1e6);
  double renorm_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GroupElement x = horolab::testing::random_element(rng, 1.0);
    const double y = ys(rng);
    const double t = ts(rng);
    const GroupElement lhs = geodesic(horocycle(geodesic(x, -y), t), y);
    renorm_err = std::max(renorm_err, relative_distance(lhs, horocycle(x, t * std::exp(-y))));
  }
  ok = ok && renorm_err <= 1e-12;
  detail += fmt("renormalization err %.2g; ", renorm_err);

  const CuspFormSpec spec;
  std::uniform_int_distribution<int> entry(-6, 6);
  double lift_err = 0.0;
  int pairs = 0;
  std::uint64_t seed = 1;
  while (pairs < 100) {
    const std::int64_t c = entry(rng);
    const std::int64_t d = entry(rng);
    if (std::gcd(c, d) != 1) continue;
    std::int64_t a = 0, b = 0;
    bool solved = false;
    for (std::int64_t u = -12; u <= 12 && !solved; ++u)
      for (std::int64_t v = -12; v <= 12 && !solved; ++v)
        if (u * d - v * c == 1) {
          a = u;
          b = v;
          solved = true;
        }
    if (!solved) continue;
    const IntMatrix gamma{a, b, c, d};
    const GroupElement g = sample_point(seed++).reduced * horolab::testing::random_element(rng, 0.5);
    const std::complex<double> base = lift(spec, g);
    const std::complex<double> moved = lift(spec, gamma.to_real() * g);
    lift_err = std::max(lift_err, std::abs(moved - base) / std::max(1e-300, std::abs(base)));
    ++pairs;
  }
  ok = ok && lift_err <= 1e-9;
  detail += fmt("lift automorphy err %.2g; ", lift_err);

  const Table& res = find_table(coeqn, "residuals");
  const double coeqn_err = column_max(res, "max_residual");
  ok = ok && res.all_pass() && coeqn_err <= 1e-12;
  detail += fmt("coeqn residual %.2g", coeqn_err);
  return {ok, detail};
}

Verdict shift_invariance(const ExperimentResult& r) {
  const Table& t = find_table(r, "shift");
  return {t.all_pass() && !r.partial,
          fmt("max rel_diff %.3g over periods 2, 3, 5", column_max(t, "rel_diff"))};
}

Verdict sparse_decay(const ExperimentResult& r) {
  const Table& t = find_table(r, "decay");
  const bool ok = t.all_pass() && !r.partial && within_budget(r, 300.0);
  return {ok, fmt("%.0f points, largest average at N=1e5 %.3g, %.1f s",
                  static_cast<double>(t.rows.size()), column_max(t, "average_large"), r.wall_seconds)};
}

Verdict return_counts(const ExperimentResult& r) {
  const Table& counts = find_table(r, "counts");
  const Table& sep = find_table(r, "separation");
  const bool ok = counts.all_pass() && sep.all_pass() && !r.partial && within_budget(r, 600.0);
  return {ok, fmt("%.0f count rows, %.0f separation rows, %.1f s",
                  static_cast<double>(counts.rows.size()), static_cast<double>(sep.rows.size()),
                  r.wall_seconds)};
}

Verdict average_width(const ExperimentResult& r) {
  const Table& t = find_table(r, "width_spread");
  return {t.all_pass() && !r.partial,
          fmt("K in [%.3g, %.3g], spread %.3g", column_max(t, "K_min"), column_max(t, "K_max"),
              column_max(t, "spread"))};
}

Verdict map_exponent(const ExperimentResult& r) {
  const Table& t = find_table(r, "map_fit");
  return {t.all_pass() && !r.partial,
          fmt("slope %.4f (limit %.4f)", column_max(t, "slope"), column_max(t, "slope_max"))};
}

Verdict log_law(const ExperimentResult& r) {
  const Table& t = find_table(r, "checks");
  const std::size_t name = column(t, "check");
  const std::size_t value = column(t, "value");
  std::string detail;
  for (const auto& row : t.rows)
    detail += std::get<std::string>(row[name]) + " " + fmt("%.4f", number(row[value])) + "; ";
  return {t.all_pass() && !r.partial, detail + fmt("%.1f s", r.wall_seconds)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"horolab acceptance runner"};
  std::vector<int> expected_failures;
  std::vector<int> only;
  app.add_option("--expect-fail", expected_failures, "criteria known to fail");
  app.add_option("--only", only, "run a subset of criteria");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected(only.begin(), only.end());
  auto wanted = [&](std::initializer_list<int> ids) {
    if (selected.empty()) return true;
    return std::any_of(ids.begin(), ids.end(), [&](int id) { return selected.count(id) > 0; });
  };

  // Shared runs; each experiment is executed at most once.
  std::map<std::string, ExperimentResult> runs;
  auto run = [&](const std::string& id) -> const ExperimentResult& {
    auto it = runs.find(id);
    if (it != runs.end()) return it->second;
    std::optional<Calibration> cal;
    if (id == "returns") cal = load_calibration(calibration_path());
    return runs.emplace(id, run_default(id, cal)).first->second;
  };

  struct Criterion {
    int id;
    std::string name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "tau recovery", [&] { return tau_recovery(run("tau")); }},
      {2, "coefficient growth bound", [&] { return good_bound(run("good-bound")); }},
      {3, "scaling operator bounds", [&] { return utau_bounds(run("utau")); }},
      {4, "cohomological equation ratio stability", [&] { return coeqn_spread(run("coeqn")); }},
      {5, "exact algebraic identities", [&] { return algebraic_identities(run("coeqn")); }},
      {6, "closed horocycle shift invariance", [&] { return shift_invariance(run("tau")); }},
      {7, "sparse decay", [&] { return sparse_decay(run("sparse")); }},
      {8, "return counts and separation", [&] { return return_counts(run("returns")); }},
      {9, "average width", [&] { return average_width(run("returns")); }},
      {10, "map sum exponent", [&] { return map_exponent(run("sparse")); }},
      {11, "log law", [&] { return log_law(run("loglaw")); }},
  };

  std::set<int> failed;
  for (const Criterion& c : criteria) {
    if (!wanted({c.id})) continue;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) failed.insert(c.id);
    std::printf("criterion %d [%s] %s (%s)\n", c.id, c.name.c_str(), v.pass ? "PASS" : "FAIL",
                v.detail.c_str());
    std::fflush(stdout);
  }

  std::set<int> expected;
  for (int id : expected_failures)
    if (wanted({id})) expected.insert(id);
  const bool as_expected = failed == expected;
  std::printf("%zu failing, %s\n", failed.size(),
              as_expected ? "matches the expected set" : "differs from the expected set");
  return as_expected ? 0 : 1;
}
