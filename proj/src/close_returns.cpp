#include "horolab/close_returns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <tuple>
#include <utility>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "horolab/errors.hpp"

namespace horolab {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoxTime = 10.0;  // t-range of the box in units of T
constexpr int kWordLength = 4;
constexpr double kHashSpacing = 0.1;  // coarsest hyperbolic orbit spacing fed to the hash

struct IntMatrixHash {
  std::size_t operator()(const IntMatrix& m) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t v : {m.a, m.b, m.c, m.d}) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

IntMatrix negate(const IntMatrix& m) { return {-m.a, -m.b, -m.c, -m.d}; }

// Representative of {m, -m} with the first nonzero entry of (c, d) positive.
IntMatrix sign_canonical(const IntMatrix& m) {
  if (m.c < 0 || (m.c == 0 && m.d < 0)) return negate(m);
  return m;
}

bool is_plus_minus_identity(const IntMatrix& m) {
  return m.b == 0 && m.c == 0 && ((m.a == 1 && m.d == 1) || (m.a == -1 && m.d == -1));
}

IntMatrix translation(std::int64_t k) { return {1, k, 0, 1}; }

// Words of bounded length in S, T, T^-1, one per tile modulo translation.
const std::vector<IntMatrix>& boundary_words() {
  static const std::vector<IntMatrix> words = [] {
    const IntMatrix gens[3] = {{0, -1, 1, 0}, {1, 1, 0, 1}, {1, -1, 0, 1}};
    std::vector<IntMatrix> all{IntMatrix{}};
    std::vector<IntMatrix> frontier{IntMatrix{}};
    for (int len = 0; len < kWordLength; ++len) {
      std::vector<IntMatrix> next;
      for (const IntMatrix& w : frontier) {
        for (const IntMatrix& g : gens) next.push_back(g * w);
      }
      all.insert(all.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
    // Two words give the same tile modulo translation iff they agree up to
    // sign after left multiplication by a translation, i.e. same bottom row.
    std::vector<IntMatrix> unique;
    std::unordered_set<IntMatrix, IntMatrixHash> seen;
    for (const IntMatrix& w : all) {
      const IntMatrix key = sign_canonical({0, 0, w.c, w.d});
      if (seen.insert(key).second) unique.push_back(w);
    }
    return unique;
  }();
  return words;
}

double frame_angle_of(const GroupElement& g) { return frame_angle(g); }

// Spatial hash over reduced frames, periodic in Re z. Each inserted frame is
// registered in all neighbouring cells, so a query inspects only its own.
class FrameHash {
 public:
  explicit FrameHash(double cell) : cell_(cell) {
    if (!(cell > 0.0)) throw std::invalid_argument("frame hash: cell must be positive");
    theta_cells_ = std::max(1, static_cast<int>(std::floor(std::numbers::pi / cell)));
  }

  // `reduced` = reducer * g; registers the frame and its near-boundary images.
  void insert(const GroupElement& reduced, const IntMatrix& reducer) {
    const auto& words = boundary_words();
    last_.resize(words.size(), {~std::uint64_t{0}, IntMatrix{0, 0, 0, 0}});
    for (std::size_t iw = 0; iw < words.size(); ++iw) {
      const IntMatrix& w = words[iw];
      const GroupElement image = w.to_real() * reduced;
      const auto bp = image.base_point();
      const double shift = std::round(bp[0]);
      const double x = bp[0] - shift;
      const double y = bp[1];
      if (!(y > 0.0)) continue;
      if (distance_below_arcs(x, y) > 1.5 * cell_) continue;
      const IntMatrix composite = translation(-static_cast<std::int64_t>(shift)) * w * reducer;
      const double theta = frame_angle_of(image);
      const int band = band_of(y);
      const int tc = theta_cell(theta);
      // Densely sampled orbits revisit the same cell with the same composite.
      const std::uint64_t own = key(band, x_cell(x, band), tc);
      if (last_[iw].first == own && last_[iw].second == composite) continue;
      last_[iw] = {own, composite};
      for (int db = -1; db <= 1; ++db) {
        const int nb = band + db;
        const int nx = x_cells(nb);
        const int xc = x_cell(x, nb);
        for (int dx = -1; dx <= 1; ++dx) {
          const int cx = ((xc + dx) % nx + nx) % nx;
          for (int dt = -1; dt <= 1; ++dt) {
            const int ct = ((tc + dt) % theta_cells_ + theta_cells_) % theta_cells_;
            add(key(nb, cx, ct), composite, x);
            if (theta_cells_ < 3 && dt == 0) break;
          }
          if (nx < 3 && dx == 0) break;
        }
      }
    }
  }

  std::uint64_t cell_key(const GroupElement& reduced) const {
    const auto bp = reduced.base_point();
    const int band = band_of(bp[1]);
    return key(band, x_cell(bp[0], band), theta_cell(frame_angle_of(reduced)));
  }

  // Calls emit(gamma) for every gamma with gamma * g_inserted near q, where
  // `reduced` = delta * q.
  template <class Emit>
  void query(const GroupElement& reduced, const IntMatrix& delta, Emit&& emit) const {
    const auto bp = reduced.base_point();
    const double x = bp[0];
    const double y = bp[1];
    const int band = band_of(y);
    const int nx = x_cells(band);
    const auto it = cells_.find(key(band, x_cell(x, band), theta_cell(frame_angle_of(reduced))));
    if (it == cells_.end()) return;
    const IntMatrix delta_inv = delta.inverse();
    // Entries of one bucket may sit on opposite sides of the seam x = 1/2.
    const double reach = 3.0 * std::max(1.0 / nx, cell_ * std::exp(band * cell_)) + 1.0;
    for (const Entry& e : it->second) {
      const auto k_lo = static_cast<std::int64_t>(std::ceil(x - e.x - reach));
      const auto k_hi = static_cast<std::int64_t>(std::floor(x - e.x + reach));
      for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        emit(delta_inv * translation(k) * e.reducer);
      }
    }
  }

 private:
  struct Entry {
    IntMatrix reducer;
    double x;
  };

  static double distance_below_arcs(double x, double y) {
    const double r2 = x * x + y * y;
    if (r2 >= 1.0) return 0.0;
    return std::asinh((1.0 - r2) / (2.0 * y));
  }

  int band_of(double y) const { return static_cast<int>(std::floor(std::log(y) / cell_)); }
  int x_cells(int band) const {
    const double size = cell_ * std::exp(band * cell_);
    return std::max(1, static_cast<int>(std::floor(1.0 / size)));
  }
  int x_cell(double x, int band) const {
    const int n = x_cells(band);
    double frac = x - std::floor(x);
    int c = static_cast<int>(std::floor(frac * n));
    return std::min(c, n - 1);
  }
  int theta_cell(double theta) const {
    int c = static_cast<int>(std::floor(theta / std::numbers::pi * theta_cells_));
    return std::clamp(c, 0, theta_cells_ - 1);
  }
  static std::uint64_t key(int band, int xc, int tc) {
    return (static_cast<std::uint64_t>(static_cast<std::uint16_t>(band + 32768)) << 48) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(xc)) << 16) |
           static_cast<std::uint64_t>(static_cast<std::uint16_t>(tc));
  }
  void add(std::uint64_t k, const IntMatrix& reducer, double x) {
    auto& bucket = cells_[k];
    for (const Entry& e : bucket) {
      if (e.reducer == reducer) return;
    }
    bucket.push_back({reducer, x});
  }

  double cell_;
  int theta_cells_ = 1;
  std::vector<std::pair<std::uint64_t, IntMatrix>> last_;
  std::unordered_map<std::uint64_t, std::vector<Entry>> cells_;
};

// Frame x * n_t with the product formed in long double, reduced.
SurfacePoint orbit_frame(const GroupElement& g, double t) {
  SurfacePoint base;
  base.raw = g;
  base.reduced = g;
  return horocycle_point(base, t);
}

// Long double 2x2 arithmetic for conjugates by large integer matrices.
struct QuadMatrix {
  long double a, b, c, d;
};

QuadMatrix mul(const QuadMatrix& x, const QuadMatrix& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

QuadMatrix unipotent(long double t) { return {1.0L, t, 0.0L, 1.0L}; }

GroupElement to_double(const QuadMatrix& m) {
  return {static_cast<double>(m.a), static_cast<double>(m.b), static_cast<double>(m.c),
          static_cast<double>(m.d)};
}

// g^{-1} gamma g, rescaled to determinant one to strip rounding drift.
QuadMatrix conjugate_precise(const GroupElement& g, const IntMatrix& gamma) {
  const QuadMatrix gl{g.a, g.b, g.c, g.d};
  const long double det = gl.a * gl.d - gl.b * gl.c;
  const QuadMatrix gi{gl.d / det, -gl.b / det, -gl.c / det, gl.a / det};
  const QuadMatrix y{static_cast<long double>(gamma.a), static_cast<long double>(gamma.b),
                     static_cast<long double>(gamma.c), static_cast<long double>(gamma.d)};
  QuadMatrix p = mul(mul(gi, y), gl);
  const long double scale = 1.0L / std::sqrt(p.a * p.d - p.b * p.c);
  return {p.a * scale, p.b * scale, p.c * scale, p.d * scale};
}

double single_threshold(double p, double q, double r, double s) {
  if (r == 0.0) {
    // P = n_tau a_Y n_{-tau'} = [[1/u, tau u - tau'/u], [0, u]]: collides for
    // every c when the diagonal and the translation both fit the box.
    const double u = s;
    if (u >= 1.0 / kE && u <= kE && std::abs(p * u - 1.0) < 1e-12 &&
        std::abs(q) <= kBoxTime * (u + 1.0 / u)) {
      return kInf;
    }
    return 0.0;
  }
  const double ar = std::abs(r);
  double lo = 1.0 / kE;
  double hi = kE;
  lo = std::max(lo, s - kBoxTime * ar);
  hi = std::min(hi, s + kBoxTime * ar);
  const double inv_hi = p + kBoxTime * ar;
  const double inv_lo = p - kBoxTime * ar;
  if (!(inv_hi > 0.0)) return 0.0;
  lo = std::max(lo, 1.0 / inv_hi);
  if (inv_lo > 0.0) hi = std::min(hi, 1.0 / inv_lo);
  if (lo > hi) return 0.0;
  const double u = std::clamp(1.0, lo, hi);
  return 2.0 * kE / (ar * std::max(u, 1.0 / u));
}

double box_scale_single(double p, double q, double r, double s, int u_samples) {
  if (r == 0.0) {
    if (!(s >= 1.0 / kE && s <= kE) || std::abs(p * s - 1.0) > 1e-12) return kInf;
    return std::abs(q) / (std::abs(p) + std::abs(s));
  }
  const double ar = std::abs(r);
  auto f = [&](double u) {
    return std::max({std::abs(p - 1.0 / u) / ar, std::abs(u - s) / ar,
                     ar * std::max(u, 1.0 / u) / (2.0 * kE)});
  };
  // Quasi-convex in u: grid scan, then golden section around the best node.
  const int n = std::max(8, u_samples);
  double best = kInf;
  int best_i = 0;
  for (int i = 0; i <= n; ++i) {
    const double u = std::exp(-1.0 + 2.0 * i / n);
    const double v = f(u);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  double a = std::exp(-1.0 + 2.0 * std::max(0, best_i - 1) / n);
  double b = std::exp(-1.0 + 2.0 * std::min(n, best_i + 1) / n);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double m1 = b - phi * (b - a);
    const double m2 = a + phi * (b - a);
    if (f(m1) <= f(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return std::min(best, f(0.5 * (a + b)));
}

double height_of(const GroupElement& g) { return height_distance(reduce(g)); }

// Returns x with d x = 1 mod c, for coprime d and c > 0.
std::int64_t inverse_mod(std::int64_t d, std::int64_t c) {
  std::int64_t r0 = ((d % c) + c) % c;
  std::int64_t r1 = c;
  std::int64_t x0 = 1;
  std::int64_t x1 = 0;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
    std::tie(x0, x1) = std::pair{x1, x0 - q * x1};
  }
  return ((x0 % c) + c) % c;
}

// Calls visit(gamma) for one of +-gamma, over all gamma in SL(2,Z) with
// entries bounded by B in absolute value, excluding +-I.
template <class Visit>
void enumerate_bounded(std::int64_t B, Visit&& visit) {
  for (std::int64_t c = 0; c <= B; ++c) {
    for (std::int64_t d = -B; d <= B; ++d) {
      if (c == 0 && d <= 0) continue;
      if (std::gcd(c, d) != 1) continue;
      if (c == 0) {
        for (std::int64_t b = -B; b <= B; ++b) {
          if (b != 0) visit(IntMatrix{1, b, 0, 1});
        }
        continue;
      }
      // a d - b c = 1 with a0 = d^{-1} mod c.
      const std::int64_t a0 = inverse_mod(d, c);
      const std::int64_t b0 = (a0 * d - 1) / c;
      // General solution (a0 + k c, b0 + k d).
      const double kc_lo = (-static_cast<double>(B) - a0) / c;
      const double kc_hi = (static_cast<double>(B) - a0) / c;
      const auto k_lo = static_cast<std::int64_t>(std::ceil(kc_lo));
      const auto k_hi = static_cast<std::int64_t>(std::floor(kc_hi));
      for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const std::int64_t a = a0 + k * c;
        const std::int64_t b = b0 + k * d;
        if (std::abs(b) > B) continue;
        visit(IntMatrix{a, b, c, d});
      }
    }
  }
}

}  // namespace

UpperBound c_gamma_upper(const SurfacePoint& x, double T, double t_probe, const Calibration& cal,
                         double probe_step) {
  if (!(cal.C_Gamma > 0.0)) throw std::invalid_argument("c_gamma_upper: calibration missing");
  if (!(t_probe >= 0.0) || !(probe_step > 0.0)) {
    throw std::invalid_argument("c_gamma_upper: need t_probe >= 0 and a positive step");
  }
  UpperBound out;
  const auto steps = static_cast<std::int64_t>(std::ceil(t_probe / probe_step));
  double end_height = 0.0;
  for (std::int64_t i = 0; i <= steps; ++i) {
    const double y = std::min(t_probe, static_cast<double>(i) * probe_step);
    const double h = height_of(geodesic(x.reduced, y));
    out.max_height = std::max(out.max_height, h);
    if (i == steps) end_height = h;
  }
  const double ratio = 10.0 / cal.C_Gamma;
  out.bound = ratio * ratio * std::exp(2.0 * out.max_height);
  const double upper = cal.C_Gamma / 10.0 * std::exp(t_probe - end_height);
  out.in_regime = T >= 1.0 && T <= upper;
  return out;
}

double collision_threshold(const GroupElement& P) {
  return std::max(single_threshold(P.a, P.b, P.c, P.d),
                  single_threshold(-P.a, -P.b, -P.c, -P.d));
}

InjectivityEstimate injectivity_search(const SurfacePoint& x, double T, const InjectivityGrid& grid) {
  if (!(T >= 1.0) || !std::isfinite(T)) throw std::invalid_argument("injectivity_search: T >= 1");
  if (!(grid.insert_step > 0.0 && grid.insert_step <= 0.1 * 2.0 * kBoxTime) ||
      !(grid.omega_step > 0.0) || grid.eta_samples < 1 || !(grid.tau_budget > 0.0)) {
    throw std::invalid_argument("injectivity_search: invalid grid");
  }
  // Rescale so the box becomes [-10,10] x [-1/2,1/2] x (1/c)[-1,1].
  const GroupElement h = geodesic(x.reduced, std::log(T));

  FrameHash hash(grid.cell);
  const auto inserts = static_cast<std::int64_t>(std::ceil(2.0 * kBoxTime / grid.insert_step));
  for (std::int64_t j = 0; j <= inserts; ++j) {
    const double tau = -kBoxTime + 2.0 * kBoxTime * static_cast<double>(j) / inserts;
    const SurfacePoint p = orbit_frame(h, tau);
    hash.insert(p.reduced, p.reducer);
  }

  // Collisions with c* >= 1 have |W| <= 2e min(1, u^-2), u = e^{-eta}.
  InjectivityEstimate out;
  std::unordered_set<IntMatrix, IntMatrixHash> seen;
  auto consider = [&](const IntMatrix& gamma) {
    const IntMatrix key = sign_canonical(gamma);
    if (is_plus_minus_identity(key)) return;
    if (!seen.insert(key).second) return;
    if (static_cast<std::int64_t>(seen.size()) > grid.max_candidates) {
      throw ResourceLimit("injectivity_search: candidate cap reached");
    }
    const double c_star = collision_threshold(to_double(conjugate_precise(h, key)));
    if (std::isinf(c_star)) {
      out.unbounded = true;
      out.witness = key;
      return;
    }
    if (c_star > out.c && !out.unbounded) {
      out.c = c_star;
      out.witness = key;
    }
  };

  const int ne = grid.eta_samples;
  for (int ie = 0; ie < ne; ++ie) {
    const double eta = ne == 1 ? 0.0 : -1.0 + 2.0 * ie / (ne - 1);
    const double u = std::exp(-eta);
    const double omega_max = 2.0 * kE * std::min(1.0, 1.0 / (u * u));
    const auto n_omega = static_cast<std::int64_t>(std::ceil(omega_max / grid.omega_step));
    const GroupElement a_eta = exp_X(eta);
    for (std::int64_t io = -n_omega; io <= n_omega; ++io) {
      const double omega = n_omega == 0 ? 0.0 : omega_max * static_cast<double>(io) / n_omega;
      const double amp = std::exp(-2.0 * eta) * (1.0 + std::abs(omega)) * (1.0 + std::abs(omega));
      const double tau_step = grid.tau_budget / amp;
      const auto n_tau = static_cast<std::int64_t>(std::ceil(2.0 * kBoxTime / tau_step));
      out.queries += n_tau + 1;
      if (out.queries > grid.max_queries) {
        throw ResourceLimit("injectivity_search: query grid exceeds cap");
      }
      const GroupElement tail = a_eta * exp_V(omega);
      std::uint64_t last_key = 0;
      IntMatrix last_delta{0, 0, 0, 0};
      for (std::int64_t it = 0; it <= n_tau; ++it) {
        const double tau = -kBoxTime + 2.0 * kBoxTime * static_cast<double>(it) / n_tau;
        const SurfacePoint q = reduce(horocycle(h, tau) * tail);
        // Consecutive queries in the same cell with the same reducer add nothing.
        const std::uint64_t here = hash.cell_key(q.reduced);
        if (here == last_key && q.reducer == last_delta) continue;
        last_key = here;
        last_delta = q.reducer;
        hash.query(q.reduced, q.reducer, consider);
      }
    }
  }
  out.candidates = static_cast<std::int64_t>(seen.size());
  if (out.unbounded) out.c = kInf;
  return out;
}

double box_collision_scale(const GroupElement& P, int u_samples) {
  return std::min(box_scale_single(P.a, P.b, P.c, P.d, u_samples),
                  box_scale_single(-P.a, -P.b, -P.c, -P.d, u_samples));
}

double fund_box_scale(const SurfacePoint& x, int u_samples) {
  const GroupElement& g = x.reduced;
  const GroupElement gi = g.inverse();
  auto scan = [&](std::int64_t B) {
    double best = kInf;
    enumerate_bounded(B, [&](const IntMatrix& gamma) {
      best = std::min(best, box_collision_scale(gi * gamma.to_real() * g, u_samples));
    });
    return best;
  };
  const double rough = scan(4);
  if (!std::isfinite(rough)) throw InternalError("fund_box_scale: no collision found");
  // Any gamma with scale <= rho has g^{-1} gamma g bounded by p_max(rho).
  const double rho = rough;
  const double diag = kE * (1.0 + 2.0 * rho * rho);
  const double p_max = std::max({2.0 * kE * rho, diag, rho * diag + rho * kE});
  const double bound = 4.0 * g.max_abs() * gi.max_abs() * p_max;
  if (bound > 4000.0) throw ResourceLimit("fund_box_scale: enumeration bound too large");
  const auto B = static_cast<std::int64_t>(std::ceil(bound));
  return B <= 4 ? rough : std::min(rough, scan(B));
}

double max_return_spacing(double scale, double c) {
  return std::min(1.0, 1.0 / (4.0 * c)) / scale;
}

int max_return_beta(double scale, double T) {
  const double top = std::log(std::cbrt(scale) * T);
  return top < 0.0 ? -1 : static_cast<int>(std::floor(top));
}

std::vector<ReturnEvent> find_beta_returns(const SurfacePoint& x, double scale, double T,
                                           double dt, double c, const ReturnSearch& search) {
  if (!(scale >= 1.0) || !(T >= 1.0)) throw std::invalid_argument("find_beta_returns: S, T >= 1");
  if (!(c >= 1.0) || !std::isfinite(c)) throw std::invalid_argument("find_beta_returns: c >= 1");
  if (!(dt > 0.0) || dt > max_return_spacing(scale, c) * (1.0 + 1e-12)) {
    throw std::invalid_argument("find_beta_returns: dt above S^{-1} min(1, 1/(4c))");
  }
  const int beta_max = max_return_beta(scale, T);
  std::vector<ReturnEvent> events;
  if (beta_max < 0) return events;
  const GroupElement& g = x.reduced;
  const double t_max = kBoxTime * T;

  // Candidates are verified exactly, so the hash may sample more coarsely
  // than the classification resolution dt.
  const double spacing = std::max(scale * dt, std::min(kHashSpacing, 2.0 * t_max * scale));
  const double step = spacing / scale;
  const double omega_max = std::pow(scale, -2.0 / 3.0) / c;
  const double drift = spacing * (1.0 + omega_max) * (1.0 + omega_max);
  const double cell = search.cell > 0.0 ? search.cell : std::max(0.3, 3.0 * drift);
  const double omega_step = search.omega_step > 0.0 ? search.omega_step : 0.5 * cell;

  const auto n = static_cast<std::int64_t>(std::ceil(2.0 * t_max / step));
  std::vector<SurfacePoint> samples;
  samples.reserve(static_cast<std::size_t>(n + 1));
  FrameHash hash(cell);
  for (std::int64_t k = 0; k <= n; ++k) {
    const double t = -t_max + 2.0 * t_max * static_cast<double>(k) / static_cast<double>(n);
    samples.push_back(orbit_frame(g, t * scale));
    hash.insert(samples.back().reduced, samples.back().reducer);
  }

  const auto n_omega = static_cast<std::int64_t>(std::ceil(omega_max / omega_step));
  const double z_lo = std::exp(-(beta_max + 1.0)) / c;
  const double z_hi = 1.0 / c;
  const double s23 = std::pow(scale, 2.0 / 3.0);
  std::unordered_set<IntMatrix, IntMatrixHash> seen;
  std::unordered_map<IntMatrix, ReturnEvent, IntMatrixHash> found;

  auto verify = [&](const IntMatrix& gamma) {
    if (is_plus_minus_identity(gamma)) return;
    const IntMatrix key = sign_canonical(gamma);
    if (!seen.insert(key).second) return;
    if (static_cast<std::int64_t>(seen.size()) >= search.max_candidates) {
      throw ResourceLimit("find_beta_returns: candidate cap reached");
    }
    for (const IntMatrix& signed_gamma : {key, negate(key)}) {
      const QuadMatrix P = conjugate_precise(g, signed_gamma);
      const long double r = P.c;
      if (r == 0.0L) continue;
      const long double a = (P.a - 1.0L) / r;
      const long double b = (1.0L - P.d) / r;
      ReturnEvent e;
      e.t0 = static_cast<double>(a / scale);
      e.t1 = static_cast<double>(b / scale);
      e.z = static_cast<double>(r * s23);
      if (std::abs(e.t0) > t_max || std::abs(e.t1) > t_max) continue;
      const double az = std::abs(e.z);
      if (!(az > z_lo && az <= z_hi)) continue;
      // n_{-a} P n_{b} must be the unstable step exp(r V).
      const GroupElement d = to_double(mul(mul(unipotent(-a), P), unipotent(b)));
      if (relative_distance(d, exp_V(static_cast<double>(r))) > 1e-8) continue;
      e.beta = static_cast<int>(std::floor(-std::log(c * az)));
      e.beta = std::clamp(e.beta, 0, beta_max);
      e.degenerate = std::abs(e.t0 - e.t1) < dt;
      found.emplace(signed_gamma, e);
    }
  };

  for (std::int64_t io = -n_omega; io <= n_omega; ++io) {
    const double omega = n_omega == 0 ? 0.0 : omega_max * static_cast<double>(io) / n_omega;
    const GroupElement shift = exp_V(omega);
    std::uint64_t last_key = 0;
    IntMatrix last_delta{0, 0, 0, 0};
    for (std::int64_t k = 0; k <= n; ++k) {
      const double t = -t_max + 2.0 * t_max * static_cast<double>(k) / static_cast<double>(n);
      const SurfacePoint q = io == 0 ? samples[static_cast<std::size_t>(k)]
                                     : reduce(horocycle(g, t * scale) * shift);
      const std::uint64_t here = hash.cell_key(q.reduced);
      if (here == last_key && q.reducer == last_delta) continue;
      last_key = here;
      last_delta = q.reducer;
      hash.query(q.reduced, q.reducer, verify);
    }
  }

  events.reserve(found.size());
  for (const auto& [gamma, e] : found) events.push_back(e);
  std::sort(events.begin(), events.end(), [](const ReturnEvent& l, const ReturnEvent& r) {
    if (l.t0 != r.t0) return l.t0 < r.t0;
    if (l.t1 != r.t1) return l.t1 < r.t1;
    return l.z < r.z;
  });
  return events;
}

std::vector<ReturnEvent> find_beta_returns(const SurfacePoint& x, double scale, double T,
                                           double dt) {
  const InjectivityEstimate est = injectivity_search(x, scale * T);
  if (est.unbounded) throw OutOfRegime("find_beta_returns: injectivity scale is unbounded");
  return find_beta_returns(x, scale, T, dt, est.c);
}

SeparationReport separation_check(const std::vector<ReturnEvent>& events, int beta, double scale,
                                  const Calibration& cal) {
  if (!(cal.C_Gamma > 0.0)) throw std::invalid_argument("separation_check: calibration missing");
  SeparationReport out;
  out.threshold = std::exp(beta) / std::cbrt(scale) / (2.0 * cal.C_Gamma);
  std::vector<const ReturnEvent*> pool;
  for (const ReturnEvent& e : events) {
    if (e.beta == beta && !e.degenerate) pool.push_back(&e);
  }
  std::sort(pool.begin(), pool.end(),
            [](const ReturnEvent* l, const ReturnEvent* r) { return l->t0 < r->t0; });
  out.min_gap = kInf;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      const double d0 = pool[j]->t0 - pool[i]->t0;
      if (d0 >= out.min_gap) break;
      out.min_gap = std::min(out.min_gap, std::max(d0, std::abs(pool[j]->t1 - pool[i]->t1)));
    }
  }
  out.pass = out.min_gap >= out.threshold;
  return out;
}

std::vector<CountRow> count_bound_check(const std::vector<ReturnEvent>& events, double scale,
                                        double T, const Calibration& cal) {
  const int beta_max = max_return_beta(scale, T);
  std::vector<CountRow> rows;
  for (int beta = 0; beta <= beta_max; ++beta) {
    CountRow row;
    row.beta = beta;
    for (const ReturnEvent& e : events) {
      if (e.beta != beta) continue;
      if (e.degenerate) {
        ++row.degenerate;
      } else {
        ++row.nondegenerate;
      }
    }
    row.bound = 400.0 * cal.C_Gamma * cal.C_Gamma * std::exp(-2.0 * beta) *
                std::pow(scale, 2.0 / 3.0) * T * T;
    row.pass = row.nondegenerate <= row.bound;
    row.degenerate_bound = cal.C_Gamma_prime * (1.0 + std::exp(-beta) * std::cbrt(scale) * T);
    row.degenerate_pass = row.degenerate <= row.degenerate_bound;
    rows.push_back(row);
  }
  return rows;
}

WidthProfile width_integral(const SurfacePoint& x, double scale, double T,
                            const std::vector<ReturnEvent>& events, double c) {
  (void)x;
  if (!(T > 0.0) || !(scale >= 1.0) || !(c >= 1.0)) {
    throw std::invalid_argument("width_integral: need T > 0, S >= 1, c >= 1");
  }
  WidthProfile out;
  out.events = events;
  out.scale = scale;
  out.T = T;
  out.c = c;

  const double base = 1.0 / (100.0 * c);
  const double s23 = std::pow(scale, 2.0 / 3.0);
  const double kink = 1.0 / s23;

  struct Pinch {
    double t0, half, level;
  };
  std::vector<Pinch> pinches;
  std::vector<double> cuts{0.0, T};
  for (const ReturnEvent& e : events) {
    const Pinch p{e.t0, std::exp(e.beta) * kink, std::exp(-e.beta) * base};
    if (p.t0 + p.half <= 0.0 || p.t0 - p.half >= T) continue;
    pinches.push_back(p);
    for (double v : {p.t0 - p.half, p.t0 - kink, p.t0, p.t0 + kink, p.t0 + p.half}) {
      if (v > 0.0 && v < T) cuts.push_back(v);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::sort(pinches.begin(), pinches.end(),
            [](const Pinch& l, const Pinch& r) { return l.t0 - l.half < r.t0 - r.half; });

  struct Line {
    double alpha, slope;  // side(t) = alpha + slope t
    double at(double t) const { return alpha + slope * t; }
  };
  auto integrate = [](const Line& l, double a, double b) {
    if (l.slope == 0.0) return (b - a) / (l.alpha * l.alpha);
    return (1.0 / l.at(a) - 1.0 / l.at(b)) / l.slope;
  };

  double total = 0.0;
  std::size_t next = 0;
  std::vector<Pinch> active;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i];
    const double r = cuts[i + 1];
    const double mid = 0.5 * (l + r);
    while (next < pinches.size() && pinches[next].t0 - pinches[next].half <= l) {
      active.push_back(pinches[next++]);
    }
    std::erase_if(active, [&](const Pinch& p) { return p.t0 + p.half <= l; });
    std::vector<Line> lines{{base, 0.0}};
    for (const Pinch& p : active) {
      if (std::abs(mid - p.t0) > p.half) continue;
      if (std::abs(mid - p.t0) <= kink) {
        lines.push_back({p.level, 0.0});
      } else if (mid > p.t0) {
        lines.push_back({-p.level * s23 * p.t0, p.level * s23});
      } else {
        lines.push_back({p.level * s23 * p.t0, -p.level * s23});
      }
    }
    // Lower envelope: split at every crossing inside (l, r).
    std::vector<double> sub{l, r};
    for (std::size_t a = 0; a < lines.size(); ++a) {
      for (std::size_t b = a + 1; b < lines.size(); ++b) {
        const double ds = lines[a].slope - lines[b].slope;
        if (ds == 0.0) continue;
        const double t = (lines[b].alpha - lines[a].alpha) / ds;
        if (t > l && t < r) sub.push_back(t);
      }
    }
    std::sort(sub.begin(), sub.end());
    for (std::size_t k = 0; k + 1 < sub.size(); ++k) {
      const double m = 0.5 * (sub[k] + sub[k + 1]);
      const Line* best = &lines[0];
      for (const Line& ln : lines) {
        if (ln.at(m) < best->at(m)) best = &ln;
      }
      total += integrate(*best, sub[k], sub[k + 1]);
    }
  }
  out.integral = total / T;
  return out;
}

double width_reference(double scale, double T, double c) {
  return c * c * T * (1.0 + std::log(std::cbrt(scale) * T));
}

}  // namespace horolab
