#include "horolab/rep_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "horolab/errors.hpp"
#include "horolab/quadrature.hpp"

namespace horolab {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kFillNodes = 64;

Jet eval_profile(const Profile& p, double xi, int order) {
  if (!(xi >= p.lo && xi <= p.hi)) return Jet(order);
  return p.jet(xi, order);
}

void require_order(const SpectralFunction& f, int needed, const char* what) {
  if (f.max_order() < needed) {
    throw std::invalid_argument(std::string(what) + ": insufficient derivative order");
  }
}

SpectralFunction with_profile(const SpectralFunction& f, Profile profile) {
  SpectralFunction out = f;
  out.profile = std::move(profile);
  return out;
}

// Taylor coefficients at xi of q(xi) = int_0^1 f'(base + t (xi - base)) dt,
// i.e. q_j = (j+1) int_0^1 t^j c_{j+1}(y(t)) dt.
Jet difference_quotient_jet(const SpectralFunction& f, double base, double xi, int order) {
  const GaussRule& rule = gauss_legendre(kFillNodes);
  Jet out(order);
  const double h = xi - base;
  for (int n = 0; n < kFillNodes; ++n) {
    const double t = 0.5 * (rule.nodes[static_cast<std::size_t>(n)] + 1.0);
    const double w = 0.5 * rule.weights[static_cast<std::size_t>(n)];
    const Jet local = f.jet(base + t * h, order + 1);
    double tj = 1.0;
    for (int j = 0; j <= order; ++j) {
      out[j] += w * tj * double(j + 1) * local[j + 1];
      tj *= t;
    }
  }
  return out;
}

double discrete_prefactor(cplx nu) {
  const int n = static_cast<int>(std::lround(nu.real()));
  const double factorial = n == 0 ? 1.0 : std::tgamma(static_cast<double>(n));
  return factorial / (std::numbers::pi * std::ldexp(1.0, n + 1));
}

bool is_discrete(Series s) { return s == Series::discrete || s == Series::mock_discrete; }

Jet apply_casimir_box(const Jet& f, double xi, const SpectralFunction& fn, double scale,
                      double mu_scaled) {
  const double x_factor = std::pow(scale, -2.0 / 3.0);
  const double v_factor = std::pow(scale, -4.0 / 3.0);
  const double m2 = double(fn.m) * double(fn.m);
  auto laplacian = [&](const Jet& g) {
    const Jet xx = hatX_jet(hatX_jet(g, xi, fn.nu), xi, fn.nu);
    const Jet vv = hatV_jet(hatV_jet(g, xi, fn.nu), xi, fn.nu);
    return g * m2 - xx * x_factor - vv * v_factor;
  };
  const Jet b2 = laplacian(laplacian(f));
  return f * (1.0 + mu_scaled * mu_scaled) + b2;
}

}  // namespace

std::string to_string(Series s) {
  switch (s) {
    case Series::principal: return "principal";
    case Series::complementary: return "complementary";
    case Series::discrete: return "discrete";
    case Series::mock_discrete: return "mock-discrete";
  }
  return "unknown";
}

double SpectralFunction::mu() const { return (1.0 - nu * nu).real(); }

Jet SpectralFunction::jet(double xi, int order) const {
  if (order < 0 || order > profile.max_order) {
    throw std::invalid_argument("SpectralFunction::jet: order exceeds available derivatives");
  }
  return eval_profile(profile, xi, order);
}

cplx SpectralFunction::value(double xi) const { return jet(xi, 0)[0]; }

cplx SpectralFunction::derivative(double xi, int k) const { return jet(xi, k).derivative(k); }

SpectralFunction make_spectral(Series series, cplx nu, int m, Profile profile) {
  if (m == 0) throw std::invalid_argument("spectral function: m must be nonzero");
  if (!(profile.lo <= profile.hi)) throw std::invalid_argument("spectral function: empty support");
  if (!profile.jet) throw std::invalid_argument("spectral function: missing jet oracle");
  switch (series) {
    case Series::principal:
      if (nu.real() != 0.0) throw std::invalid_argument("principal series needs imaginary nu");
      break;
    case Series::complementary:
      if (nu.imag() != 0.0 || !(nu.real() > 0.0 && nu.real() < 1.0)) {
        throw std::invalid_argument("complementary series needs real nu in (0,1)");
      }
      break;
    case Series::discrete:
      if (nu.imag() != 0.0 || nu.real() < 1.0 || nu.real() != std::round(nu.real())) {
        throw std::invalid_argument("discrete series needs integer nu >= 1");
      }
      break;
    case Series::mock_discrete:
      if (nu != cplx{}) throw std::invalid_argument("mock discrete series needs nu = 0");
      break;
  }
  if (is_discrete(series) && !(profile.lo > 0.0)) {
    throw std::invalid_argument("discrete series support must lie in (0, inf)");
  }
  return SpectralFunction{series, nu, m, std::move(profile)};
}

namespace profiles {

Profile bump(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("bump: need lo < hi");
  Profile p{lo, hi, kClosedFormOrder, nullptr};
  p.jet = [lo, hi](double xi, int order) {
    const double slope = 2.0 / (hi - lo);
    const double x0 = (2.0 * xi - lo - hi) / (hi - lo);
    if (std::abs(x0) >= 1.0) return Jet(order);
    const double inner = 1.0 - x0 * x0;
    if (-1.0 / inner < -700.0) return Jet(order);
    Jet x = Jet::variable(x0, order);
    if (order >= 1) x[1] = slope;
    const Jet one = Jet::constant(1.0, order);
    return exp(-(one / (one - x * x)));
  };
  return p;
}

Profile gaussian(double center, double width, double cutoff) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian: width must be positive");
  Profile p{center - cutoff * width, center + cutoff * width, kClosedFormOrder, nullptr};
  p.jet = [center, width](double xi, int order) {
    Jet y = Jet::variable((xi - center) / width, order);
    if (order >= 1) y[1] = 1.0 / width;
    return exp(-(y * y));
  };
  return p;
}

Profile polynomial(std::vector<cplx> coef, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("polynomial: need lo <= hi");
  Profile p{lo, hi, kClosedFormOrder, nullptr};
  p.jet = [coef = std::move(coef)](double xi, int order) {
    const Jet x = Jet::variable(xi, order);
    Jet acc(order);
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) {
      acc = acc * x + Jet::constant(*it, order);
    }
    return acc;
  };
  return p;
}

Profile reciprocal(double lo, double hi) {
  if (lo <= 0.0 && hi >= 0.0) throw std::invalid_argument("reciprocal: window contains 0");
  Profile p{lo, hi, kClosedFormOrder, nullptr};
  p.jet = [](double xi, int order) {
    return Jet::constant(1.0, order) / Jet::variable(xi, order);
  };
  return p;
}

Profile product(const Profile& f, const Profile& g) {
  Profile p{std::max(f.lo, g.lo), std::min(f.hi, g.hi), std::min(f.max_order, g.max_order),
            nullptr};
  if (p.lo > p.hi) p.hi = p.lo;
  p.jet = [f, g](double xi, int order) {
    return eval_profile(f, xi, order) * eval_profile(g, xi, order);
  };
  return p;
}

Profile scaled(const Profile& f, cplx factor) {
  Profile p = f;
  p.jet = [f, factor](double xi, int order) { return f.jet(xi, order) * factor; };
  return p;
}

Profile sum(const Profile& f, const Profile& g) {
  Profile p{std::min(f.lo, g.lo), std::max(f.hi, g.hi), std::min(f.max_order, g.max_order),
            nullptr};
  p.jet = [f, g](double xi, int order) {
    return eval_profile(f, xi, order) + eval_profile(g, xi, order);
  };
  return p;
}

}  // namespace profiles

Jet hatX_jet(const Jet& f, double xi, cplx nu) {
  if (f.order() < 1) throw std::invalid_argument("hatX: need derivative order >= 1");
  const int order = f.order() - 1;
  const Jet x = Jet::variable(xi, order);
  return f.truncated(order) * (1.0 - nu) + x * f.differentiated() * 2.0;
}

Jet hatV_jet(const Jet& f, double xi, cplx nu) {
  if (f.order() < 2) throw std::invalid_argument("hatV: need derivative order >= 2");
  const int order = f.order() - 2;
  const Jet x = Jet::variable(xi, order);
  const Jet d1 = f.differentiated();
  const Jet d2 = d1.differentiated();
  return (d1.truncated(order) * (1.0 - nu) + x * d2) * (-kI);
}

SpectralFunction apply_hatX(const SpectralFunction& f) {
  require_order(f, 1, "apply_hatX");
  Profile p{f.lo(), f.hi(), f.max_order() - 1, nullptr};
  p.jet = [f](double xi, int order) { return hatX_jet(f.jet(xi, order + 1), xi, f.nu); };
  return with_profile(f, std::move(p));
}

SpectralFunction apply_hatV(const SpectralFunction& f) {
  require_order(f, 2, "apply_hatV");
  Profile p{f.lo(), f.hi(), f.max_order() - 2, nullptr};
  p.jet = [f](double xi, int order) { return hatV_jet(f.jet(xi, order + 2), xi, f.nu); };
  return with_profile(f, std::move(p));
}

double weighted_integral(const SpectralFunction& f, const std::function<double(double)>& g,
                         double rel_tol) {
  const double lo = f.lo();
  const double hi = f.hi();
  if (lo == hi) return 0.0;
  const double p = f.nu.real();
  constexpr std::int64_t kInitialPanels = 8;
  if (p == 0.0) {
    return adaptive_gauss<double>(g, lo, hi, rel_tol, kInitialPanels, 1e-300).value;
  }
  if (lo > 0.0 || hi < 0.0) {
    auto weighted = [&](double xi) { return std::pow(std::abs(xi), -p) * g(xi); };
    return adaptive_gauss<double>(weighted, lo, hi, rel_tol, kInitialPanels, 1e-300).value;
  }
  if (p >= 1.0) throw std::invalid_argument("weighted_integral: non-integrable weight at 0");
  double total = 0.0;
  if (hi > 0.0) total += singular_weight_gauss(g, hi, p, rel_tol).value;
  if (lo < 0.0) {
    auto mirrored = [&](double s) { return g(-s); };
    total += singular_weight_gauss(mirrored, -lo, p, rel_tol).value;
  }
  return total;
}

double l2nu_norm(const SpectralFunction& f) {
  if (is_discrete(f.series)) throw std::invalid_argument("l2nu_norm: discrete-series input");
  const double sq = weighted_integral(f, [&](double xi) { return std::norm(f.value(xi)); });
  return std::sqrt(std::max(0.0, sq));
}

double discrete_norm(const SpectralFunction& f) {
  if (!is_discrete(f.series)) throw std::invalid_argument("discrete_norm: non-discrete input");
  const double sq = weighted_integral(f, [&](double xi) { return std::norm(f.value(xi)); });
  return std::sqrt(std::max(0.0, discrete_prefactor(f.nu) * sq));
}

double model_norm(const SpectralFunction& f) {
  return is_discrete(f.series) ? discrete_norm(f) : l2nu_norm(f);
}

double foliated_norm(const SpectralFunction& f, const SobolevIndex& idx, double scale) {
  if (idx.s < 0 || idx.s % 2 != 0) throw UnsupportedIndex("foliated_norm: s must be even");
  if (!(idx.r >= 0.0)) throw std::invalid_argument("foliated_norm: r must be >= 0");
  if (!(scale >= 1.0)) throw std::invalid_argument("foliated_norm: scale must be >= 1");
  const int powers = idx.s / 2;
  const int order = 8 * powers;
  require_order(f, order, "foliated_norm");
  const double mu_scaled = std::pow(scale, -2.0 / 3.0) * f.mu();
  auto integrand = [&](double xi) {
    Jet j = f.jet(xi, order);
    const cplx base = j[0];
    for (int k = 0; k < powers; ++k) j = apply_casimir_box(j, xi, f, scale, mu_scaled);
    return (j[0] * std::conj(base)).real();
  };
  double sq = weighted_integral(f, integrand);
  if (is_discrete(f.series)) sq *= discrete_prefactor(f.nu);
  const double mu = f.mu();
  sq *= std::pow(1.0 + mu * mu, idx.r / 2.0);
  return std::sqrt(std::max(0.0, sq));
}

double foliated_norm_upper(const SpectralFunction& f, double r, int s, double scale) {
  if (s < 0) throw UnsupportedIndex("foliated_norm_upper: s must be >= 0");
  if (s % 2 == 0) return foliated_norm(f, {r, s}, scale);
  const double below = foliated_norm(f, {r, s - 1}, scale);
  const double above = foliated_norm(f, {r, s + 1}, scale);
  return std::sqrt(below * above);
}

cplx eval_invariant_distribution(const SpectralFunction& f, const TwistParams& p) {
  const double lm = p.lambda * p.m;
  if (!is_discrete(f.series)) return f.value(-lm);
  if (lm < 0.0) return 0.0;
  if (lm == 0.0) {
    if (f.series == Series::mock_discrete) {
      throw UndefinedDistribution("invariant distribution undefined at lambda m = 0");
    }
    return 0.0;
  }
  return f.value(lm);
}

SpectralFunction solve_flow_coeqn(const SpectralFunction& f, const TwistParams& p) {
  if (!(p.scale >= 1.0)) throw std::invalid_argument("solve_flow_coeqn: scale must be >= 1");
  if (p.lambda * p.m == 0.0) throw std::invalid_argument("solve_flow_coeqn: lambda m must be nonzero");
  require_order(f, 1, "solve_flow_coeqn");
  const double lm = p.lambda * p.m;
  if (std::abs(eval_invariant_distribution(f, p)) > kAnnihilationTolerance) {
    throw NotACoboundary("solve_flow_coeqn: invariant distribution does not vanish");
  }
  if (std::abs(f.value(-lm)) > kAnnihilationTolerance) {
    throw NotACoboundary("solve_flow_coeqn: non-removable singularity at -lambda m");
  }
  const double scale = p.scale;
  Profile out{f.lo(), f.hi(), f.max_order() - 1, nullptr};
  // Cancellation only happens where f is forced to vanish, i.e. when -lambda m
  // lies inside the support; otherwise the quotient is well-conditioned.
  const bool removable = f.lo() < -lm && -lm < f.hi();
  out.jet = [f, lm, scale, removable](double xi, int order) {
    const cplx factor = -kI / scale;
    // Direct division loses about order * log10(1/d) digits at distance d,
    // so the filled region widens with the jet order.
    const double radius = kSingularRadius * std::exp2(order / 4.0);
    if (!removable || std::abs(xi + lm) > radius) {
      const Jet denom = Jet::variable(xi, order) + Jet::constant(lm, order);
      return (f.jet(xi, order) / denom) * factor;
    }
    return difference_quotient_jet(f, -lm, xi, order) * factor;
  };
  return with_profile(f, std::move(out));
}

SpectralFunction green_operator(const SpectralFunction& f) {
  if (f.lo() <= 0.0 && f.hi() >= 0.0) {
    throw std::invalid_argument("green_operator: support touches 0");
  }
  Profile out{f.lo(), f.hi(), f.max_order(), nullptr};
  out.jet = [f](double xi, int order) {
    return f.jet(xi, order) / (Jet::variable(xi, order) * kI);
  };
  return with_profile(f, std::move(out));
}

SpectralFunction solve_map_coeqn(const SpectralFunction& f, double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("solve_map_coeqn: L must be > 0");
  require_order(f, 1, "solve_map_coeqn");
  const double period = 2.0 * std::numbers::pi / L;
  const auto k_lo = static_cast<std::int64_t>(std::ceil(f.lo() / period));
  const auto k_hi = static_cast<std::int64_t>(std::floor(f.hi() / period));
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    if (std::abs(f.value(period * static_cast<double>(k))) > kAnnihilationTolerance) {
      throw NotAMapCoboundary("solve_map_coeqn: f does not vanish at a zero of the multiplier");
    }
  }
  Profile out{f.lo(), f.hi(), f.max_order() - 1, nullptr};
  out.jet = [f, L, period](double xi, int order) {
    const double zero = period * std::round(xi / period);
    const double h = xi - zero;
    // As for the flow equation, only zeros inside the support need the fill.
    const bool removable = f.lo() < zero && zero < f.hi();
    if (!removable || std::abs(h) > 0.25 * period) {
      const Jet phase = exp(Jet::variable(xi, order) * (kI * L));
      return f.jet(xi, order) / (phase - Jet::constant(1.0, order));
    }
    // e^{iL xi} - 1 = iL h E(iL h) with E(w) = int_0^1 e^{sw} ds.
    const GaussRule& rule = gauss_legendre(kFillNodes);
    Jet denom(order);
    const cplx w = kI * L * h;
    for (int n = 0; n < kFillNodes; ++n) {
      const double s = 0.5 * (rule.nodes[static_cast<std::size_t>(n)] + 1.0);
      const double weight = 0.5 * rule.weights[static_cast<std::size_t>(n)];
      const cplx e = std::exp(s * w);
      cplx term = weight * e;
      for (int j = 0; j <= order; ++j) {
        denom[j] += term;
        term *= kI * L * s / double(j + 1);
      }
    }
    denom *= kI * L;
    return difference_quotient_jet(f, zero, xi, order) / denom;
  };
  return with_profile(f, std::move(out));
}

cplx map_central_multiplier(double eta) {
  if (std::abs(eta) < 1e-6) return 1.0 + eta * eta / 24.0;
  return std::exp(kI * (eta / 2.0)) * (kI * eta) / (std::exp(kI * eta) - 1.0);
}

SpectralFunction u_tau(const SpectralFunction& f, double tau, double lambda) {
  if (!(tau >= 1.0) || !std::isfinite(tau)) throw std::invalid_argument("u_tau: tau must be >= 1");
  const double dilation = std::cbrt(tau);
  const double amplitude = std::pow(tau, 1.0 / 6.0);
  Profile out{lambda + (f.lo() - lambda) / dilation, lambda + (f.hi() - lambda) / dilation,
              f.max_order(), nullptr};
  out.jet = [f, lambda, dilation, amplitude](double xi, int order) {
    return f.jet(lambda + dilation * (xi - lambda), order).dilated(dilation) * amplitude;
  };
  return with_profile(f, std::move(out));
}

SpectralFunction operator_A(const SpectralFunction& f) {
  if (f.series != Series::discrete) throw std::invalid_argument("operator_A: discrete series only");
  Profile out{f.lo(), f.hi(), f.max_order(), nullptr};
  out.jet = [f](double xi, int order) {
    return f.jet(xi, order) * pow(Jet::variable(xi, order), -f.nu / 2.0);
  };
  return with_profile(f, std::move(out));
}

SpectralFunction operator_A_inverse(const SpectralFunction& f) {
  if (f.series != Series::discrete) throw std::invalid_argument("operator_A: discrete series only");
  Profile out{f.lo(), f.hi(), f.max_order(), nullptr};
  out.jet = [f](double xi, int order) {
    return f.jet(xi, order) * pow(Jet::variable(xi, order), f.nu / 2.0);
  };
  return with_profile(f, std::move(out));
}

}  // namespace horolab
