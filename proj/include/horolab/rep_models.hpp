#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "horolab/jet.hpp"

namespace horolab {

enum class Series { principal, complementary, discrete, mock_discrete };

std::string to_string(Series s);

// A compactly supported closed-form profile: jet(xi, order) returns the
// Taylor expansion at xi. Outside [lo, hi] the profile is identically zero.
struct Profile {
  double lo = 0.0;
  double hi = 0.0;
  int max_order = 0;
  std::function<Jet(double, int)> jet;
};

// A Fourier-model vector of an irreducible unitary representation.
//   principal:      nu purely imaginary
//   complementary:  nu real in (0, 1)
//   discrete:       nu integer >= 1, support in (0, inf)
//   mock_discrete:  nu = 0, support in (0, inf)
struct SpectralFunction {
  Series series = Series::principal;
  cplx nu{};
  int m = 1;
  Profile profile;

  double mu() const;  // Casimir value 1 - nu^2 (real by the series rules)
  double lo() const { return profile.lo; }
  double hi() const { return profile.hi; }
  int max_order() const { return profile.max_order; }

  // Zero jet outside the support. Throws if order > max_order().
  Jet jet(double xi, int order) const;
  cplx value(double xi) const;
  cplx derivative(double xi, int k) const;
};

// Validates the series/nu/support rules; throws std::invalid_argument.
SpectralFunction make_spectral(Series series, cplx nu, int m, Profile profile);

namespace profiles {

inline constexpr int kClosedFormOrder = 64;

// exp(-1/(1 - x^2)) with x the affine image of [lo, hi] onto [-1, 1].
Profile bump(double lo, double hi);
// exp(-((xi - center)/width)^2), truncated at +-cutoff widths.
Profile gaussian(double center, double width, double cutoff = 12.0);
// sum_k coef[k] xi^k on the window [lo, hi].
Profile polynomial(std::vector<cplx> coef, double lo, double hi);
// 1/xi on a window excluding 0.
Profile reciprocal(double lo, double hi);
// Pointwise product; support is the intersection.
Profile product(const Profile& f, const Profile& g);
Profile scaled(const Profile& f, cplx factor);
Profile sum(const Profile& f, const Profile& g);

}  // namespace profiles

struct TwistParams {
  double lambda = 1.0;
  int m = 1;
  double scale = 1.0;  // rescaling time, >= 1
};

struct SobolevIndex {
  double r = 0.0;
  int s = 0;  // even
};

// Jet-level operators at the point xi.
Jet hatX_jet(const Jet& f, double xi, cplx nu);
Jet hatV_jet(const Jet& f, double xi, cplx nu);

// (1 - nu) f + 2 xi f'.
SpectralFunction apply_hatX(const SpectralFunction& f);
// -i ((1 - nu) f' + xi f'').
SpectralFunction apply_hatV(const SpectralFunction& f);

// (int |f|^2 |xi|^{-Re nu})^{1/2}; principal and complementary only.
double l2nu_norm(const SpectralFunction& f);
// ((nu-1)!/(pi 2^{nu+1}) int_{R+} |f|^2 xi^{-nu})^{1/2}, with (-1)! = 1.
double discrete_norm(const SpectralFunction& f);
// The matching model norm for any series.
double model_norm(const SpectralFunction& f);

// |f|_{r,s;T}: ((1+mu^2)^{r/2} Re <A^{s/2} f, f>)^{1/2} with
// A = (1 + mu_T^2) I + (m^2 I - X_T^2 - V_T^2)^2, X_T = T^{-1/3} X,
// V_T = T^{-2/3} V, mu_T = T^{-2/3} mu. Throws UnsupportedIndex for odd s.
double foliated_norm(const SpectralFunction& f, const SobolevIndex& idx, double scale);

// Upper bound for odd s from the interpolation inequality
// |f|_{r,s} <= (|f|_{r,s-1} |f|_{r,s+1})^{1/2}; equals foliated_norm for even s.
double foliated_norm_upper(const SpectralFunction& f, double r, int s, double scale);

// Principal/complementary: f(-lambda m). Discrete and mock discrete: zero
// for lambda m < 0, f(lambda m) for lambda m > 0; at lambda m = 0 zero for
// the discrete series and UndefinedDistribution for the mock discrete one.
cplx eval_invariant_distribution(const SpectralFunction& f, const TwistParams& p);

// g = -i f / (T (xi + lambda m)). Within kSingularRadius 2^{order/4} of
// -lambda m (order = requested jet order) the quotient is replaced by
// -(i/T) int_0^1 f'(-lambda m + t (xi + lambda m)) dt. The fill applies only
// when -lambda m lies inside the support.
// Throws NotACoboundary if the invariant distribution does not vanish or
// if f(-lambda m) != 0 inside the support.
SpectralFunction solve_flow_coeqn(const SpectralFunction& f, const TwistParams& p);
inline constexpr double kSingularRadius = 0.25;
inline constexpr double kAnnihilationTolerance = 1e-12;

// f / (i xi); the support must avoid 0.
SpectralFunction green_operator(const SpectralFunction& f);

// g = f / (e^{i L xi} - 1), filled near the zeros 2 pi k / L inside the support.
// Throws NotAMapCoboundary if f does not vanish at such a zero.
SpectralFunction solve_map_coeqn(const SpectralFunction& f, double L);

// e^{i eta/2} i eta / (e^{i eta} - 1) = eta / (2 sin(eta/2)).
cplx map_central_multiplier(double eta);

// tau^{1/6} f(lambda + tau^{1/3} (xi - lambda)).
SpectralFunction u_tau(const SpectralFunction& f, double tau, double lambda);

// f xi^{-nu/2} (discrete series only) and its inverse.
SpectralFunction operator_A(const SpectralFunction& f);
SpectralFunction operator_A_inverse(const SpectralFunction& f);

// int w(xi) g(xi) dxi over the support of f, with the series weight
// |xi|^{-Re nu} (no discrete prefactor). Singular weights are handled by
// splitting at 0 and substituting.
double weighted_integral(const SpectralFunction& f, const std::function<double(double)>& g,
                         double rel_tol = 1e-10);

}  // namespace horolab
