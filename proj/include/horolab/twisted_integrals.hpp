#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "horolab/cusp_forms.hpp"
#include "horolab/modular_surface.hpp"

namespace horolab {

using Observable = std::function<double(const SurfacePoint&)>;
using OrbitPath = std::function<SurfacePoint(double)>;

struct QuadratureSpec {
  int min_panels_per_period = 8;  // 16-node panels per phase period 2 pi/|lambda|
  double rel_tol = 1e-9;
  int max_depth = 12;  // panel doublings after the initial grid
};

struct TwistedIntegral {
  SurfacePoint x;
  double lambda = 0.0;
  double T = 0.0;
  std::complex<double> value;
  double err_est = 0.0;  // |difference of the last two refinement levels|
  bool converged = false;
  std::int64_t nodes = 0;
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_max = 0.0;
  int samples = 0;
};

// int_0^T e^{i lambda t} g(t) dt for a smooth g, on a composite grid with at
// least min_panels_per_period panels per phase period and one panel per
// unit time, doubled until successive levels agree.
struct ScalarIntegral {
  std::complex<double> value;
  double err_est = 0.0;
  bool converged = false;
  std::int64_t nodes = 0;
};
ScalarIntegral twisted_scalar_integral(const std::function<std::complex<double>(double)>& g,
                                       double lambda, double a, double b,
                                       const QuadratureSpec& spec);

// Twisted integral along an arbitrary orbit parameterization.
TwistedIntegral twisted_path_integral(const OrbitPath& path, const Observable& obs,
                                      double lambda, double T, const QuadratureSpec& spec);

// int_0^T e^{i lambda t} obs(h_t x) dt. Throws UseUntwistedPath for lambda = 0.
TwistedIntegral twisted_orbit_integral(const SurfacePoint& x, const Observable& obs,
                                       double lambda, double T, const QuadratureSpec& spec);

// The classical ergodic integral int_0^T obs(h_t x) dt.
TwistedIntegral orbit_integral(const SurfacePoint& x, const Observable& obs, double T,
                               const QuadratureSpec& spec);

// e^{2 pi} n^{-1} int_0^n f((i + t)/n) e^{-2 pi i t} dt; equals tau(n) for the
// discriminant up to quadrature error.
ScalarIntegral cusp_coefficient_estimate(int n, const CuspFormSpec& spec,
                                         const QuadratureSpec& quad);
std::complex<double> cusp_coefficient(int n, const CuspFormSpec& spec, const QuadratureSpec& quad);

// | |I(x)| - |I(h_s x)| | / |I(x)| for the closed horocycle of period n.
double closed_horocycle_shift_check(int n, double s, const CuspFormSpec& spec,
                                    const QuadratureSpec& quad);

// Least squares fit of log|I| against log T.
ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& samples);

// |int e^{i lambda t} f - (e^{i lambda T} F(T) - i lambda int e^{i lambda t} F(t) dt)|
// with F(t) = int_0^t f(h_s x) ds. Throws OutOfRegime for |lambda T| > e.
double small_lambda_identity_check(const SurfacePoint& x, const Observable& obs, double lambda,
                                   double T, const QuadratureSpec& quad);

// Observables used by the experiments.
Observable constant_observable(double c);
// Re of the lifted cusp form, divided by `normalization`.
Observable cusp_observable(const CuspFormSpec& spec, double normalization = 1.0);

}  // namespace horolab
