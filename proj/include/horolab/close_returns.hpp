#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "horolab/modular_surface.hpp"

namespace horolab {

// Frozen constants produced by the calibration run.
struct Calibration {
  double C_Gamma = 0.0;        // fundamental-box constant, in (0, 1)
  double C_Gamma_prime = 0.0;  // degenerate-return constant
  std::uint64_t seed = 0;
  std::string date;
  std::string commit;
};

// x exp(t1 S U) = x exp(t0 S U) exp(z S^{-2/3} V) with S the rescaling time.
// Invariant: |z| in (e^{-(beta+1)}, e^{-beta}] / c for the active c.
struct ReturnEvent {
  double t0 = 0.0;
  double t1 = 0.0;
  double z = 0.0;
  int beta = 0;
  bool degenerate = false;  // |t0 - t1| below the sampling resolution
};

struct WidthProfile {
  std::vector<ReturnEvent> events;
  double integral = 0.0;  // (1/T) int_0^T side(t)^{-2} dt, always >= 1
  double scale = 1.0;
  double T = 1.0;
  double c = 1.0;
};

struct UpperBound {
  double bound = 0.0;
  double max_height = 0.0;  // max_{0 <= y <= t_probe} d_M(a_y x)
  bool in_regime = false;   // T inside [1, (C/10) e^{t_probe - d_M(a_{t_probe} x)}]
};

// (10/C)^2 e^{2 max d_M} along the forward geodesic up to t_probe.
UpperBound c_gamma_upper(const SurfacePoint& x, double T, double t_probe, const Calibration& cal,
                         double probe_step = 0.01);

// Box-normalized collision coordinates: alpha over [-10,10] x [-1/2,1/2] x
// (1/c)[-1,1], which is the T-box after geodesic rescaling by log T.
struct InjectivityGrid {
  double cell = 0.6;          // hash cell size in hyperbolic units
  double insert_step = 0.2;   // orbit spacing of inserted samples
  double omega_step = 0.2;    // V-direction query spacing
  int eta_samples = 9;        // X-direction query planes over [-1, 1]
  double tau_budget = 0.2;    // displacement budget for the query tau step
  std::int64_t max_queries = 100'000'000;
  std::int64_t max_candidates = 10'000'000;
};

struct InjectivityEstimate {
  double c = 1.0;
  bool unbounded = false;  // an element with zero V-component collides for every c
  std::int64_t queries = 0;
  std::int64_t candidates = 0;
  IntMatrix witness;  // element realizing c (identity when c = 1 by the floor)
};

// Largest c for which two distinct points of the normalized box have images
// differing by P (or -P), i.e. P = n_tau a_Y v_W n_{-tau'} with a_Y = exp(YX)
// arising from box coordinates. Returns 0 when no collision is possible and
// +inf when the V-component of P vanishes.
double collision_threshold(const GroupElement& P);

// Lower estimate of c_Gamma(x, T) from hashed orbit samples; every detected
// collision is verified exactly, so the estimate never exceeds the truth.
InjectivityEstimate injectivity_search(const SurfacePoint& x, double T,
                                       const InjectivityGrid& grid = {});

// Smallest rho for which alpha_x is not injective on [-rho,rho] x [-1/2,1/2] x
// [-rho,rho], from P = g^{-1} gamma g.
double box_collision_scale(const GroupElement& P, int u_samples = 256);

// Injectivity scale of the fundamental box at x, over all gamma != +-I.
double fund_box_scale(const SurfacePoint& x, int u_samples = 256);

struct ReturnSearch {
  double cell = 0.0;        // 0 picks a cell from the sampling resolution
  double omega_step = 0.0;  // 0 picks half the cell
  std::int64_t max_candidates = 10'000'000;
};

// All (beta, S, T)-returns with t0, t1 in [-10T, 10T] resolvable at spacing dt,
// using c as the active injectivity estimate.
std::vector<ReturnEvent> find_beta_returns(const SurfacePoint& x, double scale, double T,
                                           double dt, double c, const ReturnSearch& search = {});
// Same, with c = injectivity_search(x, scale * T).c.
std::vector<ReturnEvent> find_beta_returns(const SurfacePoint& x, double scale, double T,
                                           double dt);

// Largest admissible spacing: S^{-1} min(1, 1/(4c)).
double max_return_spacing(double scale, double c);

struct SeparationReport {
  bool pass = true;
  double min_gap = 0.0;   // min over pairs of max(|dt0|, |dt1|); +inf for < 2 events
  double threshold = 0.0; // e^beta S^{-1/3} / (2 C)
};

SeparationReport separation_check(const std::vector<ReturnEvent>& events, int beta, double scale,
                                  const Calibration& cal);

struct CountRow {
  int beta = 0;
  int nondegenerate = 0;
  double bound = 0.0;
  bool pass = true;
  int degenerate = 0;
  double degenerate_bound = 0.0;
  bool degenerate_pass = true;
};

// One row per beta in [0, floor(log(S^{1/3} T))].
std::vector<CountRow> count_bound_check(const std::vector<ReturnEvent>& events, double scale,
                                        double T, const Calibration& cal);

int max_return_beta(double scale, double T);

// Tube with baseline side 1/(100c), pinched around every event t0.
WidthProfile width_integral(const SurfacePoint& x, double scale, double T,
                            const std::vector<ReturnEvent>& events, double c);

// c^2 T (1 + log(S^{1/3} T)).
double width_reference(double scale, double T, double c);

}  // namespace horolab
