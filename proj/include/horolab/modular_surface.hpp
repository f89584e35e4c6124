#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "horolab/group_flow.hpp"

namespace horolab {

// Element of SL(2,Z), applied on the left.
struct IntMatrix {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  IntMatrix inverse() const { return {d, -b, -c, a}; }
  GroupElement to_real() const {
    return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c),
            static_cast<double>(d)};
  }
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

// Throws InternalError on int64 overflow.
IntMatrix operator*(const IntMatrix& x, const IntMatrix& y);

// A point of SL(2,Z)\SL(2,R) together with its canonical representative.
// Invariant: reduced == reducer * raw, and reduced * i lies in the closed
// standard fundamental domain up to kBoundaryTolerance.
struct SurfacePoint {
  GroupElement raw;
  GroupElement reduced;
  IntMatrix reducer;

  std::complex<double> base_point() const;
};

// A point whose cusp excursions along the geodesic flow obey d <= A t + Q.
struct DiophantineClass {
  double A = 0.0;
  double Q = 1.0;
};

inline constexpr double kBoundaryTolerance = 1e-12;

// Translate-then-invert reduction. Internal arithmetic is long double.
SurfacePoint reduce(const GroupElement& g);

// Reduces x.reduced * exp(tU) with the product formed in long double, so
// large orbit times lose as little precision as possible.
SurfacePoint horocycle_point(const SurfacePoint& x, double t);

// max(0, log Im z) for the reduced base point z.
double height_distance(const SurfacePoint& x);

// Moebius action on the upper half-plane.
std::complex<double> mobius(const GroupElement& g, std::complex<double> z);
std::complex<double> mobius(const IntMatrix& g, std::complex<double> z);

// Reduces a point of the upper half-plane; returns the reduced point and
// writes the reducing matrix to `reducer` when non-null.
std::complex<long double> reduce_upper_half_plane(std::complex<long double> z,
                                                  IntMatrix* reducer = nullptr);

struct DiophantineReport {
  bool holds = true;
  double max_excess = 0.0;  // max over samples of d_M - (A t + Q); may be negative
};

// Samples t in {0, step, ..., t_max}. The orbit is advanced incrementally
// and re-reduced each step, so long runs shadow the exact orbit rather
// than track it.
DiophantineReport diophantine_check(const SurfacePoint& x, const DiophantineClass& cls,
                                    double t_max, double step);

// max_{step <= t <= T} d_M(a_t x) / log T. Requires T >= e.
double loglaw_statistic(const SurfacePoint& x, double T, double step);

// Same statistic for several horizons from a single orbit pass.
std::vector<double> loglaw_profile(const SurfacePoint& x, const std::vector<double>& horizons,
                                   double step);

// Re z uniform in [-1/2,1/2], Im z with density v^-2 on [1,10], uniform
// frame angle; reduced before returning.
SurfacePoint sample_point(std::uint64_t seed);

// Frame rotation angle of the reduced representative, in [0, pi).
double frame_angle(const GroupElement& g);

}  // namespace horolab
