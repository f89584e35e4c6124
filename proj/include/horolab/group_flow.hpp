#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>

namespace horolab {

// A point of SL(2,R), i.e. a unit frame over the upper half-plane.
//
// Flows act on the right:
//   geodesic        a_t(x) = x exp(tX/2)   (half-exponent convention)
//   horocycle       h_t(x) = x exp(tU)
//   unstable horo.  hbar_t(x) = x exp(tV)
// with X = diag(1,-1), U = [[0,1],[0,0]], V = [[0,0],[1,0]].
//
// The geodesic flow uses exp(tX/2), not exp(tX): a_t moves the base
// point i to e^t i, so t is hyperbolic arc length.
struct GroupElement {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr GroupElement identity() { return {}; }

  double det() const { return a * d - b * c; }
  GroupElement inverse() const { return {d, -b, -c, a}; }
  double max_abs() const;

  // Rescale to determinant one (requires det > 0).
  GroupElement renormalized() const;

  // Image of i under the Moebius action.
  std::array<double, 2> base_point() const;

  friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

std::ostream& operator<<(std::ostream& os, const GroupElement& g);

// Max-entry distance scaled by the larger operand norm.
double relative_distance(const GroupElement& x, const GroupElement& y);

// Closed-form exponentials of the generators.
GroupElement exp_X(double s);  // diag(e^s, e^-s)
GroupElement exp_U(double s);  // [[1,s],[0,1]]
GroupElement exp_V(double s);  // [[1,0],[s,1]]

// Lie algebra elements as plain 2x2 matrices, for commutator checks.
using Matrix2 = std::array<double, 4>;  // row-major
inline constexpr Matrix2 kGenX{1, 0, 0, -1};
inline constexpr Matrix2 kGenU{0, 1, 0, 0};
inline constexpr Matrix2 kGenV{0, 0, 1, 0};
Matrix2 commutator(const Matrix2& p, const Matrix2& q);

GroupElement geodesic(const GroupElement& x, double t);
GroupElement horocycle(const GroupElement& x, double t);
GroupElement unstable_horocycle(const GroupElement& x, double t);

// x exp(t S U) exp(y S^{-1/3} X) exp(z S^{-2/3} V) with S = scale >= 1.
GroupElement alpha_map(const GroupElement& x, double scale, double t, double y, double z);

// Composes many right-multiplications, renormalizing the determinant every
// `renorm_every` steps to keep drift bounded over long orbits.
class OrbitWalker {
 public:
  explicit OrbitWalker(GroupElement start, std::uint32_t renorm_every = 1000)
      : g_(start), renorm_every_(renorm_every) {}

  void step(const GroupElement& right);
  const GroupElement& current() const { return g_; }
  std::uint64_t steps() const { return steps_; }

 private:
  GroupElement g_;
  std::uint32_t renorm_every_;
  std::uint64_t steps_ = 0;
};

}  // namespace horolab
