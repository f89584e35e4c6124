#include "horolab/group_flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace horolab {

namespace {

void require_finite(double t, const char* what) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument(std::string(what) + ": flow time must be finite");
  }
}

}  // namespace

double GroupElement::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

GroupElement GroupElement::renormalized() const {
  const double det_value = det();
  if (!(det_value > 0.0)) {
    throw std::invalid_argument("renormalized: determinant must be positive");
  }
  const double s = 1.0 / std::sqrt(det_value);
  return {a * s, b * s, c * s, d * s};
}

std::array<double, 2> GroupElement::base_point() const {
  // (a i + b) / (c i + d)
  const double denom = c * c + d * d;
  return {(a * c + b * d) / denom, (a * d - b * c) / denom};
}

std::ostream& operator<<(std::ostream& os, const GroupElement& g) {
  return os << "[[" << g.a << ", " << g.b << "], [" << g.c << ", " << g.d << "]]";
}

double relative_distance(const GroupElement& x, const GroupElement& y) {
  const double diff = std::max({std::abs(x.a - y.a), std::abs(x.b - y.b),
                                std::abs(x.c - y.c), std::abs(x.d - y.d)});
  return diff / std::max({1.0, x.max_abs(), y.max_abs()});
}

GroupElement exp_X(double s) { return {std::exp(s), 0.0, 0.0, std::exp(-s)}; }
GroupElement exp_U(double s) { return {1.0, s, 0.0, 1.0}; }
GroupElement exp_V(double s) { return {1.0, 0.0, s, 1.0}; }

Matrix2 commutator(const Matrix2& p, const Matrix2& q) {
  auto mul = [](const Matrix2& l, const Matrix2& r) {
    return Matrix2{l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3],
                   l[2] * r[0] + l[3] * r[2], l[2] * r[1] + l[3] * r[3]};
  };
  const Matrix2 pq = mul(p, q);
  const Matrix2 qp = mul(q, p);
  return {pq[0] - qp[0], pq[1] - qp[1], pq[2] - qp[2], pq[3] - qp[3]};
}

GroupElement geodesic(const GroupElement& x, double t) {
  require_finite(t, "geodesic");
  const double up = std::exp(0.5 * t);
  const double down = std::exp(-0.5 * t);
  return {x.a * up, x.b * down, x.c * up, x.d * down};
}

GroupElement horocycle(const GroupElement& x, double t) {
  require_finite(t, "horocycle");
  return {x.a, x.a * t + x.b, x.c, x.c * t + x.d};
}

GroupElement unstable_horocycle(const GroupElement& x, double t) {
  require_finite(t, "unstable_horocycle");
  return {x.a + x.b * t, x.b, x.c + x.d * t, x.d};
}

GroupElement alpha_map(const GroupElement& x, double scale, double t, double y, double z) {
  if (!(scale >= 1.0)) {
    throw std::invalid_argument("alpha_map: scale must be >= 1");
  }
  if (!std::isfinite(t) || !std::isfinite(y) || !std::isfinite(z)) {
    throw std::invalid_argument("alpha_map: coordinates must be finite");
  }
  return x * exp_U(t * scale) * exp_X(y * std::pow(scale, -1.0 / 3.0)) *
         exp_V(z * std::pow(scale, -2.0 / 3.0));
}

void OrbitWalker::step(const GroupElement& right) {
  g_ = g_ * right;
  ++steps_;
  if (renorm_every_ != 0 && steps_ % renorm_every_ == 0) {
    g_ = g_.renormalized();
  }
}

}  // namespace horolab
