#pragma once

#include <complex>
#include <vector>

namespace horolab {

using cplx = std::complex<double>;

// Truncated Taylor expansion at a point: coef[k] = f^(k)(x0) / k!.
// Arithmetic keeps the shorter of the two operand orders.
class Jet {
 public:
  Jet() = default;
  explicit Jet(int order) : coef_(static_cast<std::size_t>(order) + 1, cplx{}) {}
  explicit Jet(std::vector<cplx> coef) : coef_(std::move(coef)) {}

  static Jet constant(cplx value, int order);
  // The identity function x -> x expanded at x0.
  static Jet variable(double x0, int order);

  int order() const { return static_cast<int>(coef_.size()) - 1; }
  cplx& operator[](int k) { return coef_[static_cast<std::size_t>(k)]; }
  cplx operator[](int k) const { return coef_[static_cast<std::size_t>(k)]; }
  const std::vector<cplx>& coefficients() const { return coef_; }

  cplx value() const { return coef_.front(); }
  // k-th derivative, k <= order().
  cplx derivative(int k) const;

  Jet truncated(int order) const;
  // f' as a jet of one lower order.
  Jet differentiated() const;
  // Rescales the expansion variable: coef[k] *= factor^k.
  Jet dilated(double factor) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(cplx s);

  friend Jet operator+(Jet x, const Jet& y) { return x += y; }
  friend Jet operator-(Jet x, const Jet& y) { return x -= y; }
  friend Jet operator*(Jet x, cplx s) { return x *= s; }
  friend Jet operator*(cplx s, Jet x) { return x *= s; }
  friend Jet operator-(Jet x) { return x *= -1.0; }
  friend Jet operator*(const Jet& x, const Jet& y);
  friend Jet operator/(const Jet& x, const Jet& y);

 private:
  std::vector<cplx> coef_;
};

Jet exp(const Jet& x);
// x^p with a nonzero constant term; principal branch at x[0].
Jet pow(const Jet& x, cplx p);

}  // namespace horolab
