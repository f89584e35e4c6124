#include "horolab/jet.hpp"

#include <algorithm>
#include <stdexcept>

namespace horolab {

namespace {

int common_order(const Jet& x, const Jet& y) { return std::min(x.order(), y.order()); }

}  // namespace

Jet Jet::constant(cplx value, int order) {
  Jet out(order);
  out[0] = value;
  return out;
}

Jet Jet::variable(double x0, int order) {
  Jet out(order);
  out[0] = x0;
  if (order >= 1) out[1] = 1.0;
  return out;
}

cplx Jet::derivative(int k) const {
  if (k < 0 || k > order()) throw std::out_of_range("Jet::derivative: order exceeded");
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) factorial *= j;
  return coef_[static_cast<std::size_t>(k)] * factorial;
}

Jet Jet::truncated(int order) const {
  std::vector<cplx> c(coef_.begin(), coef_.begin() + std::min(order, this->order()) + 1);
  return Jet(std::move(c));
}

Jet Jet::differentiated() const {
  if (order() < 1) throw std::invalid_argument("Jet::differentiated: order 0 jet");
  Jet out(order() - 1);
  for (int k = 0; k < order(); ++k) out[k] = coef_[static_cast<std::size_t>(k) + 1] * double(k + 1);
  return out;
}

Jet Jet::dilated(double factor) const {
  Jet out = *this;
  double scale = 1.0;
  for (int k = 0; k <= order(); ++k) {
    out[k] *= scale;
    scale *= factor;
  }
  return out;
}

Jet& Jet::operator+=(const Jet& other) {
  const int n = common_order(*this, other);
  coef_.resize(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) coef_[static_cast<std::size_t>(k)] += other[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  const int n = common_order(*this, other);
  coef_.resize(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) coef_[static_cast<std::size_t>(k)] -= other[k];
  return *this;
}

Jet& Jet::operator*=(cplx s) {
  for (auto& c : coef_) c *= s;
  return *this;
}

Jet operator*(const Jet& x, const Jet& y) {
  const int n = common_order(x, y);
  Jet out(n);
  for (int k = 0; k <= n; ++k) {
    cplx acc{};
    for (int j = 0; j <= k; ++j) acc += x[j] * y[k - j];
    out[k] = acc;
  }
  return out;
}

Jet operator/(const Jet& x, const Jet& y) {
  if (y[0] == cplx{}) throw std::domain_error("Jet division by a jet vanishing at its centre");
  const int n = common_order(x, y);
  Jet out(n);
  for (int k = 0; k <= n; ++k) {
    cplx acc = x[k];
    for (int j = 1; j <= k; ++j) acc -= y[j] * out[k - j];
    out[k] = acc / y[0];
  }
  return out;
}

Jet exp(const Jet& x) {
  const int n = x.order();
  Jet out(n);
  out[0] = std::exp(x[0]);
  for (int k = 1; k <= n; ++k) {
    cplx acc{};
    for (int j = 1; j <= k; ++j) acc += double(j) * x[j] * out[k - j];
    out[k] = acc / double(k);
  }
  return out;
}

Jet pow(const Jet& x, cplx p) {
  if (x[0] == cplx{}) throw std::domain_error("Jet pow at a zero of the base");
  const int n = x.order();
  Jet out(n);
  out[0] = std::pow(x[0], p);
  for (int k = 1; k <= n; ++k) {
    cplx acc{};
    for (int j = 1; j <= k; ++j) acc += (p * double(j) - double(k - j)) * x[j] * out[k - j];
    out[k] = acc / (double(k) * x[0]);
  }
  return out;
}

}  // namespace horolab
