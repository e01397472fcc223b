#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "sigma0/error.hpp"

namespace sigma0 {

/// |phi(x)| <= C (1 + |x|)^(-rho)
struct DecayBound {
  double C = std::numeric_limits<double>::infinity();
  double rho = 0.0;

  double at(double x) const { return C * std::pow(1.0 + std::abs(x), -rho); }
};

/// A real function on the line that vanishes at infinity, together with its
/// decay metadata. The derivative is optional; without it derivative() falls
/// back to a central difference.
class SymbolFunction {
 public:
  using Fn = std::function<double(double)>;

  SymbolFunction(std::string label, Fn eval, DecayBound decay, Fn derivative = {})
      : label_(std::move(label)), eval_(std::move(eval)), derivative_(std::move(derivative)),
        decay_(decay) {
    if (!eval_) throw Error(ErrorKind::invalid_argument, "symbol '" + label_ + "' has no evaluator");
  }

  double operator()(double x) const { return eval_(x); }

  double derivative(double x) const {
    if (derivative_) return derivative_(x);
    const double h = 1e-4 * (1.0 + std::abs(x));
    return (eval_(x + h) - eval_(x - h)) / (2.0 * h);
  }

  bool has_derivative() const noexcept { return static_cast<bool>(derivative_); }
  const std::string& label() const noexcept { return label_; }
  const DecayBound& decay() const noexcept { return decay_; }

 private:
  std::string label_;
  Fn eval_;
  Fn derivative_;
  DecayBound decay_;
};

/// phi_delta(x) = phi(x / delta).
inline SymbolFunction dilate_symbol(const SymbolFunction& phi, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw Error(ErrorKind::invalid_argument, "dilation parameter must be positive, got " + std::to_string(delta));
  // (1 + |x|/delta) >= min(1, 1/delta) (1 + |x|)
  DecayBound bound = phi.decay();
  bound.C *= std::pow(std::max(1.0, delta), bound.rho);
  SymbolFunction::Fn deriv;
  if (phi.has_derivative()) deriv = [phi, delta](double x) { return phi.derivative(x / delta) / delta; };
  return SymbolFunction(phi.label() + "@delta=" + std::to_string(delta),
                        [phi, delta](double x) { return phi(x / delta); }, bound, std::move(deriv));
}

}  // namespace sigma0
