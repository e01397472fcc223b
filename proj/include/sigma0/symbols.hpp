#pragma once

// Concrete symbol families used by the CLI and the test-suite.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sigma0/symbol.hpp"

namespace sigma0::symbols {

/// scale / (1 + (x/a)^2); its Hankel operator has rank one.
inline SymbolFunction poisson(double a = 1.0, double scale = 1.0) {
  if (!(a > 0.0)) throw Error(ErrorKind::invalid_argument, "poisson width must be positive");
  return SymbolFunction(
      "poisson(a=" + std::to_string(a) + ",scale=" + std::to_string(scale) + ")",
      [a, scale](double x) {
        const double t = x / a;
        return scale / (1.0 + t * t);
      },
      DecayBound{std::abs(scale) * 2.0 * std::max(1.0, a * a), 2.0},
      [a, scale](double x) {
        const double t = x / a;
        const double d = 1.0 + t * t;
        return -2.0 * scale * t / (a * d * d);
      });
}

/// exp(-(x/w)^2)
inline SymbolFunction gaussian(double width = 1.0) {
  if (!(width > 0.0)) throw Error(ErrorKind::invalid_argument, "gaussian width must be positive");
  // (1+|x|)^2 exp(-t^2) is bounded by (1 + w + ...)^2; 4 max(1,w)^2 is a safe constant.
  return SymbolFunction(
      "gaussian(w=" + std::to_string(width) + ")",
      [width](double x) {
        const double t = x / width;
        return std::exp(-t * t);
      },
      DecayBound{4.0 * std::max(1.0, width * width), 2.0},
      [width](double x) {
        const double t = x / width;
        return -2.0 * t / width * std::exp(-t * t);
      });
}

/// p(x) / q(x) with coefficients in ascending powers. Requires deg q > deg p
/// and q > 0 on the real line (checked on a coarse grid plus leading sign).
inline SymbolFunction rational(std::vector<double> num, std::vector<double> den) {
  while (!num.empty() && num.back() == 0.0) num.pop_back();
  while (!den.empty() && den.back() == 0.0) den.pop_back();
  if (den.empty() || den.size() <= num.size())
    throw Error(ErrorKind::invalid_argument, "rational symbol needs deg(denominator) > deg(numerator)");
  if ((den.size() - 1) % 2 != 0 || den.back() <= 0.0)
    throw Error(ErrorKind::invalid_argument, "rational symbol denominator must be positive at infinity");
  auto horner = [](const std::vector<double>& c, double x) {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
  };
  auto dhorner = [](const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) r = r * x + static_cast<double>(k) * c[k];
    return r;
  };
  for (double x = -50.0; x <= 50.0; x += 0.01) {
    if (horner(den, x) <= 0.0)
      throw Error(ErrorKind::invalid_argument, "rational symbol denominator vanishes near x=" + std::to_string(x));
  }
  double sup = 0.0;
  for (double x = -1e3; x <= 1e3; x += 0.5) {
    sup = std::max(sup, std::abs(horner(num, x) / horner(den, x)) * (1.0 + std::abs(x)));
  }
  std::string label = "rational(deg " + std::to_string(num.size() ? num.size() - 1 : 0) + "/" +
                      std::to_string(den.size() - 1) + ")";
  return SymbolFunction(
      label, [=](double x) { return horner(num, x) / horner(den, x); }, DecayBound{2.0 * sup, 1.0},
      [=](double x) {
        const double q = horner(den, x);
        return (dhorner(num, x) * q - horner(num, x) * dhorner(den, x)) / (q * q);
      });
}

/// Piecewise-linear interpolation through (x_i, y_i), zero outside [x_0, x_last].
/// The end values must vanish so the result is continuous.
inline SymbolFunction sampled(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size())
    throw Error(ErrorKind::invalid_argument, "sampled symbol needs >= 2 matching (x, y) pairs");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw Error(ErrorKind::invalid_argument, "sampled symbol abscissae must increase");
  if (ys.front() != 0.0 || ys.back() != 0.0)
    throw Error(ErrorKind::invalid_argument, "sampled symbol must vanish at both ends");
  double c = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) c = std::max(c, std::abs(ys[i]) * (1.0 + std::abs(xs[i])));
  auto eval = [xs, ys](double x) {
    if (x <= xs.front() || x >= xs.back()) return 0.0;
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return (1.0 - t) * ys[i - 1] + t * ys[i];
  };
  return SymbolFunction("sampled(" + std::to_string(xs.size()) + " pts)", eval, DecayBound{c, 1.0});
}

}  // namespace sigma0::symbols
