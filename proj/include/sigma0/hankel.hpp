#pragma once

// Singular values of the Hankel operator P_- phi P_+ on L^2(R).
//
// The Cayley map w = (x - i)/(x + i) carries the upper half-plane to the disc
// and L^2(R) unitarily onto L^2(T) (f -> f(c(x)) / (sqrt(pi) (x + i))), with
// the Hardy spaces matched. Multiplication by phi becomes multiplication by
// psi = phi o c^{-1}, and H_phi becomes the circle Hankel matrix
//   Gamma_{jk} = psi_hat(-(j + k + 1)),  j, k >= 0.
// For phi = 1/(1+x^2), psi(w) = -1/(4w) + 1/2 - w/4 and Gamma = -1/4 e_0 e_0^T.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "sigma0/error.hpp"
#include "sigma0/spectral.hpp"
#include "sigma0/symbol.hpp"

namespace sigma0 {

/// Samples of psi on theta_j = 2 pi j / 2^p. samples[0] (x = infinity) is 0.
struct CircleSymbol {
  int p = 0;
  std::vector<cplx> samples;

  std::size_t size() const noexcept { return samples.size(); }
};

/// Preimage on the line of e^{i theta}: x = -cot(theta / 2).
inline double cayley_preimage(double theta) { return -1.0 / std::tan(0.5 * theta); }

inline CircleSymbol cayley_transfer(const SymbolFunction& phi, int p) {
  if (p < 6 || p > 16) throw Error(ErrorKind::invalid_argument, "grid exponent must lie in [6, 16], got " + std::to_string(p));
  CircleSymbol cs;
  cs.p = p;
  const std::size_t n = std::size_t{1} << p;
  cs.samples.assign(n, cplx(0.0));
  for (std::size_t j = 1; j < n; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    cs.samples[j] = phi(cayley_preimage(theta));
  }
  return cs;
}

/// c_n = (1/N) sum_j psi_j e^{-i n theta_j}, n = 0..N-1 (negative n wrap to N + n).
inline std::vector<cplx> fourier_coefficients(const CircleSymbol& cs) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, cs.samples);
  const double inv_n = 1.0 / static_cast<double>(cs.size());
  for (auto& c : out) c *= inv_n;
  return out;
}

inline MatrixXcd hankel_matrix(const CircleSymbol& cs, Index m) {
  const Index n = static_cast<Index>(cs.size());
  if (m < 1 || 4 * m > n)
    throw Error(ErrorKind::invalid_argument,
                "Hankel truncation M=" + std::to_string(m) + " exceeds 2^(p-2) for p=" + std::to_string(cs.p));
  const auto c = fourier_coefficients(cs);
  MatrixXcd g(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index k = 0; k < m; ++k) g(j, k) = c[static_cast<std::size_t>(n - (j + k + 1))];
  return g;
}

inline std::vector<double> matrix_singular_values(const MatrixXcd& g) {
  const VectorXd sv = Eigen::BDCSVD<MatrixXcd>(g).singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

/// Singular values sorted descending, with the truncation used and an
/// estimate of the first omitted value.
struct HankelSpectrum {
  std::vector<double> singular_values;
  Index truncation = 0;
  double tail_bound = 0.0;
  bool analytic = false;
  int grid_exponent = 0;

  double operator[](std::size_t i) const { return i < singular_values.size() ? singular_values[i] : 0.0; }
};

struct HankelOptions {
  double tolerance = 1e-7;  // allowed movement of the top values between M and 2M
  std::size_t compared = 10;
  std::optional<int> p;  // grid exponent for the size-M run; the 2M run uses p + 1
};

/// Default grid: N = 2^p >= 16 M.
inline int default_grid_exponent(Index m) {
  int p = 6;
  while (p < 16 && (Index{1} << p) < 16 * m) ++p;
  return p;
}

struct HankelComputation {
  MatrixXcd gamma;  // the size-M matrix the spectrum was taken from
  HankelSpectrum spectrum;
};

inline HankelComputation hankel_compute(const SymbolFunction& phi, Index m, const HankelOptions& opts = {}) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "Hankel truncation must be >= 1");
  const int p = opts.p.value_or(default_grid_exponent(m));
  const int p2 = std::min(16, p + 1);
  if (4 * m > (Index{1} << p) || 8 * m > (Index{1} << p2))
    throw Error(ErrorKind::invalid_argument, "M=" + std::to_string(m) + " too large for grid exponent " + std::to_string(p));

  HankelComputation out;
  out.gamma = hankel_matrix(cayley_transfer(phi, p), m);
  const auto coarse = matrix_singular_values(out.gamma);
  const auto fine = matrix_singular_values(hankel_matrix(cayley_transfer(phi, p2), 2 * m));

  const std::size_t cmp = std::min<std::size_t>(opts.compared, coarse.size());
  double moved = 0.0;
  for (std::size_t i = 0; i < cmp; ++i) moved = std::max(moved, std::abs(coarse[i] - fine[i]));
  if (!(moved < opts.tolerance)) {
    std::ostringstream os;
    os.precision(12);
    os << "top singular values of '" << phi.label() << "' moved by " << moved << " between M=" << m
       << " and M=" << 2 * m << "\n  M:  ";
    for (std::size_t i = 0; i < cmp; ++i) os << coarse[i] << " ";
    os << "\n  2M: ";
    for (std::size_t i = 0; i < cmp; ++i) os << fine[i] << " ";
    throw Error(ErrorKind::increase_m, os.str());
  }

  out.spectrum.singular_values = coarse;
  out.spectrum.truncation = m;
  out.spectrum.tail_bound = fine[static_cast<std::size_t>(m)];
  out.spectrum.grid_exponent = p;
  return out;
}

inline HankelSpectrum singular_values(const SymbolFunction& phi, Index m, const HankelOptions& opts = {}) {
  return hankel_compute(phi, m, opts).spectrum;
}

/// Exact spectrum for phi(x) = 1/(1 + (x/a)^2): a single value 1/4,
/// independent of a.
inline HankelSpectrum rank_one_oracle(double a) {
  if (!(a > 0.0)) throw Error(ErrorKind::invalid_argument, "rank-one oracle needs a > 0");
  HankelSpectrum hs;
  hs.singular_values = {0.25};
  hs.truncation = 1;
  hs.tail_bound = 0.0;
  hs.analytic = true;
  return hs;
}

}  // namespace sigma0
