#pragma once

// Finite-dimensional consistency checks of the trace formula
//   Tr(phi(H) - phi(H0)) = int phi'(t) xi(t) dt
// and of det S = prod s_n.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "sigma0/scattering.hpp"
#include "sigma0/spectral.hpp"

namespace sigma0 {

/// xi(t) = #{eig H0 <= t} - #{eig H <= t}; both inputs sorted ascending.
inline long spectral_shift(double t, std::span<const double> eig0, std::span<const double> eig) {
  const auto n0 = std::upper_bound(eig0.begin(), eig0.end(), t) - eig0.begin();
  const auto n1 = std::upper_bound(eig.begin(), eig.end(), t) - eig.begin();
  return static_cast<long>(n0 - n1);
}

struct QuadratureGrid {
  double base_width = 0.1;
  double margin = 1.0;  // integration range extends this far beyond the spectra
  std::vector<double> min_widths{1e-3, 1e-5, 1e-7, 1e-9};
};

struct TraceFormulaReport {
  double trace_side = 0.0;
  std::vector<double> min_widths;
  std::vector<double> integral_by_level;
  std::vector<double> residual_by_level;
  bool refinement_ok = true;  // residuals non-increasing under refinement

  double residual() const { return residual_by_level.empty() ? INFINITY : residual_by_level.back(); }
};

namespace detail {

inline constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                   0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                     0.4786286704993665, 0.2369268850561891};

inline bool has_eigenvalue_in(std::span<const double> eig, double lo, double hi) {
  const auto it = std::lower_bound(eig.begin(), eig.end(), lo);
  return it != eig.end() && *it <= hi;
}

inline double integrate_phi_prime_xi(const SymbolFunction& phi, std::span<const double> eig0,
                                     std::span<const double> eig, double lo, double hi, double base_width,
                                     double min_width) {
  struct Cell {
    double lo, hi;
  };
  const long cells = std::max(1L, static_cast<long>(std::ceil((hi - lo) / base_width)));
  const double w = (hi - lo) / static_cast<double>(cells);
  std::vector<Cell> stack;
  for (long c = cells; c-- > 0;) stack.push_back({lo + w * static_cast<double>(c), lo + w * static_cast<double>(c + 1)});

  double total = 0.0;
  while (!stack.empty()) {
    const Cell cell = stack.back();
    stack.pop_back();
    const double width = cell.hi - cell.lo;
    const bool jump = has_eigenvalue_in(eig0, cell.lo, cell.hi) || has_eigenvalue_in(eig, cell.lo, cell.hi);
    if (jump && width > min_width) {
      const double mid = 0.5 * (cell.lo + cell.hi);
      stack.push_back({mid, cell.hi});
      stack.push_back({cell.lo, mid});
      continue;
    }
    const double c = 0.5 * (cell.lo + cell.hi);
    double acc = 0.0;
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      const double t = c + 0.5 * width * kGaussNodes[q];
      acc += kGaussWeights[q] * phi.derivative(t) * static_cast<double>(spectral_shift(t, eig0, eig));
    }
    total += 0.5 * width * acc;
  }
  return total;
}

}  // namespace detail

inline TraceFormulaReport trace_formula_check(const HermitianMatrix& h0, const HermitianMatrix& h,
                                              const SymbolFunction& phi, const QuadratureGrid& grid = {}) {
  if (h0.dim() != h.dim()) throw Error(ErrorKind::dimension_mismatch, "trace formula needs equal dimensions");
  TraceFormulaReport rep;
  const HermitianMatrix diff = apply_function(h, phi) - apply_function(h0, phi);
  rep.trace_side = 0.0;
  for (Index i = 0; i < diff.dim(); ++i) rep.trace_side += diff(i, i).real();

  const VectorXd e0 = eigenvalues(h0);
  const VectorXd e1 = eigenvalues(h);
  const std::span<const double> s0(e0.data(), static_cast<std::size_t>(e0.size()));
  const std::span<const double> s1(e1.data(), static_cast<std::size_t>(e1.size()));
  const double lo = std::min(e0.minCoeff(), e1.minCoeff()) - grid.margin;
  const double hi = std::max(e0.maxCoeff(), e1.maxCoeff()) + grid.margin;

  for (double w : grid.min_widths) {
    const double integral = detail::integrate_phi_prime_xi(phi, s0, s1, lo, hi, grid.base_width, w);
    const double res = std::abs(rep.trace_side - integral);
    if (!rep.residual_by_level.empty() && res > rep.residual_by_level.back() + 1e-12) rep.refinement_ok = false;
    rep.min_widths.push_back(w);
    rep.integral_by_level.push_back(integral);
    rep.residual_by_level.push_back(res);
  }
  return rep;
}

struct DeterminantCheck {
  cplx determinant;
  cplx eigenvalue_product;
  double residual = 0.0;
};

inline DeterminantCheck determinant_check(const ScatteringResult& sc) {
  DeterminantCheck d;
  d.determinant = sc.S.determinant();
  d.eigenvalue_product = 1.0;
  for (cplx s : sc.s_eigs) d.eigenvalue_product *= s;
  d.residual = std::abs(d.determinant - d.eigenvalue_product);
  return d;
}

struct BirmanKreinReport {
  TraceFormulaReport trace;
  std::vector<DeterminantCheck> determinants;

  bool passed(double trace_tol = 1e-6, double det_tol = 1e-10) const {
    if (!trace.refinement_ok || !(trace.residual() <= trace_tol)) return false;
    return std::all_of(determinants.begin(), determinants.end(),
                       [&](const DeterminantCheck& d) { return d.residual <= det_tol; });
  }
};

inline BirmanKreinReport birman_krein_checks(const HermitianMatrix& h0, const HermitianMatrix& h,
                                             const SymbolFunction& phi, const QuadratureGrid& grid = {},
                                             std::span<const ScatteringResult> runs = {}) {
  BirmanKreinReport rep;
  rep.trace = trace_formula_check(h0, h, phi, grid);
  for (const auto& sc : runs) rep.determinants.push_back(determinant_check(sc));
  return rep;
}

}  // namespace sigma0
