#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "sigma0/error.hpp"
#include "sigma0/models.hpp"
#include "sigma0/spectral.hpp"

namespace sigma0 {

inline constexpr double kUnitarityTol = 1e-8;
inline constexpr double kBandMargin = 1e-6;
inline constexpr double kTransferSinMin = 1e-3;
inline constexpr double kMaxConditionNumber = 1e8;
inline constexpr double kRichardsonTol = 1e-6;

enum class ScatteringMethod { transfer, stationary, continuum, supplied };

inline const char* to_string(ScatteringMethod m) {
  switch (m) {
    case ScatteringMethod::transfer: return "transfer";
    case ScatteringMethod::stationary: return "stationary";
    case ScatteringMethod::continuum: return "continuum";
    case ScatteringMethod::supplied: return "supplied";
  }
  return "unknown";
}

/// Channels are ordered (right-moving, left-moving); S = [[t, r_R], [r_L, t]]
/// where r_L (r_R) is the reflection amplitude for a wave incident from the
/// left (right).
struct ScatteringResult {
  double lambda = 0.0;
  double k = 0.0;
  MatrixXcd S;
  std::vector<cplx> s_eigs;  // sorted by |s - 1| descending
  ScatteringMethod method = ScatteringMethod::supplied;
  double regularity_margin = 0.0;

  double unitarity_defect() const {
    return (S.adjoint() * S - MatrixXcd::Identity(S.rows(), S.cols())).norm();
  }
};

/// Wraps a unitary matrix: computes and orders its eigenvalues, rejects
/// non-unitary input.
inline ScatteringResult make_scattering_result(MatrixXcd s, double lambda, double k, ScatteringMethod method,
                                               double margin) {
  ScatteringResult r;
  r.lambda = lambda;
  r.k = k;
  r.S = std::move(s);
  r.method = method;
  r.regularity_margin = margin;
  if (r.S.rows() != r.S.cols() || r.S.rows() == 0)
    throw Error(ErrorKind::not_unitary, "scattering matrix must be square and non-empty");
  const double defect = r.unitarity_defect();
  if (!(defect <= kUnitarityTol)) {
    std::ostringstream os;
    os << "||S*S - I|| = " << defect << " at lambda=" << lambda << " (" << to_string(method) << ")";
    throw Error(ErrorKind::not_unitary, os.str());
  }
  Eigen::ComplexEigenSolver<MatrixXcd> es(r.S, false);
  r.s_eigs.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::stable_sort(r.s_eigs.begin(), r.s_eigs.end(),
                   [](cplx a, cplx b) { return std::abs(a - 1.0) > std::abs(b - 1.0); });
  return r;
}

// ---------------------------------------------------------------------------
// lattice

/// k in (0, pi) with lambda = 2 cos k.
inline double lattice_wavenumber(double lambda) {
  if (!(std::abs(lambda) < 2.0 - kBandMargin)) {
    std::ostringstream os;
    os << "lambda=" << lambda << " is not inside (-2, 2) with margin " << kBandMargin;
    throw Error(ErrorKind::band_edge, os.str());
  }
  return std::acos(0.5 * lambda);
}

/// <delta_n, (H0 - lambda - i0)^{-1} delta_m> for the full-line lattice
/// operator u(n+1) + u(n-1): i e^{-ik|n-m|} / (2 sin k).
inline cplx free_lattice_green(double lambda, long n, long m) {
  const double k = lattice_wavenumber(lambda);
  const double dist = static_cast<double>(std::labs(n - m));
  return cplx(0.0, 1.0) * std::polar(1.0, -k * dist) / (2.0 * std::sin(k));
}

namespace detail {

/// Non-zero potential sites, ascending, with coincident masses summed.
inline std::vector<PointMass> support(const PotentialSpec& pot) {
  std::map<long, double> acc;
  for (const auto& m : pot.masses) acc[m.site] += m.value;
  std::vector<PointMass> out;
  for (const auto& [site, v] : acc)
    if (v != 0.0) out.push_back({site, v});
  return out;
}

inline void require_point_masses(const LatticeModel& model) {
  if (model.potential.kind != PotentialSpec::Kind::point_masses)
    throw Error(ErrorKind::invalid_argument, "lattice scattering needs a point-mass potential");
}

}  // namespace detail

/// Sandwiched resolvent T, channel map Z and Y = V0 (I + T V0)^{-1} on the
/// potential support.
struct StationaryIngredients {
  std::vector<long> sites;
  MatrixXcd T;
  MatrixXcd Z;
  MatrixXcd Y;
  double condition_number = 1.0;
};

struct StationaryResult {
  ScatteringResult result;
  StationaryIngredients ingredients;
};

/// S = I - 2 pi i Z V0 (I + T(lambda + i0) V0)^{-1} Z^*.
inline StationaryResult stationary_smatrix(const LatticeModel& model, double lambda,
                                           double max_condition = kMaxConditionNumber) {
  detail::require_point_masses(model);
  const double k = lattice_wavenumber(lambda);
  const double sin_k = std::sin(k);
  const double margin = std::min(sin_k, 2.0 - std::abs(lambda));
  const auto supp = detail::support(model.potential);
  const Index m = static_cast<Index>(supp.size());

  StationaryIngredients ing;
  if (m == 0) {
    return {make_scattering_result(MatrixXcd::Identity(2, 2), lambda, k, ScatteringMethod::stationary, margin),
            std::move(ing)};
  }

  VectorXd v(m);
  for (Index a = 0; a < m; ++a) {
    ing.sites.push_back(supp[static_cast<std::size_t>(a)].site);
    v(a) = supp[static_cast<std::size_t>(a)].value;
  }
  const Factorization fact = Factorization::of(v);

  ing.T.resize(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b)
      ing.T(a, b) = fact.g(a) * free_lattice_green(lambda, ing.sites[a], ing.sites[b]) * fact.g(b);

  // Plane-wave weight 1/(2 pi |d lambda/dk|) = 1/(4 pi sin k) per channel.
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * sin_k);
  ing.Z.resize(2, m);
  for (Index a = 0; a < m; ++a) {
    const double n = static_cast<double>(ing.sites[a]);
    ing.Z(0, a) = fact.g(a) * std::polar(norm, k * n);   // right-moving e^{-ikn}
    ing.Z(1, a) = fact.g(a) * std::polar(norm, -k * n);  // left-moving e^{+ikn}
  }

  const MatrixXcd v0 = fact.v0.cast<cplx>().asDiagonal();
  const MatrixXcd lhs = MatrixXcd::Identity(m, m) + ing.T * v0;
  const VectorXd sv = Eigen::JacobiSVD<MatrixXcd>(lhs).singularValues();
  ing.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(ing.condition_number < max_condition)) {
    std::ostringstream os;
    os << "I + T V0 has condition number " << ing.condition_number << " at lambda=" << lambda;
    throw Error(ErrorKind::spectral_irregularity, os.str());
  }
  ing.Y = v0 * lhs.partialPivLu().inverse();

  MatrixXcd s = MatrixXcd::Identity(2, 2) -
                cplx(0.0, 2.0 * std::numbers::pi) * ing.Z * ing.Y * ing.Z.adjoint();
  return {make_scattering_result(std::move(s), lambda, k, ScatteringMethod::stationary, margin), std::move(ing)};
}

/// Transmission/reflection from products of one-site transfer matrices.
inline ScatteringResult transfer_smatrix(const LatticeModel& model, double lambda) {
  detail::require_point_masses(model);
  const double k = lattice_wavenumber(lambda);
  const double sin_k = std::sin(k);
  if (sin_k < kTransferSinMin) {
    std::ostringstream os;
    os << "too close to band edge: |sin k| = " << sin_k << " < " << kTransferSinMin;
    throw Error(ErrorKind::band_edge, os.str());
  }
  const double margin = std::min(sin_k, 2.0 - std::abs(lambda));
  const auto supp = detail::support(model.potential);
  if (supp.empty())
    return make_scattering_result(MatrixXcd::Identity(2, 2), lambda, k, ScatteringMethod::transfer, margin);

  const long a = supp.front().site;
  const long b = supp.back().site;
  auto step = [&](long n) {
    Eigen::Matrix2cd t;
    t << lambda - model.potential.at_site(n), -1.0, 1.0, 0.0;
    return t;
  };
  auto wave = [k](double sign, long n) { return std::polar(1.0, sign * k * static_cast<double>(n)); };

  // Coefficients (c+, c-) of c+ e^{ikn} + c- e^{-ikn} matching psi(n0), psi(n0+1).
  auto decompose = [&](long n0, cplx psi0, cplx psi1) {
    Eigen::Matrix2cd basis;
    basis << wave(1, n0), wave(-1, n0), wave(1, n0 + 1), wave(-1, n0 + 1);
    return Eigen::Vector2cd(basis.partialPivLu().solve(Eigen::Vector2cd(psi0, psi1)));
  };

  // Incident from the left: psi = e^{-ikn} for n >= b, sweep backwards.
  // (psi(n-1), psi(n)) = M_n (psi(n), psi(n+1))
  Eigen::Matrix2cd back = Eigen::Matrix2cd::Identity();
  for (long n = a; n <= b; ++n) back = back * step(n);
  const Eigen::Vector2cd left_end = back * Eigen::Vector2cd(wave(-1, b), wave(-1, b + 1));
  const Eigen::Vector2cd cl = decompose(a - 1, left_end(0), left_end(1));
  const cplx t_left = 1.0 / cl(1);
  const cplx r_left = cl(0) / cl(1);

  // Incident from the right: psi = e^{ikn} for n <= a, sweep forwards.
  // (psi(n+1), psi(n)) = M_n (psi(n), psi(n-1))
  Eigen::Matrix2cd fwd = Eigen::Matrix2cd::Identity();
  for (long n = a; n <= b; ++n) fwd = step(n) * fwd;
  const Eigen::Vector2cd right_end = fwd * Eigen::Vector2cd(wave(1, a), wave(1, a - 1));
  const Eigen::Vector2cd cr = decompose(b, right_end(1), right_end(0));
  const cplx t_right = 1.0 / cr(0);
  const cplx r_right = cr(1) / cr(0);

  MatrixXcd s(2, 2);
  s << t_left, r_right, r_left, t_right;
  return make_scattering_result(std::move(s), lambda, k, ScatteringMethod::transfer, margin);
}

// ---------------------------------------------------------------------------
// continuum

namespace detail {

/// Integrates -u'' + V u = lambda u from x0 to x1 in `steps` RK4 steps.
/// V is sampled just inside each step so breakpoints on the step grid are
/// resolved one-sidedly.
inline Eigen::Vector2cd rk4_propagate(const PotentialSpec& pot, double lambda, double x0, double x1, long steps,
                                      Eigen::Vector2cd y) {
  const double h = (x1 - x0) / static_cast<double>(steps);
  const double nudge = 1e-9 * h;
  auto rhs = [&](double x, const Eigen::Vector2cd& s) {
    return Eigen::Vector2cd(s(1), (pot(x) - lambda) * s(0));
  };
  for (long j = 0; j < steps; ++j) {
    const double x = x0 + static_cast<double>(j) * h;
    const Eigen::Vector2cd k1 = rhs(x + nudge, y);
    const Eigen::Vector2cd k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
    const Eigen::Vector2cd k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
    const Eigen::Vector2cd k4 = rhs(x + h - nudge, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

inline MatrixXcd continuum_s_at(const PotentialSpec& pot, double lambda, double a, long steps) {
  const double k = std::sqrt(lambda);
  const cplx ik(0.0, k);
  // u = alpha e^{ikx} + beta e^{-ikx}
  auto split = [&](double x, const Eigen::Vector2cd& y) {
    const cplx alpha = 0.5 * (y(0) + y(1) / ik) * std::polar(1.0, -k * x);
    const cplx beta = 0.5 * (y(0) - y(1) / ik) * std::polar(1.0, k * x);
    return std::pair{alpha, beta};
  };
  const cplx ea = std::polar(1.0, k * a);
  // Incident from the left: u = e^{ikx} for x >= a.
  const auto yl = rk4_propagate(pot, lambda, a, -a, steps, Eigen::Vector2cd(ea, ik * ea));
  const auto [al, bl] = split(-a, yl);
  // Incident from the right: u = e^{-ikx} for x <= -a.
  const auto yr = rk4_propagate(pot, lambda, -a, a, steps, Eigen::Vector2cd(ea, -ik * ea));
  const auto [ar, br] = split(a, yr);
  MatrixXcd s(2, 2);
  s << 1.0 / al, ar / br, bl / al, 1.0 / br;
  return s;
}

}  // namespace detail

/// S(lambda) for -u'' + V u on the line, V supported in [-X/2, X/2]; step
/// h = 2X/(n+1) with a step-halving check.
inline ScatteringResult continuum_smatrix(const ContinuumModel& model, double lambda) {
  if (!(lambda > 0.05)) throw Error(ErrorKind::band_edge, "continuum scattering needs lambda > 0.05");
  const double a = 0.5 * model.half_length;
  const double k = std::sqrt(lambda);
  const VectorXd xs = fd_grid(model.half_length, std::max<Index>(model.n, 2));
  bool all_zero = true;
  for (Index i = 0; i < xs.size(); ++i) {
    const double v = model.potential(xs(i));
    if (v != 0.0) all_zero = false;
    if (std::abs(xs(i)) > a && std::abs(v) >= 1e-10) {
      std::ostringstream os;
      os << "potential is not negligible outside [-X/2, X/2]: V(" << xs(i) << ") = " << v;
      throw Error(ErrorKind::invalid_argument, os.str());
    }
  }
  if (all_zero || model.potential.kind == PotentialSpec::Kind::point_masses)
    return make_scattering_result(MatrixXcd::Identity(2, 2), lambda, k, ScatteringMethod::continuum, lambda);

  const long steps = static_cast<long>(std::ceil(2.0 * a / model.step() - 1e-9));
  const MatrixXcd coarse = detail::continuum_s_at(model.potential, lambda, a, steps);
  MatrixXcd fine = detail::continuum_s_at(model.potential, lambda, a, 2 * steps);
  const double change = (fine - coarse).cwiseAbs().maxCoeff();
  if (!(change < kRichardsonTol)) {
    std::ostringstream os;
    os << "halving the step changed S by " << change << " (h=" << 2.0 * a / static_cast<double>(steps) << ")";
    throw Error(ErrorKind::resolution_insufficient, os.str());
  }
  return make_scattering_result(std::move(fine), lambda, k, ScatteringMethod::continuum, lambda);
}

}  // namespace sigma0
