#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "sigma0/error.hpp"
#include "sigma0/spectral.hpp"
#include "sigma0/symbol.hpp"

namespace sigma0 {

struct PointMass {
  long site = 0;
  double value = 0.0;
};

/// Perturbation V: either point masses on lattice sites or a function of x
/// sampled on a grid.
struct PotentialSpec {
  enum class Kind { point_masses, sampled_function };

  Kind kind = Kind::point_masses;
  std::vector<PointMass> masses;
  std::function<double(double)> function;
  std::string label = "zero";
  DecayBound decay{1.0, 2.0};

  static PotentialSpec zero() { return {}; }

  static PotentialSpec point_masses(std::vector<PointMass> m) {
    PotentialSpec p;
    p.masses = std::move(m);
    p.label = "point-masses";
    return p;
  }

  static PotentialSpec sampled(std::string label, std::function<double(double)> f, DecayBound decay) {
    PotentialSpec p;
    p.kind = Kind::sampled_function;
    p.function = std::move(f);
    p.label = std::move(label);
    p.decay = decay;
    return p;
  }

  long max_abs_site() const {
    long r = 0;
    for (const auto& m : masses) r = std::max(r, std::labs(m.site));
    return r;
  }

  /// Value on a lattice site (sum of masses placed there).
  double at_site(long n) const {
    double v = 0.0;
    for (const auto& m : masses)
      if (m.site == n) v += m.value;
    return v;
  }

  double operator()(double x) const { return function ? function(x) : 0.0; }
};

/// V = G V0 G with G = |V|^{1/2}, V0 = sign(V), both diagonal.
struct Factorization {
  VectorXd g;
  VectorXd v0;

  static Factorization of(const VectorXd& v) {
    Factorization f;
    f.g = v.cwiseAbs().cwiseSqrt();
    f.v0 = v.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
    return f;
  }

  /// G V0 G, the diagonal of the perturbation actually applied.
  VectorXd product() const { return g.cwiseProduct(v0).cwiseProduct(g); }
};

struct ModelPair {
  HermitianMatrix h0;
  HermitianMatrix h;
  Factorization fact;
  VectorXd coordinates;  // lattice site or grid abscissa of each basis vector
};

/// Lattice on sites -L..L with Dirichlet truncation of u(n+1) + u(n-1).
struct LatticeModel {
  long half_width = 0;
  PotentialSpec potential;

  Index dim() const { return 2 * half_width + 1; }
};

inline void validate_lattice(const LatticeModel& m) {
  if (m.half_width < 1) throw Error(ErrorKind::invalid_argument, "lattice half-width must be >= 1");
  if (m.potential.kind != PotentialSpec::Kind::point_masses)
    throw Error(ErrorKind::invalid_argument, "lattice models take point-mass potentials");
  for (const auto& pm : m.potential.masses) {
    if (4 * std::labs(pm.site) > m.half_width)
      throw Error(ErrorKind::invalid_argument, "potential site " + std::to_string(pm.site) +
                                                   " outside allowed region |n| <= L/4 for L=" +
                                                   std::to_string(m.half_width));
  }
}

inline ModelPair build_lattice_pair(const LatticeModel& model) {
  validate_lattice(model);
  const long L = model.half_width;
  const Index n = model.dim();
  MatrixXd h0 = MatrixXd::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) h0(i, i + 1) = h0(i + 1, i) = 1.0;

  VectorXd v = VectorXd::Zero(n);
  VectorXd coords(n);
  for (Index i = 0; i < n; ++i) {
    coords(i) = static_cast<double>(i - L);
    v(i) = model.potential.at_site(static_cast<long>(i) - L);
  }
  Factorization fact = Factorization::of(v);
  MatrixXd h = h0;
  h.diagonal() += fact.product();
  return {HermitianMatrix(std::move(h0)), HermitianMatrix(std::move(h)), std::move(fact), std::move(coords)};
}

inline ModelPair build_lattice_pair(long half_width, const PotentialSpec& pot) {
  return build_lattice_pair(LatticeModel{half_width, pot});
}

/// Second-order Dirichlet Laplacian on [-X, X] with n interior points,
/// h = 2X/(n+1): tridiag(-1, 2, -1) / h^2.
inline MatrixXd fd_laplacian(double half_length, Index n) {
  if (!(half_length > 0.0) || n < 1) throw Error(ErrorKind::invalid_argument, "fd_laplacian needs X > 0 and n >= 1");
  const double h = 2.0 * half_length / static_cast<double>(n + 1);
  const double inv_h2 = 1.0 / (h * h);
  MatrixXd m = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = 2.0 * inv_h2;
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = -inv_h2;
  }
  return m;
}

inline VectorXd fd_grid(double half_length, Index n) {
  const double h = 2.0 * half_length / static_cast<double>(n + 1);
  VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = -half_length + static_cast<double>(i + 1) * h;
  return x;
}

struct ContinuumModel {
  double half_length = 0.0;  // X
  Index n = 0;
  PotentialSpec potential;

  double step() const { return 2.0 * half_length / static_cast<double>(n + 1); }
};

/// Checks |V(x)| <= C (1+|x|)^{-rho}, rho > 1, at every grid sample.
inline void check_decay(const PotentialSpec& pot, const VectorXd& xs) {
  if (pot.kind != PotentialSpec::Kind::sampled_function) return;
  if (!(pot.decay.rho > 1.0))
    throw Error(ErrorKind::invalid_argument, "potential decay exponent must exceed 1, got " + std::to_string(pot.decay.rho));
  for (Index i = 0; i < xs.size(); ++i) {
    const double v = pot(xs(i));
    if (!std::isfinite(v) || std::abs(v) > pot.decay.at(xs(i)))
      throw Error(ErrorKind::invalid_argument, "potential '" + pot.label + "' violates its decay bound at x=" +
                                                   std::to_string(xs(i)));
  }
}

inline ModelPair build_continuum_pair(const ContinuumModel& model) {
  if (model.n < 64) throw Error(ErrorKind::invalid_argument, "continuum model needs n >= 64");
  if (model.potential.kind != PotentialSpec::Kind::sampled_function && !model.potential.masses.empty())
    throw Error(ErrorKind::invalid_argument, "continuum models take sampled-function potentials");
  const VectorXd xs = fd_grid(model.half_length, model.n);
  check_decay(model.potential, xs);
  MatrixXd h0 = fd_laplacian(model.half_length, model.n);
  const VectorXd v = xs.unaryExpr([&](double x) { return model.potential(x); });
  Factorization fact = Factorization::of(v);
  MatrixXd h = h0;
  h.diagonal() += fact.product();
  return {HermitianMatrix(std::move(h0)), HermitianMatrix(std::move(h)), std::move(fact), xs};
}

inline ModelPair build_continuum_pair(double half_length, Index n, const PotentialSpec& pot) {
  return build_continuum_pair(ContinuumModel{half_length, n, pot});
}

}  // namespace sigma0
