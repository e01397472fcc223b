#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <variant>
#include <vector>

#include "sigma0/error.hpp"
#include "sigma0/symbol.hpp"

namespace sigma0 {

using cplx = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Relative tolerance for eigendecomposition residuals.
inline constexpr double kEigTol = 1e-10;
/// Largest asymmetry accepted (relative to the largest entry) before a matrix is rejected.
inline constexpr double kHermitianTol = 1e-12;
/// Thresholds closer than this to an eigenvalue produce an "unstable threshold" warning.
inline constexpr double kUnstableBand = 1e-9;

/// Dense self-adjoint matrix. Storage is real-symmetric whenever every
/// imaginary part is exactly zero, complex otherwise. The stored entries are
/// exactly Hermitian: inputs within kHermitianTol are symmetrised on entry.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(MatrixXd m) : data_(std::move(m)) { validate(); }

  explicit HermitianMatrix(MatrixXcd m) {
    if (m.size() > 0 && (m.imag().array() == 0.0).all()) {
      data_ = MatrixXd(m.real());
    } else {
      data_ = std::move(m);
    }
    validate();
  }

  static HermitianMatrix zero(Index n) { return HermitianMatrix(MatrixXd(MatrixXd::Zero(n, n))); }
  static HermitianMatrix identity(Index n) { return HermitianMatrix(MatrixXd(MatrixXd::Identity(n, n))); }
  static HermitianMatrix diagonal(const VectorXd& d) { return HermitianMatrix(MatrixXd(d.asDiagonal())); }

  Index dim() const {
    return std::visit([](const auto& m) { return m.rows(); }, data_);
  }

  bool is_real() const noexcept { return std::holds_alternative<MatrixXd>(data_); }

  /// Real storage; only valid when is_real().
  const MatrixXd& real_entries() const { return std::get<MatrixXd>(data_); }

  MatrixXcd to_complex() const {
    if (is_real()) return std::get<MatrixXd>(data_).cast<cplx>();
    return std::get<MatrixXcd>(data_);
  }

  cplx operator()(Index i, Index j) const {
    return std::visit([&](const auto& m) { return cplx(m(i, j)); }, data_);
  }

  double frobenius_norm() const {
    return std::visit([](const auto& m) { return m.norm(); }, data_);
  }

  HermitianMatrix operator+(const HermitianMatrix& o) const { return combine(o, +1.0); }
  HermitianMatrix operator-(const HermitianMatrix& o) const { return combine(o, -1.0); }

  /// A + shift * I
  HermitianMatrix shifted(double shift) const {
    return std::visit(
        [&](auto m) {
          m.diagonal().array() += shift;
          return HermitianMatrix(std::move(m));
        },
        data_);
  }

  /// U A U^*
  HermitianMatrix conjugated_by(const MatrixXcd& u) const {
    MatrixXcd r = u * to_complex() * u.adjoint();
    return HermitianMatrix(MatrixXcd(0.5 * (r + r.adjoint())));
  }

 private:
  HermitianMatrix combine(const HermitianMatrix& o, double sign) const {
    if (dim() != o.dim())
      throw Error(ErrorKind::dimension_mismatch,
                  "cannot combine matrices of dimension " + std::to_string(dim()) + " and " + std::to_string(o.dim()));
    if (is_real() && o.is_real()) return HermitianMatrix(MatrixXd(real_entries() + sign * o.real_entries()));
    return HermitianMatrix(MatrixXcd(to_complex() + sign * o.to_complex()));
  }

  void validate() {
    std::visit(
        [](auto& m) {
          if (m.rows() < 1 || m.rows() != m.cols()) {
            std::ostringstream os;
            os << "expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
            throw Error(ErrorKind::not_hermitian, os.str());
          }
          const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
          Index worst_i = 0, worst_j = 0;
          const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff(&worst_i, &worst_j);
          if (!(asym <= kHermitianTol * scale)) {
            std::ostringstream os;
            os << "asymmetry " << asym << " at (" << worst_i << "," << worst_j << ") exceeds "
               << kHermitianTol << " x " << scale;
            throw Error(ErrorKind::not_hermitian, os.str());
          }
          if (asym > 0.0) {
            auto sym = (0.5 * (m + m.adjoint())).eval();
            m = sym;
          }
        },
        data_);
  }

  std::variant<MatrixXd, MatrixXcd> data_;
};

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
struct SpectralDecomposition {
  VectorXd eigenvalues;
  MatrixXcd eigenvectors;  // empty when only values were requested
};

inline SpectralDecomposition eigendecompose(const HermitianMatrix& a, bool with_vectors = true) {
  const int opts = with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  SpectralDecomposition out;
  if (a.is_real()) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.real_entries(), opts);
    out.eigenvalues = es.eigenvalues();
    if (with_vectors) out.eigenvectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a.to_complex(), opts);
    out.eigenvalues = es.eigenvalues();
    if (with_vectors) out.eigenvectors = es.eigenvectors();
  }
  return out;
}

inline VectorXd eigenvalues(const HermitianMatrix& a) { return eigendecompose(a, false).eigenvalues; }

/// phi(A) = U diag(phi(lambda_i)) U^*
inline HermitianMatrix apply_function(const HermitianMatrix& a, const SymbolFunction& phi) {
  if (a.is_real()) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.real_entries());
    const VectorXd f = es.eigenvalues().unaryExpr([&](double x) { return phi(x); });
    MatrixXd r = (es.eigenvectors() * f.asDiagonal()) * es.eigenvectors().transpose();
    MatrixXd sym = 0.5 * (r + r.transpose());
    return HermitianMatrix(std::move(sym));
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a.to_complex());
  const VectorXd f = es.eigenvalues().unaryExpr([&](double x) { return phi(x); });
  MatrixXcd r = (es.eigenvectors() * f.cast<cplx>().asDiagonal()) * es.eigenvectors().adjoint();
  MatrixXcd sym = 0.5 * (r + r.adjoint());
  return HermitianMatrix(std::move(sym));
}

/// N_A(s, inf) and N_{-A}(s, inf).
struct CountAbove {
  Index n_plus = 0;
  Index n_minus = 0;
  bool unstable_threshold = false;  // s within kUnstableBand of an eigenvalue of +-A
};

inline CountAbove counting_above(std::span<const double> eigs, double s) {
  if (!(s > 0.0)) throw Error(ErrorKind::invalid_argument, "counting threshold must be positive");
  CountAbove c;
  for (double e : eigs) {
    if (e > s) ++c.n_plus;
    if (e < -s) ++c.n_minus;
    if (std::abs(std::abs(e) - s) <= kUnstableBand) c.unstable_threshold = true;
  }
  return c;
}

inline CountAbove counting_above(const VectorXd& eigs, double s) {
  return counting_above(std::span<const double>(eigs.data(), static_cast<std::size_t>(eigs.size())), s);
}

inline CountAbove counting_above(const HermitianMatrix& a, double s) { return counting_above(eigenvalues(a), s); }

/// Spectrum of A(delta) = phi_delta(H - lambda) - phi_delta(H0 - lambda).
inline SpectralDecomposition difference_spectrum(const HermitianMatrix& h0, const HermitianMatrix& h,
                                                 const SymbolFunction& phi, double delta, double lambda,
                                                 bool with_vectors = true) {
  if (h0.dim() != h.dim())
    throw Error(ErrorKind::dimension_mismatch,
                "H0 has dimension " + std::to_string(h0.dim()) + ", H has " + std::to_string(h.dim()));
  const SymbolFunction phi_d = dilate_symbol(phi, delta);
  const HermitianMatrix a = apply_function(h.shifted(-lambda), phi_d) - apply_function(h0.shifted(-lambda), phi_d);
  return eigendecompose(a, with_vectors);
}

}  // namespace sigma0
