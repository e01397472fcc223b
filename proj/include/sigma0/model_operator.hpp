#pragma once

// Finite truncations of H_phi (x) (S - I) + H_phi^* (x) (S^* - I), reduced to
// one antidiagonal block per eigenvalue of S.

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <vector>

#include "sigma0/hankel.hpp"
#include "sigma0/limitset.hpp"
#include "sigma0/scattering.hpp"
#include "sigma0/spectral.hpp"

namespace sigma0 {

struct ModelOperatorTruncation {
  Index M = 0;
  MatrixXcd S;
  std::vector<cplx> s_eigs;
  HermitianMatrix matrix = HermitianMatrix::zero(1);
};

/// Direct sum over eigenvalues s_n of [[0, (s_n - 1) G], [(conj(s_n) - 1) G^*, 0]].
inline ModelOperatorTruncation assemble(const MatrixXcd& gamma, const ScatteringResult& sc) {
  if (gamma.rows() != gamma.cols() || gamma.rows() < 1)
    throw Error(ErrorKind::invalid_argument, "Hankel block must be square and non-empty");
  const Index n_ch = sc.S.rows();
  const double defect = (sc.S.adjoint() * sc.S - MatrixXcd::Identity(n_ch, n_ch)).norm();
  if (!(defect <= kUnitarityTol)) {
    std::ostringstream os;
    os << "model operator needs a unitary S, ||S*S - I|| = " << defect;
    throw Error(ErrorKind::not_unitary, os.str());
  }
  const Index m = gamma.rows();
  const Index nb = static_cast<Index>(sc.s_eigs.size());
  MatrixXcd a = MatrixXcd::Zero(2 * m * nb, 2 * m * nb);
  for (Index n = 0; n < nb; ++n) {
    const cplx s = sc.s_eigs[static_cast<std::size_t>(n)];
    const Index o = 2 * m * n;
    a.block(o, o + m, m, m) = (s - 1.0) * gamma;
    a.block(o + m, o, m, m) = (std::conj(s) - 1.0) * gamma.adjoint();
  }
  return {m, sc.S, sc.s_eigs, HermitianMatrix(std::move(a))};
}

struct LemmaReport {
  bool passed = false;
  double max_residual = 0.0;
  Index matched = 0;
  std::vector<double> computed;  // eigenvalues above the truncation bound, descending
  std::vector<double> expected;  // +-values of the limit set with multiplicity, descending
  std::string detail;
};

/// Eigenvalues of the truncation above the truncation bound must coincide
/// with {+-nu} of the limit set (with multiplicity); the rest must sit below
/// the bound.
inline LemmaReport check_lemma_c1(const ModelOperatorTruncation& mot, const LimitSet& ls, double tol = 1e-8) {
  LemmaReport rep;
  const VectorXd eig = eigenvalues(mot.matrix);
  double below_max = 0.0;
  for (Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig(i)) > ls.truncation_bound)
      rep.computed.push_back(eig(i));
    else
      below_max = std::max(below_max, std::abs(eig(i)));
  }
  for (const auto& v : ls.values)
    for (Index k = 0; k < v.multiplicity; ++k) {
      rep.expected.push_back(v.value);
      rep.expected.push_back(-v.value);
    }
  std::sort(rep.computed.rbegin(), rep.computed.rend());
  std::sort(rep.expected.rbegin(), rep.expected.rend());

  std::ostringstream os;
  if (rep.computed.size() != rep.expected.size()) {
    os << "count mismatch: " << rep.computed.size() << " eigenvalues above the truncation bound "
       << ls.truncation_bound << " vs " << rep.expected.size() << " limit-set points";
    rep.detail = os.str();
    return rep;
  }
  for (std::size_t i = 0; i < rep.computed.size(); ++i)
    rep.max_residual = std::max(rep.max_residual, std::abs(rep.computed[i] - rep.expected[i]));
  rep.matched = static_cast<Index>(rep.computed.size());
  rep.passed = rep.max_residual <= tol && below_max <= ls.truncation_bound + tol;
  os << "matched " << rep.matched << " points, max residual " << rep.max_residual
     << ", largest eigenvalue below bound " << below_max;
  rep.detail = os.str();
  return rep;
}

struct ScalingReport {
  bool passed = false;
  double max_deviation = 0.0;
  std::vector<double> deltas;
  std::vector<std::vector<double>> top_moduli;  // per delta, descending
};

/// Spectra of the truncated model operator built from phi_delta agree
/// across delta on the top `compared` moduli.
inline ScalingReport check_scaling(const SymbolFunction& phi, std::span<const double> deltas,
                                   const ScatteringResult& sc, Index m, double tol = 1e-6,
                                   std::size_t compared = 10) {
  if (deltas.empty()) throw Error(ErrorKind::invalid_argument, "check_scaling needs at least one delta");
  ScalingReport rep;
  for (double d : deltas) {
    if (!(d > 0.0)) throw Error(ErrorKind::invalid_argument, "dilation parameters must be positive");
    const HankelComputation hc = hankel_compute(dilate_symbol(phi, d), m);
    const VectorXd eig = eigenvalues(assemble(hc.gamma, sc).matrix);
    std::vector<double> mod(eig.size());
    for (Index i = 0; i < eig.size(); ++i) mod[static_cast<std::size_t>(i)] = std::abs(eig(i));
    std::sort(mod.rbegin(), mod.rend());
    mod.resize(std::min(compared, mod.size()));
    rep.deltas.push_back(d);
    rep.top_moduli.push_back(std::move(mod));
  }
  for (const auto& mods : rep.top_moduli)
    for (std::size_t i = 0; i < mods.size(); ++i)
      rep.max_deviation = std::max(rep.max_deviation, std::abs(mods[i] - rep.top_moduli.front()[i]));
  rep.passed = rep.max_deviation <= tol;
  return rep;
}

}  // namespace sigma0
