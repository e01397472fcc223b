#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "sigma0/error.hpp"
#include "sigma0/hankel.hpp"
#include "sigma0/scattering.hpp"

namespace sigma0 {

/// Products closer than this are one point of the limit set.
inline constexpr double kMergeTol = 1e-9;
/// Channels with |s_n - 1| below this are treated as s_n = 1.
inline constexpr double kChannelTol = 1e-8;
/// Smallest truncation bound ever reported (eigensolver/SVD round-off level).
inline constexpr double kTruncationFloor = 1e-8;

struct LimitValue {
  double value = 0.0;
  Index multiplicity = 0;
  std::vector<std::pair<Index, Index>> sources;  // (hankel index m, channel index n), 0-based
};

/// Positive part of {+-mu_m |s_n - 1|} u {0}: values sorted descending, each
/// strictly above truncation_bound.
struct LimitSet {
  std::vector<LimitValue> values;
  double truncation_bound = kTruncationFloor;
  bool includes_zero = true;

  Index total_multiplicity() const {
    Index n = 0;
    for (const auto& v : values) n += v.multiplicity;
    return n;
  }
};

inline LimitSet build_sigma0(std::span<const double> mu, double tail_bound, std::span<const cplx> s_eigs,
                             std::span<const double> requested_thresholds = {}) {
  const double mu1 = mu.empty() ? 0.0 : mu.front();
  double dropped = 0.0;
  std::vector<Index> channels;
  for (std::size_t n = 0; n < s_eigs.size(); ++n) {
    const double d = std::abs(s_eigs[n] - 1.0);
    if (d < kChannelTol)
      dropped = std::max(dropped, d);
    else
      channels.push_back(static_cast<Index>(n));
  }

  LimitSet ls;
  ls.truncation_bound = std::max(2.0 * std::max(2.0 * tail_bound, mu1 * dropped), kTruncationFloor);

  struct Product {
    double value;
    Index m, n;
  };
  std::vector<Product> products;
  for (std::size_t m = 0; m < mu.size(); ++m)
    for (Index n : channels) {
      const double v = mu[m] * std::abs(s_eigs[static_cast<std::size_t>(n)] - 1.0);
      if (v > ls.truncation_bound) products.push_back({v, static_cast<Index>(m), n});
    }
  std::stable_sort(products.begin(), products.end(),
                   [](const Product& a, const Product& b) { return a.value > b.value; });

  for (const auto& p : products) {
    if (!ls.values.empty() && ls.values.back().value - p.value <= kMergeTol) {
      ls.values.back().multiplicity += 1;
      ls.values.back().sources.emplace_back(p.m, p.n);
    } else {
      ls.values.push_back({p.value, 1, {{p.m, p.n}}});
    }
  }

  if (!requested_thresholds.empty()) {
    const double largest = *std::max_element(requested_thresholds.begin(), requested_thresholds.end());
    if (ls.truncation_bound > largest) {
      std::ostringstream os;
      os << "truncation bound " << ls.truncation_bound << " exceeds the largest requested threshold " << largest;
      throw Error(ErrorKind::insufficient_truncation, os.str());
    }
  }
  return ls;
}

inline LimitSet build_sigma0(const HankelSpectrum& hs, const ScatteringResult& sc,
                             std::span<const double> requested_thresholds = {}) {
  return build_sigma0(hs.singular_values, hs.tail_bound, sc.s_eigs, requested_thresholds);
}

/// #{(n, m): mu_m |s_n - 1| > s}
inline Index N0(const LimitSet& ls, double s) {
  if (!(s > ls.truncation_bound)) {
    std::ostringstream os;
    os << "s=" << s << " is not above the truncation bound " << ls.truncation_bound;
    throw Error(ErrorKind::not_certifiable, os.str());
  }
  Index n = 0;
  for (const auto& v : ls.values)
    if (v.value > s) n += v.multiplicity;
  return n;
}

inline Index multiplicity(const LimitSet& ls, double nu) {
  const double a = std::abs(nu);
  if (!(a > ls.truncation_bound)) {
    std::ostringstream os;
    os << "|nu|=" << a << " is not above the truncation bound " << ls.truncation_bound;
    throw Error(ErrorKind::not_certifiable, os.str());
  }
  for (const auto& v : ls.values)
    if (std::abs(v.value - a) <= kMergeTol) return v.multiplicity;
  return 0;
}

/// Gap below value i: distance to the next smaller value, or to the truncation bound.
inline double gap_below(const LimitSet& ls, std::size_t i) {
  const double below = i + 1 < ls.values.size() ? ls.values[i + 1].value : ls.truncation_bound;
  return ls.values[i].value - below;
}

/// Distance from values[i] to its nearest neighbour in the certified set
/// (the truncation bound counts as the lower neighbour).
inline double local_gap(const LimitSet& ls, std::size_t i) {
  double g = gap_below(ls, i);
  if (i > 0) g = std::min(g, ls.values[i - 1].value - ls.values[i].value);
  return g;
}

/// Counting thresholds that avoid the limit set: one above the largest value,
/// geometric midpoints between consecutive values, one between the smallest
/// value and the truncation bound. Returned descending.
inline std::vector<double> safe_thresholds(const LimitSet& ls) {
  constexpr double resolution = 10.0 * kMergeTol;
  if (ls.values.empty()) return {2.0 * ls.truncation_bound};

  std::vector<double> out{1.5 * ls.values.front().value};
  bool any_gap = false;
  for (std::size_t i = 0; i < ls.values.size(); ++i) {
    const double upper = ls.values[i].value;
    const double lower = i + 1 < ls.values.size() ? ls.values[i + 1].value : ls.truncation_bound;
    const double gap = upper - lower;
    if (gap < resolution) continue;
    any_gap = true;
    const double s = std::clamp(std::sqrt(upper * lower), lower + 0.1 * gap, upper - 0.1 * gap);
    out.push_back(s);
  }
  if (!any_gap) throw Error(ErrorKind::degenerate_limit_set, "every gap of the limit set is below resolution");
  return out;
}

}  // namespace sigma0
