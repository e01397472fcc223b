#pragma once

// delta-sweep of the full pipeline: scattering at lambda, Hankel values,
// limit set, then eigenvalue counts of A(delta) at the safe thresholds.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sigma0/birman_krein.hpp"
#include "sigma0/hankel.hpp"
#include "sigma0/limitset.hpp"
#include "sigma0/scattering.hpp"
#include "sigma0/spectral.hpp"
#include "sigma0/verify/config.hpp"

namespace sigma0::verify {

struct StageError {
  std::string stage;
  ErrorKind kind = ErrorKind::invalid_argument;
  std::string message;
};

/// Runs f; on failure records the stage and returns nullopt.
template <class F>
auto guarded(const std::string& stage, std::vector<StageError>& errors, F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const Error& e) {
    errors.push_back({stage, e.kind(), e.what()});
  } catch (const std::exception& e) {
    errors.push_back({stage, ErrorKind::invalid_argument, e.what()});
  }
  return std::nullopt;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------- scattering

struct ScatterRecord {
  ScatteringResult result;  // transfer (lattice) or continuum
  std::optional<ScatteringResult> stationary;
  double cross_method_diff = 0.0;
  double condition_number = 1.0;
  DeterminantCheck determinant;
  bool unitary_ok = true;
  bool cross_ok = true;
  bool determinant_ok = true;

  bool passed() const { return unitary_ok && cross_ok && determinant_ok; }
};

inline ContinuumModel continuum_scattering_model(const ExperimentConfig& cfg) {
  const double x = cfg.continuum_half_length;
  return ContinuumModel{x, continuum_points(x, cfg.continuum_step), cfg.potential};
}

inline ScatterRecord scatter_point(const ExperimentConfig& cfg, double lambda) {
  ScatterRecord rec;
  if (cfg.model == ModelKind::lattice) {
    const LatticeModel model{std::max(1L, 4 * cfg.potential.max_abs_site()), cfg.potential};
    rec.result = transfer_smatrix(model, lambda);
    StationaryResult st = stationary_smatrix(model, lambda);
    rec.condition_number = st.ingredients.condition_number;
    rec.cross_method_diff = (rec.result.S - st.result.S).norm();
    rec.stationary = std::move(st.result);
    rec.cross_ok = rec.cross_method_diff <= cfg.tol.cross_method;
    rec.unitary_ok = rec.stationary->unitarity_defect() <= cfg.tol.unitarity;
  } else {
    rec.result = continuum_smatrix(continuum_scattering_model(cfg), lambda);
  }
  rec.unitary_ok = rec.unitary_ok && rec.result.unitarity_defect() <= cfg.tol.unitarity;
  rec.determinant = determinant_check(rec.result);
  rec.determinant_ok = rec.determinant.residual <= cfg.tol.determinant;
  return rec;
}

// --------------------------------------------------------------------- sweep

struct ThresholdCount {
  double s = 0.0;
  Index n_plus = 0;
  Index n_minus = 0;
  Index n0 = 0;
  bool match = false;
  bool unstable = false;
};

struct CorollaryWindow {
  double nu = 0.0;  // signed limit value
  double rho = 0.0;
  Index count = 0;
  Index expected = 0;
  bool match = false;
};

struct DeltaRun {
  double delta = 0.0;
  long half_width = 0;       // lattice L
  double half_length = 0.0;  // continuum X
  Index dim = 0;
  std::vector<double> top_eigenvalues;     // five largest, descending
  std::vector<double> bottom_eigenvalues;  // five smallest, ascending
  std::vector<ThresholdCount> counts;
  std::vector<CorollaryWindow> corollary;
  bool counting_monotone = true;
  std::optional<StageError> error;
  double seconds = 0.0;  // not part of report.json

  bool all_match() const {
    return !error && std::all_of(counts.begin(), counts.end(), [](const ThresholdCount& c) { return c.match; });
  }
  bool corollary_match() const {
    return !error && std::all_of(corollary.begin(), corollary.end(), [](const CorollaryWindow& w) { return w.match; });
  }
};

struct OnsetViolation {
  double s = 0.0;
  double matched_at = 0.0;
  double lost_at = 0.0;
};

struct CountingReport {
  json config;
  Tolerances tol;
  double lambda = 0.0;
  std::optional<ScatterRecord> scattering;
  std::optional<HankelSpectrum> hankel;
  std::optional<LimitSet> limit_set;
  std::vector<double> thresholds;
  std::vector<DeltaRun> runs;
  std::vector<OnsetViolation> onset_violations;
  std::optional<double> match_onset_delta;  // largest delta from which every smaller delta matches
  double require_match_at_or_below = 0.0;
  bool required_match_ok = true;
  bool corollary_ok = true;
  bool counting_monotone = true;
  std::vector<std::string> warnings;
  std::vector<StageError> errors;
  std::map<std::string, double> timings;

  bool passed(bool strict = false) const {
    if (!errors.empty()) return false;
    if (scattering && !scattering->passed()) return false;
    if (!required_match_ok || !corollary_ok || !counting_monotone) return false;
    for (const auto& r : runs)
      if (r.error) return false;
    return !strict || warnings.empty();
  }
};

namespace detail {

inline ModelPair build_pair(const ExperimentConfig& cfg, double delta, DeltaRun& run) {
  if (cfg.model == ModelKind::lattice) {
    run.half_width = lattice_half_width(cfg, delta);
    return build_lattice_pair(run.half_width, cfg.potential);
  }
  run.half_length = continuum_half_length(cfg, delta);
  return build_continuum_pair(run.half_length, continuum_points(run.half_length, cfg.continuum_step), cfg.potential);
}

inline DeltaRun run_delta(const ExperimentConfig& cfg, const LimitSet& ls, const std::vector<double>& thresholds,
                          double delta) {
  Stopwatch clock;
  DeltaRun run;
  run.delta = delta;
  std::string stage = "model";
  try {
    const ModelPair pair = build_pair(cfg, delta, run);
    run.dim = pair.h0.dim();
    stage = "spectrum";
    const VectorXd eig = difference_spectrum(pair.h0, pair.h, cfg.symbol, delta, cfg.lambda, false).eigenvalues;
    const std::span<const double> es(eig.data(), static_cast<std::size_t>(eig.size()));
    const std::size_t shown = std::min<std::size_t>(5, es.size());
    for (std::size_t i = 0; i < shown; ++i) {
      run.top_eigenvalues.push_back(es[es.size() - 1 - i]);
      run.bottom_eigenvalues.push_back(es[i]);
    }

    stage = "counting";
    for (double s : thresholds) {
      const CountAbove c = counting_above(es, s);
      ThresholdCount tc{s, c.n_plus, c.n_minus, N0(ls, s), false, c.unstable_threshold};
      tc.match = tc.n_plus == tc.n0 && tc.n_minus == tc.n0;
      if (!run.counts.empty()) {
        const auto& prev = run.counts.back();  // larger threshold
        if (tc.n_plus < prev.n_plus || tc.n_minus < prev.n_minus) run.counting_monotone = false;
      }
      if (tc.n_plus > run.dim || tc.n_minus > run.dim) run.counting_monotone = false;
      run.counts.push_back(tc);
    }

    stage = "corollary";
    for (std::size_t i = 0; i < ls.values.size(); ++i) {
      const double rho = local_gap(ls, i) / 3.0;
      for (double sign : {1.0, -1.0}) {
        CorollaryWindow w;
        w.nu = sign * ls.values[i].value;
        w.rho = rho;
        w.expected = ls.values[i].multiplicity;
        for (double e : es)
          if (e > w.nu - rho && e < w.nu + rho) ++w.count;
        w.match = w.count == w.expected;
        run.corollary.push_back(w);
      }
    }
  } catch (const Error& e) {
    run.error = StageError{stage, e.kind(), e.what()};
  } catch (const std::exception& e) {
    run.error = StageError{stage, ErrorKind::invalid_argument, e.what()};
  }
  run.seconds = clock.seconds();
  return run;
}

}  // namespace detail

/// Evaluates fn(i) for i in [0, n) on up to `jobs` threads; results keep
/// index order.
template <class F>
auto parallel_map(std::size_t n, int jobs, F fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) slots[i] = fn(i);
  };
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  std::vector<std::future<void>> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
  if (workers > 0) worker();
  for (auto& f : pool) f.get();
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline CountingReport run_sweep(const ExperimentConfig& cfg, int jobs = 1) {
  CountingReport rep;
  rep.config = cfg.raw;
  rep.tol = cfg.tol;
  rep.lambda = cfg.lambda;
  rep.require_match_at_or_below = cfg.require_match_at_or_below;

  Stopwatch clock;
  rep.scattering = guarded("scattering", rep.errors, [&] { return scatter_point(cfg, cfg.lambda); });
  rep.timings["scattering"] = clock.seconds();
  if (!rep.scattering) return rep;

  clock = {};
  HankelOptions hopts;
  hopts.tolerance = cfg.tol.hankel_convergence;
  rep.hankel = guarded("hankel", rep.errors, [&] { return singular_values(cfg.symbol, cfg.hankel_m, hopts); });
  rep.timings["hankel"] = clock.seconds();
  if (!rep.hankel) return rep;

  rep.limit_set = guarded("limitset", rep.errors, [&] { return build_sigma0(*rep.hankel, rep.scattering->result); });
  if (!rep.limit_set) return rep;
  auto th = guarded("limitset", rep.errors, [&] { return safe_thresholds(*rep.limit_set); });
  if (!th) return rep;
  rep.thresholds = std::move(*th);

  clock = {};
  rep.runs = parallel_map(cfg.deltas.size(), jobs, [&](std::size_t i) {
    return detail::run_delta(cfg, *rep.limit_set, rep.thresholds, cfg.deltas[i]);
  });
  rep.timings["sweep"] = clock.seconds();
  for (const auto& r : rep.runs) {
    std::ostringstream key;
    key << "delta=" << r.delta;
    rep.timings[key.str()] = r.seconds;
  }

  // Properties over the sweep (runs are in decreasing delta).
  for (const auto& r : rep.runs) {
    if (r.error) continue;
    rep.counting_monotone = rep.counting_monotone && r.counting_monotone;
    for (const auto& c : r.counts)
      if (c.unstable) {
        std::ostringstream os;
        os << "threshold s=" << c.s << " lies within " << kUnstableBand << " of an eigenvalue at delta=" << r.delta;
        rep.warnings.push_back(os.str());
      }
  }
  for (std::size_t t = 0; t < rep.thresholds.size(); ++t) {
    std::optional<double> matched;
    for (const auto& r : rep.runs) {
      if (r.error) continue;
      if (r.counts[t].match) {
        if (!matched) matched = r.delta;
      } else if (matched) {
        rep.onset_violations.push_back({rep.thresholds[t], *matched, r.delta});
        std::ostringstream os;
        os << "match at s=" << rep.thresholds[t] << " held at delta=" << *matched << " but failed at delta=" << r.delta;
        rep.warnings.push_back(os.str());
        matched.reset();
      }
    }
  }
  for (auto it = rep.runs.rbegin(); it != rep.runs.rend() && it->all_match(); ++it) rep.match_onset_delta = it->delta;

  for (const auto& r : rep.runs)
    if (r.delta <= cfg.require_match_at_or_below * (1.0 + 1e-12) && !r.all_match()) rep.required_match_ok = false;
  if (!rep.runs.empty()) rep.corollary_ok = rep.runs.back().corollary_match();
  return rep;
}

}  // namespace sigma0::verify
