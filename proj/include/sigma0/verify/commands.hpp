#pragma once

// The five CLI verbs. Each reads an ExperimentConfig, writes report.json,
// counts.csv and timings.json into the output directory, and maps the outcome
// to an exit code.

#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "sigma0/hankel.hpp"
#include "sigma0/limitset.hpp"
#include "sigma0/model_operator.hpp"
#include "sigma0/verify/report.hpp"
#include "sigma0/verify/sweep.hpp"

namespace sigma0::verify {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitIoError = 3 };

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int jobs = 1;
  bool strict = false;
};

struct CommandOutcome {
  json report;
  std::string csv = kCountsHeader;
  std::map<std::string, double> timings;
  bool passed = false;
};

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
inline MatrixXcd random_unitary(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXcd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<MatrixXcd> qr(m);
  MatrixXcd q = qr.householderQ();
  const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
  return q;
}

inline json errors_json(const std::vector<StageError>& errors) {
  json a = json::array();
  for (const auto& e : errors) a.push_back(to_json(e));
  return a;
}

inline CommandOutcome cmd_hankel_sv(const ExperimentConfig& cfg) {
  CommandOutcome out;
  std::vector<StageError> errors;
  Stopwatch clock;
  HankelOptions opts;
  opts.tolerance = cfg.tol.hankel_convergence;
  const auto hs = guarded("hankel", errors, [&] { return singular_values(cfg.symbol, cfg.hankel_m, opts); });
  out.timings["hankel"] = clock.seconds();

  json oracle = nullptr;
  bool oracle_ok = true;
  if (hs && cfg.symbol_json.value("kind", "poisson") == "poisson") {
    // 1/(1 + (x/a)^2) has exactly one nonzero value, 1/4, times the scale.
    const double expected = 0.25 * std::abs(cfg.symbol_json.value("scale", 1.0));
    const double mu1 = hs->singular_values.empty() ? 0.0 : hs->singular_values[0];
    const double mu2 = hs->singular_values.size() > 1 ? hs->singular_values[1] : 0.0;
    oracle_ok = std::abs(mu1 - expected) <= cfg.tol.hankel_oracle && mu2 <= cfg.tol.hankel_oracle;
    oracle = {{"expected_mu1", expected}, {"mu1_error", std::abs(mu1 - expected)}, {"mu2", mu2}, {"passed", oracle_ok}};
  }
  out.passed = errors.empty() && oracle_ok;
  out.report = {{"verb", "hankel-sv"},
                {"config", cfg.raw},
                {"tolerances", to_json(cfg.tol)},
                {"hankel", hs ? to_json(*hs) : json(nullptr)},
                {"oracle", oracle},
                {"errors", errors_json(errors)},
                {"passed", out.passed}};
  return out;
}

inline CommandOutcome cmd_scatter(const ExperimentConfig& cfg, int jobs) {
  CommandOutcome out;
  std::vector<double> lambdas = cfg.scatter_lambdas;
  if (lambdas.empty()) lambdas.push_back(cfg.lambda);
  Stopwatch clock;
  struct Point {
    std::optional<ScatterRecord> rec;
    std::vector<StageError> errors;
  };
  const auto points = parallel_map(lambdas.size(), jobs, [&](std::size_t i) {
    Point p;
    p.rec = guarded("scattering", p.errors, [&] { return scatter_point(cfg, lambdas[i]); });
    return p;
  });
  out.timings["scattering"] = clock.seconds();

  json arr = json::array();
  out.passed = true;
  double worst_cross = 0.0, worst_unitarity = 0.0, worst_det = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    json j{{"lambda", lambdas[i]}, {"errors", errors_json(p.errors)}};
    if (p.rec) {
      j["result"] = to_json(*p.rec);
      worst_cross = std::max(worst_cross, p.rec->cross_method_diff);
      worst_unitarity = std::max(worst_unitarity, p.rec->result.unitarity_defect());
      worst_det = std::max(worst_det, p.rec->determinant.residual);
      out.passed = out.passed && p.rec->passed();
    } else {
      out.passed = false;
    }
    arr.push_back(std::move(j));
  }
  out.report = {{"verb", "scatter"},
                {"config", cfg.raw},
                {"tolerances", to_json(cfg.tol)},
                {"points", std::move(arr)},
                {"max_cross_method_diff", worst_cross},
                {"max_unitarity_defect", worst_unitarity},
                {"max_determinant_residual", worst_det},
                {"passed", out.passed}};
  return out;
}

inline CommandOutcome cmd_limitset(const ExperimentConfig& cfg) {
  CommandOutcome out;
  std::vector<StageError> errors;
  Stopwatch clock;
  const auto sc = guarded("scattering", errors, [&] { return scatter_point(cfg, cfg.lambda); });
  out.timings["scattering"] = clock.seconds();
  clock = {};
  HankelOptions opts;
  opts.tolerance = cfg.tol.hankel_convergence;
  std::optional<HankelSpectrum> hs;
  if (sc) hs = guarded("hankel", errors, [&] { return singular_values(cfg.symbol, cfg.hankel_m, opts); });
  out.timings["hankel"] = clock.seconds();
  std::optional<LimitSet> ls;
  if (hs) ls = guarded("limitset", errors, [&] { return build_sigma0(*hs, sc->result); });
  json thresholds = json::array();
  if (ls) {
    const auto th = guarded("limitset", errors, [&] { return safe_thresholds(*ls); });
    if (th)
      for (double s : *th) thresholds.push_back({{"s", s}, {"n0", N0(*ls, s)}});
  }
  out.passed = errors.empty() && sc->passed();
  out.report = {{"verb", "limitset"},
                {"config", cfg.raw},
                {"tolerances", to_json(cfg.tol)},
                {"scattering", sc ? to_json(*sc) : json(nullptr)},
                {"hankel", hs ? to_json(*hs) : json(nullptr)},
                {"limit_set", ls ? to_json(*ls) : json(nullptr)},
                {"thresholds", std::move(thresholds)},
                {"errors", errors_json(errors)},
                {"passed", out.passed}};
  return out;
}

inline CommandOutcome cmd_model_op_check(const ExperimentConfig& cfg) {
  CommandOutcome out;
  std::vector<StageError> errors;
  Stopwatch clock;
  const auto sc = guarded("scattering", errors, [&] { return scatter_point(cfg, cfg.lambda); });
  const auto hc = guarded("hankel", errors, [&] { return hankel_compute(cfg.symbol, cfg.model_op_m); });
  out.passed = sc && hc && sc->passed();

  std::vector<ScatteringResult> targets;
  if (sc) targets.push_back(sc->result);
  std::mt19937_64 rng(cfg.seed);
  for (int i = 0; i < cfg.random_unitaries; ++i)
    targets.push_back(make_scattering_result(random_unitary(2, rng), cfg.lambda, 0.0, ScatteringMethod::supplied, 0.0));

  json lemmas = json::array();
  if (hc) {
    for (const auto& t : targets) {
      const auto lemma = guarded("model-operator", errors, [&] {
        return check_lemma_c1(assemble(hc->gamma, t), build_sigma0(hc->spectrum, t), cfg.tol.lemma);
      });
      if (!lemma) {
        out.passed = false;
        continue;
      }
      out.passed = out.passed && lemma->passed;
      lemmas.push_back({{"method", to_string(t.method)},
                        {"s_eigs", to_json(t.s_eigs)},
                        {"passed", lemma->passed},
                        {"max_residual", lemma->max_residual},
                        {"matched", lemma->matched},
                        {"detail", lemma->detail}});
    }
  }
  out.timings["lemma"] = clock.seconds();

  clock = {};
  json scaling = nullptr;
  json hankel_scaling = nullptr;
  if (sc && !cfg.scaling_deltas.empty()) {
    const auto rep = guarded("scaling", errors, [&] {
      return check_scaling(cfg.symbol, cfg.scaling_deltas, sc->result, cfg.model_op_m, cfg.tol.scaling);
    });
    if (rep) {
      out.passed = out.passed && rep->passed;
      scaling = {{"deltas", rep->deltas},
                 {"top_moduli", rep->top_moduli},
                 {"max_deviation", rep->max_deviation},
                 {"passed", rep->passed}};
    } else {
      out.passed = false;
    }
    const auto hv = guarded("scaling", errors, [&] {
      std::vector<std::vector<double>> tops;
      for (double d : cfg.scaling_deltas) {
        auto v = hankel_compute(dilate_symbol(cfg.symbol, d), cfg.model_op_m).spectrum.singular_values;
        v.resize(std::min<std::size_t>(10, v.size()));
        tops.push_back(std::move(v));
      }
      return tops;
    });
    if (hv) {
      double dev = 0.0;
      for (const auto& v : *hv)
        for (std::size_t i = 0; i < v.size(); ++i) dev = std::max(dev, std::abs(v[i] - hv->front()[i]));
      const bool ok = dev <= cfg.tol.scaling;
      out.passed = out.passed && ok;
      hankel_scaling = {{"deltas", cfg.scaling_deltas}, {"top_values", *hv}, {"max_deviation", dev}, {"passed", ok}};
    } else {
      out.passed = false;
    }
  }
  out.timings["scaling"] = clock.seconds();
  out.passed = out.passed && errors.empty();
  out.report = {{"verb", "model-op-check"},
                {"config", cfg.raw},
                {"tolerances", to_json(cfg.tol)},
                {"M", cfg.model_op_m},
                {"lemma", std::move(lemmas)},
                {"model_operator_scaling", scaling},
                {"hankel_scaling", hankel_scaling},
                {"errors", errors_json(errors)},
                {"passed", out.passed}};
  return out;
}

inline CommandOutcome cmd_verify_theorem(const ExperimentConfig& cfg, int jobs, bool strict) {
  const CountingReport rep = run_sweep(cfg, jobs);
  CommandOutcome out;
  out.report = to_json(rep, strict);
  out.report["verb"] = "verify-theorem";
  out.csv = counts_csv(rep);
  out.timings = rep.timings;
  out.passed = rep.passed(strict);
  return out;
}

inline const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v{"hankel-sv", "scatter", "limitset", "model-op-check", "verify-theorem"};
  return v;
}

/// Runs a verb and writes its outputs; returns the process exit code.
inline int run_command(const std::string& verb, const std::filesystem::path& config_path, const RunOptions& opts,
                       std::ostream& log = std::cerr) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::io ? kExitIoError : kExitConfigError;
  }

  CommandOutcome out;
  if (verb == "hankel-sv") {
    out = cmd_hankel_sv(cfg);
  } else if (verb == "scatter") {
    out = cmd_scatter(cfg, opts.jobs);
  } else if (verb == "limitset") {
    out = cmd_limitset(cfg);
  } else if (verb == "model-op-check") {
    out = cmd_model_op_check(cfg);
  } else if (verb == "verify-theorem") {
    out = cmd_verify_theorem(cfg, opts.jobs, opts.strict);
  } else {
    log << "error: unknown verb '" << verb << "'\n";
    return kExitConfigError;
  }

  try {
    write_outputs(opts.out_dir, out.report, out.csv, out.timings);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitIoError;
  }
  log << verb << ": " << (out.passed ? "PASS" : "FAIL") << " (" << (opts.out_dir / "report.json").string() << ")\n";
  return out.passed ? kExitPass : kExitCheckFailed;
}

}  // namespace sigma0::verify
