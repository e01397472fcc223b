#pragma once

// report.json / counts.csv / timings.json writers. report.json and counts.csv
// hold only deterministic quantities; wall-clock times go to timings.json.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "sigma0/verify/sweep.hpp"

namespace sigma0::verify {

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const std::vector<cplx>& zs) {
  json a = json::array();
  for (cplx z : zs) a.push_back(to_json(z));
  return a;
}

inline json to_json(const MatrixXcd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Tolerances& t) {
  return {{"cross_method", t.cross_method},   {"unitarity", t.unitarity},
          {"determinant", t.determinant},     {"lemma", t.lemma},
          {"scaling", t.scaling},             {"hankel_convergence", t.hankel_convergence},
          {"hankel_oracle", t.hankel_oracle}, {"unstable_band", kUnstableBand},
          {"merge", kMergeTol},               {"channel", kChannelTol},
          {"truncation_floor", kTruncationFloor}};
}

inline json to_json(const StageError& e) { return {{"stage", e.stage}, {"kind", to_string(e.kind)}, {"message", e.message}}; }

inline json to_json(const ScatteringResult& r) {
  return {{"lambda", r.lambda},
          {"k", r.k},
          {"method", to_string(r.method)},
          {"S", to_json(r.S)},
          {"s_eigs", to_json(r.s_eigs)},
          {"unitarity_defect", r.unitarity_defect()},
          {"regularity_margin", r.regularity_margin}};
}

inline json to_json(const ScatterRecord& r) {
  json j = to_json(r.result);
  if (r.stationary) {
    j["stationary"] = to_json(*r.stationary);
    j["cross_method_diff"] = r.cross_method_diff;
    j["condition_number"] = r.condition_number;
  }
  j["determinant"] = {{"det", to_json(r.determinant.determinant)},
                      {"eigenvalue_product", to_json(r.determinant.eigenvalue_product)},
                      {"residual", r.determinant.residual}};
  j["checks"] = {{"unitary", r.unitary_ok}, {"cross_method", r.cross_ok}, {"determinant", r.determinant_ok}};
  return j;
}

inline json to_json(const HankelSpectrum& h) {
  return {{"M", h.truncation},
          {"grid_exponent", h.grid_exponent},
          {"tail_bound", h.tail_bound},
          {"analytic", h.analytic},
          {"singular_values", h.singular_values}};
}

inline json to_json(const LimitSet& ls) {
  json values = json::array();
  for (const auto& v : ls.values) {
    json src = json::array();
    for (const auto& [m, n] : v.sources) src.push_back({{"m", m}, {"n", n}});
    values.push_back({{"value", v.value}, {"multiplicity", v.multiplicity}, {"sources", std::move(src)}});
  }
  return {{"values", std::move(values)},
          {"truncation_bound", ls.truncation_bound},
          {"includes_zero", ls.includes_zero},
          {"total_multiplicity", ls.total_multiplicity()}};
}

inline json to_json(const DeltaRun& r) {
  json j{{"delta", r.delta}, {"dim", r.dim}};
  if (r.half_width > 0) j["L"] = r.half_width;
  if (r.half_length > 0.0) j["X"] = r.half_length;
  j["top_eigenvalues"] = r.top_eigenvalues;
  j["bottom_eigenvalues"] = r.bottom_eigenvalues;
  json counts = json::array();
  for (const auto& c : r.counts)
    counts.push_back({{"s", c.s},
                      {"n_plus", c.n_plus},
                      {"n_minus", c.n_minus},
                      {"n0", c.n0},
                      {"match", c.match},
                      {"unstable", c.unstable}});
  j["counts"] = std::move(counts);
  json cor = json::array();
  for (const auto& w : r.corollary)
    cor.push_back({{"nu", w.nu}, {"rho", w.rho}, {"count", w.count}, {"expected", w.expected}, {"match", w.match}});
  j["corollary"] = std::move(cor);
  j["counting_monotone"] = r.counting_monotone;
  j["all_match"] = r.all_match();
  j["error"] = r.error ? to_json(*r.error) : json(nullptr);
  return j;
}

inline json to_json(const CountingReport& rep, bool strict = false) {
  json j;
  j["config"] = rep.config.is_null() ? json::object() : rep.config;
  j["tolerances"] = to_json(rep.tol);
  j["lambda"] = rep.lambda;
  j["scattering"] = rep.scattering ? to_json(*rep.scattering) : json(nullptr);
  j["hankel"] = rep.hankel ? to_json(*rep.hankel) : json(nullptr);
  j["limit_set"] = rep.limit_set ? to_json(*rep.limit_set) : json(nullptr);
  j["thresholds"] = rep.thresholds;
  json runs = json::array();
  for (const auto& r : rep.runs) runs.push_back(to_json(r));
  j["runs"] = std::move(runs);
  json onset = json::array();
  for (const auto& v : rep.onset_violations) onset.push_back({{"s", v.s}, {"matched_at", v.matched_at}, {"lost_at", v.lost_at}});
  json errors = json::array();
  for (const auto& e : rep.errors) errors.push_back(to_json(e));
  j["summary"] = {{"require_match_at_or_below", rep.require_match_at_or_below},
                  {"required_match_ok", rep.required_match_ok},
                  {"match_onset_delta", rep.match_onset_delta ? json(*rep.match_onset_delta) : json(nullptr)},
                  {"corollary_ok", rep.corollary_ok},
                  {"counting_monotone", rep.counting_monotone},
                  {"onset_violations", std::move(onset)},
                  {"warnings", rep.warnings},
                  {"errors", std::move(errors)},
                  {"strict", strict},
                  {"passed", rep.passed(strict)}};
  return j;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

inline void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error(ErrorKind::io, "cannot create output directory " + dir.string() + ": " + ec.message());
}

inline std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline constexpr const char* kCountsHeader = "delta,s,n_plus,n_minus,n0,match\n";

inline std::string counts_csv(const CountingReport& rep) {
  std::string out = kCountsHeader;
  for (const auto& r : rep.runs) {
    if (r.error) continue;
    for (const auto& c : r.counts) {
      out += detail::g17(r.delta) + ',' + detail::g17(c.s) + ',' + std::to_string(c.n_plus) + ',' +
             std::to_string(c.n_minus) + ',' + std::to_string(c.n0) + ',' + (c.match ? "true" : "false") + '\n';
    }
  }
  return out;
}

/// Writes report.json (+ counts.csv, timings.json) into dir. Verbs without
/// counting rows get a header-only counts.csv.
inline void write_outputs(const std::filesystem::path& dir, const json& report, const std::string& csv,
                          const std::map<std::string, double>& timings) {
  detail::prepare_dir(dir);
  detail::write_text(dir / "report.json", report.dump(2) + "\n");
  detail::write_text(dir / "counts.csv", csv);
  detail::write_text(dir / "timings.json", json(timings).dump(2) + "\n");
}

inline void emit(const CountingReport& rep, const std::filesystem::path& dir, bool strict = false) {
  write_outputs(dir, to_json(rep, strict), counts_csv(rep), rep.timings);
}

}  // namespace sigma0::verify
