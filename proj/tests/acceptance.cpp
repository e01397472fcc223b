// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all
// pass. Usage: acceptance [--work-dir DIR]

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sigma0/birman_krein.hpp"
#include "sigma0/hankel.hpp"
#include "sigma0/limitset.hpp"
#include "sigma0/model_operator.hpp"
#include "sigma0/scattering.hpp"
#include "sigma0/symbols.hpp"
#include "sigma0/verify/commands.hpp"

using namespace sigma0;
using namespace sigma0::verify;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // wall-clock limit; <= 0 means none
  std::function<Outcome()> run;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ScatteringResult supplied(const MatrixXcd& s) { return make_scattering_result(s, 0.0, 0.0, ScatteringMethod::supplied, 0.0); }

Outcome rank_one_hankel() {
  const HankelSpectrum hs = singular_values(symbols::poisson(), 512);
  const double mu1 = hs.singular_values.at(0), mu2 = hs.singular_values.at(1);
  const bool ok = std::abs(mu1 - 0.25) <= 1e-6 && mu2 <= 1e-6;
  return {ok, "M=512 mu1-1/4=" + fmt(mu1 - 0.25) + " mu2=" + fmt(mu2)};
}

Outcome model_operator_lemma() {
  std::mt19937_64 rng(20240521);
  double worst = 0.0;
  int runs = 0, failed = 0;
  for (const auto& phi : {symbols::poisson(), symbols::gaussian(1.0)}) {
    const auto hc = hankel_compute(phi, 128);
    for (int t = 0; t < 10; ++t) {
      const auto sc = supplied(random_unitary(2, rng));
      const auto rep = check_lemma_c1(assemble(hc.gamma, sc), build_sigma0(hc.spectrum, sc), 1e-8);
      worst = std::max(worst, rep.max_residual);
      ++runs;
      if (!rep.passed) ++failed;
    }
  }
  return {failed == 0, std::to_string(runs) + " random S, 2 symbols, M=128, max residual " + fmt(worst)};
}

Outcome counting_convergence(const fs::path& work) {
  const auto cfg = load_config(fs::path(SIGMA0_SOURCE_DIR) / "configs" / "lattice_main.json");
  if (cfg.deltas != std::vector<double>{0.2, 0.1, 0.05} || lattice_half_width(cfg, 0.05) != 800)
    return {false, "main config does not describe the desk-scale run"};
  const CountingReport rep = run_sweep(cfg, 1);
  emit(rep, work / "main");
  std::ostringstream os;
  bool ok = rep.errors.empty() && rep.runs.size() == 3;
  for (const auto& r : rep.runs) {
    if (r.error) {
      os << "delta=" << r.delta << " failed in " << r.error->stage << "; ";
      ok = false;
      continue;
    }
    std::size_t matched = 0;
    for (const auto& c : r.counts) matched += c.match;
    os << "delta=" << r.delta << " L=" << r.half_width << " " << matched << "/" << r.counts.size() << " thresholds match; ";
    if (r.delta <= 0.1 + 1e-12 && !r.all_match()) ok = false;
  }
  const auto& last = rep.runs.empty() ? DeltaRun{} : rep.runs.back();
  const bool corollary = !last.corollary.empty() && last.corollary_match() && last.delta == 0.05;
  os << "window counts at delta=0.05 " << (corollary ? "equal" : "differ from") << " multiplicities";
  return {ok && corollary && rep.passed(), os.str()};
}

Outcome cross_method() {
  double worst_cross = 0.0, worst_unit = 0.0, worst_det = 0.0;
  int points = 0;
  bool ok = true;
  for (double c : {0.25, 0.5, 1.0, 2.0}) {
    const std::vector<PotentialSpec> pots{
        PotentialSpec::point_masses({{0, c}}),
        PotentialSpec::point_masses({{-2, c}, {0, -0.5 * c}, {3, 0.75 * c}})};
    for (const auto& pot : pots)
      for (double lambda : {-1.0, 0.0, 1.0}) {
        const LatticeModel model{12, pot};
        const auto tr = transfer_smatrix(model, lambda);
        const auto st = stationary_smatrix(model, lambda).result;
        worst_cross = std::max(worst_cross, (tr.S - st.S).norm());
        worst_unit = std::max({worst_unit, tr.unitarity_defect(), st.unitarity_defect()});
        worst_det = std::max({worst_det, determinant_check(tr).residual, determinant_check(st).residual});
        ++points;
      }
  }
  ok = worst_cross <= 1e-8 && worst_unit <= 1e-8 && worst_det <= 1e-10;
  return {ok, std::to_string(points) + " (c, lambda, V) points: max |S_tr - S_st| " + fmt(worst_cross) +
                  ", max unitarity defect " + fmt(worst_unit) + ", max |det S - prod s| " + fmt(worst_det)};
}

Outcome trace_identity() {
  std::mt19937_64 rng(777);
  std::normal_distribution<double> g;
  double worst = 0.0;
  bool ok = true;
  int pairs = 0;
  for (const auto& phi : {symbols::poisson(), symbols::gaussian(0.7)}) {
    for (int t = 0; t < 5; ++t) {
      MatrixXd h0(50, 50);
      for (Index i = 0; i < 50; ++i)
        for (Index j = 0; j <= i; ++j) h0(i, j) = h0(j, i) = g(rng) / std::sqrt(50.0);
      MatrixXd h = h0;
      for (Index i = 0; i < 50; ++i) h(i, i) += g(rng);
      const auto rep = trace_formula_check(HermitianMatrix(h0), HermitianMatrix(h), phi);
      worst = std::max(worst, rep.residual());
      ok = ok && rep.refinement_ok && rep.residual() <= 1e-6;
      ++pairs;
    }
  }
  // Determinant = product of eigenvalues on the scattering runs.
  double worst_det = 0.0;
  for (double c : {0.25, 1.0, 2.0})
    for (double lambda : {-1.0, 0.0, 1.0}) {
      const LatticeModel model{4, PotentialSpec::point_masses({{0, c}})};
      worst_det = std::max({worst_det, determinant_check(transfer_smatrix(model, lambda)).residual,
                            determinant_check(stationary_smatrix(model, lambda).result).residual});
    }
  ok = ok && worst_det <= 1e-10;
  return {ok, std::to_string(pairs) + " random 50x50 pairs: max trace residual " + fmt(worst) +
                  "; max |det S - prod s| " + fmt(worst_det)};
}

Outcome dilation_invariance() {
  const std::vector<double> deltas{0.5, 1.0, 2.0};
  std::mt19937_64 rng(99);
  const auto lattice_s = transfer_smatrix(LatticeModel{4, PotentialSpec::point_masses({{0, 1.0}})}, 0.0);
  const auto random_s = supplied(random_unitary(2, rng));
  double hankel_dev = 0.0, model_dev = 0.0;
  for (const auto& phi : {symbols::poisson(), symbols::gaussian(1.0)}) {
    std::vector<std::vector<double>> tops;
    for (double d : deltas) {
      auto v = singular_values(dilate_symbol(phi, d), 256).singular_values;
      v.resize(10);
      tops.push_back(std::move(v));
    }
    for (const auto& v : tops)
      for (std::size_t i = 0; i < 10; ++i) hankel_dev = std::max(hankel_dev, std::abs(v[i] - tops[0][i]));
    for (const auto* sc : {&lattice_s, &random_s})
      model_dev = std::max(model_dev, check_scaling(phi, deltas, *sc, 128).max_deviation);
  }
  return {hankel_dev <= 1e-6 && model_dev <= 1e-6,
          "top-10 Hankel deviation " + fmt(hankel_dev) + ", model-operator deviation " + fmt(model_dev)};
}

Outcome determinism(const fs::path& work) {
  const fs::path cfg = fs::path(SIGMA0_SOURCE_DIR) / "configs" / "lattice_main.json";
  std::ostringstream log;
  RunOptions a{work / "rerun_a", 1, false}, b{work / "rerun_b", 2, false};
  const int ra = run_command("verify-theorem", cfg, a, log);
  const int rb = run_command("verify-theorem", cfg, b, log);
  const bool same_json = slurp(a.out_dir / "report.json") == slurp(b.out_dir / "report.json");
  const bool same_csv = slurp(a.out_dir / "counts.csv") == slurp(b.out_dir / "counts.csv");
  const bool nonempty = !slurp(a.out_dir / "counts.csv").empty();
  return {ra == 0 && rb == 0 && same_json && same_csv && nonempty,
          std::string("report.json ") + (same_json ? "identical" : "differs") + ", counts.csv " +
              (same_csv ? "identical" : "differs") + " (jobs 1 vs 2), exit codes " + std::to_string(ra) + "/" +
              std::to_string(rb)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "sigma0_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--work-dir" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--work-dir DIR]\n";
      return 2;
    }
  }
  fs::create_directories(work);

  const std::vector<Criterion> criteria{
      {1, "rank-one Hankel value", 10.0, rank_one_hankel},
      {2, "model-operator spectrum equals limit set", 30.0, model_operator_lemma},
      {3, "counting functions match N0 (lattice, c=1, lambda=0)", 300.0, [&] { return counting_convergence(work); }},
      {4, "transfer vs stationary S-matrix", 10.0, cross_method},
      {5, "trace identity and det S", 0.0, trace_identity},
      {6, "dilation invariance", 0.0, dilation_invariance},
      {7, "byte-identical reruns", 0.0, [&] { return determinism(work); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Stopwatch clock;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double t = clock.seconds();
    if (c.budget_s > 0.0 && t > c.budget_s) {
      out.ok = false;
      out.detail += "; over time budget " + fmt(c.budget_s) + " s";
    }
    failures += !out.ok;
    std::printf("%s [%d] %s: %s (%.2f s)\n", out.ok ? "PASS" : "FAIL", c.id, c.name.c_str(), out.detail.c_str(), t);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
