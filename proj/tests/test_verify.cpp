#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sigma0/verify/commands.hpp"

using namespace sigma0;
using namespace sigma0::verify;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sigma0_test_verify_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json single_site(double c = 1.0) {
  return {{"model", {{"kind", "lattice"}}},
          {"potential", {{"kind", "point-masses"}, {"sites", json::array({{{"site", 0}, {"value", c}}})}}},
          {"lambda", 0.0},
          {"symbol", {{"kind", "poisson"}}},
          {"hankel", {{"M", 128}}}};
}

}  // namespace

TEST(Config, ParsesDefaultsAndLRule) {
  json j = single_site();
  j["deltas"] = {0.2, 0.1, 0.05};
  const auto cfg = parse_config(j);
  EXPECT_EQ(cfg.model, ModelKind::lattice);
  EXPECT_DOUBLE_EQ(cfg.require_match_at_or_below, 0.05);
  EXPECT_EQ(lattice_half_width(cfg, 0.2), 200);
  EXPECT_EQ(lattice_half_width(cfg, 0.1), 400);
  EXPECT_EQ(lattice_half_width(cfg, 0.05), 800);
  EXPECT_EQ(cfg.hankel_m, 128);
}

TEST(Config, RejectsInvalidInput) {
  auto bad = [](json j) { EXPECT_THROW(parse_config(j), Error) << j.dump(); };
  json j = single_site();
  j["deltas"] = {0.1, 0.2};
  bad(j);
  j["deltas"] = {0.1, 0.1};
  bad(j);
  j["deltas"] = {0.1, -0.05};
  bad(j);
  j = single_site();
  j["lambda"] = 2.0;
  bad(j);
  j["lambda"] = -1.9999999;
  bad(j);
  j = single_site();
  j["symbol"] = {{"kind", "sinc"}};
  bad(j);
  j = single_site();
  j["potential"] = {{"kind", "gaussian"}, {"amplitude", 1.0}};
  bad(j);  // lattice needs point masses
  j = single_site();
  j["model"] = {{"kind", "continuum"}};
  bad(j);  // continuum needs a sampled potential and lambda > 0.05
  j = single_site();
  j["hankel"] = {{"M", "many"}};
  bad(j);
}

TEST(Config, LoadReportsPaths) {
  const fs::path dir = scratch("load");
  try {
    load_config(dir / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
    EXPECT_NE(std::string(e.what()).find("missing.json"), std::string::npos);
  }
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_THROW(load_config(dir / "broken.json"), Error);
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& entry : fs::directory_iterator(fs::path(SIGMA0_SOURCE_DIR) / "configs"))
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
}

TEST(Sweep, FreePairCountsNothing) {
  json j = single_site();
  j["potential"] = {{"kind", "none"}};
  j["lambda"] = 0.5;
  j["deltas"] = {0.4, 0.2};
  const auto rep = run_sweep(parse_config(j));
  ASSERT_TRUE(rep.errors.empty());
  ASSERT_EQ(rep.runs.size(), 2u);
  EXPECT_TRUE(rep.limit_set->values.empty());
  for (const auto& r : rep.runs) {
    ASSERT_FALSE(r.counts.empty());
    for (const auto& c : r.counts) {
      EXPECT_EQ(c.n_plus, 0);
      EXPECT_EQ(c.n_minus, 0);
      EXPECT_EQ(c.n0, 0);
      EXPECT_TRUE(c.match);
    }
  }
  EXPECT_TRUE(rep.passed(true));
}

TEST(Sweep, ExtremeEigenvaluesApproachLimitValue) {
  // L = 200, delta = 0.1: the extreme eigenvalues of A(delta) sit near
  // +-(1/4)|s_1 - 1|.
  json j = single_site();
  j["deltas"] = {0.1};
  j["model"]["L_factor"] = 20.0;
  const auto cfg = parse_config(j);
  EXPECT_EQ(lattice_half_width(cfg, 0.1), 200);
  const auto rep = run_sweep(cfg);
  ASSERT_TRUE(rep.errors.empty());
  const double nu = 0.25 * std::abs(rep.scattering->result.s_eigs[0] - 1.0);
  EXPECT_NEAR(nu, 0.25 * std::abs(cplx(2.0, -1.0) / cplx(2.0, 1.0) - 1.0), 1e-12);
  const auto& run = rep.runs.front();
  EXPECT_NEAR(run.top_eigenvalues.front(), nu, 1e-3);
  EXPECT_NEAR(run.bottom_eigenvalues.front(), -nu, 1e-3);
}

TEST(Sweep, SingleSiteMatchesAndCorollaryHolds) {
  json j = single_site();
  j["deltas"] = {0.2, 0.1};
  j["hankel"] = {{"M", 256}};
  const auto rep = run_sweep(parse_config(j), 2);
  ASSERT_TRUE(rep.errors.empty());
  EXPECT_TRUE(rep.scattering->passed());
  ASSERT_EQ(rep.runs.size(), 2u);
  for (const auto& c : rep.runs.back().counts) {
    EXPECT_EQ(c.n_plus, c.n0) << "s=" << c.s;
    EXPECT_EQ(c.n_minus, c.n0) << "s=" << c.s;
  }
  ASSERT_FALSE(rep.runs.back().corollary.empty());
  for (const auto& w : rep.runs.back().corollary) EXPECT_EQ(w.count, w.expected) << "nu=" << w.nu;
  EXPECT_TRUE(rep.required_match_ok);
  EXPECT_TRUE(rep.corollary_ok);
  EXPECT_TRUE(rep.counting_monotone);
  EXPECT_TRUE(rep.passed());
}

TEST(Sweep, CountsAreBoundedAndMonotoneInThreshold) {
  json j = single_site(-0.8);
  j["potential"]["sites"].push_back({{"site", 3}, {"value", 0.6}});
  j["lambda"] = 0.7;
  j["symbol"] = {{"kind", "gaussian"}, {"width", 1.0}};
  j["deltas"] = {0.4, 0.2};
  const auto rep = run_sweep(parse_config(j));
  ASSERT_TRUE(rep.errors.empty());
  for (const auto& r : rep.runs) {
    ASSERT_FALSE(r.error);
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
      EXPECT_LE(r.counts[i].n_plus, r.dim);
      EXPECT_LE(r.counts[i].n_minus, r.dim);
      if (i > 0) {
        EXPECT_GE(r.counts[i].n_plus, r.counts[i - 1].n_plus);
        EXPECT_GE(r.counts[i].n_minus, r.counts[i - 1].n_minus);
      }
    }
    EXPECT_TRUE(r.counting_monotone);
  }
}

TEST(Sweep, StageErrorKeepsEarlierResults) {
  json j = single_site();
  j["deltas"] = {0.2};
  j["hankel"] = {{"M", 16}};
  j["tolerances"] = {{"hankel_convergence", 1e-300}};
  const auto rep = run_sweep(parse_config(j));
  ASSERT_EQ(rep.errors.size(), 1u);
  EXPECT_EQ(rep.errors[0].stage, "hankel");
  EXPECT_EQ(rep.errors[0].kind, ErrorKind::increase_m);
  EXPECT_TRUE(rep.scattering.has_value());
  EXPECT_FALSE(rep.passed());
  const json out = to_json(rep);
  EXPECT_FALSE(out["scattering"].is_null());
  EXPECT_EQ(out["summary"]["errors"][0]["stage"], "hankel");
}

TEST(Sweep, ParallelMapKeepsOrder) {
  const auto v = parallel_map(17, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  EXPECT_TRUE(parallel_map(0, 3, [](std::size_t i) { return i; }).empty());
}

TEST(Emit, EmptyReport) {
  const fs::path dir = scratch("empty");
  emit(CountingReport{}, dir);
  const json j = json::parse(slurp(dir / "report.json"));
  ASSERT_TRUE(j["runs"].is_array());
  EXPECT_TRUE(j["runs"].empty());
  EXPECT_EQ(slurp(dir / "counts.csv"), "delta,s,n_plus,n_minus,n0,match\n");
}

TEST(Emit, CsvRowsMirrorJson) {
  json j = single_site();
  j["deltas"] = {0.2};
  const auto rep = run_sweep(parse_config(j));
  const fs::path dir = scratch("one");
  emit(rep, dir);
  const json rj = json::parse(slurp(dir / "report.json"));
  std::istringstream csv(slurp(dir / "counts.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "delta,s,n_plus,n_minus,n0,match");
  const auto& counts = rj["runs"][0]["counts"];
  std::size_t row = 0;
  while (std::getline(csv, line)) {
    ASSERT_LT(row, counts.size());
    std::istringstream ls(line);
    std::string f[6];
    for (auto& x : f) std::getline(ls, x, ',');
    EXPECT_EQ(std::stod(f[0]), rj["runs"][0]["delta"].get<double>());
    EXPECT_EQ(std::stod(f[1]), counts[row]["s"].get<double>());
    EXPECT_EQ(std::stol(f[2]), counts[row]["n_plus"].get<long>());
    EXPECT_EQ(std::stol(f[3]), counts[row]["n_minus"].get<long>());
    EXPECT_EQ(std::stol(f[4]), counts[row]["n0"].get<long>());
    EXPECT_EQ(f[5], counts[row]["match"].get<bool>() ? "true" : "false");
    ++row;
  }
  EXPECT_EQ(row, counts.size());
}

TEST(Emit, UnwritableDirectoryIsIoError) {
  const fs::path dir = scratch("blocked");
  std::ofstream(dir / "file") << "x";
  try {
    emit(CountingReport{}, dir / "file" / "sub");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
    EXPECT_NE(std::string(e.what()).find("sub"), std::string::npos);
  }
}

TEST(Emit, RerunsAreByteIdentical) {
  json j = single_site();
  j["deltas"] = {0.4, 0.2};
  const auto cfg = parse_config(j);
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  emit(run_sweep(cfg, 1), a);
  emit(run_sweep(cfg, 3), b);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "counts.csv"), slurp(b / "counts.csv"));
}

TEST(Commands, ExitCodes) {
  const fs::path dir = scratch("cmd");
  std::ostringstream log;
  RunOptions opts;
  opts.out_dir = dir / "out";

  EXPECT_EQ(run_command("verify-theorem", dir / "nope.json", opts, log), kExitIoError);
  std::ofstream(dir / "bad.json") << R"({"deltas": [0.1, 0.2]})";
  EXPECT_EQ(run_command("verify-theorem", dir / "bad.json", opts, log), kExitConfigError);

  json j = single_site();
  j["hankel"] = {{"M", 64}};
  j["scatter_lambdas"] = {-1.0, 0.0, 1.0};
  j["model_operator"] = {{"M", 32}, {"random_unitaries", 2}};
  std::ofstream(dir / "ok.json") << j.dump();
  EXPECT_EQ(run_command("hankel-sv", dir / "ok.json", opts, log), kExitPass);
  EXPECT_EQ(run_command("scatter", dir / "ok.json", opts, log), kExitPass);
  EXPECT_EQ(run_command("limitset", dir / "ok.json", opts, log), kExitPass);
  EXPECT_EQ(run_command("model-op-check", dir / "ok.json", opts, log), kExitPass);
  EXPECT_EQ(run_command("frobnicate", dir / "ok.json", opts, log), kExitConfigError);
  EXPECT_TRUE(fs::exists(opts.out_dir / "report.json"));
  EXPECT_TRUE(fs::exists(opts.out_dir / "counts.csv"));

  // Scaled Poisson symbol: the single nonzero value scales with it.
  j["symbol"] = {{"kind", "poisson"}, {"scale", 2.0}};
  std::ofstream(dir / "scaled.json") << j.dump();
  EXPECT_EQ(run_command("hankel-sv", dir / "scaled.json", opts, log), kExitPass);
  const json rj = json::parse(slurp(opts.out_dir / "report.json"));
  EXPECT_NEAR(rj["hankel"]["singular_values"][0].get<double>(), 0.5, 1e-6);
}

TEST(Commands, ScatterFlagsBandEdge) {
  json j = single_site();
  j["scatter_lambdas"] = {0.0, 1.9999999};
  const auto out = cmd_scatter(parse_config(j), 1);
  EXPECT_FALSE(out.passed);
  EXPECT_FALSE(out.report["points"][1]["errors"].empty());
  EXPECT_TRUE(out.report["points"][0]["errors"].empty());
}
