#pragma once

// JSON experiment configuration. See configs/ for examples and README.md for
// the schema.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sigma0/error.hpp"
#include "sigma0/models.hpp"
#include "sigma0/scattering.hpp"
#include "sigma0/symbols.hpp"

namespace sigma0::verify {

using json = nlohmann::json;

enum class ModelKind { lattice, continuum };

struct Tolerances {
  double cross_method = 1e-8;  // |S_transfer - S_stationary|
  double unitarity = 1e-8;
  double determinant = 1e-10;
  double lemma = 1e-8;
  double scaling = 1e-6;
  double hankel_convergence = 1e-7;
  double hankel_oracle = 1e-6;  // closed-form Poisson values
};

struct ExperimentConfig {
  ModelKind model = ModelKind::lattice;
  double continuum_half_length = 40.0;  // X
  double continuum_step = 0.1;          // h
  json potential_json;
  PotentialSpec potential;
  double lambda = 0.0;
  json symbol_json;
  SymbolFunction symbol = symbols::poisson();
  std::vector<double> deltas;
  double l_factor = 40.0;          // L(delta) = ceil(l_factor / delta)
  Index hankel_m = 512;
  double require_match_at_or_below = 0.0;
  Tolerances tol;
  // model-op-check
  Index model_op_m = 64;
  std::vector<double> scaling_deltas{0.5, 1.0, 2.0};
  int random_unitaries = 0;
  std::uint64_t seed = 1;
  // scatter
  std::vector<double> scatter_lambdas;
  json raw;
};

namespace detail {

inline Error config_error(const std::string& what) { return Error(ErrorKind::invalid_argument, "config: " + what); }

inline DecayBound decay_from(const json& j, DecayBound fallback) {
  if (!j.contains("decay")) return fallback;
  return DecayBound{j.at("decay").at("C").get<double>(), j.at("decay").at("rho").get<double>()};
}

}  // namespace detail

inline PotentialSpec parse_potential(const json& j) {
  const std::string kind = j.value("kind", "point-masses");
  if (kind == "none" || kind == "zero") return PotentialSpec::zero();
  if (kind == "point-masses") {
    std::vector<PointMass> masses;
    for (const auto& s : j.value("sites", json::array())) masses.push_back({s.at("site").get<long>(), s.at("value").get<double>()});
    return PotentialSpec::point_masses(std::move(masses));
  }
  if (kind == "gaussian") {
    const double a = j.at("amplitude").get<double>();
    const double w = j.value("width", 1.0);
    const double c = j.value("center", 0.0);
    if (!(w > 0.0)) throw detail::config_error("gaussian potential width must be positive");
    const DecayBound fallback{std::abs(a) * std::pow(1.0 + std::abs(c), 2.0) * 4.0 * std::max(1.0, w * w), 2.0};
    return PotentialSpec::sampled(
        "gaussian", [=](double x) { return a * std::exp(-(x - c) * (x - c) / (w * w)); }, detail::decay_from(j, fallback));
  }
  if (kind == "square-well") {
    const double depth = j.at("depth").get<double>();
    const double hw = j.at("half_width").get<double>();
    return PotentialSpec::sampled(
        "square-well", [=](double x) { return std::abs(x) < hw ? -depth : 0.0; },
        detail::decay_from(j, DecayBound{std::abs(depth) * std::pow(1.0 + hw, 2.0), 2.0}));
  }
  throw detail::config_error("unknown potential kind '" + kind + "'");
}

inline SymbolFunction parse_symbol(const json& j) {
  const std::string kind = j.value("kind", "poisson");
  if (kind == "poisson") return symbols::poisson(j.value("a", 1.0), j.value("scale", 1.0));
  if (kind == "gaussian") return symbols::gaussian(j.value("width", 1.0));
  if (kind == "rational")
    return symbols::rational(j.at("numerator").get<std::vector<double>>(), j.at("denominator").get<std::vector<double>>());
  if (kind == "sampled") return symbols::sampled(j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>());
  throw detail::config_error("unknown symbol kind '" + kind + "'");
}

inline ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  try {
    const json model = j.value("model", json{{"kind", "lattice"}});
    const std::string mk = model.value("kind", "lattice");
    if (mk == "lattice") {
      cfg.model = ModelKind::lattice;
    } else if (mk == "continuum") {
      cfg.model = ModelKind::continuum;
      cfg.continuum_half_length = model.value("X", cfg.continuum_half_length);
      cfg.continuum_step = model.value("h", cfg.continuum_step);
    } else {
      throw detail::config_error("unknown model kind '" + mk + "'");
    }
    cfg.l_factor = model.value("L_factor", cfg.l_factor);

    cfg.potential_json = j.value("potential", json{{"kind", "none"}});
    cfg.potential = parse_potential(cfg.potential_json);
    cfg.lambda = j.value("lambda", 0.0);
    cfg.symbol_json = j.value("symbol", json{{"kind", "poisson"}});
    cfg.symbol = parse_symbol(cfg.symbol_json);
    cfg.deltas = j.value("deltas", std::vector<double>{});
    cfg.require_match_at_or_below = j.value("require_match_at_or_below", cfg.deltas.empty() ? 0.0 : cfg.deltas.back());

    const json hankel = j.value("hankel", json::object());
    cfg.hankel_m = hankel.value("M", cfg.hankel_m);

    const json tol = j.value("tolerances", json::object());
    cfg.tol.cross_method = tol.value("cross_method", cfg.tol.cross_method);
    cfg.tol.unitarity = tol.value("unitarity", cfg.tol.unitarity);
    cfg.tol.determinant = tol.value("determinant", cfg.tol.determinant);
    cfg.tol.lemma = tol.value("lemma", cfg.tol.lemma);
    cfg.tol.scaling = tol.value("scaling", cfg.tol.scaling);
    cfg.tol.hankel_convergence = tol.value("hankel_convergence", cfg.tol.hankel_convergence);
    cfg.tol.hankel_oracle = tol.value("hankel_oracle", cfg.tol.hankel_oracle);

    const json mo = j.value("model_operator", json::object());
    cfg.model_op_m = mo.value("M", cfg.model_op_m);
    cfg.scaling_deltas = mo.value("scaling_deltas", cfg.scaling_deltas);
    cfg.random_unitaries = mo.value("random_unitaries", cfg.random_unitaries);
    cfg.seed = mo.value("seed", cfg.seed);

    cfg.scatter_lambdas = j.value("scatter_lambdas", std::vector<double>{});
  } catch (const json::exception& e) {
    throw detail::config_error(e.what());
  }

  for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
    if (!(cfg.deltas[i] > 0.0)) throw detail::config_error("deltas must be positive");
    if (i > 0 && !(cfg.deltas[i] < cfg.deltas[i - 1])) throw detail::config_error("deltas must be strictly decreasing");
  }
  if (!(cfg.l_factor > 0.0)) throw detail::config_error("L_factor must be positive");
  if (cfg.hankel_m < 1 || cfg.model_op_m < 1) throw detail::config_error("Hankel truncations must be >= 1");
  if (cfg.model == ModelKind::lattice) {
    if (!(std::abs(cfg.lambda) < 2.0 - kBandMargin) || std::sin(std::acos(0.5 * cfg.lambda)) < kTransferSinMin)
      throw detail::config_error("lambda must lie inside (-2, 2) away from the band edges");
    if (cfg.potential.kind != PotentialSpec::Kind::point_masses)
      throw detail::config_error("lattice models need a point-mass potential");
  } else {
    if (!(cfg.lambda > 0.05)) throw detail::config_error("continuum lambda must exceed 0.05");
    if (!(cfg.continuum_half_length > 0.0) || !(cfg.continuum_step > 0.0))
      throw detail::config_error("continuum X and h must be positive");
    if (cfg.potential.kind == PotentialSpec::Kind::point_masses && !cfg.potential.masses.empty())
      throw detail::config_error("continuum models need a sampled potential");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, "cannot parse config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

/// L(delta) = max(ceil(L_factor / delta), 4 max|site|).
inline long lattice_half_width(const ExperimentConfig& cfg, double delta) {
  const long rule = static_cast<long>(std::ceil(cfg.l_factor / delta - 1e-9));
  return std::max({rule, 4 * cfg.potential.max_abs_site(), 1L});
}

/// Box half-length for continuum runs: X(delta) = max(X, L_factor / (2 delta)).
inline double continuum_half_length(const ExperimentConfig& cfg, double delta) {
  return std::max(cfg.continuum_half_length, 0.5 * cfg.l_factor / delta);
}

inline Index continuum_points(double half_length, double step) {
  return std::max<Index>(64, static_cast<Index>(std::llround(2.0 * half_length / step)) - 1);
}

}  // namespace sigma0::verify
