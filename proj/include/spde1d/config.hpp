#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spde1d/mc.hpp"
#include "spde1d/stepper.hpp"

namespace spde1d {

using json = nlohmann::json;

/// Thrown on malformed configs; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SineTerm {
  int k = 1;
  double amplitude = 1.0;
};

/// Named initial-condition builders. "sine" uses sin(k pi x) on DirichletZero
/// grids and sin(2 pi k x) on Periodic ones; "rademacher" draws i.i.d. +-1
/// node values from (seed, salt).
struct InitSpec {
  std::string kind = "zero";  // zero|constant|sine|ramp|rademacher
  double value = 0.0;
  std::vector<SineTerm> terms;
  std::uint64_t salt = 1;
};

GridFunction build_initial(const InitSpec& spec, BC bc, int n, std::uint64_t seed);

struct EstimatorConfig {
  std::string statistic = "l2_sq_final";
  int M = 100;
  InitSpec x0;
  std::optional<InitSpec> y0;
  std::vector<double> t_list;
  std::vector<std::pair<double, double>> eps_pairs;
  std::vector<int> j_list;
  double tau = 0.0;
  double t = 0.0;
  ZSpec z_spec;
  double jump_weight = 1.0;
  double relax_tol = 0.01;
  int relax_n = 4096;
  std::string u_spec = "ramp";  // relaxation input function
  std::optional<std::string> reference;
  bool parallel = true;
};

struct ExperimentConfig {
  SimConfig sim;
  EstimatorConfig est;
  std::uint64_t seed = 0;
  std::string output = "out";

  json to_json() const;
  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig load(const std::string& path,
                               const std::vector<std::string>& overrides);

  GridFunction make_x0() const;
  GridFunction make_y0() const;
  std::uint64_t config_hash() const;
};

/// Applies "dotted.path=value" overrides onto a raw config json.
void apply_override(json& j, const std::string& assignment);

std::function<double(double)> make_u_spec(const std::string& name);

}  // namespace spde1d
