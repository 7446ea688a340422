#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spde1d/config.hpp"
#include "spde1d/report_io.hpp"

using namespace spde1d;

namespace {

json sample_config() {
  return json::parse(R"({
    "schema_version": 1,
    "seed": 424242,
    "output": "out",
    "problem": {
      "type": "dirichlet_vertical",
      "n": 48,
      "epsilon": 0.05,
      "flux": {"kind": "mean_curvature", "coef": 1.0},
      "noise": {
        "modes": [
          {"form": "multiplicative", "profile": {"kind": "sine", "k": 1}, "amplitude": 0.5},
          {"form": "additive", "profile": {"kind": "sine", "k": 2}, "amplitude": 0.25}
        ],
        "envelope": {"type": "none"}
      }
    },
    "run": {"dt": 1e-4, "T": 0.01, "scheme": "semi_implicit", "record_stride": 10},
    "estimator": {
      "statistic": "l2_sq_final",
      "M": 8,
      "x0": {"kind": "sine", "terms": [{"k": 1, "amplitude": 1.0}]},
      "t_list": [0.005, 0.01],
      "jump_weight": 1.0
    }
  })");
}

}  // namespace

TEST_CASE("config round trip") {
  const ExperimentConfig a = ExperimentConfig::from_json(sample_config());
  const json dumped = a.to_json();
  const ExperimentConfig b = ExperimentConfig::from_json(dumped);
  CHECK(dumped == b.to_json());
  CHECK(a.seed == b.seed);
  CHECK(a.sim.n == b.sim.n);
  CHECK(a.sim.vertical.modes.size() == b.sim.vertical.modes.size());
  CHECK(a.config_hash() == b.config_hash());

  // periodic variant
  json jp = sample_config();
  jp["problem"] = json{{"type", "periodic_normal"}, {"n", 64}, {"epsilon", 0.0},
                       {"alpha", 1.0}};
  const ExperimentConfig p = ExperimentConfig::from_json(jp);
  CHECK(p.to_json() == ExperimentConfig::from_json(p.to_json()).to_json());
  CHECK(p.sim.flux.coef == doctest::Approx(0.5));
}

TEST_CASE("config errors carry the right type") {
  json bad = sample_config();
  bad["problem"]["type"] = "unknown";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

  json bad2 = sample_config();
  bad2["run"]["scheme"] = "magic";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad2), ConfigError);

  json bad3 = sample_config();
  bad3.erase("problem");
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad3), ConfigError);
}

TEST_CASE("dotted overrides") {
  json j = sample_config();
  apply_override(j, "run.dt=5e-5");
  apply_override(j, "problem.n=96");
  apply_override(j, "estimator.statistic=energy_final");
  CHECK(j["run"]["dt"].get<double>() == doctest::Approx(5e-5));
  CHECK(j["problem"]["n"].get<int>() == 96);
  CHECK(j["estimator"]["statistic"].get<std::string>() == "energy_final");
  CHECK_THROWS_AS(apply_override(j, "no-equals-sign"), ConfigError);
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.sim.dt == doctest::Approx(5e-5));
  CHECK(c.sim.n == 96);
}

TEST_CASE("initial condition builders") {
  InitSpec sine;
  sine.kind = "sine";
  sine.terms = {{1, 1.0}, {2, 0.5}};
  const GridFunction p = build_initial(sine, BC::Periodic, 64, 1);
  const GridFunction expect = GridFunction::sample(BC::Periodic, 64, [](double x) {
    return std::sin(2.0 * M_PI * x) + 0.5 * std::sin(4.0 * M_PI * x);
  });
  for (int i = 0; i < 64; ++i)
    CHECK(p.values[i] == doctest::Approx(expect.values[i]).epsilon(1e-14));

  const GridFunction d = build_initial(sine, BC::DirichletZero, 64, 1);
  CHECK(d.values[0] == doctest::Approx(std::sin(M_PI * d.x(0)) +
                                       0.5 * std::sin(2.0 * M_PI * d.x(0))));

  InitSpec rad;
  rad.kind = "rademacher";
  const GridFunction r1 = build_initial(rad, BC::DirichletZero, 128, 7);
  const GridFunction r2 = build_initial(rad, BC::DirichletZero, 128, 7);
  CHECK(r1.values == r2.values);
  int plus = 0;
  for (double v : r1.values) {
    CHECK((v == 1.0 || v == -1.0));
    if (v > 0) ++plus;
  }
  CHECK(plus > 20);
  CHECK(plus < 108);

  InitSpec bogus;
  bogus.kind = "nope";
  CHECK_THROWS_AS(build_initial(bogus, BC::Periodic, 8, 1), ConfigError);
}

TEST_CASE("u_spec builders") {
  CHECK(make_u_spec("ramp")(0.25) == 0.25);
  CHECK(make_u_spec("step")(0.25) == 0.0);
  CHECK(make_u_spec("step")(0.75) == 1.0);
  CHECK_THROWS_AS(make_u_spec("spiral"), ConfigError);
}

TEST_CASE("atomic write and 17-digit formatting") {
  const std::string dir = "test_cli_out";
  const std::string path = dir + "/file.txt";
  atomic_write(path, "hello\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");
  CHECK(!std::filesystem::exists(path + ".tmp"));

  const double v = 0.1 + 0.2;
  const std::string s = fmt_double(v);
  CHECK(std::stod(s) == v);  // bit-faithful round trip
  std::filesystem::remove_all(dir);
}

TEST_CASE("path csv layout") {
  SimConfig c = SimConfig::periodic_normal(0.0, 4, 0.0, 1e-3, 0.0);
  const GridFunction x0 = GridFunction::constant(c.bc, c.n, 1.0);
  const PathRecord rec = simulate(c, x0, WienerSampler{1, 0});
  const std::string csv = path_csv(rec);
  CHECK(csv.rfind("time,node,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4);
}
