#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spde1d/config.hpp"
#include "spde1d/report_io.hpp"

using namespace spde1d;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_override;
  bool serial = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--set", args.overrides,
                  "override a config leaf, e.g. --set run.dt=1e-4");
  cmd->add_option("--output", args.output_override, "output directory");
  cmd->add_flag("--serial", args.serial, "run ensembles on the serial reference path");
}

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig cfg = ExperimentConfig::load(args.config_path, args.overrides);
  if (!args.output_override.empty()) {
    cfg.output = args.output_override;
  } else if (const char* env = std::getenv("SPDE1D_OUT"); env && cfg.output == "out") {
    cfg.output = env;
  }
  if (args.serial) cfg.est.parallel = false;
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return cfg.output + "/" + name;
}

int cmd_validate(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  json findings = json::array();
  bool ok = true;

  auto add = [&](bool pass, const std::string& what, const std::string& detail) {
    findings.push_back(json{{"check", what}, {"pass", pass}, {"detail", detail}});
    std::cout << (pass ? "[ok]   " : "[FAIL] ") << what << ": " << detail << "\n";
    ok = ok && pass;
  };

  try {
    cfg.sim.validate();
    add(true, "sim_config", "all run invariants hold");
  } catch (const std::exception& e) {
    add(false, "sim_config", e.what());
  }

  if (cfg.sim.problem == ProblemKind::DirichletVertical) {
    const GrowthReport gr = validate_growth(cfg.sim.flux, -100.0, 100.0, 10000);
    add(gr.violations == 0, "flux_growth",
        "violations=" + std::to_string(gr.violations) +
            " families=[" + std::to_string(gr.violations_family[0]) + "," +
            std::to_string(gr.violations_family[1]) + "," +
            std::to_string(gr.violations_family[2]) + "] fitted_c=" +
            fmt_double(gr.fitted_c) + " fitted_C=" + fmt_double(gr.fitted_C) +
            (gr.only_first_family_fails() ? " (flagged: growth beyond linear)" : ""));
    try {
      const double trace = check_trace_class(cfg.sim.vertical);
      add(true, "noise_trace_class", "sum mu_k = " + fmt_double(trace));
    } catch (const std::exception& e) {
      add(false, "noise_trace_class", e.what());
    }
  } else {
    const double alpha = cfg.sim.normal.alpha;
    const bool in_range = alpha >= 0.0 && alpha <= std::sqrt(2.0);
    add(in_range, "alpha_range",
        in_range ? "alpha = " + fmt_double(alpha)
                 : "alpha out of range: " + fmt_double(alpha));
  }

  write_json(out_path(cfg, "validate.json"),
             json{{"schema_version", 1},
                  {"pass", ok},
                  {"findings", findings},
                  {"config_hash", cfg.config_hash()}});
  return ok ? 0 : 1;
}

int cmd_simulate(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const GridFunction x0 = cfg.make_x0();
  WienerSampler sampler{cfg.seed, 0};
  PathRecord rec;
  try {
    rec = simulate(cfg.sim, x0, sampler);
  } catch (const BlowupError& e) {
    std::cerr << "blow-up at step " << e.step << "\n";
    return 3;
  }
  extract_eta(cfg.sim, rec);

  json summary{{"schema_version", 1},
               {"config_hash", cfg.config_hash()},
               {"seed", cfg.seed},
               {"times", rec.times},
               {"l2_trace", rec.l2_trace},
               {"eta_sq_integral", rec.eta_sq_integral},
               {"eta_sq_weighted_integral", rec.eta_sq_weighted_integral}};
  json energies = json::array();
  for (const auto& e : rec.energy_trace)
    energies.push_back(json{{"bulk", e.bulk}, {"boundary", e.boundary}, {"total", e.total}});
  summary["energy_trace"] = energies;

  if (cfg.est.reference && *cfg.est.reference == "heat_kernel_sin") {
    // relative L2 error of the final state against e^{-pi^2 T} sin(pi x)
    const double decay = std::exp(-M_PI * M_PI * cfg.sim.T);
    GridFunction ref = GridFunction::sample(cfg.sim.bc, cfg.sim.n, [&](double x) {
      return decay * std::sin(M_PI * x);
    });
    GridFunction diff = rec.states.back();
    for (int i = 0; i < diff.n; ++i) diff.values[i] -= ref.values[i];
    summary["reference_l2_rel_error"] = l2_norm(diff) / l2_norm(ref);
  }

  atomic_write(out_path(cfg, "path.csv"), path_csv(rec));
  atomic_write(out_path(cfg, "state_final.csv"), grid_csv(rec.states.back()));
  write_json(out_path(cfg, "summary.json"), summary);
  std::cout << "wrote " << out_path(cfg, "path.csv") << " ("
            << rec.states.size() << " snapshots)\n";
  return 0;
}

PathStatistic named_statistic(const std::string& name) {
  if (name == "l2_sq_final")
    return [](const PathRecord& p) { return p.l2_trace.back() * p.l2_trace.back(); };
  if (name == "sup_l2_sq")
    return [](const PathRecord& p) {
      double worst = 0.0;
      for (double v : p.l2_trace) worst = std::max(worst, v * v);
      return worst;
    };
  if (name == "energy_final")
    return [](const PathRecord& p) { return p.energy_trace.back().total; };
  if (name == "t_energy_final")
    return [](const PathRecord& p) { return p.times.back() * p.energy_trace.back().total; };
  throw ConfigError("mc: unknown statistic '" + name + "'");
}

int cmd_mc(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const GridFunction x0 = cfg.make_x0();

  if (cfg.est.statistic == "contraction") {
    const GridFunction y0 = cfg.make_y0();
    const ContractionReport rep = contraction_test(cfg.sim, x0, y0, cfg.est.t_list,
                                                   cfg.est.M, cfg.seed, cfg.est.parallel);
    json pts = json::array();
    std::string csv = "t,ratio,stderr,pass\n";
    for (const auto& p : rep.points) {
      pts.push_back(json{{"t", p.t}, {"ratio", p.ratio}, {"stderr", p.ratio_stderr},
                         {"pass", p.pass}});
      csv += fmt_double(p.t) + "," + fmt_double(p.ratio) + "," +
             fmt_double(p.ratio_stderr) + "," + (p.pass ? "1" : "0") + "\n";
    }
    write_json(out_path(cfg, "mc.json"),
               json{{"schema_version", 1}, {"statistic", "contraction"},
                    {"M", rep.M}, {"denominator", rep.denominator},
                    {"points", pts}, {"pass", rep.pass}, {"seed", rep.master_seed},
                    {"config_hash", cfg.config_hash()}});
    atomic_write(out_path(cfg, "contraction.csv"), csv);
    std::cout << (rep.pass ? "PASS" : "FAIL") << " contraction at " << rep.points.size()
              << " instants\n";
    return rep.pass ? 0 : 1;
  }

  if (cfg.est.statistic == "energy_reg") {
    SimConfig sc = cfg.sim;
    const EnergyRegReport rep =
        energy_regularization(sc, x0, cfg.est.M, cfg.seed, cfg.est.parallel);
    write_json(out_path(cfg, "mc.json"),
               json{{"schema_version", 1},
                    {"statistic", "energy_reg"},
                    {"t", rep.t},
                    {"t_energy", mc_report_json(rep.t_energy, cfg.config_hash())},
                    {"eta_weighted", mc_report_json(rep.eta_weighted, cfg.config_hash())},
                    {"energy_final", mc_report_json(rep.energy_final, cfg.config_hash())},
                    {"eta_unweighted", mc_report_json(rep.eta_unweighted, cfg.config_hash())},
                    {"c_emp", rep.c_emp},
                    {"energy_x0", rep.energy_x0}});
    std::cout << "t*E energy = " << rep.t_energy.mean
              << ", E int r||eta||^2 = " << rep.eta_weighted.mean
              << ", c_emp = " << rep.c_emp << "\n";
    return 0;
  }

  const MCReport rep = estimate(cfg.sim, x0, cfg.est.statistic,
                                named_statistic(cfg.est.statistic), cfg.est.M, cfg.seed,
                                cfg.est.parallel);
  write_json(out_path(cfg, "mc.json"), mc_report_json(rep, cfg.config_hash()));
  std::cout << rep.statistic << ": mean = " << rep.mean << " +- " << rep.stderr_
            << " (M = " << rep.M << ")\n";
  return 0;
}

int cmd_convergence(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const GridFunction x0 = cfg.make_x0();
  const RateReport rep = eps_convergence(cfg.sim, x0, cfg.est.eps_pairs, cfg.est.M,
                                         cfg.seed, cfg.est.parallel);
  std::string csv = "eps1,eps2,eps_sum,mean_sup_dist_sq,stderr\n";
  json pts = json::array();
  for (const auto& p : rep.points) {
    csv += fmt_double(p.eps1) + "," + fmt_double(p.eps2) + "," + fmt_double(p.eps_sum) +
           "," + fmt_double(p.mean) + "," + fmt_double(p.stderr_) + "\n";
    pts.push_back(json{{"eps1", p.eps1}, {"eps2", p.eps2}, {"eps_sum", p.eps_sum},
                       {"mean", p.mean}, {"stderr", p.stderr_}});
  }
  const bool pass = rep.fitted_slope >= 0.7 && rep.fitted_slope <= 1.3 && rep.r2 >= 0.9;
  write_json(out_path(cfg, "rate.json"),
             json{{"schema_version", 1}, {"fitted_slope", rep.fitted_slope},
                  {"r2", rep.r2}, {"points", pts}, {"M", rep.M}, {"pass", pass},
                  {"seed", rep.master_seed}, {"config_hash", cfg.config_hash()}});
  atomic_write(out_path(cfg, "rate.csv"), csv);
  std::cout << (pass ? "PASS" : "FAIL") << " slope = " << rep.fitted_slope
            << ", r2 = " << rep.r2 << "\n";
  return pass ? 0 : 1;
}

int cmd_svi(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const GridFunction x0 = cfg.make_x0();
  const SVIReport rep = svi_check(cfg.sim, x0, cfg.est.z_spec, cfg.est.tau, cfg.est.t,
                                  cfg.est.M, cfg.seed, 1e-3, cfg.est.parallel);
  write_json(out_path(cfg, "svi.json"),
             json{{"schema_version", 1}, {"lhs", rep.lhs}, {"rhs", rep.rhs},
                  {"margin", rep.margin}, {"margin_stderr", rep.margin_stderr},
                  {"term_initial", rep.term_initial}, {"term_eta", rep.term_eta},
                  {"term_zxx", rep.term_zxx}, {"M", rep.M}, {"pass", rep.pass},
                  {"seed", rep.master_seed}, {"config_hash", cfg.config_hash()}});
  std::cout << (rep.pass ? "PASS" : "FAIL") << " margin = " << rep.margin << " +- "
            << rep.margin_stderr << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_relaxation(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const auto u = make_u_spec(cfg.est.u_spec);
  const FluxModel model =
      cfg.sim.problem == ProblemKind::DirichletVertical ? cfg.sim.flux
                                                        : FluxModel::minimal_surface(1.0);
  const RelaxationReport rep = relaxation_convergence(
      u, cfg.est.j_list, model, cfg.est.jump_weight, cfg.est.relax_n, cfg.est.relax_tol);
  std::string csv = "j,l2_dist,energy_bulk,energy_boundary,energy_total\n";
  json rows = json::array();
  for (const auto& r : rep.rows) {
    csv += std::to_string(r.j) + "," + fmt_double(r.l2_dist) + "," +
           fmt_double(r.energy.bulk) + "," + fmt_double(r.energy.boundary) + "," +
           fmt_double(r.energy.total) + "\n";
    rows.push_back(json{{"j", r.j}, {"l2_dist", r.l2_dist},
                        {"energy_total", r.energy.total}});
  }
  write_json(out_path(cfg, "relaxation.json"),
             json{{"schema_version", 1}, {"target", rep.target},
                  {"final_rel_err", rep.final_rel_err}, {"tol", rep.tol},
                  {"rows", rows}, {"pass", rep.pass}, {"config_hash", cfg.config_hash()}});
  atomic_write(out_path(cfg, "relaxation.csv"), csv);
  std::cout << (rep.pass ? "PASS" : "FAIL") << " final energy rel. err = "
            << rep.final_rel_err << " (target " << rep.target << ")\n";
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spde1d: numerical laboratory for degenerate quasilinear SPDE on (0,1)"};
  app.require_subcommand(1);

  CommonArgs a_validate, a_simulate, a_mc, a_convergence, a_svi, a_relaxation;
  add_common(app.add_subcommand("validate", "validate models and run invariants"), a_validate);
  add_common(app.add_subcommand("simulate", "integrate one trajectory"), a_simulate);
  add_common(app.add_subcommand("mc", "Monte Carlo statistics / contraction"), a_mc);
  add_common(app.add_subcommand("convergence", "viscosity convergence rate"), a_convergence);
  add_common(app.add_subcommand("svi", "variational inequality check"), a_svi);
  add_common(app.add_subcommand("relaxation", "boundary-jump relaxation study"), a_relaxation);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("validate")) return cmd_validate(a_validate);
    if (app.got_subcommand("simulate")) return cmd_simulate(a_simulate);
    if (app.got_subcommand("mc")) return cmd_mc(a_mc);
    if (app.got_subcommand("convergence")) return cmd_convergence(a_convergence);
    if (app.got_subcommand("svi")) return cmd_svi(a_svi);
    if (app.got_subcommand("relaxation")) return cmd_relaxation(a_relaxation);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BlowupError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
