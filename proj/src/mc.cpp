#include "spde1d/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spde1d {

MCReport summarize(const std::string& name, const std::vector<double>& samples,
                   std::uint64_t seed) {
  MCReport r;
  r.statistic = name;
  r.M = static_cast<int>(samples.size());
  r.master_seed = seed;
  if (r.M == 0) return r;
  double s = 0.0;
  for (double v : samples) s += v;
  r.mean = s / r.M;
  if (r.M > 1) {
    double q = 0.0;
    for (double v : samples) q += (v - r.mean) * (v - r.mean);
    r.stderr_ = std::sqrt(q / (r.M - 1) / r.M);
  }
  r.ci_lo = r.mean - 1.96 * r.stderr_;
  r.ci_hi = r.mean + 1.96 * r.stderr_;
  return r;
}

namespace {

// Runs fn(m) for m = 0..M-1, optionally across OpenMP threads. Every fn(m)
// writes only to its own slots, so scheduling never changes the result.
// Worker exceptions are captured per stream and rethrown afterwards in
// stream order (they must not unwind through the OpenMP region).
template <class Fn>
void for_each_stream(int M, bool parallel, const Fn& fn) {
  std::vector<std::exception_ptr> errors(M);
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int m = 0; m < M; ++m) {
      try {
        fn(m);
      } catch (...) {
        errors[m] = std::current_exception();
      }
    }
  } else {
    for (int m = 0; m < M; ++m) {
      try {
        fn(m);
      } catch (...) {
        errors[m] = std::current_exception();
      }
    }
  }
  for (int m = 0; m < M; ++m) {
    if (!errors[m]) continue;
    try {
      std::rethrow_exception(errors[m]);
    } catch (const std::exception& e) {
      throw std::runtime_error("sample stream " + std::to_string(m) + ": " + e.what());
    }
  }
}

long step_index_for(const SimConfig& cfg, double t) {
  const long k = std::llround(t / cfg.dt);
  if (std::fabs(k * cfg.dt - t) > 1e-9 * std::max(1.0, std::fabs(t)))
    throw std::invalid_argument("mc: requested time is not a multiple of dt");
  if (k < 0 || k > cfg.num_steps())
    throw std::invalid_argument("mc: requested time outside [0, T]");
  return k;
}

}  // namespace

std::vector<double> run_ensemble(const SimConfig& cfg, const GridFunction& x0,
                                 const PathStatistic& stat, int M,
                                 std::uint64_t seed, bool parallel) {
  if (M < 1) throw std::invalid_argument("mc: need M >= 1");
  cfg.validate();
  std::vector<double> out(M, 0.0);
  for_each_stream(M, parallel, [&](int m) {
    WienerSampler sampler{seed, static_cast<std::uint64_t>(m)};
    out[m] = stat(simulate(cfg, x0, sampler));
  });
  return out;
}

MCReport estimate(const SimConfig& cfg, const GridFunction& x0,
                  const std::string& name, const PathStatistic& stat, int M,
                  std::uint64_t seed, bool parallel) {
  if (M < 2) throw std::invalid_argument("estimate: need M >= 2");
  return summarize(name, run_ensemble(cfg, x0, stat, M, seed, parallel), seed);
}

namespace {

// Advances one state by one step with the proper problem type.
GridFunction advance_state(const SimConfig& cfg, const GridFunction& state,
                           const WienerSampler& sampler, long k) {
  if (cfg.problem == ProblemKind::DirichletVertical)
    return step_dirichlet_vertical(
        cfg, state,
        sampler.increments(cfg.vertical.truncation(), cfg.dt,
                           static_cast<std::uint64_t>(k)));
  return step_periodic_normal(cfg, state,
                              sampler.increment(cfg.dt, static_cast<std::uint64_t>(k)));
}

}  // namespace

ContractionReport contraction_test(const SimConfig& cfg, const GridFunction& x0,
                                   const GridFunction& y0,
                                   const std::vector<double>& t_list, int M,
                                   std::uint64_t seed, bool parallel) {
  cfg.validate();
  if (!x0.same_grid(y0)) throw std::invalid_argument("contraction: grid mismatch");
  GridFunction d0 = x0;
  for (int i = 0; i < d0.n; ++i) d0.values[i] -= y0.values[i];
  const double denom = l2_norm_sq(d0);
  if (denom == 0.0)
    throw std::invalid_argument("contraction: x0 = y0 gives a degenerate denominator");
  if (t_list.empty()) throw std::invalid_argument("contraction: empty t_list");
  for (size_t i = 1; i < t_list.size(); ++i)
    if (t_list[i] <= t_list[i - 1])
      throw std::invalid_argument("contraction: t_list must strictly increase");

  std::vector<long> t_steps;
  for (double t : t_list) t_steps.push_back(step_index_for(cfg, t));

  const int T = static_cast<int>(t_list.size());
  std::vector<double> dist_sq(static_cast<size_t>(M) * T, 0.0);
  for_each_stream(M, parallel, [&](int m) {
    WienerSampler sampler{seed, static_cast<std::uint64_t>(m)};
    GridFunction X = x0, Y = y0;
    size_t next = 0;
    const long steps = cfg.num_steps();
    for (long k = 0; k < steps && next < t_steps.size(); ++k) {
      while (next < t_steps.size() && t_steps[next] == k) {
        GridFunction d = X;
        for (int i = 0; i < d.n; ++i) d.values[i] -= Y.values[i];
        dist_sq[static_cast<size_t>(m) * T + next] = l2_norm_sq(d);
        ++next;
      }
      X = advance_state(cfg, X, sampler, k);
      Y = advance_state(cfg, Y, sampler, k);
    }
    while (next < t_steps.size()) {
      GridFunction d = X;
      for (int i = 0; i < d.n; ++i) d.values[i] -= Y.values[i];
      dist_sq[static_cast<size_t>(m) * T + next] = l2_norm_sq(d);
      ++next;
    }
  });

  ContractionReport rep;
  rep.denominator = denom;
  rep.M = M;
  rep.master_seed = seed;
  rep.pass = true;
  for (int j = 0; j < T; ++j) {
    std::vector<double> col(M);
    for (int m = 0; m < M; ++m) col[m] = dist_sq[static_cast<size_t>(m) * T + j] / denom;
    const MCReport s = summarize("contraction_ratio", col, seed);
    ContractionPoint pt;
    pt.t = t_list[j];
    pt.ratio = s.mean;
    pt.ratio_stderr = s.stderr_;
    pt.pass = s.mean <= 1.0 + 3.0 * s.stderr_;
    rep.pass = rep.pass && pt.pass;
    rep.points.push_back(pt);
  }
  return rep;
}

RateReport eps_convergence(const SimConfig& base, const GridFunction& x0,
                           const std::vector<std::pair<double, double>>& eps_pairs,
                           int M, std::uint64_t seed, bool parallel) {
  if (eps_pairs.size() < 3)
    throw std::invalid_argument("eps_convergence: need at least 3 pairs");
  for (size_t i = 1; i < eps_pairs.size(); ++i)
    if (eps_pairs[i].first + eps_pairs[i].second >=
        eps_pairs[i - 1].first + eps_pairs[i - 1].second)
      throw std::invalid_argument("eps_convergence: eps sums must strictly decrease");

  RateReport rep;
  rep.M = M;
  rep.master_seed = seed;

  for (const auto& [e1, e2] : eps_pairs) {
    SimConfig c1 = base;
    c1.epsilon = e1;
    c1.track_eta = false;
    SimConfig c2 = base;
    c2.epsilon = e2;
    c2.track_eta = false;
    c1.validate();
    c2.validate();

    std::vector<double> maxdist(M, 0.0);
    for_each_stream(M, parallel, [&](int m) {
      WienerSampler sampler{seed, static_cast<std::uint64_t>(m)};
      GridFunction X1 = x0, X2 = x0;
      double worst = 0.0;
      const long steps = c1.num_steps();
      for (long k = 0; k < steps; ++k) {
        X1 = advance_state(c1, X1, sampler, k);
        X2 = advance_state(c2, X2, sampler, k);
        GridFunction d = X1;
        for (int i = 0; i < d.n; ++i) d.values[i] -= X2.values[i];
        worst = std::max(worst, l2_norm_sq(d));
      }
      maxdist[m] = worst;
    });

    const MCReport s = summarize("eps_pair_sup_dist_sq", maxdist, seed);
    RatePoint pt;
    pt.eps1 = e1;
    pt.eps2 = e2;
    pt.eps_sum = e1 + e2;
    pt.mean = s.mean;
    pt.stderr_ = s.stderr_;
    rep.points.push_back(pt);
  }

  // least-squares fit of log(mean) against log(eps_sum)
  const size_t P = rep.points.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& pt : rep.points) {
    const double x = std::log(pt.eps_sum), y = std::log(pt.mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double nP = static_cast<double>(P);
  const double cov = sxy - sx * sy / nP;
  const double varx = sxx - sx * sx / nP;
  const double vary = syy - sy * sy / nP;
  rep.fitted_slope = cov / varx;
  rep.r2 = vary > 0.0 ? (cov * cov) / (varx * vary) : 1.0;
  return rep;
}

EnergyRegReport energy_regularization(const SimConfig& cfg, const GridFunction& x0,
                                      int M, std::uint64_t seed, bool parallel,
                                      int sampler_substeps) {
  SimConfig c = cfg;
  c.track_eta = true;
  c.validate();
  if (M < 2) throw std::invalid_argument("energy_regularization: need M >= 2");

  std::vector<double> e_final(M), te_final(M), eta_w(M), eta_u(M);
  for_each_stream(M, parallel, [&](int m) {
    WienerSampler sampler{seed, static_cast<std::uint64_t>(m), sampler_substeps};
    const PathRecord path = simulate(c, x0, sampler);
    const double et = path.energy_trace.back().total;
    e_final[m] = et;
    te_final[m] = c.T * et;
    eta_w[m] = path.eta_sq_weighted_integral;
    eta_u[m] = path.eta_sq_integral;
  });

  EnergyRegReport rep;
  rep.t = c.T;
  rep.t_energy = summarize("t_energy_final", te_final, seed);
  rep.eta_weighted = summarize("eta_sq_weighted_integral", eta_w, seed);
  rep.energy_final = summarize("energy_final", e_final, seed);
  rep.eta_unweighted = summarize("eta_sq_integral", eta_u, seed);
  rep.energy_x0 = energy(c.flux, x0).total;
  rep.c_emp = (rep.t_energy.mean + rep.eta_weighted.mean) / (l2_norm_sq(x0) + 1.0);
  return rep;
}

SVIReport svi_check(const SimConfig& cfg, const GridFunction& x0, const ZSpec& zspec,
                    double tau, double t, int M, std::uint64_t seed, double tolerance,
                    bool parallel) {
  SimConfig c = cfg;
  c.track_eta = false;
  c.validate();
  if (c.problem != ProblemKind::PeriodicNormal)
    throw std::invalid_argument("svi_check: PeriodicNormal configs only");
  if (!(tau >= 0.0 && tau <= t && t <= c.T))
    throw std::invalid_argument("svi_check: need 0 <= tau <= t <= T");
  const long k_tau = step_index_for(c, tau);
  const long k_t = step_index_for(c, t);
  const double alpha = c.normal.alpha;

  std::vector<double> lhs(M), init(M), ieta(M), izxx(M);
  std::vector<int> h2_violation(M, 0);
  for_each_stream(M, parallel, [&](int m) {
    WienerSampler sampler{seed, static_cast<std::uint64_t>(m)};
    GridFunction X = x0;
    GridFunction Z = GridFunction::constant(c.bc, c.n, zspec.z0);
    double acc_eta = 0.0, acc_zxx = 0.0, d_tau = 0.0;
    for (long k = 0; k < k_t; ++k) {
      if (k >= k_tau) {
        if (k == k_tau) {
          GridFunction d = X;
          for (int i = 0; i < d.n; ++i) d.values[i] -= Z.values[i];
          d_tau = l2_norm_sq(d);
        }
        const GridFunction eta = eta_selection(c, X);
        const GridFunction lapZ = laplacian(Z);
        if (!lapZ.finite()) h2_violation[m] = 1;
        GridFunction G = GridFunction::zeros(c.bc, c.n);
        if (zspec.g == ZSpec::GKind::Laplacian) G = lapZ;
        double dot_eta = 0.0, dot_zxx = 0.0;
        for (int i = 0; i < c.n; ++i) {
          const double diff = X.values[i] - Z.values[i];
          dot_eta += (eta.values[i] - G.values[i]) * diff;
          dot_zxx += lapZ.values[i] * diff;
        }
        acc_eta += 2.0 * X.h * dot_eta * c.dt;
        acc_zxx += alpha * alpha * X.h * dot_zxx * c.dt;
      }
      const double db = sampler.increment(c.dt, static_cast<std::uint64_t>(k));
      // X step
      X = step_periodic_normal(c, X, db);
      // Z step: dZ = G dt + B(Z) dbeta (or Z dbeta under the literal reading)
      const GridFunction lapZ = laplacian(Z);
      GridFunction znew = Z;
      for (int i = 0; i < c.n; ++i) {
        const double Gi = zspec.g == ZSpec::GKind::Laplacian ? lapZ.values[i] : 0.0;
        znew.values[i] += c.dt * Gi;
      }
      if (zspec.literal_zdw) {
        for (int i = 0; i < c.n; ++i) znew.values[i] += Z.values[i] * db;
      } else {
        const GridFunction bz = apply_normal(c.normal, Z, db);
        for (int i = 0; i < c.n; ++i) znew.values[i] += bz.values[i];
      }
      Z = znew;
      if (!X.finite() || !Z.finite()) {
        h2_violation[m] = 2;
        break;
      }
    }
    GridFunction d = X;
    for (int i = 0; i < d.n; ++i) d.values[i] -= Z.values[i];
    lhs[m] = l2_norm_sq(d);
    init[m] = k_tau == k_t ? lhs[m] : d_tau;
    ieta[m] = acc_eta;
    izxx[m] = acc_zxx;
  });

  for (int m = 0; m < M; ++m)
    if (h2_violation[m])
      throw std::runtime_error("svi_check: test process lost H^2 regularity on stream " +
                               std::to_string(m));

  std::vector<double> margin(M);
  for (int m = 0; m < M; ++m) margin[m] = init[m] + ieta[m] + izxx[m] - lhs[m];

  SVIReport rep;
  rep.M = M;
  rep.master_seed = seed;
  rep.tolerance = tolerance;
  rep.lhs = summarize("lhs", lhs, seed).mean;
  rep.term_initial = summarize("init", init, seed).mean;
  rep.term_eta = summarize("eta", ieta, seed).mean;
  rep.term_zxx = summarize("zxx", izxx, seed).mean;
  rep.rhs = rep.term_initial + rep.term_eta + rep.term_zxx;
  const MCReport ms = summarize("margin", margin, seed);
  rep.margin = ms.mean;
  rep.margin_stderr = ms.stderr_;
  rep.pass = rep.margin >= -3.0 * rep.margin_stderr - tolerance;
  return rep;
}

RelaxationReport relaxation_convergence(const std::function<double(double)>& u,
                                        const std::vector<int>& j_list,
                                        const FluxModel& model, double jump_weight,
                                        int n, double tol) {
  if (j_list.empty()) throw std::invalid_argument("relaxation: empty j_list");
  for (size_t i = 1; i < j_list.size(); ++i)
    if (j_list[i] <= j_list[i - 1])
      throw std::invalid_argument("relaxation: j_list must increase");

  const GridFunction u_grid = GridFunction::sample(BC::Periodic, n, u);

  RelaxationReport rep;
  rep.tol = tol;
  // Relaxed target: interior bulk plus the weighted boundary jump, evaluated
  // on a finer reference grid.
  const int n_ref = std::max(n, 1 << 16);
  const GridFunction u_ref = GridFunction::sample(BC::Periodic, n_ref, u);
  rep.target = energy(model, u_ref, jump_weight).total;

  for (int j : j_list) {
    const GridFunction uj = construct_relaxation_sequence(u, j, n);
    GridFunction d = uj;
    for (int i = 0; i < n; ++i) d.values[i] -= u_grid.values[i];
    RelaxationRow row;
    row.j = j;
    row.l2_dist = l2_norm(d);
    row.energy = energy(model, uj);
    rep.rows.push_back(row);
  }
  rep.final_rel_err =
      std::fabs(rep.rows.back().energy.total - rep.target) / std::fabs(rep.target);
  rep.pass = rep.final_rel_err <= tol;
  return rep;
}

LscReport lsc_spotcheck(const GridFunction& u,
                        const std::function<GridFunction(int)>& generator,
                        const std::vector<int>& j_list, const FluxModel& model) {
  if (j_list.size() < 2) throw std::invalid_argument("lsc: need at least 2 sequence members");
  LscReport rep;
  const EnergyValue eu = energy(model, u);
  rep.energy_u = eu.total;
  rep.tol = 10.0 * u.h * (1.0 + std::fabs(eu.total));

  for (int j : j_list) {
    const GridFunction uj = generator(j);
    if (!uj.same_grid(u)) throw std::invalid_argument("lsc: generator changed the grid");
    GridFunction d = uj;
    for (int i = 0; i < d.n; ++i) d.values[i] -= u.values[i];
    rep.l2_dists.push_back(l2_norm(d));
    rep.energies.push_back(energy(model, uj).total);
  }
  // L^2 convergence contract: the tail distance must not exceed the head.
  if (rep.l2_dists.back() > rep.l2_dists.front() + 1e-12)
    throw std::runtime_error("lsc: sequence does not converge to u in L^2");

  const size_t tail_start = rep.energies.size() / 2;
  double tail_min = rep.energies[tail_start];
  for (size_t i = tail_start; i < rep.energies.size(); ++i)
    tail_min = std::min(tail_min, rep.energies[i]);
  rep.margin = tail_min - rep.energy_u;
  rep.pass = rep.margin >= -rep.tol;
  return rep;
}

}  // namespace spde1d
