#include "spde1d/stepper.hpp"

#include <cmath>

namespace spde1d {

SimConfig SimConfig::dirichlet_vertical(FluxModel flux, VerticalNoiseSpec noise, int n,
                                        double eps, double dt, double T) {
  SimConfig c;
  c.problem = ProblemKind::DirichletVertical;
  c.flux = std::move(flux);
  c.vertical = std::move(noise);
  c.bc = BC::DirichletZero;
  c.n = n;
  c.epsilon = eps;
  c.dt = dt;
  c.T = T;
  return c;
}

SimConfig SimConfig::periodic_normal(double alpha, int n, double eps, double dt,
                                     double T) {
  SimConfig c;
  c.problem = ProblemKind::PeriodicNormal;
  c.normal.alpha = alpha;
  // rounding can push 1 - alpha^2/2 a few ulps below zero at alpha = sqrt(2)
  c.flux = FluxModel::scaled_mean_curvature(std::max(0.0, 1.0 - 0.5 * alpha * alpha));
  c.bc = BC::Periodic;
  c.n = n;
  c.epsilon = eps;
  c.dt = dt;
  c.T = T;
  return c;
}

double SimConfig::alpha_sq_half() const {
  return problem == ProblemKind::PeriodicNormal ? 0.5 * normal.alpha * normal.alpha
                                                : 0.0;
}

double SimConfig::stabilization() const {
  if (scheme != Scheme::SemiImplicit) return 0.0;
  return 0.5 * flux.flux_derivative_sup();
}

double SimConfig::implicit_coefficient() const {
  return epsilon + alpha_sq_half() + stabilization();
}

long SimConfig::num_steps() const { return std::llround(T / dt); }

void SimConfig::validate() const {
  flux.validate();
  if (n < 2) throw std::invalid_argument("sim: need n >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("sim: T must be nonnegative");
  if (T > 0.0 && dt > T) throw std::invalid_argument("sim: dt must not exceed T");
  if (record_stride < 1) throw std::invalid_argument("sim: record_stride >= 1");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("sim: viscosity must be >= 0");
  if (problem == ProblemKind::DirichletVertical) {
    if (bc != BC::DirichletZero)
      throw std::invalid_argument("sim: DirichletVertical needs DirichletZero bc");
    vertical.validate();
  } else {
    if (bc != BC::Periodic)
      throw std::invalid_argument("sim: PeriodicNormal needs Periodic bc");
    normal.validate();
  }
  if (scheme == Scheme::Explicit) {
    const double h = bc == BC::Periodic ? 1.0 / n : 1.0 / (n + 1);
    const double alpha = problem == ProblemKind::PeriodicNormal ? normal.alpha : 0.0;
    const double limit =
        h * h / (2.0 * (2.0 * epsilon + alpha * alpha + flux.flux_derivative_sup()));
    if (dt > limit)
      throw std::invalid_argument("sim: explicit scheme violates the stability guard");
  }
}

GridFunction eta_selection(const SimConfig& cfg, const GridFunction& state) {
  GridFunction eta = divergence_flux(cfg.flux, state);
  if (cfg.epsilon > 0.0) {
    const GridFunction lap = laplacian(state);
    for (int i = 0; i < eta.n; ++i) eta.values[i] += cfg.epsilon * lap.values[i];
  }
  return eta;
}

namespace {

// Backward-Euler (proximal) drift step: solves
//   u - z - dt (kappa Lap u + div phi(grad u)) = 0,
// the optimality condition of the convex objective
//   O(u) = 1/2 sum (u - z)^2 + dt sum_f [psi(g_f) + kappa/2 g_f^2],
// by damped Newton. The Jacobian (the Hessian of O) is tridiagonal with face
// weights kappa + phi'(g_f); Armijo backtracking on O makes the iteration
// globally convergent.
GridFunction prox_drift_step(const SimConfig& cfg, const GridFunction& z,
                             double kappa) {
  const int n = z.n;
  const double ih2 = cfg.dt / (z.h * z.h);
  double zscale = 1.0;
  for (double v : z.values) zscale = std::max(zscale, std::fabs(v));

  const auto objective = [&](const GridFunction& u) {
    double o = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = u.values[i] - z.values[i];
      o += 0.5 * d * d;
    }
    const FaceField g = gradient(u);
    for (double gf : g.values)
      o += cfg.dt * (cfg.flux.potential(gf) + 0.5 * kappa * gf * gf);
    return o;
  };

  GridFunction u = z;
  double obj = objective(u);
  for (int it = 0; it < 100; ++it) {
    const GridFunction df = divergence_flux(cfg.flux, u);
    const GridFunction lap = laplacian(u);
    std::vector<double> r(n);  // gradient of O, also the step residual
    double rnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      r[i] = u.values[i] - z.values[i] - cfg.dt * (kappa * lap.values[i] + df.values[i]);
      rnorm = std::max(rnorm, std::fabs(r[i]));
    }
    if (rnorm <= 1e-11 * zscale) return u;

    const FaceField g = gradient(u);
    if (z.bc == BC::DirichletZero) {
      std::vector<double> w(n + 1);
      for (int f = 0; f <= n; ++f) w[f] = kappa + cfg.flux.flux_derivative(g.values[f]);
      std::vector<double> sub(n), diag(n), sup(n);
      for (int i = 0; i < n; ++i) {
        diag[i] = 1.0 + ih2 * (w[i] + w[i + 1]);
        sub[i] = i > 0 ? -ih2 * w[i] : 0.0;
        sup[i] = i < n - 1 ? -ih2 * w[i + 1] : 0.0;
      }
      solve_tridiag_inplace(sub, diag, sup, r);
    } else {
      std::vector<double> w(n);
      for (int f = 0; f < n; ++f) w[f] = kappa + cfg.flux.flux_derivative(g.values[f]);
      std::vector<double> sub(n), diag(n), sup(n);
      for (int i = 0; i < n; ++i) {
        const double wl = w[(i + n - 1) % n];
        diag[i] = 1.0 + ih2 * (wl + w[i]);
        sub[i] = i > 0 ? -ih2 * wl : 0.0;
        sup[i] = i < n - 1 ? -ih2 * w[i] : 0.0;
      }
      const double corner = -ih2 * w[n - 1];  // wrap face couples nodes 0 and n-1
      solve_cyclic_inplace(sub, diag, sup, corner, corner, r);
    }

    // r now holds the Newton direction (to subtract); descent slope r . grad
    double slope = 0.0;
    for (int i = 0; i < n; ++i) {
      const double grad_i =
          u.values[i] - z.values[i] - cfg.dt * (kappa * lap.values[i] + df.values[i]);
      slope -= r[i] * grad_i;
    }
    // Armijo with an absolute slack covering fp noise of the objective: near
    // the optimum the decrease per Newton step drops below the objective's
    // floating-point resolution and the full step must still be accepted.
    const double slack = 1e-14 * (1.0 + std::fabs(obj));
    double t = 1.0;
    GridFunction trial = u;
    for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
      for (int i = 0; i < n; ++i) trial.values[i] = u.values[i] - t * r[i];
      const double trial_obj = objective(trial);
      if (trial_obj <= obj + 1e-4 * t * slope + slack) {
        u = trial;
        obj = trial_obj;
        break;
      }
    }
  }
  throw std::runtime_error("implicit step: Newton iteration failed to converge");
}

// One Euler-Maruyama step. Drift treatment per scheme:
//
// SemiImplicit: the linear stiff parts (eps, alpha^2/2 for the periodic
// problem) plus the stabilization shift c0 = sup(phi')/2 are treated by one
// tridiagonal resolvent solve; the nonlinear flux (with c0 Lap subtracted)
// and the noise are explicit:
//   (I - dt (eps + a2h + c0) Lap) X' = X + dt (div phi(DX) - c0 Lap X) + noise.
// Frozen-coefficient amplification per mode mu is
//   (1 - dt mu (phi' - c0)) / (1 + dt mu (eps + a2h + c0)),
// which has magnitude <= 1 for every dt since 0 <= phi' <= 2 c0. For the
// Linear kind the explicit remainder vanishes identically and the flux is in
// effect fully implicit.
//
// Implicit: full backward-Euler drift (prox step on z = X + noise).
GridFunction advance(const SimConfig& cfg, const GridFunction& state,
                     const GridFunction& noise_term) {
  GridFunction rhs = state;
  if (cfg.scheme == Scheme::Implicit) {
    for (int i = 0; i < rhs.n; ++i) rhs.values[i] += noise_term.values[i];
    return prox_drift_step(cfg, rhs, cfg.epsilon + cfg.alpha_sq_half());
  }
  const GridFunction df = divergence_flux(cfg.flux, state);
  if (cfg.scheme == Scheme::SemiImplicit) {
    const double c0 = cfg.stabilization();
    if (c0 > 0.0) {
      const GridFunction lap = laplacian(state);
      for (int i = 0; i < rhs.n; ++i)
        rhs.values[i] += cfg.dt * (df.values[i] - c0 * lap.values[i]) + noise_term.values[i];
    } else {
      for (int i = 0; i < rhs.n; ++i)
        rhs.values[i] += cfg.dt * df.values[i] + noise_term.values[i];
    }
    const double kappa = cfg.implicit_coefficient();
    if (kappa > 0.0) return resolvent(rhs, cfg.dt * kappa);
    return rhs;
  }
  // Explicit
  const GridFunction lap = laplacian(state);
  const double kappa = cfg.epsilon + cfg.alpha_sq_half();
  for (int i = 0; i < rhs.n; ++i)
    rhs.values[i] += cfg.dt * (kappa * lap.values[i] + df.values[i]) + noise_term.values[i];
  return rhs;
}

}  // namespace

GridFunction step_dirichlet_vertical(const SimConfig& cfg, const GridFunction& state,
                                     const std::vector<double>& increments) {
  if (cfg.problem != ProblemKind::DirichletVertical || state.bc != BC::DirichletZero)
    throw std::invalid_argument("step: config/state mismatch for DirichletVertical");
  const GridFunction noise = apply_vertical(cfg.vertical, state, increments);
  return advance(cfg, state, noise);
}

GridFunction step_periodic_normal(const SimConfig& cfg, const GridFunction& state,
                                  double dbeta) {
  if (cfg.problem != ProblemKind::PeriodicNormal || state.bc != BC::Periodic)
    throw std::invalid_argument("step: config/state mismatch for PeriodicNormal");
  const GridFunction noise = apply_normal(cfg.normal, state, dbeta);
  return advance(cfg, state, noise);
}

PathRecord simulate(const SimConfig& cfg, const GridFunction& x0,
                    const WienerSampler& sampler) {
  cfg.validate();
  if (x0.bc != cfg.bc || x0.n != cfg.n)
    throw std::invalid_argument("simulate: x0 does not match the configured grid");

  PathRecord rec;
  const long steps = cfg.num_steps();
  GridFunction state = x0;

  auto record = [&](double t, const GridFunction& s) {
    rec.times.push_back(t);
    rec.states.push_back(s);
    rec.energy_trace.push_back(energy(cfg.flux, s));
    rec.l2_trace.push_back(l2_norm(s));
  };
  record(0.0, state);

  const int K = cfg.vertical.truncation();
  for (long k = 0; k < steps; ++k) {
    if (cfg.track_eta) {
      const GridFunction eta = eta_selection(cfg, state);
      const double nsq = l2_norm_sq(eta);
      rec.eta_sq_integral += nsq * cfg.dt;
      rec.eta_sq_weighted_integral += (k * cfg.dt) * nsq * cfg.dt;
    }
    if (cfg.problem == ProblemKind::DirichletVertical) {
      state = step_dirichlet_vertical(cfg, state,
                                      sampler.increments(K, cfg.dt, static_cast<std::uint64_t>(k)));
    } else {
      state = step_periodic_normal(cfg, state,
                                   sampler.increment(cfg.dt, static_cast<std::uint64_t>(k)));
    }
    if (!state.finite()) throw BlowupError(k + 1);
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == steps)
      record((k + 1) * cfg.dt, state);
  }
  return rec;
}

void extract_eta(const SimConfig& cfg, PathRecord& path) {
  path.eta.clear();
  path.eta.reserve(path.states.size());
  for (const GridFunction& s : path.states) path.eta.push_back(eta_selection(cfg, s));
}

}  // namespace spde1d
