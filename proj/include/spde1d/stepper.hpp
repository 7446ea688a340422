#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spde1d/flux.hpp"
#include "spde1d/grid.hpp"
#include "spde1d/noise.hpp"

namespace spde1d {

/// SemiImplicit: linear stiff parts plus a stabilization shift solved
/// implicitly, nonlinear flux and noise explicit; one tridiagonal solve.
/// Implicit: nonlinear backward-Euler (proximal) flux step via Newton,
/// stiffly accurate; needed when the run is far above the flux CFL and the
/// subgradient selection itself is reported.
/// Explicit: forward Euler, guarded by the stability bound.
enum class Scheme { SemiImplicit, Implicit, Explicit };
enum class ProblemKind { DirichletVertical, PeriodicNormal };

/// Thrown when a state turns non-finite; carries the offending step.
struct BlowupError : std::runtime_error {
  long step;
  explicit BlowupError(long s)
      : std::runtime_error("state blew up at step " + std::to_string(s)), step(s) {}
};

struct SimConfig {
  ProblemKind problem = ProblemKind::PeriodicNormal;
  FluxModel flux = FluxModel::mean_curvature();
  VerticalNoiseSpec vertical;  // DirichletVertical only
  NormalNoiseSpec normal;      // PeriodicNormal only
  BC bc = BC::Periodic;
  int n = 128;
  double epsilon = 0.0;  // viscosity
  double dt = 1e-4;
  double T = 0.1;
  Scheme scheme = Scheme::SemiImplicit;
  int record_stride = 1;
  bool track_eta = true;  // accumulate eta integrals at every step

  static SimConfig dirichlet_vertical(FluxModel flux, VerticalNoiseSpec noise, int n,
                                      double eps, double dt, double T);
  static SimConfig periodic_normal(double alpha, int n, double eps, double dt,
                                   double T);

  void validate() const;
  long num_steps() const;
  double alpha_sq_half() const;
  /// Stabilization shift: half the flux's Lipschitz constant, added to the
  /// implicit operator and subtracted from the explicit side. Keeps the
  /// semi-implicit step von Neumann stable for any dt (see stepper.cpp).
  double stabilization() const;
  /// Total implicitly-treated diffusion coefficient.
  double implicit_coefficient() const;
};

struct PathRecord {
  std::vector<double> times;
  std::vector<GridFunction> states;
  std::vector<GridFunction> eta;  // filled by extract_eta
  std::vector<EnergyValue> energy_trace;
  std::vector<double> l2_trace;
  // Left-endpoint Riemann sums over every Euler step (not just recorded ones).
  double eta_sq_integral = 0.0;           // sum_k ||eta_k||^2 dt
  double eta_sq_weighted_integral = 0.0;  // sum_k t_k ||eta_k||^2 dt
};

/// Subgradient selection eta = eps * Lap(state) + div phi(grad state).
/// For PeriodicNormal this excludes the (alpha^2/2) Lap part of the drift.
GridFunction eta_selection(const SimConfig& cfg, const GridFunction& state);

GridFunction step_dirichlet_vertical(const SimConfig& cfg, const GridFunction& state,
                                     const std::vector<double>& increments);
GridFunction step_periodic_normal(const SimConfig& cfg, const GridFunction& state,
                                  double dbeta);

PathRecord simulate(const SimConfig& cfg, const GridFunction& x0,
                    const WienerSampler& sampler);

/// Recomputes eta at every recorded instant from the stored states.
void extract_eta(const SimConfig& cfg, PathRecord& path);

}  // namespace spde1d
