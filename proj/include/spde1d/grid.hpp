#pragma once

#include <functional>
#include <vector>

#include "spde1d/flux.hpp"

namespace spde1d {

enum class BC { DirichletZero, Periodic };

/// Function sampled on the uniform grid over O = (0,1).
/// DirichletZero: n interior nodes x_i = (i+1)h with h = 1/(n+1); the zero
/// trace at both endpoints is implicit. Periodic: n nodes x_i = i h, h = 1/n.
struct GridFunction {
  BC bc = BC::Periodic;
  int n = 0;
  double h = 0.0;
  std::vector<double> values;

  static GridFunction zeros(BC bc, int n);
  static GridFunction constant(BC bc, int n, double c);
  static GridFunction sample(BC bc, int n, const std::function<double(double)>& f);

  double x(int i) const { return bc == BC::Periodic ? i * h : (i + 1) * h; }
  bool finite() const;
  bool same_grid(const GridFunction& o) const {
    return bc == o.bc && n == o.n;
  }
};

/// Forward differences living on cell faces. DirichletZero grids have n+1
/// faces (the two boundary faces difference against the zero trace);
/// Periodic grids have n faces, the last wrapping from x_{n-1} to x_0.
struct FaceField {
  BC bc = BC::Periodic;
  int n = 0;  // node count of the originating grid
  double h = 0.0;
  std::vector<double> values;
};

FaceField gradient(const GridFunction& v);

/// Discrete div phi(grad v) = -D^T phi(D v); the exact adjoint of the
/// forward-difference gradient, so summation by parts holds to rounding.
GridFunction divergence_flux(const FluxModel& m, const GridFunction& v);

GridFunction laplacian(const GridFunction& v);

/// Gradient averaged back to nodes, (g_{i-1} + g_i)/2.
GridFunction node_centered_gradient(const GridFunction& v);

/// Solves (I - lambda * Lap) u = v with the bc of v; tridiagonal elimination,
/// cyclic variant for Periodic. lambda > 0.
GridFunction resolvent(const GridFunction& v, double lambda);

/// General tridiagonal solve, coefficients destroyed, solution left in rhs.
/// sub[i] couples row i to i-1, sup[i] to i+1.
void solve_tridiag_inplace(std::vector<double>& sub, std::vector<double>& diag,
                           std::vector<double>& sup, std::vector<double>& rhs);

/// Cyclic variant with corner entries (0, n-1) and (n-1, 0); n >= 3.
void solve_cyclic_inplace(std::vector<double>& sub, std::vector<double>& diag,
                          std::vector<double>& sup, double corner_top,
                          double corner_bottom, std::vector<double>& rhs);

/// n (v - resolvent(v, 1/n)); Lipschitz surrogate for -Lap.
GridFunction yosida(const GridFunction& v, long n_yosida);

/// Orthogonal projection onto the span of the first m eigenvectors of the
/// discrete Laplacian (discrete sine basis for DirichletZero, discrete
/// Fourier basis for Periodic, ordered by eigenvalue).
GridFunction galerkin_project(const GridFunction& v, int m);

/// k-th discrete Laplacian eigenvalue magnitude: Lap e = -mu e.
/// DirichletZero: mu_k = (2/h^2)(1 - cos(k pi h)), k = 1..n.
/// Periodic (frequency f): mu_f = (2/h^2)(1 - cos(2 pi f h)).
double laplacian_eigenvalue(BC bc, int n, int k);

double l2_inner(const GridFunction& u, const GridFunction& v);
double l2_norm_sq(const GridFunction& v);
double l2_norm(const GridFunction& v);

/// Discrete H^1 seminorm pairing h * sum (Du)_f (Dw)_f over faces.
double h1_seminorm_pairing(const GridFunction& u, const GridFunction& w);

struct EnergyValue {
  double bulk = 0.0;
  double boundary = 0.0;
  double total = 0.0;
};

/// Discrete linear-growth energy h * sum psi(g_f) over all faces. On Periodic
/// grids the wrap face prices the boundary jump through its difference
/// quotient (h psi(jump/h) -> psi0(1)|jump| under refinement); boundary is 0.
EnergyValue energy(const FluxModel& m, const GridFunction& v);

/// Variant pricing the Periodic wrap face as jump_weight * |v(1-) - v(0+)|
/// instead of psi of its difference quotient; reported in `boundary`.
/// Identical to the plain form on DirichletZero grids.
EnergyValue energy(const FluxModel& m, const GridFunction& v, double jump_weight);

/// (eps/2) h sum g^2 + energy(m, v).bulk.
double energy_eps(const FluxModel& m, const GridFunction& v, double eps);

/// Continuous periodic approximant u_j of a function u on [0,1] with possibly
/// u(0) != u(1): boundary layers carrying (u(1)-u(0))/2 at x=0 and its
/// negative at x=1, supported within distance 1/j of the boundary (layer
/// width 1/j^2). u_j(0) = u_j(1) = (u(0)+u(1))/2.
GridFunction construct_relaxation_sequence(const std::function<double(double)>& u,
                                           int j, int n);

/// Piecewise-linear interpolant of a grid function, for use as the `u`
/// argument above when only samples are available.
std::function<double(double)> interpolant(const GridFunction& v);

}  // namespace spde1d
