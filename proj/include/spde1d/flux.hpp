#pragma once

#include <string>

namespace spde1d {

/// Built-in scalar nonlinearities. Each kind defines a nonnegative, convex,
/// even potential psi with psi(0) = 0, its flux phi = psi' and phi'.
enum class FluxKind {
  MeanCurvature,        // psi = xi*atan(xi) - log(1+xi^2)/2, phi = atan
  MinimalSurface,       // psi = sqrt(eps_reg + xi^2) - sqrt(eps_reg)
  Newtonian,            // psi = ((1+xi^2)^{p/2} - 1)/p, p in (1,2)
  Linear,               // psi = xi^2/2; validation oracle (heat equation),
                        // intentionally not of linear growth
  ScaledMeanCurvature,  // MeanCurvature scaled by coef = 1 - alpha^2/2
};

struct FluxModel {
  std::string name = "mean_curvature";
  FluxKind kind = FluxKind::MeanCurvature;
  double coef = 1.0;     // multiplier applied to psi and phi
  double eps_reg = 1.0;  // MinimalSurface regularization, > 0
  double p = 1.5;        // Newtonian exponent
  double growth_c = 0.5; // declared linear-growth constants, c > 0, C >= 0
  double growth_C = 2.0;

  double potential(double xi) const;        // coef * psi(xi)
  double flux(double xi) const;             // coef * phi(xi)
  double flux_derivative(double xi) const;  // coef * phi'(xi)

  /// coef * sup |phi|; +inf for kinds whose flux is unbounded.
  double flux_sup() const;
  /// coef * sup phi' (attained at xi = 0 for every built-in kind).
  double flux_derivative_sup() const;

  /// True when psi satisfies the linear-growth inequalities globally.
  bool linear_growth() const;

  /// Recession psi0(xi) = lim_{t->0} t psi(xi/t). Closed form for the
  /// linear-growth kinds; throws std::domain_error otherwise.
  double recession(double xi) const;

  void validate() const;  // throws std::invalid_argument

  static FluxModel mean_curvature(double coef = 1.0);
  static FluxModel minimal_surface(double eps_reg, double coef = 1.0);
  static FluxModel newtonian(double p);
  static FluxModel linear();
  static FluxModel scaled_mean_curvature(double coef);
  static FluxModel from_name(const std::string& kind_name);
};

/// Numeric recession limit over t = 2^-k, stopping when successive values
/// agree to 1e-10. Generic path for models without a closed form; the tests
/// use it to cross-check the hard-coded forms.
double recession_numeric(const FluxModel& m, double xi, double tol = 1e-10);

struct GrowthReport {
  double fitted_c = 0.0;  // largest feasible c given the declared C
  double fitted_C = 0.0;  // smallest feasible C given the declared c
  double lo = 0.0;
  double hi = 0.0;
  long violations = 0;               // under the declared (c, C)
  long violations_family[3] = {0, 0, 0};
  bool only_first_family_fails() const {
    return violations_family[0] > 0 && violations_family[1] == 0 &&
           violations_family[2] == 0;
  }
};

/// Samples the three growth inequalities on [lo, hi]:
///   (1)  c|xi| - C <= psi(xi) <= C(1 + |xi|)
///   (2)  c psi(xi) - C <= phi(xi) xi
///   (3)  |phi'(xi)| xi^2 <= C(1 + psi(xi))
/// using the model's declared constants, and fits empirical constants over
/// the sample. Kinds without linear growth are flagged through the violation
/// counts, not errored.
GrowthReport validate_growth(const FluxModel& m, double lo, double hi, int n_samples);

}  // namespace spde1d
