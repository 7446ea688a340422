#include "spde1d/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spde1d {

namespace {

void require_finite(double xi) {
  if (!std::isfinite(xi)) throw std::domain_error("flux: non-finite argument");
}

double psi_raw(const FluxModel& m, double xi) {
  switch (m.kind) {
    case FluxKind::MeanCurvature:
    case FluxKind::ScaledMeanCurvature:
      return xi * std::atan(xi) - 0.5 * std::log1p(xi * xi);
    case FluxKind::MinimalSurface:
      // shifted so psi(0) = 0
      return std::sqrt(m.eps_reg + xi * xi) - std::sqrt(m.eps_reg);
    case FluxKind::Newtonian:
      return (std::pow(1.0 + xi * xi, 0.5 * m.p) - 1.0) / m.p;
    case FluxKind::Linear:
      return 0.5 * xi * xi;
  }
  throw std::logic_error("flux: unknown kind");
}

double phi_raw(const FluxModel& m, double xi) {
  switch (m.kind) {
    case FluxKind::MeanCurvature:
    case FluxKind::ScaledMeanCurvature:
      return std::atan(xi);
    case FluxKind::MinimalSurface:
      return xi / std::sqrt(m.eps_reg + xi * xi);
    case FluxKind::Newtonian:
      return std::pow(1.0 + xi * xi, 0.5 * (m.p - 2.0)) * xi;
    case FluxKind::Linear:
      return xi;
  }
  throw std::logic_error("flux: unknown kind");
}

double dphi_raw(const FluxModel& m, double xi) {
  switch (m.kind) {
    case FluxKind::MeanCurvature:
    case FluxKind::ScaledMeanCurvature:
      return 1.0 / (1.0 + xi * xi);
    case FluxKind::MinimalSurface: {
      const double s = m.eps_reg + xi * xi;
      return m.eps_reg / (s * std::sqrt(s));
    }
    case FluxKind::Newtonian: {
      const double s = 1.0 + xi * xi;
      return std::pow(s, 0.5 * (m.p - 2.0)) * ((m.p - 2.0) * xi * xi / s + 1.0);
    }
    case FluxKind::Linear:
      return 1.0;
  }
  throw std::logic_error("flux: unknown kind");
}

}  // namespace

double FluxModel::potential(double xi) const {
  require_finite(xi);
  return coef * psi_raw(*this, xi);
}

double FluxModel::flux(double xi) const {
  require_finite(xi);
  return coef * phi_raw(*this, xi);
}

double FluxModel::flux_derivative(double xi) const {
  require_finite(xi);
  return coef * dphi_raw(*this, xi);
}

double FluxModel::flux_sup() const {
  switch (kind) {
    case FluxKind::MeanCurvature:
    case FluxKind::ScaledMeanCurvature:
      return coef * (M_PI / 2.0);
    case FluxKind::MinimalSurface:
      return coef * 1.0;
    case FluxKind::Newtonian:
    case FluxKind::Linear:
      return std::numeric_limits<double>::infinity();
  }
  throw std::logic_error("flux: unknown kind");
}

double FluxModel::flux_derivative_sup() const {
  // phi' is maximal at 0 for all built-in kinds.
  return coef * dphi_raw(*this, 0.0);
}

bool FluxModel::linear_growth() const {
  return kind == FluxKind::MeanCurvature || kind == FluxKind::ScaledMeanCurvature ||
         kind == FluxKind::MinimalSurface;
}

double FluxModel::recession(double xi) const {
  require_finite(xi);
  switch (kind) {
    case FluxKind::MeanCurvature:
    case FluxKind::ScaledMeanCurvature:
      return coef * (M_PI / 2.0) * std::fabs(xi);
    case FluxKind::MinimalSurface:
      return coef * std::fabs(xi);
    case FluxKind::Newtonian:
    case FluxKind::Linear:
      throw std::domain_error("recession: model is not of linear growth");
  }
  throw std::logic_error("flux: unknown kind");
}

double recession_numeric(const FluxModel& m, double xi, double tol) {
  if (xi == 0.0) return 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double t = 0.5;
  for (int k = 1; k <= 60; ++k, t *= 0.5) {
    const double cur = t * m.potential(xi / t);
    if (std::fabs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

void FluxModel::validate() const {
  if (!(coef >= 0.0) || !std::isfinite(coef))
    throw std::invalid_argument("flux: coef must be a nonnegative real");
  if (kind == FluxKind::ScaledMeanCurvature && coef > 1.0)
    throw std::invalid_argument("flux: scaled mean curvature coef must lie in [0,1]");
  if (kind == FluxKind::MinimalSurface && !(eps_reg > 0.0))
    throw std::invalid_argument("flux: minimal surface eps_reg must be positive");
  if (kind == FluxKind::Newtonian && !(p > 1.0 && p < 2.0))
    throw std::invalid_argument("flux: newtonian exponent must lie in (1,2)");
  if (!(growth_c > 0.0) || !(growth_C >= 0.0))
    throw std::invalid_argument("flux: growth constants require c > 0, C >= 0");
}

FluxModel FluxModel::mean_curvature(double coef) {
  FluxModel m;
  m.name = "mean_curvature";
  m.kind = FluxKind::MeanCurvature;
  m.coef = coef;
  return m;
}

FluxModel FluxModel::minimal_surface(double eps_reg, double coef) {
  FluxModel m;
  m.name = "minimal_surface";
  m.kind = FluxKind::MinimalSurface;
  m.coef = coef;
  m.eps_reg = eps_reg;
  return m;
}

FluxModel FluxModel::newtonian(double p) {
  FluxModel m;
  m.name = "newtonian";
  m.kind = FluxKind::Newtonian;
  m.p = p;
  return m;
}

FluxModel FluxModel::linear() {
  FluxModel m;
  m.name = "linear";
  m.kind = FluxKind::Linear;
  return m;
}

FluxModel FluxModel::scaled_mean_curvature(double coef) {
  FluxModel m;
  m.name = "scaled_mean_curvature";
  m.kind = FluxKind::ScaledMeanCurvature;
  m.coef = coef;
  return m;
}

FluxModel FluxModel::from_name(const std::string& kind_name) {
  if (kind_name == "mean_curvature") return mean_curvature();
  if (kind_name == "minimal_surface") return minimal_surface(1.0);
  if (kind_name == "newtonian") return newtonian(1.5);
  if (kind_name == "linear") return linear();
  if (kind_name == "scaled_mean_curvature") return scaled_mean_curvature(1.0);
  throw std::invalid_argument("flux: unknown kind name '" + kind_name + "'");
}

GrowthReport validate_growth(const FluxModel& m, double lo, double hi, int n_samples) {
  m.validate();
  if (!(lo < hi)) throw std::invalid_argument("validate_growth: degenerate range");
  if (n_samples < 2) throw std::invalid_argument("validate_growth: need n_samples >= 2");

  GrowthReport rep;
  rep.lo = lo;
  rep.hi = hi;

  const double c = m.growth_c;
  const double C = m.growth_C;
  // Small slack so exact-equality sample points do not count as violations.
  const double slack = 1e-12;

  double needed_C = 0.0;       // smallest C making all inequalities hold at c
  double feasible_c = std::numeric_limits<double>::infinity();

  for (int i = 0; i < n_samples; ++i) {
    const double xi = lo + (hi - lo) * static_cast<double>(i) / (n_samples - 1);
    const double axi = std::fabs(xi);
    const double psi = m.potential(xi);
    const double phixi = m.flux(xi) * xi;
    const double dphi = std::fabs(m.flux_derivative(xi));
    const double scale = 1.0 + axi + std::fabs(psi);

    const bool f1 = (c * axi - C <= psi + slack * scale) &&
                    (psi <= C * (1.0 + axi) + slack * scale);
    const bool f2 = (c * psi - C <= phixi + slack * scale);
    const bool f3 = (dphi * xi * xi <= C * (1.0 + psi) + slack * scale);
    if (!f1) ++rep.violations_family[0];
    if (!f2) ++rep.violations_family[1];
    if (!f3) ++rep.violations_family[2];
    if (!f1 || !f2 || !f3) ++rep.violations;

    needed_C = std::max({needed_C, psi / (1.0 + axi), c * axi - psi, c * psi - phixi,
                         dphi * xi * xi / (1.0 + psi)});
    if (axi > 0.0) feasible_c = std::min(feasible_c, (psi + C) / axi);
    if (psi > 1e-300) feasible_c = std::min(feasible_c, (phixi + C) / psi);
  }

  rep.fitted_C = std::max(0.0, needed_C);
  rep.fitted_c = std::isfinite(feasible_c) ? feasible_c : 0.0;
  return rep;
}

}  // namespace spde1d
