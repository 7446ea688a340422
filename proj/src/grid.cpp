#include "spde1d/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spde1d {

namespace {

void check_nonempty(const GridFunction& v) {
  if (v.n < 1 || static_cast<int>(v.values.size()) != v.n)
    throw std::invalid_argument("grid: empty or inconsistent grid function");
}

double spacing(BC bc, int n) {
  return bc == BC::Periodic ? 1.0 / n : 1.0 / (n + 1);
}

// Thomas elimination for tridiag(a, b, a) u = d, strictly diagonally dominant.
void solve_tridiag(double a, double b, std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  std::vector<double> c(n, 0.0);
  c[0] = a / b;
  d[0] /= b;
  for (int i = 1; i < n; ++i) {
    const double m = b - a * c[i - 1];
    c[i] = a / m;
    d[i] = (d[i] - a * d[i - 1]) / m;
  }
  for (int i = n - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
}

// Variable-diagonal variant used by the cyclic reduction below.
void solve_tridiag_var(double a, const std::vector<double>& b, std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  std::vector<double> c(n, 0.0);
  c[0] = a / b[0];
  d[0] /= b[0];
  for (int i = 1; i < n; ++i) {
    const double m = b[i] - a * c[i - 1];
    c[i] = a / m;
    d[i] = (d[i] - a * d[i - 1]) / m;
  }
  for (int i = n - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
}

}  // namespace

GridFunction GridFunction::zeros(BC bc, int n) {
  if (n < 1) throw std::invalid_argument("grid: need n >= 1");
  GridFunction v;
  v.bc = bc;
  v.n = n;
  v.h = spacing(bc, n);
  v.values.assign(n, 0.0);
  return v;
}

GridFunction GridFunction::constant(BC bc, int n, double c) {
  GridFunction v = zeros(bc, n);
  std::fill(v.values.begin(), v.values.end(), c);
  return v;
}

GridFunction GridFunction::sample(BC bc, int n, const std::function<double(double)>& f) {
  GridFunction v = zeros(bc, n);
  for (int i = 0; i < n; ++i) v.values[i] = f(v.x(i));
  return v;
}

bool GridFunction::finite() const {
  for (double a : values)
    if (!std::isfinite(a)) return false;
  return true;
}

FaceField gradient(const GridFunction& v) {
  check_nonempty(v);
  FaceField g;
  g.bc = v.bc;
  g.n = v.n;
  g.h = v.h;
  const int n = v.n;
  const double inv_h = 1.0 / v.h;
  if (v.bc == BC::Periodic) {
    g.values.resize(n);
    for (int f = 0; f < n - 1; ++f) g.values[f] = (v.values[f + 1] - v.values[f]) * inv_h;
    g.values[n - 1] = (v.values[0] - v.values[n - 1]) * inv_h;  // wrap
  } else {
    g.values.resize(n + 1);
    g.values[0] = v.values[0] * inv_h;
    for (int f = 1; f < n; ++f) g.values[f] = (v.values[f] - v.values[f - 1]) * inv_h;
    g.values[n] = -v.values[n - 1] * inv_h;
  }
  return g;
}

GridFunction divergence_flux(const FluxModel& m, const GridFunction& v) {
  const FaceField g = gradient(v);
  GridFunction w = GridFunction::zeros(v.bc, v.n);
  const int n = v.n;
  const double inv_h = 1.0 / v.h;
  if (v.bc == BC::Periodic) {
    std::vector<double> F(n);
    for (int f = 0; f < n; ++f) F[f] = m.flux(g.values[f]);
    for (int i = 0; i < n; ++i) {
      const double left = F[(i + n - 1) % n];
      w.values[i] = (F[i] - left) * inv_h;
    }
  } else {
    std::vector<double> F(n + 1);
    for (int f = 0; f <= n; ++f) F[f] = m.flux(g.values[f]);
    for (int i = 0; i < n; ++i) w.values[i] = (F[i + 1] - F[i]) * inv_h;
  }
  return w;
}

GridFunction laplacian(const GridFunction& v) {
  check_nonempty(v);
  GridFunction w = GridFunction::zeros(v.bc, v.n);
  const int n = v.n;
  const double inv_h2 = 1.0 / (v.h * v.h);
  if (v.bc == BC::Periodic) {
    for (int i = 0; i < n; ++i) {
      const double vm = v.values[(i + n - 1) % n];
      const double vp = v.values[(i + 1) % n];
      w.values[i] = (vm - 2.0 * v.values[i] + vp) * inv_h2;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double vm = i > 0 ? v.values[i - 1] : 0.0;
      const double vp = i < n - 1 ? v.values[i + 1] : 0.0;
      w.values[i] = (vm - 2.0 * v.values[i] + vp) * inv_h2;
    }
  }
  return w;
}

GridFunction node_centered_gradient(const GridFunction& v) {
  const FaceField g = gradient(v);
  GridFunction a = GridFunction::zeros(v.bc, v.n);
  const int n = v.n;
  if (v.bc == BC::Periodic) {
    for (int i = 0; i < n; ++i)
      a.values[i] = 0.5 * (g.values[(i + n - 1) % n] + g.values[i]);
  } else {
    for (int i = 0; i < n; ++i) a.values[i] = 0.5 * (g.values[i] + g.values[i + 1]);
  }
  return a;
}

GridFunction resolvent(const GridFunction& v, double lambda) {
  check_nonempty(v);
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent: lambda must be positive");
  const int n = v.n;
  const double r = lambda / (v.h * v.h);
  const double a = -r;
  const double b = 1.0 + 2.0 * r;

  GridFunction u = v;
  if (v.bc == BC::DirichletZero) {
    solve_tridiag(a, b, u.values);
    return u;
  }

  // Periodic: cyclic tridiagonal via Sherman-Morrison.
  if (n == 1) return u;  // Lap = 0 on a single periodic node
  if (n == 2) {
    // both neighbors coincide: diag b, offdiag 2a
    const double det = b * b - 4.0 * a * a;
    const double u0 = (b * v.values[0] - 2.0 * a * v.values[1]) / det;
    const double u1 = (b * v.values[1] - 2.0 * a * v.values[0]) / det;
    u.values = {u0, u1};
    return u;
  }

  const double gamma = -b;
  std::vector<double> diag(n, b);
  diag[0] = b - gamma;
  diag[n - 1] = b - a * a / gamma;
  std::vector<double> y = v.values;
  solve_tridiag_var(a, diag, y);
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = a;
  solve_tridiag_var(a, diag, z);
  const double fact =
      (y[0] + a * y[n - 1] / gamma) / (1.0 + z[0] + a * z[n - 1] / gamma);
  for (int i = 0; i < n; ++i) u.values[i] = y[i] - fact * z[i];
  return u;
}

void solve_tridiag_inplace(std::vector<double>& sub, std::vector<double>& diag,
                           std::vector<double>& sup, std::vector<double>& rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

void solve_cyclic_inplace(std::vector<double>& sub, std::vector<double>& diag,
                          std::vector<double>& sup, double corner_top,
                          double corner_bottom, std::vector<double>& rhs) {
  const int n = static_cast<int>(rhs.size());
  if (n < 3) throw std::invalid_argument("cyclic solve: need n >= 3");
  const double gamma = -diag[0];
  std::vector<double> d2 = diag;
  d2[0] -= gamma;
  d2[n - 1] -= corner_bottom * corner_top / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner_bottom;
  {
    std::vector<double> s = sub, dd = d2, p = sup;
    solve_tridiag_inplace(s, dd, p, rhs);
  }
  {
    std::vector<double> s = sub, dd = d2, p = sup;
    solve_tridiag_inplace(s, dd, p, u);
  }
  const double fact = (rhs[0] + corner_top * rhs[n - 1] / gamma) /
                      (1.0 + u[0] + corner_top * u[n - 1] / gamma);
  for (int i = 0; i < n; ++i) rhs[i] -= fact * u[i];
}

GridFunction yosida(const GridFunction& v, long n_yosida) {
  if (n_yosida < 1) throw std::invalid_argument("yosida: need n >= 1");
  const GridFunction jv = resolvent(v, 1.0 / static_cast<double>(n_yosida));
  GridFunction w = v;
  for (int i = 0; i < v.n; ++i)
    w.values[i] = static_cast<double>(n_yosida) * (v.values[i] - jv.values[i]);
  return w;
}

double laplacian_eigenvalue(BC bc, int n, int k) {
  const double h = spacing(bc, n);
  const double theta = bc == BC::Periodic ? 2.0 * M_PI * k * h : M_PI * k * h;
  return 2.0 / (h * h) * (1.0 - std::cos(theta));
}

namespace {

// Periodic eigenbasis enumeration in eigenvalue order: the constant mode,
// then (cos, sin) pairs per frequency, then the alternating mode for even n.
void periodic_mode(int idx, int n, std::vector<double>& e) {
  e.assign(n, 0.0);
  if (idx == 0) {
    std::fill(e.begin(), e.end(), 1.0);
    return;
  }
  const int f = (idx + 1) / 2;
  const bool is_cos = (idx % 2) == 1;
  const double h = 1.0 / n;
  if (n % 2 == 0 && idx == n - 1) {
    for (int i = 0; i < n; ++i) e[i] = (i % 2 == 0) ? 1.0 : -1.0;
    return;
  }
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * f * i * h;
    e[i] = is_cos ? std::cos(t) : std::sin(t);
  }
}

}  // namespace

GridFunction galerkin_project(const GridFunction& v, int m) {
  check_nonempty(v);
  if (m < 1 || m > v.n) throw std::invalid_argument("galerkin_project: m out of range");
  const int n = v.n;
  GridFunction out = GridFunction::zeros(v.bc, v.n);
  std::vector<double> e(n);
  if (v.bc == BC::DirichletZero) {
    for (int k = 1; k <= m; ++k) {
      double num = 0.0, den = 0.0;
      for (int i = 0; i < n; ++i) {
        e[i] = std::sin(k * M_PI * v.x(i));
        num += v.values[i] * e[i];
        den += e[i] * e[i];
      }
      const double c = num / den;
      for (int i = 0; i < n; ++i) out.values[i] += c * e[i];
    }
  } else {
    for (int idx = 0; idx < m; ++idx) {
      periodic_mode(idx, n, e);
      double num = 0.0, den = 0.0;
      for (int i = 0; i < n; ++i) {
        num += v.values[i] * e[i];
        den += e[i] * e[i];
      }
      const double c = num / den;
      for (int i = 0; i < n; ++i) out.values[i] += c * e[i];
    }
  }
  return out;
}

double l2_inner(const GridFunction& u, const GridFunction& v) {
  if (!u.same_grid(v)) throw std::invalid_argument("l2_inner: grid mismatch");
  double s = 0.0;
  for (int i = 0; i < u.n; ++i) s += u.values[i] * v.values[i];
  return u.h * s;
}

double l2_norm_sq(const GridFunction& v) { return l2_inner(v, v); }

double l2_norm(const GridFunction& v) { return std::sqrt(l2_norm_sq(v)); }

double h1_seminorm_pairing(const GridFunction& u, const GridFunction& w) {
  if (!u.same_grid(w)) throw std::invalid_argument("h1_seminorm_pairing: grid mismatch");
  const FaceField gu = gradient(u);
  const FaceField gw = gradient(w);
  double s = 0.0;
  for (size_t f = 0; f < gu.values.size(); ++f) s += gu.values[f] * gw.values[f];
  return u.h * s;
}

EnergyValue energy(const FluxModel& m, const GridFunction& v) {
  const FaceField g = gradient(v);
  EnergyValue e;
  double s = 0.0;
  for (double gf : g.values) s += m.potential(gf);
  e.bulk = v.h * s;
  e.boundary = 0.0;
  e.total = e.bulk + e.boundary;
  return e;
}

EnergyValue energy(const FluxModel& m, const GridFunction& v, double jump_weight) {
  if (!(jump_weight >= 0.0))
    throw std::invalid_argument("energy: jump_weight must be nonnegative");
  if (v.bc == BC::DirichletZero) return energy(m, v);
  const FaceField g = gradient(v);
  EnergyValue e;
  double s = 0.0;
  for (int f = 0; f < v.n - 1; ++f) s += m.potential(g.values[f]);
  e.bulk = v.h * s;
  e.boundary = jump_weight * std::fabs(v.values[0] - v.values[v.n - 1]);
  e.total = e.bulk + e.boundary;
  return e;
}

double energy_eps(const FluxModel& m, const GridFunction& v, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("energy_eps: eps must be nonnegative");
  const FaceField g = gradient(v);
  double s = 0.0;
  for (double gf : g.values) s += gf * gf;
  return 0.5 * eps * v.h * s + energy(m, v).bulk;
}

namespace {

// C^1 cutoff: q(0) = 1, q(1) = 0, q' = 0 at both ends, monotone.
double smoothstep_down(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 + s * s * (2.0 * s - 3.0);
}

}  // namespace

GridFunction construct_relaxation_sequence(const std::function<double(double)>& u,
                                           int j, int n) {
  if (j < 2) throw std::invalid_argument("relaxation sequence: need j >= 2");
  if (n < 2) throw std::invalid_argument("relaxation sequence: need n >= 2");
  const double u0 = u(0.0);
  const double u1 = u(1.0);
  const double w_left = 0.5 * (u1 - u0);  // boundary value carried at x = 0
  const double width = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
  GridFunction out = GridFunction::zeros(BC::Periodic, n);
  for (int i = 0; i < n; ++i) {
    const double x = out.x(i);
    double val = u(x);
    val += w_left * smoothstep_down(x / width);
    val -= w_left * smoothstep_down((1.0 - x) / width);
    out.values[i] = val;
  }
  return out;
}

std::function<double(double)> interpolant(const GridFunction& v) {
  return [v](double x) {
    if (v.bc == BC::Periodic) {
      double t = x - std::floor(x);
      const double pos = t / v.h;
      const int i = std::min(static_cast<int>(pos), v.n - 1);
      const double frac = pos - i;
      const double right = v.values[(i + 1) % v.n];
      return v.values[i] * (1.0 - frac) + right * frac;
    }
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double pos = x / v.h;  // node i sits at (i+1) h
    const int cell = static_cast<int>(pos);
    const double frac = pos - cell;
    const double left = cell >= 1 ? v.values[cell - 1] : 0.0;
    const double right = cell <= v.n - 1 ? v.values[cell] : 0.0;
    return left * (1.0 - frac) + right * frac;
  };
}

}  // namespace spde1d
