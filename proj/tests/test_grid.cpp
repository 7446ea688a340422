#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spde1d/grid.hpp"

using namespace spde1d;

namespace {

GridFunction random_grid(BC bc, int n, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  GridFunction v = GridFunction::zeros(bc, n);
  for (auto& x : v.values) x = dist(rng);
  return v;
}

// dense forward-difference matrix (rows = faces), including the 1/h factor
std::vector<std::vector<double>> dense_gradient_matrix(BC bc, int n) {
  const double h = bc == BC::Periodic ? 1.0 / n : 1.0 / (n + 1);
  const int faces = bc == BC::Periodic ? n : n + 1;
  std::vector<std::vector<double>> D(faces, std::vector<double>(n, 0.0));
  if (bc == BC::Periodic) {
    for (int f = 0; f < n; ++f) {
      D[f][(f + 1) % n] += 1.0 / h;
      D[f][f] -= 1.0 / h;
    }
  } else {
    for (int f = 0; f <= n; ++f) {
      if (f < n) D[f][f] += 1.0 / h;
      if (f >= 1) D[f][f - 1] -= 1.0 / h;
    }
  }
  return D;
}

}  // namespace

TEST_CASE("gradient basics") {
  GridFunction c = GridFunction::constant(BC::Periodic, 17, 3.25);
  for (double g : gradient(c).values) CHECK(g == 0.0);

  // ramp on the periodic grid: unit slopes, wrap face carries the jump
  const int n = 16;
  GridFunction r = GridFunction::sample(BC::Periodic, n, [](double x) { return x; });
  const FaceField g = gradient(r);
  for (int f = 0; f < n - 1; ++f) CHECK(g.values[f] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.values[n - 1] == doctest::Approx(-(1.0 - r.h) / r.h).epsilon(1e-12));
}

TEST_CASE("gradient of sin(2 pi x) against the midpoint derivative") {
  const int n = 128;
  GridFunction v = GridFunction::sample(BC::Periodic, n, [](double x) {
    return std::sin(2.0 * M_PI * x);
  });
  const FaceField g = gradient(v);
  const double w = 2.0 * M_PI;
  double worst = 0.0;
  for (int f = 0; f < n; ++f) {
    const double xm = f * v.h + 0.5 * v.h;
    worst = std::max(worst, std::fabs(g.values[f] - w * std::cos(w * xm)));
  }
  CHECK(worst <= w * w * w * v.h * v.h / 24.0 * 1.1);
}

TEST_CASE("divergence_flux against a dense matrix oracle") {
  const FluxModel mc = FluxModel::mean_curvature();
  const int n = 64;
  GridFunction v = GridFunction::sample(BC::DirichletZero, n, [](double x) {
    return x * (1.0 - x);
  });
  const auto D = dense_gradient_matrix(v.bc, n);
  const int faces = n + 1;
  std::vector<double> g(faces, 0.0);
  for (int f = 0; f < faces; ++f)
    for (int i = 0; i < n; ++i) g[f] += D[f][i] * v.values[i];
  std::vector<double> w_oracle(n, 0.0);  // -D^T phi(g)
  for (int i = 0; i < n; ++i)
    for (int f = 0; f < faces; ++f) w_oracle[i] -= D[f][i] * mc.flux(g[f]);
  const GridFunction w = divergence_flux(mc, v);
  for (int i = 0; i < n; ++i)
    CHECK(w.values[i] == doctest::Approx(w_oracle[i]).epsilon(1e-13));
}

TEST_CASE("divergence_flux trivia") {
  const FluxModel mc = FluxModel::mean_curvature();
  GridFunction z = GridFunction::zeros(BC::DirichletZero, 9);
  for (double w : divergence_flux(mc, z).values) CHECK(w == 0.0);

  std::mt19937_64 rng(5);
  GridFunction v = random_grid(BC::Periodic, 33, rng);
  const GridFunction lap = laplacian(v);
  const GridFunction dl = divergence_flux(FluxModel::linear(), v);
  for (int i = 0; i < v.n; ++i)
    CHECK(dl.values[i] == doctest::Approx(lap.values[i]).epsilon(1e-12));
}

TEST_CASE("laplacian eigenvectors") {
  const int n = 64;
  GridFunction v = GridFunction::sample(BC::DirichletZero, n, [](double x) {
    return std::sin(M_PI * x);
  });
  const double mu1 = laplacian_eigenvalue(BC::DirichletZero, n, 1);
  const GridFunction lv = laplacian(v);
  for (int i = 0; i < n; ++i)
    CHECK(lv.values[i] == doctest::Approx(-mu1 * v.values[i]).epsilon(1e-10));

  GridFunction p = GridFunction::sample(BC::Periodic, n, [](double x) {
    return std::sin(2.0 * M_PI * x);
  });
  const double mu1p = laplacian_eigenvalue(BC::Periodic, n, 1);
  const GridFunction lp = laplacian(p);
  for (int i = 0; i < n; ++i)
    CHECK(lp.values[i] == doctest::Approx(-mu1p * p.values[i]).epsilon(1e-10));

  GridFunction c = GridFunction::constant(BC::Periodic, 21, -4.0);
  for (double a : laplacian(c).values) CHECK(a == 0.0);
}

TEST_CASE("resolvent via dense Gaussian elimination oracle") {
  std::mt19937_64 rng(17);
  for (BC bc : {BC::DirichletZero, BC::Periodic}) {
    const int n = 24;
    GridFunction v = random_grid(bc, n, rng);
    for (double lambda : {1e-3, 0.05, 1.0}) {
      const GridFunction u = resolvent(v, lambda);
      // assemble I - lambda Lap densely and solve
      std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
      const double r = lambda / (v.h * v.h);
      for (int i = 0; i < n; ++i) {
        A[i][i] = 1.0 + 2.0 * r;
        if (bc == BC::Periodic) {
          A[i][(i + 1) % n] -= r;
          A[i][(i + n - 1) % n] -= r;
        } else {
          if (i + 1 < n) A[i][i + 1] = -r;
          if (i - 1 >= 0) A[i][i - 1] = -r;
        }
      }
      std::vector<double> b = v.values;
      for (int col = 0; col < n; ++col) {  // partial pivoting
        int piv = col;
        for (int row = col + 1; row < n; ++row)
          if (std::fabs(A[row][col]) > std::fabs(A[piv][col])) piv = row;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (int row = col + 1; row < n; ++row) {
          const double f = A[row][col] / A[col][col];
          for (int k = col; k < n; ++k) A[row][k] -= f * A[col][k];
          b[row] -= f * b[col];
        }
      }
      std::vector<double> x(n, 0.0);
      for (int row = n - 1; row >= 0; --row) {
        double s = b[row];
        for (int k = row + 1; k < n; ++k) s -= A[row][k] * x[k];
        x[row] = s / A[row][row];
      }
      for (int i = 0; i < n; ++i)
        CHECK(u.values[i] == doctest::Approx(x[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("resolvent eigen-expansion and contraction") {
  const int n = 48;
  GridFunction c = GridFunction::constant(BC::Periodic, n, 2.5);
  const GridFunction jc = resolvent(c, 0.7);
  for (double a : jc.values) CHECK(a == doctest::Approx(2.5).epsilon(1e-13));

  GridFunction v = GridFunction::sample(BC::DirichletZero, n, [](double x) {
    return std::sin(M_PI * x);
  });
  const double mu1 = laplacian_eigenvalue(BC::DirichletZero, n, 1);
  const double lambda = 0.2;
  const GridFunction u = resolvent(v, lambda);
  for (int i = 0; i < n; ++i)
    CHECK(u.values[i] == doctest::Approx(v.values[i] / (1.0 + lambda * mu1)).epsilon(1e-11));

  const GridFunction near_id = resolvent(v, 1e-6);
  GridFunction diff = near_id;
  for (int i = 0; i < n; ++i) diff.values[i] -= v.values[i];
  CHECK(l2_norm(diff) <= 1e-4);

  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    for (BC bc : {BC::DirichletZero, BC::Periodic}) {
      GridFunction w = random_grid(bc, 31, rng);
      for (double l : {1e-3, 1e-2, 1e-1, 1.0})
        CHECK(l2_norm(resolvent(w, l)) <= l2_norm(w) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("yosida approximation") {
  GridFunction c = GridFunction::constant(BC::Periodic, 20, 1.5);
  for (double a : yosida(c, 100).values) CHECK(std::fabs(a) <= 1e-12);

  const int n = 40;
  GridFunction v = GridFunction::sample(BC::DirichletZero, n, [](double x) {
    return std::sin(M_PI * x);
  });
  const double mu1 = laplacian_eigenvalue(BC::DirichletZero, n, 1);
  const long ny = 50;
  const GridFunction t = yosida(v, ny);
  const double factor = mu1 / (1.0 + mu1 / ny);
  for (int i = 0; i < n; ++i)
    CHECK(t.values[i] == doctest::Approx(factor * v.values[i]).epsilon(1e-10));

  // convergence to -Lap on smooth data
  const GridFunction big = yosida(v, 1000000);
  const GridFunction lap = laplacian(v);
  GridFunction diff = big;
  for (int i = 0; i < n; ++i) diff.values[i] += lap.values[i];
  CHECK(l2_norm(diff) / l2_norm(lap) <= 1e-3);
}

TEST_CASE("galerkin projection") {
  const int n = 32;
  GridFunction v = GridFunction::sample(BC::DirichletZero, n, [](double x) {
    return std::sin(M_PI * x) + std::sin(5.0 * M_PI * x);
  });
  const GridFunction p1 = galerkin_project(v, 1);
  for (int i = 0; i < n; ++i)
    CHECK(p1.values[i] == doctest::Approx(std::sin(M_PI * v.x(i))).epsilon(1e-12));

  const GridFunction idem = galerkin_project(p1, 1);
  for (int i = 0; i < n; ++i)
    CHECK(idem.values[i] == doctest::Approx(p1.values[i]).epsilon(1e-12));

  std::mt19937_64 rng(31);
  for (BC bc : {BC::DirichletZero, BC::Periodic}) {
    for (int rep = 0; rep < 50; ++rep) {
      GridFunction w = random_grid(bc, n, rng);
      const GridFunction full = galerkin_project(w, n);
      for (int i = 0; i < n; ++i)
        CHECK(full.values[i] == doctest::Approx(w.values[i]).epsilon(1e-10));
      std::uniform_int_distribution<int> mdist(1, n);
      const int m = mdist(rng);
      CHECK(l2_norm(galerkin_project(w, m)) <= l2_norm(w) * (1.0 + 1e-12));
    }
  }
  CHECK_THROWS_AS(galerkin_project(v, 0), std::invalid_argument);
  CHECK_THROWS_AS(galerkin_project(v, n + 1), std::invalid_argument);
}

TEST_CASE("galerkin projection commutes with the discrete laplacian") {
  std::mt19937_64 rng(67);
  for (BC bc : {BC::DirichletZero, BC::Periodic}) {
    GridFunction v = random_grid(bc, 24, rng);
    for (int m : {1, 5, 13}) {
      const GridFunction a = laplacian(galerkin_project(v, m));
      const GridFunction b = galerkin_project(laplacian(v), m);
      for (int i = 0; i < v.n; ++i)
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("galerkin projection is self-adjoint in the discrete inner product") {
  std::mt19937_64 rng(37);
  for (BC bc : {BC::DirichletZero, BC::Periodic}) {
    GridFunction u = random_grid(bc, 30, rng);
    GridFunction w = random_grid(bc, 30, rng);
    for (int m : {1, 7, 15, 30}) {
      const double a = l2_inner(galerkin_project(u, m), w);
      const double b = l2_inner(u, galerkin_project(w, m));
      CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
  }
}

TEST_CASE("energy values") {
  const FluxModel mc = FluxModel::mean_curvature();
  GridFunction z = GridFunction::zeros(BC::Periodic, 12);
  CHECK(energy(mc, z).total == 0.0);

  // linear model on sin(pi x): (1/2) int (pi cos)^2 = pi^2/4
  const int n = 256;
  GridFunction v = GridFunction::sample(BC::DirichletZero, n, [](double x) {
    return std::sin(M_PI * x);
  });
  const EnergyValue e = energy(FluxModel::linear(), v);
  CHECK(e.boundary == 0.0);
  CHECK(e.total == doctest::Approx(M_PI * M_PI / 4.0).epsilon(1e-3));

  // periodic ramp: all faces have slope one except the wrap face
  for (int nn : {64, 128, 256, 512}) {
    GridFunction r = GridFunction::sample(BC::Periodic, nn, [](double x) { return x; });
    const double h = r.h;
    const EnergyValue er = energy(mc, r);
    const double expected = mc.potential(1.0) * (1.0 - h) + h * mc.potential((1.0 - h) / h);
    CHECK(er.bulk == doctest::Approx(expected).epsilon(1e-12));
    // wrap-face term approaches the recession price pi/2 under refinement
    CHECK(std::fabs(h * mc.potential((1.0 - h) / h) - M_PI / 2.0) <= 3.0 * h * (1.0 - std::log(h)));
  }

  // weighted jump pricing replaces the wrap-face term
  GridFunction r = GridFunction::sample(BC::Periodic, 128, [](double x) { return x; });
  const EnergyValue ew = energy(mc, r, 1.0);
  CHECK(ew.boundary == doctest::Approx(1.0 - r.h).epsilon(1e-12));
  CHECK(ew.bulk == doctest::Approx(mc.potential(1.0) * (1.0 - r.h)).epsilon(1e-12));
  CHECK(ew.total == doctest::Approx(ew.bulk + ew.boundary));
}

TEST_CASE("energy_eps") {
  const FluxModel mc = FluxModel::mean_curvature();
  std::mt19937_64 rng(41);
  GridFunction v = random_grid(BC::Periodic, 50, rng);
  CHECK(energy_eps(mc, v, 0.0) == doctest::Approx(energy(mc, v).bulk).epsilon(1e-14));

  const double eps = 0.3;
  const FaceField g = gradient(v);
  double gsq = 0.0;
  for (double gf : g.values) gsq += gf * gf;
  const double lin = energy_eps(FluxModel::linear(), v, eps);
  CHECK(lin == doctest::Approx((1.0 + eps) * 0.5 * v.h * gsq).epsilon(1e-13));

  // sin(2 pi x): the eps part matches (eps/2) * 2 pi^2, the psi part an
  // independent Simpson quadrature of psi(2 pi cos(2 pi x))
  const int n = 256;
  GridFunction s = GridFunction::sample(BC::Periodic, n, [](double x) {
    return std::sin(2.0 * M_PI * x);
  });
  const FaceField gs = gradient(s);
  double gsq2 = 0.0;
  for (double gf : gs.values) gsq2 += gf * gf;
  const double eps_part = 0.05 * s.h * gsq2;
  CHECK(eps_part == doctest::Approx(0.05 * 2.0 * M_PI * M_PI).epsilon(1e-3));

  const int q = 1 << 14;
  double simpson = 0.0;
  for (int i = 0; i <= q; ++i) {
    const double x = static_cast<double>(i) / q;
    const double w = (i == 0 || i == q) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    simpson += w * mc.potential(2.0 * M_PI * std::cos(2.0 * M_PI * x));
  }
  simpson /= 3.0 * q;
  CHECK(energy(mc, s).bulk == doctest::Approx(simpson).epsilon(1e-3));
  CHECK(energy_eps(mc, s, 0.1) ==
        doctest::Approx(eps_part + energy(mc, s).bulk).epsilon(1e-12));
}

TEST_CASE("h1 seminorm pairing") {
  const int n = 256;
  GridFunction c = GridFunction::constant(BC::Periodic, n, 9.0);
  std::mt19937_64 rng(43);
  GridFunction w = random_grid(BC::Periodic, n, rng);
  CHECK(std::fabs(h1_seminorm_pairing(c, w)) <= 1e-12);

  GridFunction v = GridFunction::sample(BC::Periodic, n, [](double x) {
    return std::sin(2.0 * M_PI * x);
  });
  CHECK(h1_seminorm_pairing(v, v) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-3));

  GridFunction u = random_grid(BC::Periodic, n, rng);
  GridFunction z = random_grid(BC::Periodic, n, rng);
  const double a = -1.7, b = 0.4;
  GridFunction combo = GridFunction::zeros(BC::Periodic, n);
  for (int i = 0; i < n; ++i) combo.values[i] = a * u.values[i] + b * z.values[i];
  CHECK(h1_seminorm_pairing(combo, w) ==
        doctest::Approx(a * h1_seminorm_pairing(u, w) + b * h1_seminorm_pairing(z, w))
            .epsilon(1e-12));

  GridFunction other = random_grid(BC::DirichletZero, n, rng);
  CHECK_THROWS_AS(h1_seminorm_pairing(w, other), std::invalid_argument);
}

TEST_CASE("summation by parts is exact") {
  std::mt19937_64 rng(47);
  for (BC bc : {BC::DirichletZero, BC::Periodic}) {
    for (int rep = 0; rep < 30; ++rep) {
      const int n = 41;
      GridFunction v = random_grid(bc, n, rng, 2.0);
      GridFunction w = random_grid(bc, n, rng, 2.0);
      const FluxModel mc = FluxModel::mean_curvature();
      const GridFunction dv = divergence_flux(mc, v);
      const double lhs = l2_inner(dv, w);
      const FaceField gv = gradient(v);
      const FaceField gw = gradient(w);
      double rhs = 0.0, scale = 0.0;
      for (size_t f = 0; f < gv.values.size(); ++f) {
        rhs -= mc.flux(gv.values[f]) * gw.values[f];
        scale += std::fabs(mc.flux(gv.values[f]) * gw.values[f]);
      }
      rhs *= v.h;
      scale = v.h * scale + 1e-30;
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("discrete H1 dissipation and drift monotonicity") {
  std::mt19937_64 rng(53);
  const FluxModel mc = FluxModel::mean_curvature();
  for (BC bc : {BC::DirichletZero, BC::Periodic}) {
    for (int rep = 0; rep < 30; ++rep) {
      const int n = 64;
      GridFunction v = random_grid(bc, n, rng, 3.0);
      const GridFunction dv = divergence_flux(mc, v);
      const double pairing = h1_seminorm_pairing(dv, v);
      const FaceField g = gradient(v);
      // -(1/h) sum over face pairs of (phi(g_f) - phi(g_{f-1}))(g_f - g_{f-1})
      double expected = 0.0, scale = 0.0;
      const int faces = static_cast<int>(g.values.size());
      if (bc == BC::Periodic) {
        for (int f = 0; f < faces; ++f) {
          const double dphi = mc.flux(g.values[f]) - mc.flux(g.values[(f + faces - 1) % faces]);
          const double dg = g.values[f] - g.values[(f + faces - 1) % faces];
          expected -= dphi * dg;
          scale += std::fabs(dphi * dg);
        }
      } else {
        for (int f = 1; f < faces; ++f) {
          const double dphi = mc.flux(g.values[f]) - mc.flux(g.values[f - 1]);
          const double dg = g.values[f] - g.values[f - 1];
          expected -= dphi * dg;
          scale += std::fabs(dphi * dg);
        }
      }
      expected /= v.h;
      scale = scale / v.h + 1e-30;
      CHECK(std::fabs(pairing - expected) <= 1e-11 * scale);
      CHECK(pairing <= 1e-12 * scale);

      GridFunction u = random_grid(bc, n, rng, 3.0);
      const GridFunction du = divergence_flux(mc, u);
      GridFunction diff_flux = du, diff = u;
      for (int i = 0; i < n; ++i) {
        diff_flux.values[i] -= dv.values[i];
        diff.values[i] -= v.values[i];
      }
      CHECK(l2_inner(diff_flux, diff) <= 1e-12 * (l2_norm(diff_flux) * l2_norm(diff) + 1e-30));
    }
  }
}

TEST_CASE("resolvent decreases the linear-growth energy") {
  std::mt19937_64 rng(59);
  for (const FluxModel& m : {FluxModel::mean_curvature(), FluxModel::minimal_surface(1.0)}) {
    for (BC bc : {BC::DirichletZero, BC::Periodic}) {
      for (int rep = 0; rep < 25; ++rep) {
        GridFunction v = random_grid(bc, 37, rng, 2.0);
        const double ev = energy(m, v).bulk;
        for (double l : {1e-3, 1e-2, 1e-1, 1.0})
          CHECK(energy(m, resolvent(v, l)).bulk <= ev * (1.0 + 1e-10));
      }
    }
  }
}

TEST_CASE("laplacian negativity") {
  std::mt19937_64 rng(61);
  for (BC bc : {BC::DirichletZero, BC::Periodic}) {
    for (int rep = 0; rep < 20; ++rep) {
      GridFunction v = random_grid(bc, 29, rng);
      CHECK(l2_inner(laplacian(v), v) <= 1e-12);
    }
  }
}

TEST_CASE("relaxation sequence construction") {
  // periodic smooth input: the cutoff carries zero boundary value
  const auto smooth = [](double x) { return std::sin(2.0 * M_PI * x); };
  for (int j : {2, 8, 64}) {
    const GridFunction uj = construct_relaxation_sequence(smooth, j, 64);
    const GridFunction u = GridFunction::sample(BC::Periodic, 64, smooth);
    for (int i = 0; i < 64; ++i)
      CHECK(uj.values[i] == doctest::Approx(u.values[i]).epsilon(1e-14));
  }

  // ramp: the construction pins the shared endpoint value to 1/2
  const auto ramp = [](double x) { return x; };
  const GridFunction r8 = construct_relaxation_sequence(ramp, 8, 512);
  CHECK(r8.values[0] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(construct_relaxation_sequence(ramp, 1, 64), std::invalid_argument);
}

TEST_CASE("relaxation sequence energy approaches the weight-one relaxed value") {
  const FluxModel ms = FluxModel::minimal_surface(1.0);
  const auto ramp = [](double x) { return x; };
  const int n = 4096;
  const GridFunction u64 = construct_relaxation_sequence(ramp, 64, n);
  const GridFunction u = GridFunction::sample(BC::Periodic, n, ramp);
  GridFunction d = u64;
  for (int i = 0; i < n; ++i) d.values[i] -= u.values[i];
  CHECK(l2_norm(d) <= 0.1);
  const double target = ms.potential(1.0) + 1.0;  // psi(1) + psi0(1) |jump|
  CHECK(std::fabs(energy(ms, u64).total - target) / target <= 0.01);
}

TEST_CASE("relaxation sequence L2 decay") {
  const auto ramp = [](double x) { return x; };
  const int n = 8192;
  const GridFunction u = GridFunction::sample(BC::Periodic, n, ramp);
  double prev = 1e9;
  for (int j : {4, 8, 16, 32}) {
    const GridFunction uj = construct_relaxation_sequence(ramp, j, n);
    GridFunction d = uj;
    for (int i = 0; i < n; ++i) d.values[i] -= u.values[i];
    const double dist = l2_norm(d);
    CHECK(dist <= 0.5 / std::sqrt(static_cast<double>(j)));  // C/sqrt(j) envelope
    CHECK(dist < prev);
    prev = dist;
  }
}

TEST_CASE("interpolant round trip") {
  GridFunction v = GridFunction::sample(BC::Periodic, 64, [](double x) {
    return std::cos(2.0 * M_PI * x);
  });
  const auto f = interpolant(v);
  for (int i = 0; i < v.n; ++i) CHECK(f(v.x(i)) == doctest::Approx(v.values[i]));
  GridFunction d = GridFunction::sample(BC::DirichletZero, 31, [](double x) {
    return x * (1.0 - x);
  });
  const auto fd = interpolant(d);
  for (int i = 0; i < d.n; ++i) CHECK(fd(d.x(i)) == doctest::Approx(d.values[i]));
  CHECK(fd(0.0) == 0.0);
  CHECK(fd(1.0) == 0.0);
}
