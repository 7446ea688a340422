#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spde1d/noise.hpp"

using namespace spde1d;

namespace {

GridFunction random_periodic(int n, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  GridFunction v = GridFunction::zeros(BC::Periodic, n);
  for (auto& x : v.values) x = dist(rng);
  return v;
}

ModeSpec mult_sine(int k, double amplitude) {
  ModeSpec m;
  m.form = ModeForm::Multiplicative;
  m.profile = Profile::sine(k);
  m.amplitude = amplitude;
  return m;
}

ModeSpec add_sine(int k, double amplitude) {
  ModeSpec m;
  m.form = ModeForm::Additive;
  m.profile = Profile::sine(k);
  m.amplitude = amplitude;
  return m;
}

}  // namespace

TEST_CASE("mu_k closed forms") {
  ModeSpec zero = mult_sine(1, 0.0);
  CHECK(mu_k(zero) == 0.0);

  // amplitude 2^-k with profile sin(k pi x): mu_k = 4^-k (1 + (k pi)^2)
  for (int k = 1; k <= 6; ++k) {
    const ModeSpec m = mult_sine(k, std::pow(2.0, -k));
    const double expected = std::pow(4.0, -k) * (1.0 + k * k * M_PI * M_PI);
    CHECK(mu_k(m) == doctest::Approx(expected).epsilon(1e-2));
  }

  // additive: no d_r term, only the gradient part
  const ModeSpec a = add_sine(1, 1.0);
  CHECK(mu_k(a) == doctest::Approx(M_PI * M_PI).epsilon(1e-12));
}

TEST_CASE("additive profiles must vanish at the boundary") {
  ModeSpec bad;
  bad.form = ModeForm::Additive;
  bad.profile = Profile::polynomial({1.0, 0.0});  // constant 1
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  ModeSpec ok = add_sine(3, 0.5);
  CHECK_NOTHROW(ok.validate());
  ModeSpec okp;
  okp.form = ModeForm::Additive;
  okp.profile = Profile::polynomial({0.0, 1.0, -1.0});  // x(1-x)
  CHECK_NOTHROW(okp.validate());
}

TEST_CASE("check_trace_class") {
  VerticalNoiseSpec empty;
  CHECK(check_trace_class(empty) == 0.0);

  // geometric family: closed-form oracle sums 4^-k and k^2 4^-k exactly
  VerticalNoiseSpec geo;
  const int K = 20;
  for (int k = 1; k <= K; ++k) geo.modes.push_back(mult_sine(k, std::pow(2.0, -k)));
  geo.envelope = {EnvelopeType::Geometric, 0.5, 12.0};
  const double x = 0.25;
  double s1 = 0.0, s2 = 0.0, xk = 1.0;
  for (int k = 1; k <= K; ++k) {
    xk *= x;
    s1 += xk;
    s2 += static_cast<double>(k) * k * xk;
  }
  const double oracle = s1 + M_PI * M_PI * s2;
  CHECK(std::fabs(check_trace_class(geo) - oracle) <= 1e-6);

  // harmonic-type declaration is rejected
  VerticalNoiseSpec harmonic;
  harmonic.modes.push_back(mult_sine(1, 1.0));
  harmonic.envelope = {EnvelopeType::Power, 1.0, 1.0};
  CHECK_THROWS_AS(check_trace_class(harmonic), std::invalid_argument);

  // a mode exceeding its declared envelope is rejected
  VerticalNoiseSpec breach;
  breach.modes.push_back(mult_sine(1, 10.0));
  breach.envelope = {EnvelopeType::Geometric, 0.5, 1.0};
  CHECK_THROWS_AS(check_trace_class(breach), std::invalid_argument);
}

TEST_CASE("apply_vertical") {
  VerticalNoiseSpec spec;
  spec.modes = {mult_sine(1, 0.7), mult_sine(2, 0.3)};

  GridFunction z = GridFunction::zeros(BC::DirichletZero, 16);
  const GridFunction out = apply_vertical(spec, z, {1.3, -0.2});
  for (double v : out.values) CHECK(v == 0.0);

  VerticalNoiseSpec add;
  add.modes = {add_sine(1, 1.0)};
  GridFunction s = GridFunction::zeros(BC::DirichletZero, 16);
  const double delta = 0.37;
  const GridFunction a = apply_vertical(add, s, {delta});
  for (int i = 0; i < s.n; ++i)
    CHECK(a.values[i] == doctest::Approx(delta * std::sin(M_PI * s.x(i))).epsilon(1e-14));

  // brute-force re-summation oracle
  std::mt19937_64 rng(3);
  GridFunction v = random_periodic(24, rng);
  VerticalNoiseSpec two;
  two.modes = {mult_sine(1, 0.5), add_sine(2, 0.25)};
  const std::vector<double> db = {0.11, -0.43};
  const GridFunction w = apply_vertical(two, v, db);
  for (int i = 0; i < v.n; ++i) {
    double expect = 0.0;
    expect += 0.5 * std::sin(M_PI * v.x(i)) * v.values[i] * db[0];
    expect += 0.25 * std::sin(2.0 * M_PI * v.x(i)) * db[1];
    CHECK(std::fabs(w.values[i] - expect) <= 1e-14);
  }

  CHECK_THROWS_AS(apply_vertical(two, v, {0.1}), std::invalid_argument);
}

TEST_CASE("apply_normal") {
  NormalNoiseSpec spec{1.2};
  const int n = 32;
  GridFunction c = GridFunction::constant(BC::Periodic, n, 4.0);
  const double db = 0.21;
  for (double v : apply_normal(spec, c, db).values)
    CHECK(v == doctest::Approx(1.2 * db).epsilon(1e-15));

  NormalNoiseSpec zero{0.0};
  std::mt19937_64 rng(5);
  GridFunction v = random_periodic(n, rng);
  for (double w : apply_normal(zero, v, db).values) CHECK(w == 0.0);

  // unit-slope ramp: sqrt(2) factor away from the wrap
  GridFunction r = GridFunction::sample(BC::Periodic, n, [](double x) { return x; });
  const GridFunction out = apply_normal(spec, r, db);
  for (int i = 1; i < n - 1; ++i)
    CHECK(out.values[i] == doctest::Approx(1.2 * std::sqrt(2.0) * db).epsilon(1e-13));

  GridFunction d = GridFunction::zeros(BC::DirichletZero, n);
  CHECK_THROWS_AS(apply_normal(spec, d, db), std::invalid_argument);
  CHECK_THROWS_AS(NormalNoiseSpec{1.5}.validate(), std::invalid_argument);
  CHECK_NOTHROW(NormalNoiseSpec{std::sqrt(2.0)}.validate());
}

TEST_CASE("normal noise Lipschitz and growth identities") {
  std::mt19937_64 rng(7);
  const int n = 64;
  const NormalNoiseSpec spec{0.8};
  for (int rep = 0; rep < 50; ++rep) {
    GridFunction v = random_periodic(n, rng, 2.0);
    GridFunction w = random_periodic(n, rng, 2.0);
    const GridFunction bv = apply_normal(spec, v, 1.0);
    const GridFunction bw = apply_normal(spec, w, 1.0);
    const GridFunction av = node_centered_gradient(v);
    const GridFunction aw = node_centered_gradient(w);

    // pointwise 1-Lipschitz bound of a -> sqrt(1+a^2)
    for (int i = 0; i < n; ++i) {
      const double lhs = std::fabs(bv.values[i] - bw.values[i]);
      const double rhs = 0.8 * std::fabs(av.values[i] - aw.values[i]);
      CHECK(lhs <= rhs + 1e-13 * (1.0 + lhs + rhs));
    }

    // integrated bound against the face-gradient seminorm
    GridFunction diffb = bv;
    GridFunction diffv = v;
    for (int i = 0; i < n; ++i) {
      diffb.values[i] -= bw.values[i];
      diffv.values[i] -= w.values[i];
    }
    const double lhs = l2_norm_sq(diffb);
    const double rhs = 0.8 * 0.8 * h1_seminorm_pairing(diffv, diffv);
    CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-15);

    // growth identity ||B(v)||^2 = alpha^2 h sum (1 + a_i^2)
    double formula = 0.0;
    for (int i = 0; i < n; ++i) formula += 1.0 + av.values[i] * av.values[i];
    formula *= 0.8 * 0.8 * v.h;
    CHECK(l2_norm_sq(bv) == doctest::Approx(formula).epsilon(1e-13));
  }
}

TEST_CASE("vertical noise linear growth bound") {
  std::mt19937_64 rng(11);
  VerticalNoiseSpec spec;
  spec.modes = {mult_sine(1, 0.5), mult_sine(3, 0.25), add_sine(2, 0.4)};
  const double trace = check_trace_class(spec);
  for (int rep = 0; rep < 25; ++rep) {
    GridFunction v = random_periodic(48, rng, 3.0);
    double total = 0.0;
    for (size_t k = 0; k < spec.modes.size(); ++k) {
      std::vector<double> unit(spec.modes.size(), 0.0);
      unit[k] = 1.0;
      total += l2_norm_sq(apply_vertical(spec, v, unit));
    }
    CHECK(total <= trace * (1.0 + l2_norm_sq(v)) * (1.0 + 1e-12));
  }
}

TEST_CASE("wiener sampler determinism and statistics") {
  const WienerSampler s{123456789ULL, 7ULL};
  const auto a = s.increments(5, 0.01, 42);
  const auto b = s.increments(5, 0.01, 42);
  CHECK(a == b);
  const WienerSampler s2{123456789ULL, 8ULL};
  CHECK(s.increment(0.01, 42, 0) != s2.increment(0.01, 42, 0));

  // moments over 1e6 draws at dt = 1
  const int N = 1000000;
  double sum = 0.0, sumsq = 0.0;
  const WienerSampler ms{987654321ULL, 0ULL};
  for (int i = 0; i < N; ++i) {
    const double z = ms.increment(1.0, static_cast<std::uint64_t>(i));
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / N;
  const double var = sumsq / N - mean * mean;
  CHECK(std::fabs(mean) <= 4.0 / std::sqrt(static_cast<double>(N)));
  CHECK(std::fabs(var - 1.0) <= 0.01);

  // cross-stream correlation
  const int M = 100000;
  const WienerSampler sa{55ULL, 1ULL}, sb{55ULL, 2ULL};
  double sab = 0.0, saa = 0.0, sbb = 0.0, sa1 = 0.0, sb1 = 0.0;
  for (int i = 0; i < M; ++i) {
    const double x = sa.increment(1.0, static_cast<std::uint64_t>(i));
    const double y = sb.increment(1.0, static_cast<std::uint64_t>(i));
    sab += x * y;
    saa += x * x;
    sbb += y * y;
    sa1 += x;
    sb1 += y;
  }
  const double cov = sab / M - (sa1 / M) * (sb1 / M);
  const double corr = cov / std::sqrt((saa / M) * (sbb / M));
  CHECK(std::fabs(corr) < 0.01);

  CHECK_THROWS_AS(s.increment(0.0, 1), std::invalid_argument);
}
