#include "spde1d/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace spde1d {

double Profile::value(double x) const {
  switch (kind) {
    case Kind::Sine:
      return std::sin(k * M_PI * x);
    case Kind::Polynomial: {
      double acc = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Kind::Bump: {
      const double s = (x - center) / width;
      if (std::fabs(s) >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
  }
  throw std::logic_error("profile: unknown kind");
}

double Profile::deriv(double x) const {
  switch (kind) {
    case Kind::Sine:
      return k * M_PI * std::cos(k * M_PI * x);
    case Kind::Polynomial: {
      double acc = 0.0;
      for (size_t i = coeffs.size(); i-- > 1;)
        acc = acc * x + static_cast<double>(i) * coeffs[i];
      return acc;
    }
    case Kind::Bump: {
      const double s = (x - center) / width;
      if (std::fabs(s) >= 1.0) return 0.0;
      const double d = 1.0 - s * s;
      return value(x) * (-2.0 * s / (d * d)) / width;
    }
  }
  throw std::logic_error("profile: unknown kind");
}

namespace {

double sampled_sup(const Profile& p, bool derivative) {
  const int m = 1 << 14;
  double sup = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double x = static_cast<double>(i) / m;
    const double val = derivative ? p.deriv(x) : p.value(x);
    sup = std::max(sup, std::fabs(val));
  }
  return sup;
}

}  // namespace

double Profile::sup_abs() const {
  if (kind == Kind::Sine) return 1.0;
  return sampled_sup(*this, false);
}

double Profile::sup_deriv_abs() const {
  if (kind == Kind::Sine) return k * M_PI;
  return sampled_sup(*this, true);
}

Profile Profile::sine(int k) {
  Profile p;
  p.kind = Kind::Sine;
  p.k = k;
  return p;
}

Profile Profile::polynomial(std::vector<double> coeffs) {
  Profile p;
  p.kind = Kind::Polynomial;
  p.coeffs = std::move(coeffs);
  return p;
}

Profile Profile::bump(double center, double width) {
  Profile p;
  p.kind = Kind::Bump;
  p.center = center;
  p.width = width;
  return p;
}

double ModeSpec::g(double x, double r) const {
  const double base = amplitude * profile.value(x);
  return form == ModeForm::Additive ? base : base * r;
}

double ModeSpec::dx_g(double x, double r) const {
  const double base = amplitude * profile.deriv(x);
  return form == ModeForm::Additive ? base : base * r;
}

void ModeSpec::validate() const {
  if (!std::isfinite(amplitude))
    throw std::invalid_argument("mode: amplitude must be finite");
  if (form == ModeForm::Additive) {
    const double tol = 1e-12 * (1.0 + std::fabs(amplitude));
    if (std::fabs(profile.value(0.0)) > tol || std::fabs(profile.value(1.0)) > tol)
      throw std::invalid_argument("mode: additive profile must vanish at the boundary");
  }
}

double mu_k(const ModeSpec& mode, int x_samples, double r_max) {
  if (x_samples < 2) throw std::invalid_argument("mu_k: empty sampling spec");
  const double a = std::fabs(mode.amplitude);
  double sup_p, sup_dp;
  if (mode.profile.kind == Profile::Kind::Sine) {
    sup_p = mode.profile.sup_abs();
    sup_dp = mode.profile.sup_deriv_abs();
  } else {
    sup_p = 0.0;
    sup_dp = 0.0;
    for (int i = 0; i <= x_samples; ++i) {
      const double x = static_cast<double>(i) / x_samples;
      sup_p = std::max(sup_p, std::fabs(mode.profile.value(x)));
      sup_dp = std::max(sup_dp, std::fabs(mode.profile.deriv(x)));
    }
  }
  if (mode.form == ModeForm::Additive) {
    // d_r g = 0; d_x g independent of r.
    return a * a * sup_dp * sup_dp;
  }
  // Multiplicative: sup_r |r|/(1+|r|) = 1 is the analytic envelope; r_max is
  // kept for reporting how close the sampled range comes to it.
  (void)r_max;
  return a * a * (sup_p * sup_p + sup_dp * sup_dp);
}

void VerticalNoiseSpec::validate() const {
  for (const auto& m : modes) m.validate();
  if (envelope.type == EnvelopeType::Geometric &&
      !(envelope.parameter > 0.0 && envelope.parameter < 1.0))
    throw std::invalid_argument("noise: geometric envelope needs ratio in (0,1)");
  if (envelope.type == EnvelopeType::Power && !(envelope.parameter > 1.0))
    throw std::invalid_argument(
        "noise: power envelope needs exponent > 1 (tail not summable)");
}

double check_trace_class(const VerticalNoiseSpec& spec) {
  spec.validate();
  double sum = 0.0;
  for (int k = 0; k < spec.truncation(); ++k) {
    const double mu = mu_k(spec.modes[k]);
    if (spec.envelope.type != EnvelopeType::None) {
      const int idx = k + 1;
      const double bound =
          spec.envelope.type == EnvelopeType::Geometric
              ? spec.envelope.scale * std::pow(spec.envelope.parameter, idx)
              : spec.envelope.scale * std::pow(idx, -spec.envelope.parameter);
      if (mu > bound * (1.0 + 1e-9))
        throw std::invalid_argument("noise: mode exceeds its declared envelope");
    }
    sum += mu;
  }
  return sum;
}

GridFunction apply_vertical(const VerticalNoiseSpec& spec, const GridFunction& v,
                            const std::vector<double>& dbeta) {
  if (static_cast<int>(dbeta.size()) != spec.truncation())
    throw std::invalid_argument("apply_vertical: increment count != mode count");
  GridFunction out = GridFunction::zeros(v.bc, v.n);
  for (int k = 0; k < spec.truncation(); ++k) {
    const ModeSpec& mode = spec.modes[k];
    const double db = dbeta[k];
    if (db == 0.0) continue;
    for (int i = 0; i < v.n; ++i)
      out.values[i] += mode.g(v.x(i), v.values[i]) * db;
  }
  return out;
}

void NormalNoiseSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= std::sqrt(2.0)))
    throw std::invalid_argument("noise: alpha out of range [0, sqrt(2)]");
}

GridFunction apply_normal(const NormalNoiseSpec& spec, const GridFunction& v,
                          double dbeta) {
  if (v.bc != BC::Periodic)
    throw std::invalid_argument("apply_normal: periodic grids only");
  const GridFunction a = node_centered_gradient(v);
  GridFunction out = GridFunction::zeros(v.bc, v.n);
  for (int i = 0; i < v.n; ++i)
    out.values[i] = spec.alpha * std::sqrt(1.0 + a.values[i] * a.values[i]) * dbeta;
  return out;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

double uniform_from_key(std::uint64_t key) {
  return (static_cast<double>(key >> 11) + 1.0) * 0x1.0p-53;
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                         std::uint64_t k) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (stream + kGolden));
  h = mix64(h ^ (step + kGolden));
  h = mix64(h ^ (k + kGolden));
  return h;
}

}  // namespace

namespace {

double single_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                   std::uint64_t k, double dt) {
  const std::uint64_t key = derive_key(seed, stream, step, k);
  const double u1 = uniform_from_key(key);
  const double u2 = uniform_from_key(mix64(key ^ 0xd1342543de82ef95ULL));
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  return z * std::sqrt(dt);
}

}  // namespace

double WienerSampler::increment(double dt, std::uint64_t step, std::uint64_t k) const {
  if (!(dt > 0.0)) throw std::invalid_argument("sampler: dt must be positive");
  if (substeps <= 1) return single_draw(master_seed, stream_id, step, k, dt);
  const std::uint64_t s = static_cast<std::uint64_t>(substeps);
  double sum = 0.0;
  for (std::uint64_t j = 0; j < s; ++j)
    sum += single_draw(master_seed, stream_id, step * s + j, k, dt / substeps);
  return sum;
}

std::vector<double> WienerSampler::increments(int K, double dt,
                                              std::uint64_t step) const {
  std::vector<double> out(K);
  for (int k = 0; k < K; ++k) out[k] = increment(dt, step, k);
  return out;
}

}  // namespace spde1d
