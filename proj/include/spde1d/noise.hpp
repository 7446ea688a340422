#pragma once

#include <cstdint>
#include <vector>

#include "spde1d/grid.hpp"

namespace spde1d {

/// Spatial mode profile on [0,1]. The built-in forms expose exact sup-norms
/// where a closed form exists (sine); the others are sampled densely, which
/// is exact enough since their sups are attained on the compact interval.
struct Profile {
  enum class Kind { Sine, Polynomial, Bump };
  Kind kind = Kind::Sine;
  int k = 1;                    // sine frequency: sin(k pi x)
  std::vector<double> coeffs;   // polynomial coefficients, lowest degree first
  double center = 0.5;          // bump support (center - width, center + width)
  double width = 0.25;

  double value(double x) const;
  double deriv(double x) const;
  double sup_abs() const;
  double sup_deriv_abs() const;

  static Profile sine(int k);
  static Profile polynomial(std::vector<double> coeffs);
  static Profile bump(double center, double width);
};

enum class ModeForm { Additive, Multiplicative };

/// One noise mode g(x, r): amplitude * profile(x) for Additive,
/// amplitude * profile(x) * r for Multiplicative.
struct ModeSpec {
  ModeForm form = ModeForm::Multiplicative;
  Profile profile;
  double amplitude = 1.0;

  double g(double x, double r) const;
  double dx_g(double x, double r) const;
  /// Additive profiles must vanish at x = 0 and x = 1.
  void validate() const;
};

/// Squared mode bound sup|d_r g|^2 + sup(|d_x g| / (1+|r|))^2. Sups in x are
/// exact for sine profiles and sampled on x_samples points otherwise; the
/// r-envelope of the multiplicative form (|r|/(1+|r|) -> 1) is analytic.
double mu_k(const ModeSpec& mode, int x_samples = 2048, double r_max = 100.0);

enum class EnvelopeType { None, Geometric, Power };

/// Declared summability of the mode family: mu_k <= scale * ratio^k
/// (Geometric) or mu_k <= scale * k^-exponent (Power).
struct SummabilityEnvelope {
  EnvelopeType type = EnvelopeType::None;
  double parameter = 0.0;  // ratio or exponent
  double scale = 1.0;
};

struct VerticalNoiseSpec {
  std::vector<ModeSpec> modes;
  SummabilityEnvelope envelope;
  int truncation() const { return static_cast<int>(modes.size()); }
  void validate() const;
};

/// Partial sum of mu_k over the truncated family. Throws when the declared
/// envelope is not summable or a computed mu_k exceeds it.
double check_trace_class(const VerticalNoiseSpec& spec);

GridFunction apply_vertical(const VerticalNoiseSpec& spec, const GridFunction& v,
                            const std::vector<double>& dbeta);

struct NormalNoiseSpec {
  double alpha = 1.0;  // in [0, sqrt(2)]
  void validate() const;
};

/// alpha * sqrt(1 + a_i^2) * dbeta with the node-centered gradient a.
/// Periodic grids only.
GridFunction apply_normal(const NormalNoiseSpec& spec, const GridFunction& v,
                          double dbeta);

/// Counter-based Wiener increment source. Each draw is a pure function of
/// (master_seed, stream_id, step, k), so ensembles are reproducible across
/// any thread schedule. The derivation tuple is contractual.
///
/// substeps > 1 sums that many sub-draws of variance dt/substeps, giving the
/// same Brownian path a refined run with substeps' * dt' = dt would see:
/// runs at dt and dt/2 can then be coupled for self-convergence studies.
struct WienerSampler {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  int substeps = 1;

  /// One N(0, dt) draw.
  double increment(double dt, std::uint64_t step, std::uint64_t k = 0) const;
  /// K independent N(0, dt) draws, k = 0..K-1.
  std::vector<double> increments(int K, double dt, std::uint64_t step) const;
};

/// SplitMix64 finalizer; also used for seeded auxiliary randomness.
std::uint64_t mix64(std::uint64_t x);
/// Uniform in (0,1], derived from a hashed key.
double uniform_from_key(std::uint64_t key);

}  // namespace spde1d
