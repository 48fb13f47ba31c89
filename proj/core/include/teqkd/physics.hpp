#pragma once

// Biphoton detection statistics.
//
// The joint registration statistics of a photon pair seen through two
// detectors with Lorentzian response are factored into
//
//   P(T) = (coincidence probability) x (normalized relative-delay density)
//
// where T = t_B - t_A is the relative delay of the reduced registration
// moments. The coincidence probability carries the frequency selectivity and
// the delay density carries the timing statistics (two one-sided exponentials
// with rates 2*gamma_B for T >= 0 and 2*gamma_A for T < 0).

#include <optional>
#include <string_view>

#include "teqkd/diagnostics.hpp"
#include "teqkd/random.hpp"
#include "teqkd/units.hpp"

namespace teqkd::physics {

/// A photodetector with a Lorentzian frequency response.
///
/// Whether a detector counts as "wide" or "narrow" is decided by the protocol,
/// not here. The gamma -> 0 and gamma -> inf limits are represented by finite
/// extreme values.
struct DetectorSpec {
  AngularFrequency center_frequency = 0.0;
  AngularFrequency bandwidth = 1.0;  // gamma, half width of the response
  double efficiency = 1.0;

  friend bool operator==(const DetectorSpec&, const DetectorSpec&) = default;
};

enum class SourceKind {
  biphoton,            // frequency-anticorrelated photon pair summing to omega_0
  dual_single_photon,  // sender emits single photons at one of two lines
};

struct SourceSpec {
  AngularFrequency sum_frequency = 0.0;  // omega_0
  SourceKind kind = SourceKind::biphoton;
  /// Mean spontaneous emission delay after the trigger pulse. Only used by the
  /// dual_single_photon kind.
  Seconds emission_time_jitter = 0.0;
  /// Width of the pair spectrum g(omega). Recorded for validation only; the
  /// detection model assumes g is flat over every detector response.
  AngularFrequency spectral_width = 1.0e13;

  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

/// Normalized distribution of the relative delay T.
struct DelayDistribution {
  Rate rate_positive = 1.0;     // 2*gamma_B
  Rate rate_negative = 1.0;     // 2*gamma_A
  double weight_positive = 0.5; // gamma_A / (gamma_A + gamma_B)

  double weight_negative() const { return 1.0 - weight_positive; }
  Seconds mean() const;
  double variance() const;
  double pdf(Seconds t) const;
  double cdf(Seconds t) const;
  Seconds quantile(double p) const;
  /// p-quantile of |T|, found by bisection on the closed-form CDF of |T|.
  Seconds abs_quantile(double p) const;
};

struct Coincidence {
  Seconds delay;  // T = t_B - t_A
};

/// Empty when at least one detector did not fire.
using FireOutcome = std::optional<Coincidence>;

void validate(const DetectorSpec& det, std::string_view path, Diagnostics& diag);
void validate(const SourceSpec& src, std::string_view path, Diagnostics& diag);
/// Warns when a detector is wider than the pair spectrum it is meant to probe.
void check_spectral_coverage(const SourceSpec& src, const DetectorSpec& det,
                             std::string_view path, Diagnostics& diag);

/// Omega = omega_0 - omega_A - omega_B.
AngularFrequency detuning(const DetectorSpec& a, const DetectorSpec& b, const SourceSpec& src);

/// Normalized Lorentzian width^2 / (detuning^2 + width^2); 1 on resonance.
double lorentzian(AngularFrequency detuning, AngularFrequency width);

/// Unnormalized biphoton correlation function
///   (2 pi gA gB)^2 [T>=0 ? exp(-2 gB T) : exp(2 gA T)] / (Omega^2 + (gA+gB)^2).
/// T = 0 belongs to the first branch; both branches equal 1 there.
double correlation_density(Seconds t, const DetectorSpec& a, const DetectorSpec& b,
                           const SourceSpec& src);

/// etaA * etaB * (gA+gB)^2 / (Omega^2 + (gA+gB)^2).
double coincidence_probability(const DetectorSpec& a, const DetectorSpec& b,
                               const SourceSpec& src);

DelayDistribution delay_distribution(const DetectorSpec& a, const DetectorSpec& b);

/// Inverse-transform draw; consumes exactly one uniform from `rng`.
Seconds sample_delay(const DelayDistribution& dist, RandomStream& rng);

/// Decides whether the pair registers on both detectors and, if so, draws T.
/// Always consumes the same number of uniforms for a given source kind, so a
/// fixed seed gives the same downstream stream position whatever the outcome.
FireOutcome fire_outcome(const DetectorSpec& a, const DetectorSpec& b, const SourceSpec& src,
                         RandomStream& rng);

/// Extra sender-side emission delay for the dual single-photon source; zero for
/// biphotons. Consumes one uniform for dual_single_photon sources only.
Seconds emission_delay(const SourceSpec& src, RandomStream& rng);

}  // namespace teqkd::physics
