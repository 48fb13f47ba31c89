#pragma once

// Intercept-resend eavesdropper limited by the time-energy uncertainty
// relation: resolving frequencies to within gamma* takes a registration time
// of order 1/gamma*, so every resent photon reaches the tapped party late.

#include <cstdint>
#include <optional>
#include <string_view>

#include "teqkd/channel.hpp"
#include "teqkd/diagnostics.hpp"
#include "teqkd/physics.hpp"
#include "teqkd/random.hpp"
#include "teqkd/units.hpp"

namespace teqkd::adversary {

using channel::Party;

enum class Strategy {
  narrowband_intercept,  // two detectors at omega_1 / omega_2, picks one at random
  wideband_intercept,    // one detector between the lines, guesses the bit
};

enum class DelayModel {
  exponential,  // rate 2 gamma*, same form as a narrow receiver's registration delay
  floor,        // deterministic 1 / gamma*
};

/// One of the two key-carrying frequencies.
enum class Line : std::uint8_t { low, high };

constexpr Line other(Line l) { return l == Line::low ? Line::high : Line::low; }

/// The two key-carrying frequencies, omega_1 < omega_2 with omega_1 + omega_2 = omega_0.
struct Lines {
  AngularFrequency low = 0.0;
  AngularFrequency high = 0.0;

  AngularFrequency operator[](Line l) const { return l == Line::low ? low : high; }
  AngularFrequency split() const { return high - low; }
};

struct AdversaryConfig {
  bool enabled = false;
  Party tapped_arm = Party::B;
  physics::DetectorSpec detector_low;   // centered at omega_1, bandwidth gamma*
  physics::DetectorSpec detector_high;  // centered at omega_2, bandwidth gamma*
  Strategy strategy = Strategy::narrowband_intercept;
  bool resend_on_miss = true;
  DelayModel delay_model = DelayModel::exponential;

  AngularFrequency resolution() const { return detector_low.bandwidth; }
};

void validate(const AdversaryConfig& cfg, std::string_view path, Diagnostics& diag);

struct InterceptOutcome {
  std::optional<std::uint8_t> learned_bit;  // Eve's guess of party A's key bit
  bool resent = false;
  Seconds added_delay = 0.0;
  std::optional<AngularFrequency> resent_frequency;  // present iff resent
  // Omniscient bookkeeping for logs and accuracy statistics.
  Line photon_line = Line::low;
  bool detector_fired = false;
};

/// Eve measures the photon travelling on her tapped arm and decides whether to
/// resend. `photon` is the line that photon actually occupies. The learned bit
/// uses party A's convention (A registering omega_1 means 1).
/// Always draws three uniforms from `rng` when enabled, none when disabled.
InterceptOutcome intercept(Line photon, const Lines& lines, const AdversaryConfig& cfg,
                           RandomStream& rng);

/// Tapped arm's raw registration time shifted by Eve's delay.
Seconds apply_to_round(const InterceptOutcome& outcome, Seconds arm_time);

/// Key bit (party A convention) implied by the tapped arm carrying `line`.
std::uint8_t bit_for_tapped_line(Line line, Party tapped_arm);

/// Joint outcome of a round whose pair is intercepted on one arm.
struct InterceptedRound {
  physics::FireOutcome outcome;  // T before Eve's delay is applied
  InterceptOutcome intercept;
};

/// Replaces the joint biphoton detection of an undisturbed round. The
/// untapped party's measurement projects the pair onto one of the two lines
/// (probabilities proportional to its Lorentzian acceptance of each), Eve
/// measures and resends the tapped photon with linewidth gamma*, and the
/// tapped party accepts the resent photon with a Lorentzian of width
/// gamma* + gamma_tapped. Timing between the parties still follows the
/// delay distribution of their own detectors; Eve's delay is applied later
/// through apply_to_round.
InterceptedRound fire_with_intercept(const physics::DetectorSpec& det_a,
                                     const physics::DetectorSpec& det_b,
                                     const physics::SourceSpec& source, const Lines& lines,
                                     const AdversaryConfig& cfg, RandomStream& physics_rng,
                                     RandomStream& adversary_rng);

/// Probability that Eve's learned bit is correct given that she learned one,
/// for the narrowband strategy: 1 / (1 + L(split, gamma*)).
double expected_bit_accuracy(const Lines& lines, const AdversaryConfig& cfg);

/// Mean added delay of a resent photon.
Seconds expected_added_delay(const AdversaryConfig& cfg);

std::string_view to_string(Strategy s);
std::string_view to_string(DelayModel m);

}  // namespace teqkd::adversary
