#pragma once

// Key generation rounds, public announcements and sifting.
//
// Each party picks, per round and independently, the wide-band detector or
// one of two narrow-band detectors centered at omega_1 / omega_2. Rounds in
// which the pair was not registered by both are discarded. Narrow-narrow
// rounds become key bits; wide-wide rounds are kept to test for delay.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "teqkd/adversary.hpp"
#include "teqkd/channel.hpp"
#include "teqkd/diagnostics.hpp"
#include "teqkd/physics.hpp"
#include "teqkd/random.hpp"

namespace teqkd::protocol {

using channel::Party;

enum class DetectorChoice : std::uint8_t { wide, narrow_low, narrow_high };

std::string_view to_string(DetectorChoice c);
channel::DetectorClass detector_class(DetectorChoice c);

struct PartyConfig {
  physics::DetectorSpec narrow_low;   // center omega_1
  physics::DetectorSpec narrow_high;  // center omega_2
  physics::DetectorSpec wide;
  double p_wide = 0.5;
  std::uint64_t rng_seed = 0;

  const physics::DetectorSpec& detector(DetectorChoice c) const;
  adversary::Lines lines() const { return {narrow_low.center_frequency, narrow_high.center_frequency}; }
};

void validate(const PartyConfig& cfg, const physics::SourceSpec& source, std::string_view path,
              Diagnostics& diag);

struct Timing {
  Seconds t_a;  // reduced registration time, party A
  Seconds t_b;  // reduced registration time, party B
  Seconds relative_delay() const { return t_b - t_a; }

  friend bool operator==(const Timing&, const Timing&) = default;
};

struct RoundRecord {
  std::uint64_t round_index = 0;
  DetectorChoice choice_a = DetectorChoice::wide;
  DetectorChoice choice_b = DetectorChoice::wide;
  std::optional<Timing> timing;  // present iff both detectors fired

  bool fired() const { return timing.has_value(); }

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct RoundResult {
  RoundRecord record;
  std::optional<adversary::InterceptOutcome> intercept;  // only when Eve is enabled
};

struct SiftedKey {
  std::vector<std::uint8_t> bits_a;
  std::vector<std::uint8_t> bits_b;
  std::vector<std::uint64_t> source_rounds;
  std::vector<std::uint64_t> test_rounds;
};

class InsufficientRounds : public std::runtime_error {
 public:
  InsufficientRounds(const std::string& what, SiftedKey partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const SiftedKey& partial() const { return partial_; }

 private:
  SiftedKey partial_;
};

/// Draws two uniforms per call whatever the outcome, so later draws line up
/// across different p_wide values.
DetectorChoice choose_detector(const PartyConfig& cfg, RandomStream& rng);

/// Everything a round needs besides its index and trial seed.
struct RoundContext {
  const PartyConfig& party_a;
  const PartyConfig& party_b;
  const physics::SourceSpec& source;
  const channel::ChannelSpec& channel;
  const adversary::AdversaryConfig* adversary = nullptr;  // null or disabled: no Eve
};

/// Executes one round. All randomness comes from streams derived from
/// (trial_seed, round index) and the parties' own seeds, so rounds can run in
/// any order or in parallel.
RoundResult run_round(std::uint64_t round_index, const RoundContext& ctx, std::uint64_t trial_seed);

/// Publishes detector class and fired flag for both parties of every round.
void announce(const std::vector<RoundRecord>& records, channel::Transcript& transcript);

/// Key bit a party records for its own narrow-band choice. Throws
/// std::invalid_argument for the wide detector.
std::uint8_t bit_from_choice(DetectorChoice own_choice, Party party);

/// Key and test round indices as determined by the public transcript alone.
struct Partition {
  std::vector<std::uint64_t> key_rounds;
  std::vector<std::uint64_t> test_rounds;
};
Partition partition_from_transcript(const channel::Transcript& transcript);

/// Sifting without the emptiness check.
SiftedKey sift_unchecked(const std::vector<RoundRecord>& records,
                         const channel::Transcript& transcript);

/// Throws InsufficientRounds if the key or the test partition is empty.
SiftedKey sift(const std::vector<RoundRecord>& records, const channel::Transcript& transcript);

/// Expected sifted key bits per round without Eve and with ideal detectors.
double expected_key_yield(double p_wide_a, double p_wide_b);

/// Probability that a narrow-narrow round with non-complementary choices
/// registers anyway; such rounds become undetectable key errors.
double noncomplementary_fire_probability(const PartyConfig& a, const PartyConfig& b,
                                         const physics::SourceSpec& source);

}  // namespace teqkd::protocol
