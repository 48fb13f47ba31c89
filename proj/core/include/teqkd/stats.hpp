#pragma once

// Delay test on wide-wide rounds and run summaries.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teqkd/adversary.hpp"
#include "teqkd/channel.hpp"
#include "teqkd/protocol.hpp"
#include "teqkd/units.hpp"

namespace teqkd::stats {

enum class Decision { clean, compromised, inconclusive };

enum class DecisionRule {
  single_exceedance,  // any |T| above threshold
  mean_shift,         // |mean T| above threshold / sqrt(n_test)
};

std::string_view to_string(Decision d);
std::string_view to_string(DecisionRule r);

struct TestVerdict {
  Decision decision = Decision::inconclusive;
  std::size_t n_test = 0;
  Seconds max_abs_t = 0.0;
  Seconds mean_t = 0.0;
  Seconds threshold = 0.0;
  std::vector<std::uint64_t> flagged_rounds;  // rounds with |T| > threshold
  DecisionRule rule = DecisionRule::single_exceedance;
};

/// Runs the delay test on the sifted wide-wide rounds. Records without timing
/// are ignored.
TestVerdict eavesdrop_test(std::span<const protocol::RoundRecord> test_records, Seconds threshold,
                           DecisionRule rule = DecisionRule::single_exceedance);

/// Same test reconstructed from the public transcript: test rounds come from
/// the announcements and T from the two parties' disclosed registration times.
TestVerdict verdict_from_transcript(const channel::Transcript& transcript, Seconds threshold,
                                    DecisionRule rule = DecisionRule::single_exceedance);

/// Records of the test rounds listed in `key.test_rounds`, in that order.
std::vector<protocol::RoundRecord> test_records(const std::vector<protocol::RoundRecord>& records,
                                                const protocol::SiftedKey& key);

/// Per-round false alarm probability of the single-exceedance rule for an
/// undisturbed wide-wide round: P(|T| > threshold).
double honest_exceedance_probability(const physics::DelayDistribution& dist, Seconds threshold);

struct HistogramBin {
  Seconds left;
  Seconds right;
  std::uint64_t count;
};

/// Equal-width bins over [-R, R], R = max |value| (1 when all values are 0).
/// The last bin is closed on the right.
std::vector<HistogramBin> symmetric_histogram(std::span<const double> values, std::size_t bins);

struct AdversaryTally {
  std::uint64_t intercepts = 0;
  std::uint64_t detector_fires = 0;
  std::uint64_t resent = 0;
  std::uint64_t learned_on_key = 0;  // key rounds where Eve holds a bit
  std::uint64_t correct_on_key = 0;  // ... and it matches party A's bit
  double delay_sum = 0.0;
  double delay_sq_sum = 0.0;

  double accuracy() const;
  Seconds mean_delay() const;
  AdversaryTally& operator+=(const AdversaryTally& o);
};

/// Accumulates Eve's statistics over one run. `intercepts` is indexed like
/// `records` (empty entries when Eve is off).
AdversaryTally tally_adversary(const std::vector<protocol::RoundRecord>& records,
                               const std::vector<std::optional<adversary::InterceptOutcome>>& intercepts,
                               const protocol::SiftedKey& key);

struct RunSummary {
  std::uint64_t n_rounds = 0;
  std::uint64_t n_fired = 0;
  double coincidence_rate = 0.0;
  std::uint64_t key_length = 0;
  double key_rate = 0.0;  // sifted bits per round
  double key_ones_fraction = 0.0;
  std::uint64_t key_disagreements = 0;  // omniscient
  double key_disagreement_rate = 0.0;   // omniscient
  TestVerdict verdict;
  std::vector<HistogramBin> histogram;  // T over test rounds
  std::optional<AdversaryTally> adversary;
};

RunSummary summarize(const std::vector<protocol::RoundRecord>& records,
                     const protocol::SiftedKey& key, const TestVerdict& verdict,
                     std::size_t histogram_bins = 20,
                     const std::optional<AdversaryTally>& adversary = std::nullopt);

/// Flat `key = value` block, one entry per line.
std::string format_summary(const RunSummary& s);

/// Header and row of the per-trial CSV table.
std::string summary_csv_header();
std::string summary_csv_row(std::uint64_t trial, std::uint64_t seed, const RunSummary& s);

/// `bin_left,bin_right,count` rows with header.
std::string format_histogram_csv(const std::vector<HistogramBin>& bins);

}  // namespace teqkd::stats
