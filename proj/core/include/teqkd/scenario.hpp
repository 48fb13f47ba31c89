#pragma once

// Scenario configuration: a flat `key = value` text file with dotted section
// paths, e.g.
//
//   source.sum_frequency = 2.0e15
//   party_A.narrow_low.center_frequency = 9.9999999995e14
//   adversary.enabled = true
//
// Frequencies are angular frequencies in s^-1 written as plain numbers; unit
// suffixes are rejected. Lines starting with '#' are comments.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teqkd/adversary.hpp"
#include "teqkd/channel.hpp"
#include "teqkd/diagnostics.hpp"
#include "teqkd/physics.hpp"
#include "teqkd/protocol.hpp"
#include "teqkd/stats.hpp"

namespace teqkd::scenario {

struct SweepSpec {
  std::string parameter;  // config key, or party.<field> for both parties
  std::vector<std::string> values;
};

struct Scenario {
  physics::SourceSpec source;
  protocol::PartyConfig party_a;
  protocol::PartyConfig party_b;
  channel::ChannelSpec channel;
  adversary::AdversaryConfig adversary;
  std::uint64_t n_rounds = 1;
  Seconds threshold = 1e-8;
  std::uint64_t seed = 1;
  stats::DecisionRule decision_rule = stats::DecisionRule::single_exceedance;
  std::size_t histogram_bins = 20;
  std::uint64_t n_trials = 100;  // per sweep row
  unsigned threads = 1;
  std::optional<SweepSpec> sweep;

  std::vector<std::string> warnings;  // filled by validation

  protocol::RoundContext round_context() const {
    return {party_a, party_b, source, channel, &adversary};
  }
};

/// Collects every violated invariant, including the omega_1 + omega_2 =
/// omega_0 cross-check for both parties and agreement of their line pairs.
void validate(const Scenario& s, Diagnostics& diag);

/// Parsed `key = value` file. Keeps line numbers for error messages.
class KeyValueConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  /// Throws ConfigError listing every syntax problem.
  static KeyValueConfig parse(std::string_view text, std::string source_name = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  const Entry* find(std::string_view key) const;
  void set(const std::string& key, std::string value);
  const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }
  const std::string& source_name() const { return source_name_; }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
  std::string source_name_;
};

/// Every key the loader understands.
const std::vector<std::string>& known_keys();

/// Builds and validates a scenario. Throws ConfigError listing every problem,
/// each prefixed with file and line where the key appears.
Scenario build_scenario(const KeyValueConfig& cfg);

Scenario load_scenario(const std::filesystem::path& path);

/// Keys a sweep parameter path expands to. Throws ConfigError for unknown paths.
std::vector<std::string> sweep_targets(std::string_view parameter);

/// Scenario with the magnitudes of the reference estimates: lines split by
/// 1e5 s^-1 around 1e15 s^-1, wide detectors of 1e9 s^-1, narrow ones of
/// 1e2 s^-1, Eve (disabled) resolving 1e5 s^-1. Same content as
/// tools/scenarios/baseline.conf.
Scenario reference_baseline();

}  // namespace teqkd::scenario
