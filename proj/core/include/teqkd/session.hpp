#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "teqkd/adversary.hpp"
#include "teqkd/channel.hpp"
#include "teqkd/protocol.hpp"
#include "teqkd/scenario.hpp"
#include "teqkd/stats.hpp"

namespace teqkd {

/// Everything produced by one end-to-end key generation run.
struct SessionResult {
  std::uint64_t trial_seed = 0;
  std::vector<protocol::RoundRecord> records;
  /// Indexed like `records`; empty entries when Eve is disabled.
  std::vector<std::optional<adversary::InterceptOutcome>> intercepts;
  channel::Transcript transcript;
  protocol::SiftedKey key;
  stats::TestVerdict verdict;
};

/// Seed of trial `trial` under base seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Runs rounds, announcements, sifting, test disclosures and the delay test.
/// Rounds are spread over `threads` workers; the result does not depend on
/// the thread count.
SessionResult run_session(const scenario::Scenario& s, std::uint64_t trial_seed,
                          unsigned threads = 1);

stats::RunSummary summarize_session(const scenario::Scenario& s, const SessionResult& r,
                                    bool include_adversary);

}  // namespace teqkd
