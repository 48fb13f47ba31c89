#pragma once

// Repeated end-to-end trials: detection probability, false alarms, key rate
// and Eve's statistics.

#include <cstdint>

#include "teqkd/scenario.hpp"
#include "teqkd/stats.hpp"

namespace teqkd::stats {

struct TrialAggregate {
  std::uint64_t n_trials = 0;
  std::uint64_t compromised = 0;
  std::uint64_t inconclusive = 0;
  std::uint64_t rounds = 0;
  std::uint64_t key_bits = 0;
  std::uint64_t key_disagreements = 0;
  std::uint64_t test_rounds = 0;
  AdversaryTally adversary;

  double key_rate() const;
  double compromised_fraction() const;
};

/// Runs `n_trials` sessions with seeds trial_seed(seed, 0..n_trials-1). Trials
/// are spread over `threads` workers and reduced in trial order, so the result
/// is identical for every thread count.
TrialAggregate run_trials(const scenario::Scenario& s, std::uint64_t n_trials, std::uint64_t seed,
                          unsigned threads = 1);

struct Estimate {
  double probability = 0.0;
  double standard_error = 0.0;  // binomial sqrt(p (1 - p) / n)
  std::uint64_t n_trials = 0;
};

Estimate binomial_estimate(std::uint64_t successes, std::uint64_t n);

/// Fraction of trials ending in a compromised verdict. With Eve disabled this
/// is the false-positive rate.
Estimate detection_probability(const scenario::Scenario& s, std::uint64_t n_rounds,
                               std::uint64_t n_trials, std::uint64_t seed, unsigned threads = 1);

}  // namespace teqkd::stats
