#include "teqkd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "teqkd/session.hpp"

namespace teqkd::stats {

namespace {

TrialAggregate one_trial(const scenario::Scenario& s, std::uint64_t seed) {
  const auto r = run_session(s, seed);
  TrialAggregate a;
  a.n_trials = 1;
  a.compromised = r.verdict.decision == Decision::compromised ? 1 : 0;
  a.inconclusive = r.verdict.decision == Decision::inconclusive ? 1 : 0;
  a.rounds = r.records.size();
  a.key_bits = r.key.bits_a.size();
  for (std::size_t i = 0; i < r.key.bits_a.size(); ++i)
    if (r.key.bits_a[i] != r.key.bits_b[i]) a.key_disagreements++;
  a.test_rounds = r.verdict.n_test;
  if (s.adversary.enabled) a.adversary = tally_adversary(r.records, r.intercepts, r.key);
  return a;
}

}  // namespace

double TrialAggregate::key_rate() const {
  return rounds == 0 ? 0.0 : static_cast<double>(key_bits) / static_cast<double>(rounds);
}

double TrialAggregate::compromised_fraction() const {
  return n_trials == 0 ? 0.0 : static_cast<double>(compromised) / static_cast<double>(n_trials);
}

TrialAggregate run_trials(const scenario::Scenario& s, std::uint64_t n_trials, std::uint64_t seed,
                          unsigned threads) {
  std::vector<TrialAggregate> per(n_trials);
  auto work = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t t = worker; t < n_trials; t += stride) per[t] = one_trial(s, trial_seed(seed, t));
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::uint64_t>(n_trials, 1));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  TrialAggregate total;
  for (const auto& a : per) {
    total.n_trials += a.n_trials;
    total.compromised += a.compromised;
    total.inconclusive += a.inconclusive;
    total.rounds += a.rounds;
    total.key_bits += a.key_bits;
    total.key_disagreements += a.key_disagreements;
    total.test_rounds += a.test_rounds;
    total.adversary += a.adversary;
  }
  return total;
}

Estimate binomial_estimate(std::uint64_t successes, std::uint64_t n) {
  Estimate e;
  e.n_trials = n;
  if (n == 0) return e;
  e.probability = static_cast<double>(successes) / static_cast<double>(n);
  e.standard_error = std::sqrt(e.probability * (1.0 - e.probability) / static_cast<double>(n));
  return e;
}

Estimate detection_probability(const scenario::Scenario& s, std::uint64_t n_rounds,
                               std::uint64_t n_trials, std::uint64_t seed, unsigned threads) {
  scenario::Scenario copy = s;
  copy.n_rounds = n_rounds;
  const auto agg = run_trials(copy, n_trials, seed, threads);
  return binomial_estimate(agg.compromised, agg.n_trials);
}

}  // namespace teqkd::stats
