#include "teqkd/session.hpp"

#include <algorithm>
#include <thread>

namespace teqkd {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return derive_seed(seed, {stream_tag::kTrial, trial});
}

SessionResult run_session(const scenario::Scenario& s, std::uint64_t seed, unsigned threads) {
  SessionResult out;
  out.trial_seed = seed;
  const auto n = static_cast<std::size_t>(s.n_rounds);
  out.records.resize(n);
  out.intercepts.resize(n);
  const auto ctx = s.round_context();

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto r = protocol::run_round(i, ctx, seed);
      out.records[i] = std::move(r.record);
      out.intercepts[i] = std::move(r.intercept);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  protocol::announce(out.records, out.transcript);
  out.key = protocol::sift_unchecked(out.records, out.transcript);

  const auto tests = stats::test_records(out.records, out.key);
  for (const auto& r : tests) {
    out.transcript.exchange(channel::PublicMessage::disclosure(r.round_index, channel::Party::A, r.timing->t_a));
    out.transcript.exchange(channel::PublicMessage::disclosure(r.round_index, channel::Party::B, r.timing->t_b));
  }
  out.verdict = stats::eavesdrop_test(tests, s.threshold, s.decision_rule);
  if (out.verdict.decision != stats::Decision::inconclusive) {
    const auto published = out.verdict.decision == stats::Decision::clean
                               ? channel::PublishedVerdict::clean
                               : channel::PublishedVerdict::compromised;
    out.transcript.exchange({s.n_rounds, channel::Party::A, channel::VerdictAnnouncement{published}});
  }
  return out;
}

stats::RunSummary summarize_session(const scenario::Scenario& s, const SessionResult& r,
                                    bool include_adversary) {
  std::optional<stats::AdversaryTally> tally;
  if (include_adversary && s.adversary.enabled)
    tally = stats::tally_adversary(r.records, r.intercepts, r.key);
  return stats::summarize(r.records, r.key, r.verdict, s.histogram_bins, tally);
}

}  // namespace teqkd
