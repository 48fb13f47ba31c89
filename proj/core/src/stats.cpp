#include "teqkd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace teqkd::stats {

namespace {

using channel::format_wire_number;

TestVerdict decide(std::span<const std::pair<std::uint64_t, Seconds>> samples, Seconds threshold,
                   DecisionRule rule) {
  TestVerdict v;
  v.threshold = threshold;
  v.rule = rule;
  v.n_test = samples.size();
  if (samples.empty()) return v;

  double sum = 0.0;
  for (const auto& [idx, t] : samples) {
    sum += t;
    v.max_abs_t = std::max(v.max_abs_t, std::abs(t));
    if (std::abs(t) > threshold) v.flagged_rounds.push_back(idx);
  }
  v.mean_t = sum / static_cast<double>(samples.size());

  bool compromised = false;
  if (rule == DecisionRule::single_exceedance)
    compromised = !v.flagged_rounds.empty();
  else
    compromised = std::abs(v.mean_t) > threshold / std::sqrt(static_cast<double>(v.n_test));
  v.decision = compromised ? Decision::compromised : Decision::clean;
  return v;
}

}  // namespace

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::clean:
      return "clean";
    case Decision::compromised:
      return "compromised";
    case Decision::inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::string_view to_string(DecisionRule r) {
  return r == DecisionRule::single_exceedance ? "single_exceedance" : "mean_shift";
}

TestVerdict eavesdrop_test(std::span<const protocol::RoundRecord> test_records, Seconds threshold,
                           DecisionRule rule) {
  std::vector<std::pair<std::uint64_t, Seconds>> samples;
  samples.reserve(test_records.size());
  for (const auto& r : test_records)
    if (r.timing) samples.emplace_back(r.round_index, r.timing->relative_delay());
  return decide(samples, threshold, rule);
}

TestVerdict verdict_from_transcript(const channel::Transcript& transcript, Seconds threshold,
                                    DecisionRule rule) {
  const auto partition = protocol::partition_from_transcript(transcript);
  std::map<std::uint64_t, std::pair<std::optional<Seconds>, std::optional<Seconds>>> disclosed;
  for (const auto& m : transcript.snapshot()) {
    if (const auto* d = std::get_if<channel::TestDisclosure>(&m.payload)) {
      auto& slot = disclosed[m.round];
      (m.sender == channel::Party::A ? slot.first : slot.second) = d->time;
    }
  }
  std::vector<std::pair<std::uint64_t, Seconds>> samples;
  for (std::uint64_t idx : partition.test_rounds) {
    const auto it = disclosed.find(idx);
    if (it == disclosed.end() || !it->second.first || !it->second.second)
      throw std::logic_error("missing test disclosure for round " + std::to_string(idx));
    samples.emplace_back(idx, *it->second.second - *it->second.first);
  }
  return decide(samples, threshold, rule);
}

std::vector<protocol::RoundRecord> test_records(const std::vector<protocol::RoundRecord>& records,
                                                const protocol::SiftedKey& key) {
  std::map<std::uint64_t, const protocol::RoundRecord*> by_index;
  for (const auto& r : records) by_index[r.round_index] = &r;
  std::vector<protocol::RoundRecord> out;
  out.reserve(key.test_rounds.size());
  for (std::uint64_t idx : key.test_rounds) {
    if (auto it = by_index.find(idx); it != by_index.end()) out.push_back(*it->second);
  }
  return out;
}

double honest_exceedance_probability(const physics::DelayDistribution& dist, Seconds threshold) {
  return dist.weight_positive * std::exp(-dist.rate_positive * threshold) +
         dist.weight_negative() * std::exp(-dist.rate_negative * threshold);
}

std::vector<HistogramBin> symmetric_histogram(std::span<const double> values, std::size_t bins) {
  std::vector<HistogramBin> out;
  if (values.empty() || bins == 0) return out;
  double range = 0.0;
  for (double v : values) range = std::max(range, std::abs(v));
  if (range == 0.0) range = 1.0;
  const double width = 2.0 * range / static_cast<double>(bins);
  out.reserve(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double left = -range + width * static_cast<double>(i);
    const double right = i + 1 == bins ? range : left + width;
    out.push_back({left, right, 0});
  }
  for (double v : values) {
    auto i = static_cast<std::size_t>(std::floor((v + range) / width));
    out[std::min(i, bins - 1)].count++;
  }
  return out;
}

double AdversaryTally::accuracy() const {
  return learned_on_key == 0 ? 0.0
                             : static_cast<double>(correct_on_key) / static_cast<double>(learned_on_key);
}

Seconds AdversaryTally::mean_delay() const {
  return resent == 0 ? 0.0 : delay_sum / static_cast<double>(resent);
}

AdversaryTally& AdversaryTally::operator+=(const AdversaryTally& o) {
  intercepts += o.intercepts;
  detector_fires += o.detector_fires;
  resent += o.resent;
  learned_on_key += o.learned_on_key;
  correct_on_key += o.correct_on_key;
  delay_sum += o.delay_sum;
  delay_sq_sum += o.delay_sq_sum;
  return *this;
}

AdversaryTally tally_adversary(const std::vector<protocol::RoundRecord>& records,
                               const std::vector<std::optional<adversary::InterceptOutcome>>& intercepts,
                               const protocol::SiftedKey& key) {
  AdversaryTally t;
  std::map<std::uint64_t, std::size_t> slot;
  for (std::size_t i = 0; i < records.size(); ++i) slot[records[i].round_index] = i;

  for (std::size_t i = 0; i < intercepts.size(); ++i) {
    const auto& ic = intercepts[i];
    if (!ic) continue;
    t.intercepts++;
    if (ic->detector_fired) t.detector_fires++;
    if (ic->resent) {
      t.resent++;
      t.delay_sum += ic->added_delay;
      t.delay_sq_sum += ic->added_delay * ic->added_delay;
    }
  }
  for (std::size_t k = 0; k < key.source_rounds.size(); ++k) {
    const auto it = slot.find(key.source_rounds[k]);
    if (it == slot.end() || it->second >= intercepts.size()) continue;
    const auto& ic = intercepts[it->second];
    if (!ic || !ic->learned_bit) continue;
    t.learned_on_key++;
    if (*ic->learned_bit == key.bits_a[k]) t.correct_on_key++;
  }
  return t;
}

RunSummary summarize(const std::vector<protocol::RoundRecord>& records,
                     const protocol::SiftedKey& key, const TestVerdict& verdict,
                     std::size_t histogram_bins, const std::optional<AdversaryTally>& adversary) {
  RunSummary s;
  s.n_rounds = records.size();
  for (const auto& r : records)
    if (r.fired()) s.n_fired++;
  const double n = static_cast<double>(std::max<std::uint64_t>(s.n_rounds, 1));
  s.coincidence_rate = static_cast<double>(s.n_fired) / n;
  s.key_length = key.bits_a.size();
  s.key_rate = static_cast<double>(s.key_length) / n;
  std::uint64_t ones = 0;
  for (std::size_t i = 0; i < key.bits_a.size(); ++i) {
    ones += key.bits_a[i];
    if (key.bits_a[i] != key.bits_b[i]) s.key_disagreements++;
  }
  if (s.key_length > 0) {
    s.key_ones_fraction = static_cast<double>(ones) / static_cast<double>(s.key_length);
    s.key_disagreement_rate =
        static_cast<double>(s.key_disagreements) / static_cast<double>(s.key_length);
  }
  s.verdict = verdict;

  std::vector<double> ts;
  for (const auto& r : test_records(records, key))
    if (r.timing) ts.push_back(r.timing->relative_delay());
  s.histogram = symmetric_histogram(ts, histogram_bins);
  s.adversary = adversary;
  return s;
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream o;
  auto num = [](double x) { return format_wire_number(x); };
  o << "n_rounds = " << s.n_rounds << '\n'
    << "n_fired = " << s.n_fired << '\n'
    << "coincidence_rate = " << num(s.coincidence_rate) << '\n'
    << "key_length = " << s.key_length << '\n'
    << "key_rate = " << num(s.key_rate) << '\n'
    << "key_ones_fraction = " << num(s.key_ones_fraction) << '\n'
    << "key_disagreements_nonpublic = " << s.key_disagreements << '\n'
    << "key_disagreement_rate_nonpublic = " << num(s.key_disagreement_rate) << '\n'
    << "test.rule = " << to_string(s.verdict.rule) << '\n'
    << "test.n_test = " << s.verdict.n_test << '\n'
    << "test.threshold = " << num(s.verdict.threshold) << '\n'
    << "test.max_abs_T = " << num(s.verdict.max_abs_t) << '\n'
    << "test.mean_T = " << num(s.verdict.mean_t) << '\n'
    << "test.n_flagged = " << s.verdict.flagged_rounds.size() << '\n'
    << "test.decision = " << to_string(s.verdict.decision) << '\n';
  if (s.adversary) {
    const auto& a = *s.adversary;
    o << "adversary.intercepts = " << a.intercepts << '\n'
      << "adversary.detector_fires = " << a.detector_fires << '\n'
      << "adversary.resent = " << a.resent << '\n'
      << "adversary.mean_added_delay = " << num(a.mean_delay()) << '\n'
      << "adversary.learned_on_key = " << a.learned_on_key << '\n'
      << "adversary.bit_accuracy = " << num(a.accuracy()) << '\n';
  }
  return o.str();
}

std::string summary_csv_header() {
  return "trial,seed,n_rounds,n_fired,key_length,key_disagreements,n_test,max_abs_T,mean_T,decision";
}

std::string summary_csv_row(std::uint64_t trial, std::uint64_t seed, const RunSummary& s) {
  std::ostringstream o;
  o << trial << ',' << seed << ',' << s.n_rounds << ',' << s.n_fired << ',' << s.key_length << ','
    << s.key_disagreements << ',' << s.verdict.n_test << ',' << format_wire_number(s.verdict.max_abs_t)
    << ',' << format_wire_number(s.verdict.mean_t) << ',' << to_string(s.verdict.decision);
  return o.str();
}

std::string format_histogram_csv(const std::vector<HistogramBin>& bins) {
  std::ostringstream o;
  o << "bin_left,bin_right,count\n";
  for (const auto& b : bins)
    o << format_wire_number(b.left) << ',' << format_wire_number(b.right) << ',' << b.count << '\n';
  return o.str();
}

}  // namespace teqkd::stats
