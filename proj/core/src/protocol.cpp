#include "teqkd/protocol.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace teqkd::protocol {

namespace {

std::string at(std::string_view path, std::string_view field) {
  std::string s(path);
  if (!s.empty()) s += '.';
  s += field;
  return s;
}

// A bandwidth counts as "much" smaller/larger than the split at a factor of 10.
constexpr double kSeparation = 10.0;

}  // namespace

std::string_view to_string(DetectorChoice c) {
  switch (c) {
    case DetectorChoice::wide:
      return "wide";
    case DetectorChoice::narrow_low:
      return "narrow_low";
    case DetectorChoice::narrow_high:
      return "narrow_high";
  }
  return "?";
}

channel::DetectorClass detector_class(DetectorChoice c) {
  return c == DetectorChoice::wide ? channel::DetectorClass::wide : channel::DetectorClass::narrow;
}

const physics::DetectorSpec& PartyConfig::detector(DetectorChoice c) const {
  switch (c) {
    case DetectorChoice::narrow_low:
      return narrow_low;
    case DetectorChoice::narrow_high:
      return narrow_high;
    case DetectorChoice::wide:
      break;
  }
  return wide;
}

void validate(const PartyConfig& cfg, const physics::SourceSpec& source, std::string_view path,
              Diagnostics& diag) {
  physics::validate(cfg.narrow_low, at(path, "narrow_low"), diag);
  physics::validate(cfg.narrow_high, at(path, "narrow_high"), diag);
  physics::validate(cfg.wide, at(path, "wide"), diag);
  for (auto [name, det] : {std::pair{"narrow_low", &cfg.narrow_low},
                           std::pair{"narrow_high", &cfg.narrow_high}, std::pair{"wide", &cfg.wide}})
    physics::check_spectral_coverage(source, *det, at(path, name), diag);

  if (!(cfg.p_wide > 0.0 && cfg.p_wide < 1.0)) diag.error(at(path, "p_wide") + ": must lie in (0, 1)");

  const double w1 = cfg.narrow_low.center_frequency;
  const double w2 = cfg.narrow_high.center_frequency;
  if (w1 + w2 != source.sum_frequency)
    diag.error(at(path, "narrow_low.center_frequency") + " + " + at(path, "narrow_high.center_frequency") +
               ": must equal source.sum_frequency exactly");
  const double split = w2 - w1;
  if (!(split > 0.0)) {
    diag.error(at(path, "narrow_high.center_frequency") + ": must be above narrow_low.center_frequency");
    return;
  }
  for (auto [name, det] : {std::pair{"narrow_low", &cfg.narrow_low}, std::pair{"narrow_high", &cfg.narrow_high}})
    if (det->bandwidth * kSeparation > split)
      diag.warn(at(path, name) + ".bandwidth: not much smaller than the line split; bits will be noisy");
  if (cfg.wide.bandwidth < kSeparation * split)
    diag.warn(at(path, "wide.bandwidth") + ": not much larger than the line split");
}

DetectorChoice choose_detector(const PartyConfig& cfg, RandomStream& rng) {
  const double u_class = rng.uniform();
  const double u_line = rng.uniform();
  if (u_class < cfg.p_wide) return DetectorChoice::wide;
  return u_line < 0.5 ? DetectorChoice::narrow_low : DetectorChoice::narrow_high;
}

RoundResult run_round(std::uint64_t round_index, const RoundContext& ctx, std::uint64_t trial_seed) {
  RandomStream rng_a(derive_seed(ctx.party_a.rng_seed, {stream_tag::kPartyChoice, trial_seed, round_index}));
  RandomStream rng_b(derive_seed(ctx.party_b.rng_seed, {stream_tag::kPartyChoice, trial_seed, round_index}));
  RandomStream rng_phys(derive_seed(trial_seed, {stream_tag::kPhysics, round_index}));

  RoundResult result;
  auto& rec = result.record;
  rec.round_index = round_index;
  rec.choice_a = choose_detector(ctx.party_a, rng_a);
  rec.choice_b = choose_detector(ctx.party_b, rng_b);
  const auto& det_a = ctx.party_a.detector(rec.choice_a);
  const auto& det_b = ctx.party_b.detector(rec.choice_b);

  physics::FireOutcome outcome;
  const bool eve = ctx.adversary != nullptr && ctx.adversary->enabled;
  if (eve) {
    RandomStream rng_eve(derive_seed(trial_seed, {stream_tag::kAdversary, round_index}));
    auto ir = adversary::fire_with_intercept(det_a, det_b, ctx.source, ctx.party_a.lines(),
                                             *ctx.adversary, rng_phys, rng_eve);
    outcome = ir.outcome;
    ir.intercept.added_delay = channel::to_wire_precision(ir.intercept.added_delay);
    result.intercept = ir.intercept;
  } else {
    outcome = physics::fire_outcome(det_a, det_b, ctx.source, rng_phys);
  }
  if (!outcome) return result;

  // Raw registration moments measured from the emission instant: the earlier
  // detector registers on arrival, the other one T later.
  const auto& ch = ctx.channel;
  const Seconds t = outcome->delay;
  Seconds raw_a = ch.distance_a / ch.light_speed + std::max(0.0, -t);
  Seconds raw_b = ch.distance_b / ch.light_speed + std::max(0.0, t);
  if (eve) {
    Seconds& tapped = ctx.adversary->tapped_arm == Party::A ? raw_a : raw_b;
    tapped = adversary::apply_to_round(*result.intercept, tapped);
  }

  auto clock = [&](Seconds raw, Meters distance) {
    return channel::to_wire_precision(
        channel::quantize(channel::reduce_time(raw, distance, ch.light_speed), ch.timing_resolution));
  };
  rec.timing = Timing{clock(raw_a, ch.distance_a), clock(raw_b, ch.distance_b)};
  return result;
}

void announce(const std::vector<RoundRecord>& records, channel::Transcript& transcript) {
  using channel::ClassAnnouncement;
  using channel::FiredAnnouncement;
  for (const auto& r : records) {
    transcript.exchange({r.round_index, Party::A, ClassAnnouncement{detector_class(r.choice_a)}});
    transcript.exchange({r.round_index, Party::A, FiredAnnouncement{r.fired()}});
    transcript.exchange({r.round_index, Party::B, ClassAnnouncement{detector_class(r.choice_b)}});
    transcript.exchange({r.round_index, Party::B, FiredAnnouncement{r.fired()}});
  }
}

std::uint8_t bit_from_choice(DetectorChoice own_choice, Party party) {
  if (own_choice == DetectorChoice::wide)
    throw std::invalid_argument("bit_from_choice: the wide detector carries no key bit");
  const bool low = own_choice == DetectorChoice::narrow_low;
  // A registering omega_1 implies B registered omega_2: both call that 1.
  return party == Party::A ? (low ? 1 : 0) : (low ? 0 : 1);
}

Partition partition_from_transcript(const channel::Transcript& transcript) {
  struct Announced {
    std::optional<channel::DetectorClass> cls[2];
    std::optional<bool> fired[2];
  };
  std::map<std::uint64_t, Announced> rounds;
  for (const auto& m : transcript.snapshot()) {
    const int who = m.sender == Party::A ? 0 : 1;
    if (const auto* c = std::get_if<channel::ClassAnnouncement>(&m.payload))
      rounds[m.round].cls[who] = c->detector;
    else if (const auto* f = std::get_if<channel::FiredAnnouncement>(&m.payload))
      rounds[m.round].fired[who] = f->fired;
  }

  Partition p;
  for (const auto& [idx, a] : rounds) {
    if (!a.cls[0] || !a.cls[1] || !a.fired[0] || !a.fired[1])
      throw std::logic_error("announcements incomplete for round " + std::to_string(idx));
    if (!*a.fired[0] || !*a.fired[1]) continue;
    if (*a.cls[0] == channel::DetectorClass::narrow && *a.cls[1] == channel::DetectorClass::narrow)
      p.key_rounds.push_back(idx);
    else if (*a.cls[0] == channel::DetectorClass::wide && *a.cls[1] == channel::DetectorClass::wide)
      p.test_rounds.push_back(idx);
  }
  return p;
}

SiftedKey sift_unchecked(const std::vector<RoundRecord>& records,
                         const channel::Transcript& transcript) {
  const Partition p = partition_from_transcript(transcript);
  std::map<std::uint64_t, const RoundRecord*> by_index;
  for (const auto& r : records) by_index[r.round_index] = &r;

  SiftedKey key;
  key.test_rounds = p.test_rounds;
  for (std::uint64_t idx : p.key_rounds) {
    const auto it = by_index.find(idx);
    if (it == by_index.end())
      throw std::logic_error("transcript names round " + std::to_string(idx) + " with no record");
    key.bits_a.push_back(bit_from_choice(it->second->choice_a, Party::A));
    key.bits_b.push_back(bit_from_choice(it->second->choice_b, Party::B));
    key.source_rounds.push_back(idx);
  }
  return key;
}

SiftedKey sift(const std::vector<RoundRecord>& records, const channel::Transcript& transcript) {
  SiftedKey key = sift_unchecked(records, transcript);
  if (key.source_rounds.empty() || key.test_rounds.empty()) {
    std::string what = "insufficient rounds:";
    if (key.source_rounds.empty()) what += " no narrow-narrow key rounds";
    if (key.test_rounds.empty()) what += " no wide-wide test rounds";
    throw InsufficientRounds(what, std::move(key));
  }
  return key;
}

double expected_key_yield(double p_wide_a, double p_wide_b) {
  return (1.0 - p_wide_a) * (1.0 - p_wide_b) * 0.5;
}

double noncomplementary_fire_probability(const PartyConfig& a, const PartyConfig& b,
                                         const physics::SourceSpec& source) {
  return 0.5 * (physics::coincidence_probability(a.narrow_low, b.narrow_low, source) +
                physics::coincidence_probability(a.narrow_high, b.narrow_high, source));
}

}  // namespace teqkd::protocol
