#include "teqkd/adversary.hpp"

#include <cmath>
#include <string>

namespace teqkd::adversary {

namespace {

std::string at(std::string_view path, std::string_view field) {
  std::string s(path);
  if (!s.empty()) s += '.';
  s += field;
  return s;
}

Seconds draw_delay(const AdversaryConfig& cfg, double u) {
  const double gamma = cfg.resolution();
  if (cfg.delay_model == DelayModel::floor) return 1.0 / gamma;
  return -std::log(u) / (2.0 * gamma);
}

}  // namespace

void validate(const AdversaryConfig& cfg, std::string_view path, Diagnostics& diag) {
  physics::validate(cfg.detector_low, at(path, "detector_low"), diag);
  physics::validate(cfg.detector_high, at(path, "detector_high"), diag);
  if (cfg.detector_low.bandwidth != cfg.detector_high.bandwidth)
    diag.error(at(path, "bandwidth") + ": both detectors must share the same gamma*");
  if (cfg.detector_low.efficiency != cfg.detector_high.efficiency)
    diag.error(at(path, "efficiency") + ": both detectors must share the same efficiency");
  const double split = cfg.detector_high.center_frequency - cfg.detector_low.center_frequency;
  if (!(split > 0.0))
    diag.error(at(path, "detector_high.center_frequency") +
               ": must be above detector_low.center_frequency");
  if (cfg.enabled && cfg.strategy == Strategy::narrowband_intercept && split > 0.0 &&
      cfg.resolution() > split)
    diag.warn(at(path, "bandwidth") +
              ": gamma* exceeds the line split; narrowband interception cannot separate the lines");
}

std::uint8_t bit_for_tapped_line(Line line, Party tapped_arm) {
  const Line a_line = tapped_arm == Party::A ? line : other(line);
  return a_line == Line::low ? 1 : 0;
}

InterceptOutcome intercept(Line photon, const Lines& lines, const AdversaryConfig& cfg,
                           RandomStream& rng) {
  InterceptOutcome out;
  out.photon_line = photon;
  if (!cfg.enabled) {
    out.resent = true;
    out.resent_frequency = lines[photon];
    out.detector_fired = true;
    return out;
  }

  const double u_pick = rng.uniform();
  const double u_accept = rng.uniform();
  const double u_delay = rng.uniform_open();

  const double gamma = cfg.resolution();
  const double eta = cfg.detector_low.efficiency;
  Line guess;
  double acceptance;
  if (cfg.strategy == Strategy::narrowband_intercept) {
    guess = u_pick < 0.5 ? Line::low : Line::high;
    const double center = guess == Line::low ? cfg.detector_low.center_frequency
                                             : cfg.detector_high.center_frequency;
    acceptance = eta * physics::lorentzian(lines[photon] - center, gamma);
  } else {
    // A single detector between the lines; its click says nothing about the line.
    const double mid = 0.5 * (cfg.detector_low.center_frequency + cfg.detector_high.center_frequency);
    acceptance = eta * physics::lorentzian(lines[photon] - mid, gamma);
    guess = u_pick < 0.5 ? Line::low : Line::high;
  }

  out.detector_fired = u_accept < acceptance;
  if (out.detector_fired) out.learned_bit = bit_for_tapped_line(guess, cfg.tapped_arm);
  out.resent = out.detector_fired || cfg.resend_on_miss;
  if (out.resent) {
    out.resent_frequency = guess == Line::low ? cfg.detector_low.center_frequency
                                              : cfg.detector_high.center_frequency;
    out.added_delay = draw_delay(cfg, u_delay);
  }
  return out;
}

Seconds apply_to_round(const InterceptOutcome& outcome, Seconds arm_time) {
  return arm_time + outcome.added_delay;
}

InterceptedRound fire_with_intercept(const physics::DetectorSpec& det_a,
                                     const physics::DetectorSpec& det_b,
                                     const physics::SourceSpec& source, const Lines& lines,
                                     const AdversaryConfig& cfg, RandomStream& physics_rng,
                                     RandomStream& adversary_rng) {
  const bool tapped_a = cfg.tapped_arm == Party::A;
  const auto& untapped = tapped_a ? det_b : det_a;
  const auto& tapped = tapped_a ? det_a : det_b;

  const double u_line = physics_rng.uniform();
  const double u_untapped = physics_rng.uniform();
  const double u_tapped = physics_rng.uniform();
  const Seconds t = physics::sample_delay(physics::delay_distribution(det_a, det_b), physics_rng);
  const Seconds emit = physics::emission_delay(source, physics_rng);

  // The untapped party's registration projects the pair onto one line.
  const double acc_low = physics::lorentzian(lines.low - untapped.center_frequency, untapped.bandwidth);
  const double acc_high =
      physics::lorentzian(lines.high - untapped.center_frequency, untapped.bandwidth);
  const Line untapped_line = u_line * (acc_low + acc_high) < acc_low ? Line::low : Line::high;
  const bool untapped_fired = u_untapped < untapped.efficiency * std::max(acc_low, acc_high);

  InterceptedRound round;
  round.intercept = intercept(other(untapped_line), lines, cfg, adversary_rng);
  const auto& ic = round.intercept;
  if (!untapped_fired || !ic.resent) return round;

  const double linewidth = cfg.enabled ? cfg.resolution() : 0.0;
  const double accept = tapped.efficiency * physics::lorentzian(*ic.resent_frequency - tapped.center_frequency,
                                                                linewidth + tapped.bandwidth);
  if (u_tapped < accept) round.outcome = physics::Coincidence{t + emit};
  return round;
}

double expected_bit_accuracy(const Lines& lines, const AdversaryConfig& cfg) {
  if (cfg.strategy == Strategy::wideband_intercept) return 0.5;
  return 1.0 / (1.0 + physics::lorentzian(lines.split(), cfg.resolution()));
}

Seconds expected_added_delay(const AdversaryConfig& cfg) {
  const double gamma = cfg.resolution();
  return cfg.delay_model == DelayModel::floor ? 1.0 / gamma : 1.0 / (2.0 * gamma);
}

std::string_view to_string(Strategy s) {
  return s == Strategy::narrowband_intercept ? "narrowband_intercept" : "wideband_intercept";
}

std::string_view to_string(DelayModel m) {
  return m == DelayModel::exponential ? "exponential" : "floor";
}

}  // namespace teqkd::adversary
