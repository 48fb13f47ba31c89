#include "teqkd/report.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace teqkd::report {

namespace {

using channel::WireObject;
using channel::wire_record;
using nlohmann::json;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

protocol::DetectorChoice parse_choice(const std::string& s) {
  if (s == "wide") return protocol::DetectorChoice::wide;
  if (s == "narrow_low") return protocol::DetectorChoice::narrow_low;
  if (s == "narrow_high") return protocol::DetectorChoice::narrow_high;
  throw channel::WireFormatError("unknown detector choice '" + s + "'");
}

std::string_view line_name(adversary::Line l) { return l == adversary::Line::low ? "low" : "high"; }

}  // namespace

int exit_code(stats::Decision d) {
  switch (d) {
    case stats::Decision::clean:
      return 0;
    case stats::Decision::compromised:
      return 2;
    case stats::Decision::inconclusive:
      return 3;
  }
  return 1;
}

std::string event_log(const scenario::Scenario& s, const SessionResult& r, bool omniscient) {
  std::ostringstream o;
  WireObject header;
  header.field("n_rounds", s.n_rounds)
      .field("threshold", s.threshold)
      .field("decision_rule", stats::to_string(s.decision_rule))
      .field("histogram_bins", static_cast<std::uint64_t>(s.histogram_bins))
      .field("seed", s.seed)
      .field("trial_seed", r.trial_seed)
      .field("omniscient", omniscient)
      .field("adversary", s.adversary.enabled);
  o << wire_record(0, "S", "run", header.str()) << '\n';

  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& rec = r.records[i];
    WireObject v;
    v.field("choice_A", protocol::to_string(rec.choice_a))
        .field("choice_B", protocol::to_string(rec.choice_b))
        .field("fired", rec.fired());
    if (rec.timing) {
      v.field("t_A", rec.timing->t_a).field("t_B", rec.timing->t_b).field("T", rec.timing->relative_delay());
    } else {
      v.null_field("t_A").null_field("t_B").null_field("T");
    }
    o << wire_record(rec.round_index, "S", "round", v.str()) << '\n';

    if (omniscient && i < r.intercepts.size() && r.intercepts[i]) {
      const auto& ic = *r.intercepts[i];
      WireObject e;
      e.field("photon_line", line_name(ic.photon_line)).field("detector_fired", ic.detector_fired);
      if (ic.learned_bit)
        e.field("learned_bit", static_cast<std::uint64_t>(*ic.learned_bit));
      else
        e.null_field("learned_bit");
      e.field("resent", ic.resent).field("added_delay", ic.added_delay);
      if (ic.resent_frequency)
        e.field("resent_frequency", *ic.resent_frequency);
      else
        e.null_field("resent_frequency");
      o << wire_record(rec.round_index, "E", "intercept", e.str()) << '\n';
    }
  }
  channel::write_transcript(o, r.transcript);
  return o.str();
}

std::string key_hex(const std::vector<std::uint8_t>& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 8) {
    unsigned byte = 0;
    for (std::size_t j = 0; j < 8; ++j) byte = (byte << 1) | (i + j < bits.size() ? bits[i + j] & 1u : 0u);
    out += kDigits[byte >> 4];
    out += kDigits[byte & 0xf];
  }
  return out;
}

ParsedLog parse_event_log(std::istream& in) {
  ParsedLog log;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw channel::WireFormatError(std::string("malformed event record: ") + e.what());
    }
    const auto sender = j.at("sender").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    const auto& v = j.at("value");
    if (sender == "S" && kind == "run") {
      log.n_rounds = v.at("n_rounds").get<std::uint64_t>();
      log.threshold = v.at("threshold").get<double>();
      log.rule = v.at("decision_rule").get<std::string>() == "mean_shift"
                     ? stats::DecisionRule::mean_shift
                     : stats::DecisionRule::single_exceedance;
      log.histogram_bins = v.at("histogram_bins").get<std::size_t>();
      log.omniscient = v.at("omniscient").get<bool>();
      log.adversary_enabled = v.at("adversary").get<bool>();
      have_header = true;
    } else if (sender == "S" && kind == "round") {
      protocol::RoundRecord rec;
      rec.round_index = j.at("round").get<std::uint64_t>();
      rec.choice_a = parse_choice(v.at("choice_A").get<std::string>());
      rec.choice_b = parse_choice(v.at("choice_B").get<std::string>());
      if (v.at("fired").get<bool>())
        rec.timing = protocol::Timing{v.at("t_A").get<double>(), v.at("t_B").get<double>()};
      log.records.push_back(rec);
      log.intercepts.emplace_back();
    } else if (sender == "E" && kind == "intercept") {
      if (log.intercepts.empty()) throw channel::WireFormatError("intercept record before any round");
      adversary::InterceptOutcome ic;
      ic.photon_line = v.at("photon_line").get<std::string>() == "low" ? adversary::Line::low
                                                                      : adversary::Line::high;
      ic.detector_fired = v.at("detector_fired").get<bool>();
      if (!v.at("learned_bit").is_null()) ic.learned_bit = v.at("learned_bit").get<std::uint8_t>();
      ic.resent = v.at("resent").get<bool>();
      ic.added_delay = v.at("added_delay").get<double>();
      if (!v.at("resent_frequency").is_null()) ic.resent_frequency = v.at("resent_frequency").get<double>();
      log.intercepts.back() = ic;
    } else {
      log.transcript.exchange(channel::decode(line));
    }
  }
  if (!have_header) throw channel::WireFormatError("event log has no run header");
  return log;
}

stats::RunSummary replay_summary(const ParsedLog& log) {
  const auto key = protocol::sift_unchecked(log.records, log.transcript);
  const auto tests = stats::test_records(log.records, key);
  const auto verdict = stats::eavesdrop_test(tests, log.threshold, log.rule);
  std::optional<stats::AdversaryTally> tally;
  if (log.omniscient && log.adversary_enabled)
    tally = stats::tally_adversary(log.records, log.intercepts, key);
  return stats::summarize(log.records, key, verdict, log.histogram_bins, tally);
}

RunOutcome write_run(const scenario::Scenario& s, const std::filesystem::path& out_dir,
                     bool omniscient) {
  std::filesystem::create_directories(out_dir);
  RunOutcome out;
  out.session = run_session(s, trial_seed(s.seed, 0), s.threads);
  out.summary = summarize_session(s, out.session, omniscient);
  out.exit_code = exit_code(out.summary.verdict.decision);

  write_file(out_dir / "events.log", event_log(s, out.session, omniscient));
  std::ostringstream transcript;
  channel::write_transcript(transcript, out.session.transcript);
  write_file(out_dir / "transcript.log", transcript.str());
  write_file(out_dir / "summary.txt", stats::format_summary(out.summary));
  write_file(out_dir / "summary.csv", stats::summary_csv_header() + "\n" +
                                          stats::summary_csv_row(0, out.session.trial_seed, out.summary) +
                                          "\n");
  write_file(out_dir / "histogram.csv", stats::format_histogram_csv(out.summary.histogram));
  if (omniscient) {
    write_file(out_dir / "key_A.hex", key_hex(out.session.key.bits_a) + "\n");
    write_file(out_dir / "key_B.hex", key_hex(out.session.key.bits_b) + "\n");
  }
  return out;
}

std::vector<SweepRow> run_sweep(const scenario::KeyValueConfig& cfg) {
  const auto base = scenario::build_scenario(cfg);
  if (!base.sweep) throw ConfigError({cfg.source_name() + ": sweep.parameter: no sweep configured"});
  const auto targets = scenario::sweep_targets(base.sweep->parameter);

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < base.sweep->values.size(); ++i) {
    const auto& value = base.sweep->values[i];
    auto row_cfg = cfg;
    for (const auto& t : targets) row_cfg.set(t, value);
    auto scn = scenario::build_scenario(row_cfg);
    const auto row_seed = derive_seed(base.seed, {stream_tag::kSweepRow, i});

    const auto eve = stats::run_trials(scn, scn.n_trials, row_seed, scn.threads);
    auto honest_scn = scn;
    honest_scn.adversary.enabled = false;
    const auto honest = stats::run_trials(honest_scn, scn.n_trials, row_seed, scn.threads);

    SweepRow row;
    row.value = value;
    row.key_rate = eve.key_rate();
    row.detection = stats::binomial_estimate(eve.compromised, eve.n_trials);
    row.false_positive = stats::binomial_estimate(honest.compromised, honest.n_trials);
    const auto& a = eve.adversary;
    row.eve_learned_on_key = a.learned_on_key;
    row.eve_accuracy = a.accuracy();
    row.eve_resent = a.resent;
    row.eve_mean_delay = a.mean_delay();
    if (a.resent > 1) {
      const double n = static_cast<double>(a.resent);
      const double var = (a.delay_sq_sum - a.delay_sum * a.delay_sum / n) / (n - 1.0);
      row.eve_delay_stddev = std::sqrt(std::max(0.0, var));
    }
    if (scn.adversary.enabled) {
      row.eve_accuracy_expected = adversary::expected_bit_accuracy(scn.party_a.lines(), scn.adversary);
      row.eve_mean_delay_expected = adversary::expected_added_delay(scn.adversary);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows) {
  using channel::format_wire_number;
  std::ostringstream o;
  o << parameter
    << ",key_rate,detection_probability,detection_se,false_positive_rate,false_positive_se,"
       "eve_learned_on_key,eve_accuracy,eve_accuracy_expected,eve_resent,eve_mean_delay,"
       "eve_mean_delay_expected\n";
  for (const auto& r : rows) {
    o << r.value << ',' << format_wire_number(r.key_rate) << ','
      << format_wire_number(r.detection.probability) << ','
      << format_wire_number(r.detection.standard_error) << ','
      << format_wire_number(r.false_positive.probability) << ','
      << format_wire_number(r.false_positive.standard_error) << ',' << r.eve_learned_on_key << ','
      << format_wire_number(r.eve_accuracy) << ',' << format_wire_number(r.eve_accuracy_expected) << ','
      << r.eve_resent << ',' << format_wire_number(r.eve_mean_delay) << ','
      << format_wire_number(r.eve_mean_delay_expected) << '\n';
  }
  return o.str();
}

}  // namespace teqkd::report
