#pragma once

// Run artifacts on disk, event-log replay and parameter sweeps.
//
// events.log holds, in order: a `run` header record, one `round` record per
// round (with an `intercept` record after it in omniscient mode), then every
// public message of the transcript. It is a complete record of the run: the
// summary can be recomputed from it alone (see replay_summary).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "teqkd/experiment.hpp"
#include "teqkd/scenario.hpp"
#include "teqkd/session.hpp"
#include "teqkd/stats.hpp"

namespace teqkd::report {

/// Exit status for a run: 0 clean, 2 compromised, 3 inconclusive.
int exit_code(stats::Decision d);

std::string event_log(const scenario::Scenario& s, const SessionResult& r, bool omniscient);

/// Key bits packed MSB-first, lowercase hex, zero-padded to whole bytes.
std::string key_hex(const std::vector<std::uint8_t>& bits);

struct ParsedLog {
  std::uint64_t n_rounds = 0;
  Seconds threshold = 0.0;
  stats::DecisionRule rule = stats::DecisionRule::single_exceedance;
  std::size_t histogram_bins = 20;
  bool omniscient = false;
  bool adversary_enabled = false;
  std::vector<protocol::RoundRecord> records;
  std::vector<std::optional<adversary::InterceptOutcome>> intercepts;
  channel::Transcript transcript;
};

/// Throws channel::WireFormatError on malformed lines.
ParsedLog parse_event_log(std::istream& in);

/// Summary recomputed from an event log alone.
stats::RunSummary replay_summary(const ParsedLog& log);

struct RunOutcome {
  SessionResult session;
  stats::RunSummary summary;
  int exit_code = 0;
};

/// Runs trial 0 of the scenario and writes events.log, transcript.log,
/// summary.txt, summary.csv, histogram.csv and, in omniscient mode,
/// key_A.hex / key_B.hex into `out_dir`.
RunOutcome write_run(const scenario::Scenario& s, const std::filesystem::path& out_dir,
                     bool omniscient);

struct SweepRow {
  std::string value;
  double key_rate = 0.0;
  stats::Estimate detection;       // adversary as configured
  stats::Estimate false_positive;  // adversary disabled, same trial seeds
  std::uint64_t eve_learned_on_key = 0;
  double eve_accuracy = 0.0;
  double eve_accuracy_expected = 0.0;
  std::uint64_t eve_resent = 0;
  Seconds eve_mean_delay = 0.0;
  Seconds eve_mean_delay_expected = 0.0;
  double eve_delay_stddev = 0.0;
};

/// One row per value of `sweep.values`; row r uses base seed
/// derive_seed(run.seed, {sweep-row tag, r}). Throws ConfigError for a missing
/// or empty sweep or an unknown parameter path.
std::vector<SweepRow> run_sweep(const scenario::KeyValueConfig& cfg);

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows);

}  // namespace teqkd::report
