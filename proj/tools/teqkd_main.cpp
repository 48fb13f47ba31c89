// teqkd: scenario runner for the time-energy key distribution simulator.
//
//   teqkd run <config> [--out DIR] [--omniscient] [--quiet]
//   teqkd sweep <config> [--out DIR] [--quiet]
//   teqkd replay <events.log>
//
// Exit status of `run`: 0 clean, 2 compromised, 3 inconclusive, 1 error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "teqkd/report.hpp"
#include "teqkd/scenario.hpp"

namespace {

constexpr int kError = 1;

void print_warnings(const teqkd::scenario::Scenario& s, bool quiet) {
  if (quiet) return;
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
}

int do_run(const std::string& config, const std::filesystem::path& out, bool omniscient, bool quiet) {
  const auto scn = teqkd::scenario::load_scenario(config);
  print_warnings(scn, quiet);
  const auto result = teqkd::report::write_run(scn, out, omniscient);
  if (!quiet) {
    std::cout << teqkd::stats::format_summary(result.summary);
    std::cout << "artifacts written to " << out.string() << '\n';
  }
  return result.exit_code;
}

int do_sweep(const std::string& config, const std::filesystem::path& out, bool quiet) {
  const auto cfg = teqkd::scenario::KeyValueConfig::load(config);
  const auto scn = teqkd::scenario::build_scenario(cfg);
  print_warnings(scn, quiet);
  if (!scn.sweep) throw teqkd::ConfigError({config + ": sweep.parameter: no sweep configured"});
  const auto rows = teqkd::report::run_sweep(cfg);
  const auto csv = teqkd::report::sweep_csv(scn.sweep->parameter, rows);
  std::filesystem::create_directories(out);
  std::ofstream(out / "sweep.csv", std::ios::binary) << csv;
  if (!quiet) std::cout << csv;
  return 0;
}

int do_replay(const std::string& log_path) {
  std::ifstream in(log_path);
  if (!in) throw std::runtime_error("cannot open " + log_path);
  const auto log = teqkd::report::parse_event_log(in);
  const auto summary = teqkd::report::replay_summary(log);
  std::cout << teqkd::stats::format_summary(summary);
  return teqkd::report::exit_code(summary.verdict.decision);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-energy uncertainty key distribution simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = "out";
  bool omniscient = false;
  bool quiet = false;
  std::string log_path;

  auto* run = app.add_subcommand("run", "Run one end-to-end session and write its artifacts");
  run->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_flag("--omniscient", omniscient, "Include Eve internals and both keys in the output");
  run->add_flag("--quiet", quiet, "Suppress console output");

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write sweep.csv");
  sweep->add_option("config", config, "Scenario file with sweep.parameter and sweep.values")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory")->capture_default_str();
  sweep->add_flag("--quiet", quiet, "Suppress console output");

  auto* replay = app.add_subcommand("replay", "Recompute the summary from an events.log");
  replay->add_option("events", log_path, "Event log")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*run) return do_run(config, out_dir, omniscient, quiet);
    if (*sweep) return do_sweep(config, out_dir, quiet);
    if (*replay) return do_replay(log_path);
  } catch (const teqkd::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
