// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "teqkd/adversary.hpp"
#include "teqkd/channel.hpp"
#include "teqkd/experiment.hpp"
#include "teqkd/physics.hpp"
#include "teqkd/protocol.hpp"
#include "teqkd/report.hpp"
#include "teqkd/scenario.hpp"
#include "teqkd/session.hpp"

namespace {

using namespace teqkd;
namespace fs = std::filesystem;

// Tolerances and budgets, fixed here rather than tuned per run.
constexpr int kHistogramBins = 200;
constexpr double kHistogramL1Max = 0.01;
constexpr double kSigmas = 3.0;
constexpr double kC1Seconds = 10.0;
constexpr double kC2Target = 4e-6;
constexpr double kC2RelTol = 1e-6;
constexpr double kC2P99Max = 3e-9;
constexpr double kC3Seconds = 60.0;
constexpr double kC4RelTol = 0.01;
constexpr double kC5DetectionMin = 0.999;
constexpr double kC5FalsePositiveMax = 1e-3;
constexpr double kC5Seconds = 300.0;
constexpr double kC6FinalMin = 0.99;
constexpr double kSplit = 1e5;

const std::string kScenarioDir = TEQKD_SCENARIO_DIR;

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double lorentz(double detuning, double width) { return width * width / (detuning * detuning + width * width); }

// --- 1 ---------------------------------------------------------------------

double histogram_l1(const physics::DelayDistribution& d, const std::vector<double>& xs) {
  const double lo = d.quantile(1e-6), hi = d.quantile(1.0 - 1e-6);
  const double w = (hi - lo) / kHistogramBins;
  std::vector<double> counts(kHistogramBins + 2, 0.0);
  for (double x : xs) {
    if (x < lo) counts.front() += 1;
    else if (x >= hi) counts.back() += 1;
    else counts[1 + std::min(kHistogramBins - 1, static_cast<int>((x - lo) / w))] += 1;
  }
  const double n = static_cast<double>(xs.size());
  double l1 = std::abs(counts.front() / n - d.cdf(lo)) + std::abs(counts.back() / n - (1.0 - d.cdf(hi)));
  for (int i = 0; i < kHistogramBins; ++i)
    l1 += std::abs(counts[i + 1] / n - (d.cdf(lo + (i + 1) * w) - d.cdf(lo + i * w)));
  return l1;
}

Check criterion1() {
  Check c;
  Timer timer;
  std::uint64_t seed = 101;
  for (auto [ga, gb] : {std::pair{1e9, 1e9}, {1e9, 1e2}}) {
    const auto d = physics::delay_distribution({0, ga, 1}, {0, gb, 1});
    RandomStream rng(seed++);
    std::vector<double> xs(1'000'000);
    double sum = 0.0, sq = 0.0;
    for (auto& x : xs) {
      x = physics::sample_delay(d, rng);
      sum += x;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    for (double x : xs) sq += (x - mean) * (x - mean);
    const double se = std::sqrt(sq / (n - 1) / n);
    const double expected = (ga - gb) / (2.0 * ga * gb);
    const double l1 = histogram_l1(d, xs);
    c.require(l1 < kHistogramL1Max, fmt("(%.0e,%.0e) L1=%.4f", ga, gb, l1));
    c.require(std::abs(mean - expected) <= kSigmas * se,
              fmt("mean=%.6g expected=%.6g (%.2f SE)", mean, expected, (mean - expected) / se));
  }
  const double t = timer.seconds();
  c.require(t < kC1Seconds, fmt("%.2fs", t));
  return c;
}

// --- 2 ---------------------------------------------------------------------

Check criterion2(double* exact_rel_dev) {
  Check c;
  const physics::SourceSpec src{.sum_frequency = 2e15};
  const physics::DetectorSpec a{1e15, 1e2, 1.0};
  const physics::DetectorSpec b{1e15 - 1e5, 1e2, 1.0};  // Omega = 1e5
  const double p = physics::coincidence_probability(a, b, src);
  const double rel = p / kC2Target - 1.0;
  c.require(std::abs(rel) <= kC2RelTol, fmt("P=%.9g vs 4e-6 rel=%.3g (tol %.0e)", p, rel, kC2RelTol));
  *exact_rel_dev = p / lorentz(1e5, 2e2) - 1.0;

  const auto base = scenario::reference_baseline();
  RandomStream rng(202);
  std::vector<double> abs_t;
  abs_t.reserve(100'000);
  while (abs_t.size() < 100'000) {
    if (auto o = physics::fire_outcome(base.party_a.wide, base.party_b.wide, base.source, rng))
      abs_t.push_back(std::abs(o->delay));
  }
  const auto k = static_cast<std::size_t>(0.99 * abs_t.size());
  std::nth_element(abs_t.begin(), abs_t.begin() + k, abs_t.end());
  c.require(abs_t[k] <= kC2P99Max, fmt("p99|T|=%.3g s", abs_t[k]));
  return c;
}

// --- 3 ---------------------------------------------------------------------

Check criterion3() {
  Check c;
  Timer timer;
  const auto s = scenario::reference_baseline();
  constexpr std::uint64_t kRuns = 1000;
  std::uint64_t agreeing = 0, ones = 0, bits = 0, same_line = 0;
  for (std::uint64_t t = 0; t < kRuns; ++t) {
    const auto r = run_session(s, trial_seed(s.seed, t));
    agreeing += r.key.bits_a == r.key.bits_b;
    for (auto bit : r.key.bits_a) ones += bit;
    bits += r.key.bits_a.size();
    for (auto idx : r.key.source_rounds) same_line += r.records[idx].choice_a == r.records[idx].choice_b;
  }
  // Same-line narrow pairs fire through the Lorentzian tail and always yield a key error.
  const double tail = protocol::noncomplementary_fire_probability(s.party_a, s.party_b, s.source);
  const double expected_errors = kRuns * s.n_rounds * (1 - s.party_a.p_wide) * (1 - s.party_b.p_wide) * 0.5 * tail;
  const double frac = ones / static_cast<double>(bits);
  const double sigma = std::sqrt(0.25 / bits);
  c.require(agreeing == kRuns,
            fmt("%llu/%llu runs with identical keys (%llu same-line key rounds; %.3f expected from the "
                "%.3g tail, P(no error in any run) = %.3f)",
                (unsigned long long)agreeing, (unsigned long long)kRuns, (unsigned long long)same_line,
                expected_errors, tail, std::exp(-expected_errors)));
  c.require(std::abs(frac - 0.5) <= kSigmas * sigma,
            fmt("ones fraction %.4f over %llu bits (%.2f sigma)", frac, (unsigned long long)bits,
                (frac - 0.5) / sigma));
  const double secs = timer.seconds();
  c.require(secs < kC3Seconds, fmt("%.2fs", secs));
  return c;
}

// --- 4 ---------------------------------------------------------------------

Check criterion4() {
  Check c;
  auto s = scenario::reference_baseline();
  s.adversary.enabled = true;
  const auto lines = s.party_a.lines();
  RandomStream rng(404);
  double sum = 0.0;
  std::uint64_t n = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    const auto out = adversary::intercept(i % 2 ? adversary::Line::low : adversary::Line::high, lines,
                                          s.adversary, rng);
    if (!out.resent) continue;
    sum += out.added_delay;
    ++n;
  }
  const double mean = sum / n;
  c.require(std::abs(mean / 5e-6 - 1.0) <= kC4RelTol,
            fmt("mean delay %.6g s over %llu intercepts", mean, (unsigned long long)n));
  const double t0 = 1e-5;
  const double reduced = channel::reduce_time(t0, 3000.0, 3e8);
  c.require(reduced == 0.0 && 3000.0 / 3e8 == 1e-5, fmt("reduce_time(1e-5, 3 km) = %.3g", reduced));
  return c;
}

// --- 5 ---------------------------------------------------------------------

Check criterion5() {
  Check c;
  Timer timer;
  auto s = scenario::reference_baseline();
  s.adversary.enabled = true;
  const auto on = stats::detection_probability(s, 200, 1000, s.seed, worker_threads());
  s.adversary.enabled = false;
  const auto off = stats::detection_probability(s, 200, 1000, s.seed, worker_threads());
  c.require(on.probability >= kC5DetectionMin, fmt("detection %.4f", on.probability));
  c.require(off.probability <= kC5FalsePositiveMax, fmt("false positives %.4f", off.probability));
  const double secs = timer.seconds();
  c.require(secs < kC5Seconds, fmt("%.2fs", secs));
  return c;
}

// --- 6 ---------------------------------------------------------------------

Check criterion6() {
  Check c;
  const auto cfg = scenario::KeyValueConfig::load(kScenarioDir + "/sweep_p_wide.conf");
  const auto s = scenario::build_scenario(cfg);
  const auto rows = report::run_sweep(cfg);
  std::string col;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    col += (i ? "," : "") + fmt("%.3f", rows[i].detection.probability);
    if (i > 0 && rows[i].detection.probability < rows[i - 1].detection.probability) monotone = false;
  }
  c.require(s.n_rounds == 50 && s.adversary.enabled && rows.size() == 5, "n_rounds=50, Eve on, 5 rows");
  c.require(monotone, "non-decreasing [" + col + "]");
  c.require(rows.back().value == "0.9" && rows.back().detection.probability >= kC6FinalMin,
            fmt("p_wide=0.9 -> %.4f", rows.back().detection.probability));
  return c;
}

// --- 7 ---------------------------------------------------------------------

Check criterion7() {
  Check c;
  const auto cfg = scenario::KeyValueConfig::load(kScenarioDir + "/sweep_eve_resolution.conf");
  const auto rows = report::run_sweep(cfg);
  auto se_acc = [](const report::SweepRow& r) {
    const double p = r.eve_accuracy;
    return std::sqrt(std::max(p * (1 - p), 0.25 / r.eve_learned_on_key) / r.eve_learned_on_key);
  };
  std::string acc_col;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double g = std::stod(r.value);
    acc_col += (i ? "," : "") + fmt("%.3f", r.eve_accuracy);

    const double expected_acc = 1.0 / (1.0 + lorentz(kSplit, g));
    c.require(r.eve_learned_on_key > 0 && std::abs(r.eve_accuracy - expected_acc) <= kSigmas * se_acc(r),
              fmt("g*=%.0e acc %.4f vs %.4f", g, r.eve_accuracy, expected_acc));

    const double delay_se = r.eve_delay_stddev / std::sqrt(static_cast<double>(r.eve_resent));
    c.require(std::abs(r.eve_mean_delay - 1.0 / (2.0 * g)) <= kSigmas * delay_se,
              fmt("delay %.4g vs %.4g", r.eve_mean_delay, 1.0 / (2.0 * g)));

    if (i > 0 && std::stod(rows[i - 1].value) >= kSplit) {
      const auto& prev = rows[i - 1];
      const double slack = kSigmas * std::hypot(se_acc(prev), se_acc(r));
      c.require(r.eve_accuracy <= prev.eve_accuracy + slack, fmt("non-increasing at g*=%.0e", g));
    }
  }
  const auto& last = rows.back();
  c.require(std::abs(last.eve_accuracy - 0.5) <= kSigmas * se_acc(last),
            fmt("widest Eve acc %.4f ~ 0.5", last.eve_accuracy));
  c.detail = "acc [" + acc_col + "]; " + c.detail;
  return c;
}

// --- 8 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Check criterion8() {
  Check c;
  auto s = scenario::reference_baseline();
  s.adversary.enabled = true;
  const auto root = fs::temp_directory_path() / "teqkd_acceptance_determinism";
  fs::remove_all(root);
  report::write_run(s, root / "a", true);
  report::write_run(s, root / "b", true);
  const auto a = slurp(root / "a" / "events.log");
  const auto b = slurp(root / "b" / "events.log");
  c.require(!a.empty() && a == b, fmt("events.log %zu bytes, identical=%d", a.size(), int(a == b)));
  fs::remove_all(root);
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    std::function<Check()> run;
  };
  double exact_rel_dev = 0.0;
  const std::vector<Entry> criteria{
      {1, "delay density fidelity", criterion1},
      {2, "narrow and wide limits", [&] { return criterion2(&exact_rel_dev); }},
      {3, "perfect key correlation", criterion3},
      {4, "detection arithmetic", criterion4},
      {5, "detection power", criterion5},
      {6, "detection approaches unity", criterion6},
      {7, "resolution tradeoff", criterion7},
      {8, "determinism", criterion8},
  };

  int failures = 0;
  for (const auto& e : criteria) {
    Timer t;
    Check c;
    try {
      c = e.run();
    } catch (const std::exception& ex) {
      c.pass = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    failures += !c.pass;
    std::printf("%s criterion %d (%s) [%.1fs]: %s\n", c.pass ? "PASS" : "FAIL", e.id, e.title, t.seconds(),
                c.detail.c_str());
    if (e.id == 2)
      std::printf("INFO criterion 2: P / exact Lorentzian - 1 = %.3g; 4e-6 is the large-detuning limit "
                  "(g_A+g_B)^2/Omega^2, which the exact value undershoots by (g_A+g_B)^2/Omega^2 = 4e-6\n",
                  exact_rel_dev);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
