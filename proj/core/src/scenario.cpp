#include "teqkd/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace teqkd::scenario {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

const std::vector<std::string> kDetectorFields = {"center_frequency", "bandwidth", "efficiency"};

std::vector<std::string> make_known_keys() {
  std::vector<std::string> k = {
      "source.sum_frequency", "source.kind", "source.emission_time_jitter", "source.spectral_width",
      "channel.distance_A", "channel.distance_B", "channel.light_speed", "channel.timing_resolution",
      "adversary.enabled", "adversary.tapped_arm", "adversary.bandwidth", "adversary.efficiency",
      "adversary.center_low", "adversary.center_high", "adversary.strategy",
      "adversary.resend_on_miss", "adversary.delay_model",
      "run.n_rounds", "run.threshold", "run.seed", "run.decision_rule", "run.histogram_bins",
      "run.n_trials", "run.threads",
      "sweep.parameter", "sweep.values"};
  for (const char* party : {"party_A", "party_B"}) {
    for (const char* det : {"narrow_low", "narrow_high", "wide"})
      for (const auto& f : kDetectorFields) k.push_back(std::string(party) + "." + det + "." + f);
    k.push_back(std::string(party) + ".p_wide");
    k.push_back(std::string(party) + ".rng_seed");
  }
  return k;
}

/// Typed reader over a KeyValueConfig that records every problem instead of
/// stopping at the first one.
class Reader {
 public:
  Reader(const KeyValueConfig& cfg, Diagnostics& diag) : cfg_(cfg), diag_(diag) {}

  std::string where(std::string_view key) const {
    const auto* e = cfg_.find(key);
    std::string s = cfg_.source_name();
    if (e) s += ":" + std::to_string(e->line);
    return s + ": " + std::string(key);
  }

  bool has(std::string_view key) const { return cfg_.find(key) != nullptr; }

  double number(std::string_view key, std::optional<double> fallback) {
    const auto* e = cfg_.find(key);
    if (!e) return missing(key, fallback, 0.0);
    double v = 0.0;
    const auto& s = e->value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      diag_.error(where(key) + ": expected a plain number in SI units (s, m, s^-1), got '" + s + "'");
      return fallback.value_or(0.0);
    }
    return v;
  }

  std::uint64_t integer(std::string_view key, std::optional<std::uint64_t> fallback) {
    const auto* e = cfg_.find(key);
    if (!e) return missing(key, fallback, std::uint64_t{0});
    std::uint64_t v = 0;
    const auto& s = e->value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      diag_.error(where(key) + ": expected a non-negative integer, got '" + s + "'");
      return fallback.value_or(0);
    }
    return v;
  }

  bool boolean(std::string_view key, bool fallback) {
    const auto* e = cfg_.find(key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    diag_.error(where(key) + ": expected true or false, got '" + e->value + "'");
    return fallback;
  }

  template <typename Enum>
  Enum choice(std::string_view key, Enum fallback,
              std::initializer_list<std::pair<std::string_view, Enum>> options) {
    const auto* e = cfg_.find(key);
    if (!e) return fallback;
    for (const auto& [name, value] : options)
      if (e->value == name) return value;
    std::string names;
    for (const auto& [name, value] : options) names += (names.empty() ? "" : "|") + std::string(name);
    diag_.error(where(key) + ": expected one of " + names + ", got '" + e->value + "'");
    return fallback;
  }

 private:
  template <typename T>
  T missing(std::string_view key, std::optional<T> fallback, T zero) {
    if (fallback) return *fallback;
    diag_.error(cfg_.source_name() + ": " + std::string(key) + ": required key is missing");
    return zero;
  }

  const KeyValueConfig& cfg_;
  Diagnostics& diag_;
};

physics::DetectorSpec read_detector(Reader& r, const std::string& prefix,
                                    std::optional<double> center_default) {
  physics::DetectorSpec d;
  d.center_frequency = r.number(prefix + ".center_frequency", center_default);
  d.bandwidth = r.number(prefix + ".bandwidth", std::nullopt);
  d.efficiency = r.number(prefix + ".efficiency", 1.0);
  return d;
}

protocol::PartyConfig read_party(Reader& r, const std::string& prefix, double sum_frequency,
                                 std::uint64_t seed_default) {
  protocol::PartyConfig p;
  p.narrow_low = read_detector(r, prefix + ".narrow_low", std::nullopt);
  p.narrow_high = read_detector(r, prefix + ".narrow_high", std::nullopt);
  p.wide = read_detector(r, prefix + ".wide", 0.5 * sum_frequency);
  p.p_wide = r.number(prefix + ".p_wide", std::nullopt);
  p.rng_seed = r.integer(prefix + ".rng_seed", seed_default);
  return p;
}

/// Prefixes validation messages ("path: reason") with file and line.
std::string locate(const KeyValueConfig& cfg, const std::string& msg) {
  // The path is the first token; compound messages ("a + b: ...") locate at a.
  const auto key = msg.substr(0, msg.find_first_of(": "));
  if (const auto* e = cfg.find(key)) return cfg.source_name() + ":" + std::to_string(e->line) + ": " + msg;
  return cfg.source_name() + ": " + msg;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = make_known_keys();
  return keys;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string source_name) {
  KeyValueConfig cfg;
  cfg.source_name_ = std::move(source_name);
  std::vector<std::string> problems;
  const auto& known = known_keys();

  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = cfg.source_name_ + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(where + ": expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      problems.push_back(where + ": empty key or value");
      continue;
    }
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      problems.push_back(where + ": " + key + ": unknown key");
      continue;
    }
    if (const auto* prev = cfg.find(key)) {
      problems.push_back(where + ": " + key + ": duplicate key (first set on line " +
                         std::to_string(prev->line) + ")");
      continue;
    }
    cfg.entries_.emplace(key, Entry{value, line_no});
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open configuration file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const KeyValueConfig::Entry* KeyValueConfig::find(std::string_view key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void KeyValueConfig::set(const std::string& key, std::string value) {
  auto& e = entries_[key];
  e.value = std::move(value);
}

std::vector<std::string> sweep_targets(std::string_view parameter) {
  const auto& known = known_keys();
  const std::string p(parameter);
  if (p.starts_with("party.")) {
    const auto rest = p.substr(6);
    std::vector<std::string> out = {"party_A." + rest, "party_B." + rest};
    if (std::find(known.begin(), known.end(), out[0]) != known.end()) return out;
  } else if (std::find(known.begin(), known.end(), p) != known.end() && !p.starts_with("sweep.")) {
    return {p};
  }
  throw ConfigError({"sweep.parameter: unknown parameter path '" + p + "'"});
}

void validate(const Scenario& s, Diagnostics& diag) {
  physics::validate(s.source, "source", diag);
  protocol::validate(s.party_a, s.source, "party_A", diag);
  protocol::validate(s.party_b, s.source, "party_B", diag);
  channel::validate(s.channel, "channel", diag);
  adversary::validate(s.adversary, "adversary", diag);

  if (s.party_a.narrow_low.center_frequency != s.party_b.narrow_low.center_frequency ||
      s.party_a.narrow_high.center_frequency != s.party_b.narrow_high.center_frequency)
    diag.error("party_B.narrow_low.center_frequency: both parties must use the same two lines");
  if (s.n_rounds < 1) diag.error("run.n_rounds: must be >= 1");
  if (!(s.threshold > 0.0)) diag.error("run.threshold: must be > 0");
  if (s.histogram_bins < 1) diag.error("run.histogram_bins: must be >= 1");
  if (s.n_trials < 1) diag.error("run.n_trials: must be >= 1");
  if (s.threads < 1) diag.error("run.threads: must be >= 1");
  if (s.sweep) {
    if (s.sweep->values.empty()) diag.error("sweep.values: must list at least one value");
    try {
      sweep_targets(s.sweep->parameter);
    } catch (const ConfigError& e) {
      for (const auto& i : e.issues()) diag.error(i);
    }
  }
}

Scenario build_scenario(const KeyValueConfig& cfg) {
  Diagnostics diag;
  Reader r(cfg, diag);
  Scenario s;

  s.source.sum_frequency = r.number("source.sum_frequency", std::nullopt);
  s.source.kind = r.choice("source.kind", physics::SourceKind::biphoton,
                           {{"biphoton", physics::SourceKind::biphoton},
                            {"dual_single_photon", physics::SourceKind::dual_single_photon}});
  s.source.emission_time_jitter = r.number("source.emission_time_jitter", 0.0);
  s.source.spectral_width = r.number("source.spectral_width", physics::SourceSpec{}.spectral_width);

  s.party_a = read_party(r, "party_A", s.source.sum_frequency, 1);
  s.party_b = read_party(r, "party_B", s.source.sum_frequency, 2);

  s.channel.distance_a = r.number("channel.distance_A", 0.0);
  s.channel.distance_b = r.number("channel.distance_B", 0.0);
  s.channel.light_speed = r.number("channel.light_speed", kDefaultLightSpeed);
  s.channel.timing_resolution = r.number("channel.timing_resolution", kDefaultTimingResolution);

  auto& adv = s.adversary;
  adv.enabled = r.boolean("adversary.enabled", false);
  adv.tapped_arm = r.choice("adversary.tapped_arm", channel::Party::B,
                            {{"A", channel::Party::A}, {"B", channel::Party::B}});
  const double gamma_star =
      r.number("adversary.bandwidth", adv.enabled ? std::nullopt : std::optional<double>(1e5));
  const double eta_star = r.number("adversary.efficiency", 1.0);
  adv.detector_low = {r.number("adversary.center_low", s.party_a.narrow_low.center_frequency),
                      gamma_star, eta_star};
  adv.detector_high = {r.number("adversary.center_high", s.party_a.narrow_high.center_frequency),
                       gamma_star, eta_star};
  adv.strategy = r.choice("adversary.strategy", adversary::Strategy::narrowband_intercept,
                          {{"narrowband_intercept", adversary::Strategy::narrowband_intercept},
                           {"wideband_intercept", adversary::Strategy::wideband_intercept}});
  adv.resend_on_miss = r.boolean("adversary.resend_on_miss", true);
  adv.delay_model = r.choice("adversary.delay_model", adversary::DelayModel::exponential,
                             {{"exponential", adversary::DelayModel::exponential},
                              {"floor", adversary::DelayModel::floor}});

  s.n_rounds = r.integer("run.n_rounds", std::nullopt);
  // 10 / gamma_wide puts the honest per-round false alarm at e^-20.
  const double gamma_wide = std::min(s.party_a.wide.bandwidth, s.party_b.wide.bandwidth);
  s.threshold = r.number("run.threshold", gamma_wide > 0.0 ? 10.0 / gamma_wide : 0.0);
  s.seed = r.integer("run.seed", 1);
  s.decision_rule = r.choice("run.decision_rule", stats::DecisionRule::single_exceedance,
                             {{"single_exceedance", stats::DecisionRule::single_exceedance},
                              {"mean_shift", stats::DecisionRule::mean_shift}});
  s.histogram_bins = r.integer("run.histogram_bins", 20);
  s.n_trials = r.integer("run.n_trials", 100);
  s.threads = static_cast<unsigned>(r.integer("run.threads", 1));

  if (r.has("sweep.parameter") || r.has("sweep.values")) {
    SweepSpec sw;
    if (const auto* p = cfg.find("sweep.parameter"))
      sw.parameter = p->value;
    else
      diag.error(cfg.source_name() + ": sweep.parameter: required when sweep.values is set");
    if (const auto* v = cfg.find("sweep.values")) sw.values = split_list(v->value);
    s.sweep = std::move(sw);
  }

  Diagnostics inv;
  validate(s, inv);
  for (const auto& e : inv.errors) diag.error(locate(cfg, e));
  for (const auto& w : inv.warnings) s.warnings.push_back(locate(cfg, w));
  throw_if_errors(diag);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return build_scenario(KeyValueConfig::load(path));
}

Scenario reference_baseline() {
  Scenario s;
  s.source = {.sum_frequency = 2.0e15,
              .kind = physics::SourceKind::biphoton,
              .emission_time_jitter = 0.0,
              .spectral_width = 1.0e13};
  protocol::PartyConfig p;
  p.narrow_low = {999999999950000.0, 1.0e2, 1.0};
  p.narrow_high = {1000000000050000.0, 1.0e2, 1.0};
  p.wide = {1.0e15, 1.0e9, 1.0};
  p.p_wide = 0.5;
  s.party_a = p;
  s.party_a.rng_seed = 1;
  s.party_b = p;
  s.party_b.rng_seed = 2;
  s.channel = {.distance_a = 10000.0,
               .distance_b = 12000.0,
               .light_speed = kDefaultLightSpeed,
               .timing_resolution = kDefaultTimingResolution};
  s.adversary.enabled = false;
  s.adversary.tapped_arm = channel::Party::B;
  s.adversary.detector_low = {p.narrow_low.center_frequency, 1.0e5, 1.0};
  s.adversary.detector_high = {p.narrow_high.center_frequency, 1.0e5, 1.0};
  s.n_rounds = 200;
  s.threshold = 1.0e-8;
  s.seed = 1;
  return s;
}

}  // namespace teqkd::scenario
