#include "teqkd/channel.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace teqkd::channel {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string at(std::string_view path, std::string_view field) {
  std::string s(path);
  if (!s.empty()) s += '.';
  s += field;
  return s;
}

std::string quoted(std::string_view s) { return ordered_json(std::string(s)).dump(); }

std::size_t index_of(Party p) { return p == Party::A ? 0 : 1; }

std::size_t phase_of(const Payload& p) {
  if (std::holds_alternative<TestDisclosure>(p)) return 1;
  if (std::holds_alternative<VerdictAnnouncement>(p)) return 2;
  return 0;
}

}  // namespace

void validate(const ChannelSpec& ch, std::string_view path, Diagnostics& diag) {
  if (!(std::isfinite(ch.distance_a) && ch.distance_a >= 0.0))
    diag.error(at(path, "distance_A") + ": must be finite and >= 0");
  if (!(std::isfinite(ch.distance_b) && ch.distance_b >= 0.0))
    diag.error(at(path, "distance_B") + ": must be finite and >= 0");
  if (!(std::isfinite(ch.light_speed) && ch.light_speed > 0.0))
    diag.error(at(path, "light_speed") + ": must be finite and > 0");
  if (!(std::isfinite(ch.timing_resolution) && ch.timing_resolution >= 0.0))
    diag.error(at(path, "timing_resolution") + ": must be finite and >= 0");
}

Seconds reduce_time(Seconds t0, Meters distance, MetersPerSecond light_speed) {
  return t0 - distance / light_speed;
}

Seconds quantize(Seconds t, Seconds resolution) {
  if (resolution <= 0.0) return t;
  return std::round(t / resolution) * resolution;
}

std::string format_wire_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kWireDigits, x);
  return buf;
}

double to_wire_precision(double t) { return std::strtod(format_wire_number(t).c_str(), nullptr); }

std::string_view to_string(Party p) { return p == Party::A ? "A" : "B"; }
std::string_view to_string(DetectorClass c) { return c == DetectorClass::wide ? "wide" : "narrow"; }
std::string_view to_string(PublishedVerdict v) {
  return v == PublishedVerdict::clean ? "clean" : "compromised";
}

PublicMessage PublicMessage::disclosure(std::uint64_t round, Party sender, Seconds time) {
  return PublicMessage{round, sender, TestDisclosure{to_wire_precision(time)}};
}

Transcript::Transcript(const Transcript& other) {
  std::lock_guard lock(other.mu_);
  messages_ = other.messages_;
  last_round_ = other.last_round_;
}

Transcript& Transcript::operator=(const Transcript& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  messages_ = other.messages_;
  last_round_ = other.last_round_;
  return *this;
}

void Transcript::exchange(PublicMessage msg) {
  std::lock_guard lock(mu_);
  auto& last = last_round_[index_of(msg.sender)][phase_of(msg.payload)];
  if (last && msg.round < *last) {
    throw OrderingViolation("round index regressed for sender " +
                            std::string(to_string(msg.sender)) + ": " + std::to_string(msg.round) +
                            " after " + std::to_string(*last));
  }
  last = msg.round;
  messages_.push_back(std::move(msg));
}

std::vector<PublicMessage> Transcript::snapshot() const {
  std::lock_guard lock(mu_);
  return messages_;
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mu_);
  return messages_.size();
}

std::string encode(const PublicMessage& msg) {
  struct Visitor {
    std::pair<std::string_view, std::string> operator()(const ClassAnnouncement& p) const {
      return {"class", quoted(to_string(p.detector))};
    }
    std::pair<std::string_view, std::string> operator()(const FiredAnnouncement& p) const {
      return {"fired", p.fired ? "true" : "false"};
    }
    std::pair<std::string_view, std::string> operator()(const TestDisclosure& p) const {
      return {"disclosure", format_wire_number(p.time)};
    }
    std::pair<std::string_view, std::string> operator()(const VerdictAnnouncement& p) const {
      return {"verdict", quoted(to_string(p.verdict))};
    }
  };
  auto [kind, value] = std::visit(Visitor{}, msg.payload);
  return wire_record(msg.round, to_string(msg.sender), kind, value);
}

PublicMessage decode(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw WireFormatError(std::string("malformed record: ") + e.what());
  }
  static constexpr std::array<std::string_view, 4> kFields{"round", "sender", "kind", "value"};
  if (!j.is_object() || j.size() != kFields.size())
    throw WireFormatError("record must be an object with exactly {round, sender, kind, value}");
  std::size_t i = 0;
  for (const auto& [k, v] : j.items()) {
    if (k != kFields[i++]) throw WireFormatError("unexpected field order at '" + k + "'");
  }
  const auto& round = j["round"];
  const auto& sender = j["sender"];
  const auto& kind = j["kind"];
  const auto& value = j["value"];
  if (!round.is_number_unsigned()) throw WireFormatError("round must be a non-negative integer");
  if (!sender.is_string()) throw WireFormatError("sender must be a string");

  PublicMessage msg;
  msg.round = round.get<std::uint64_t>();
  const auto s = sender.get<std::string>();
  if (s == "A")
    msg.sender = Party::A;
  else if (s == "B")
    msg.sender = Party::B;
  else
    throw WireFormatError("unknown sender '" + s + "'");

  const auto k = kind.is_string() ? kind.get<std::string>() : std::string();
  if (k == "class" && value.is_string()) {
    const auto v = value.get<std::string>();
    if (v != "wide" && v != "narrow") throw WireFormatError("bad detector class '" + v + "'");
    msg.payload = ClassAnnouncement{v == "wide" ? DetectorClass::wide : DetectorClass::narrow};
  } else if (k == "fired" && value.is_boolean()) {
    msg.payload = FiredAnnouncement{value.get<bool>()};
  } else if (k == "disclosure" && value.is_number()) {
    msg.payload = TestDisclosure{value.get<double>()};
  } else if (k == "verdict" && value.is_string()) {
    const auto v = value.get<std::string>();
    if (v != "clean" && v != "compromised") throw WireFormatError("bad verdict '" + v + "'");
    msg.payload = VerdictAnnouncement{v == "clean" ? PublishedVerdict::clean
                                                   : PublishedVerdict::compromised};
  } else {
    throw WireFormatError("unknown kind/value combination for kind '" + k + "'");
  }
  return msg;
}

void write_transcript(std::ostream& out, const Transcript& transcript) {
  for (const auto& m : transcript.snapshot()) out << encode(m) << '\n';
}

Transcript read_transcript(std::istream& in) {
  Transcript t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.exchange(decode(line));
  }
  return t;
}

void WireObject::key(std::string_view k) {
  if (!body_.empty()) body_ += ',';
  body_ += quoted(k);
  body_ += ':';
}

WireObject& WireObject::field(std::string_view k, double v) {
  key(k);
  body_ += format_wire_number(v);
  return *this;
}

WireObject& WireObject::field(std::string_view k, std::int64_t v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

WireObject& WireObject::field(std::string_view k, std::uint64_t v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

WireObject& WireObject::field(std::string_view k, bool v) {
  key(k);
  body_ += v ? "true" : "false";
  return *this;
}

WireObject& WireObject::field(std::string_view k, std::string_view v) {
  key(k);
  body_ += quoted(v);
  return *this;
}

WireObject& WireObject::null_field(std::string_view k) {
  key(k);
  body_ += "null";
  return *this;
}

std::string wire_record(std::uint64_t round, std::string_view sender, std::string_view kind,
                        std::string_view value_json) {
  std::string out = "{\"round\":";
  out += std::to_string(round);
  out += ",\"sender\":";
  out += quoted(sender);
  out += ",\"kind\":";
  out += quoted(kind);
  out += ",\"value\":";
  out += value_json;
  out += '}';
  return out;
}

}  // namespace teqkd::channel
