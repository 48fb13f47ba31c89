#pragma once

// Propagation timing and the authenticated public channel.
//
// Wire format: one record per line, a JSON object whose fields always appear
// in the order {round, sender, kind, value}. Times are written as decimal
// seconds with 12 significant digits. The same line format carries the public
// transcript and the simulator's event log.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "teqkd/diagnostics.hpp"
#include "teqkd/units.hpp"

namespace teqkd::channel {

struct ChannelSpec {
  Meters distance_a = 0.0;  // source to party A
  Meters distance_b = 0.0;  // source to party B
  MetersPerSecond light_speed = kDefaultLightSpeed;
  Seconds timing_resolution = kDefaultTimingResolution;  // 0 disables quantization

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

void validate(const ChannelSpec& ch, std::string_view path, Diagnostics& diag);

/// Reduced registration moment t0 - distance / light_speed.
Seconds reduce_time(Seconds t0, Meters distance, MetersPerSecond light_speed);

/// Rounds to the nearest multiple of `resolution`; identity when resolution is 0.
Seconds quantize(Seconds t, Seconds resolution);

/// Nearest double to the 12-significant-digit decimal rendering of `t`.
/// Values passed through this survive a wire round trip bit-exactly.
double to_wire_precision(double t);

/// "%.12g" rendering used for every floating-point value on the wire.
std::string format_wire_number(double x);

enum class Party { A, B };
enum class DetectorClass { wide, narrow };
enum class PublishedVerdict { clean, compromised };

std::string_view to_string(Party p);
std::string_view to_string(DetectorClass c);
std::string_view to_string(PublishedVerdict v);

/// Payload types. There is deliberately no way to put a narrow-band center
/// frequency into a detector-class announcement.
struct ClassAnnouncement {
  DetectorClass detector;
  friend bool operator==(const ClassAnnouncement&, const ClassAnnouncement&) = default;
};
struct FiredAnnouncement {
  bool fired;
  friend bool operator==(const FiredAnnouncement&, const FiredAnnouncement&) = default;
};
/// A party's own reduced registration time in a wide-wide test round.
struct TestDisclosure {
  Seconds time;
  friend bool operator==(const TestDisclosure&, const TestDisclosure&) = default;
};
struct VerdictAnnouncement {
  PublishedVerdict verdict;
  friend bool operator==(const VerdictAnnouncement&, const VerdictAnnouncement&) = default;
};

using Payload =
    std::variant<ClassAnnouncement, FiredAnnouncement, TestDisclosure, VerdictAnnouncement>;

struct PublicMessage {
  std::uint64_t round = 0;
  Party sender = Party::A;
  Payload payload;

  /// Builds a disclosure with the time already at wire precision.
  static PublicMessage disclosure(std::uint64_t round, Party sender, Seconds time);

  friend bool operator==(const PublicMessage&, const PublicMessage&) = default;
};

class OrderingViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class WireFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append-only, totally ordered log of public messages. Appends may come from
/// several threads; readers get a consistent prefix via snapshot().
class Transcript {
 public:
  Transcript() = default;
  Transcript(const Transcript& other);
  Transcript& operator=(const Transcript& other);

  /// Appends `msg`. Throws OrderingViolation if its round index is lower than
  /// the previous message from the same sender in the same phase. Phases are
  /// announcements (class and fired), test disclosures and verdicts; each
  /// phase walks the rounds in order.
  void exchange(PublicMessage msg);

  std::vector<PublicMessage> snapshot() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

 private:
  mutable std::mutex mu_;
  std::vector<PublicMessage> messages_;
  // [sender][phase]
  std::array<std::array<std::optional<std::uint64_t>, 3>, 2> last_round_{};
};

std::string encode(const PublicMessage& msg);
/// Throws WireFormatError on malformed input or out-of-order fields.
PublicMessage decode(std::string_view line);

void write_transcript(std::ostream& out, const Transcript& transcript);
Transcript read_transcript(std::istream& in);

/// Builds the `value` object of an event-log record with fields in insertion
/// order. Doubles go through format_wire_number.
class WireObject {
 public:
  WireObject& field(std::string_view key, double v);
  WireObject& field(std::string_view key, std::int64_t v);
  WireObject& field(std::string_view key, std::uint64_t v);
  WireObject& field(std::string_view key, int v) { return field(key, static_cast<std::int64_t>(v)); }
  WireObject& field(std::string_view key, bool v);
  WireObject& field(std::string_view key, std::string_view v);
  WireObject& field(std::string_view key, const char* v) { return field(key, std::string_view(v)); }
  WireObject& null_field(std::string_view key);

  std::string str() const { return "{" + body_ + "}"; }

 private:
  void key(std::string_view k);
  std::string body_;
};

/// One full wire line (without trailing newline). `value_json` is inserted verbatim.
std::string wire_record(std::uint64_t round, std::string_view sender, std::string_view kind,
                        std::string_view value_json);

}  // namespace teqkd::channel
