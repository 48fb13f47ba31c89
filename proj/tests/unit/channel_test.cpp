#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "teqkd/channel.hpp"

namespace teqkd::channel {
namespace {

TEST(ReduceTime, SubtractsFlightTime) {
  EXPECT_DOUBLE_EQ(reduce_time(1e-3, 3000.0, 3e8), 1e-3 - 1e-5);
  EXPECT_DOUBLE_EQ(reduce_time(0.0, 0.0, 3e8), 0.0);
  EXPECT_DOUBLE_EQ(reduce_time(1.0, 3e8, 3e8), 0.0);
}

TEST(ReduceTime, RecoversRelativeDelayForAsymmetricArms) {
  // t_B - t_A = T regardless of the two distances.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(0.0, 5e4), delay(-1e-6, 1e-6);
  for (int i = 0; i < 100; ++i) {
    const double ra = dist(rng), rb = dist(rng), t = delay(rng);
    const double arrive_a = ra / 3e8;
    const double arrive_b = rb / 3e8 + t;
    const double rel = reduce_time(arrive_b, rb, 3e8) - reduce_time(arrive_a, ra, 3e8);
    EXPECT_NEAR(rel, t, 1e-18 + 1e-12 * std::abs(t));
  }
}

TEST(Quantize, RoundsToResolutionAndZeroDisables) {
  EXPECT_DOUBLE_EQ(quantize(1.26e-10, 1e-10), 1e-10);
  EXPECT_DOUBLE_EQ(quantize(-3.6e-10, 1e-10), -4e-10);
  EXPECT_EQ(quantize(1.2345e-11, 0.0), 1.2345e-11);
}

TEST(WirePrecision, IsIdempotent) {
  for (double x : {0.0, 1.0 / 3.0, -2.718281828459045e-7, 1e300}) {
    const double w = to_wire_precision(x);
    EXPECT_EQ(to_wire_precision(w), w);
    EXPECT_NEAR(w, x, std::abs(x) * 1e-11);
  }
}

TEST(Wire, EncodesFieldsInFixedOrder) {
  EXPECT_EQ(encode({3, Party::A, ClassAnnouncement{DetectorClass::narrow}}),
            R"({"round":3,"sender":"A","kind":"class","value":"narrow"})");
  EXPECT_EQ(encode({4, Party::B, FiredAnnouncement{true}}),
            R"({"round":4,"sender":"B","kind":"fired","value":true})");
  EXPECT_EQ(encode(PublicMessage::disclosure(5, Party::A, 1.5e-9)),
            R"({"round":5,"sender":"A","kind":"disclosure","value":1.5e-09})");
  EXPECT_EQ(encode({6, Party::A, VerdictAnnouncement{PublishedVerdict::compromised}}),
            R"({"round":6,"sender":"A","kind":"verdict","value":"compromised"})");
}

TEST(Wire, RejectsMalformedRecords) {
  EXPECT_THROW(decode("not json"), WireFormatError);
  EXPECT_THROW(decode(R"({"sender":"A","round":1,"kind":"fired","value":true})"), WireFormatError);
  EXPECT_THROW(decode(R"({"round":1,"sender":"C","kind":"fired","value":true})"), WireFormatError);
  EXPECT_THROW(decode(R"({"round":1,"sender":"A","kind":"line","value":"high"})"), WireFormatError);
  EXPECT_THROW(decode(R"({"round":-1,"sender":"A","kind":"fired","value":true})"), WireFormatError);
}

PublicMessage random_message(std::mt19937_64& rng, std::uint64_t round) {
  const Party sender = rng() % 2 ? Party::A : Party::B;
  std::uniform_real_distribution<double> t(-1e-3, 1e-3);
  switch (rng() % 4) {
    case 0: return {round, sender, ClassAnnouncement{rng() % 2 ? DetectorClass::wide : DetectorClass::narrow}};
    case 1: return {round, sender, FiredAnnouncement{rng() % 2 == 0}};
    case 2: return PublicMessage::disclosure(round, sender, t(rng));
    default:
      return {round, sender,
              VerdictAnnouncement{rng() % 2 ? PublishedVerdict::clean : PublishedVerdict::compromised}};
  }
}

TEST(Wire, DecodeInvertsEncodeForRandomMessages) {
  std::mt19937_64 rng(77);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto m = random_message(rng, rng() % 100000);
    EXPECT_EQ(decode(encode(m)), m) << encode(m);
  }
}

TEST(Wire, TranscriptStreamRoundTrips) {
  std::mt19937_64 rng(3);
  Transcript t;
  for (std::uint64_t r = 0; r < 50; ++r) {
    t.exchange({r, Party::A, ClassAnnouncement{DetectorClass::wide}});
    t.exchange({r, Party::B, FiredAnnouncement{r % 3 == 0}});
  }
  for (std::uint64_t r = 0; r < 50; r += 7) t.exchange(PublicMessage::disclosure(r, Party::A, r * 1e-9));
  std::stringstream ss;
  write_transcript(ss, t);
  EXPECT_EQ(read_transcript(ss).snapshot(), t.snapshot());
}

TEST(Transcript, RejectsRegressingRoundWithinPhase) {
  Transcript t;
  t.exchange({5, Party::A, ClassAnnouncement{DetectorClass::wide}});
  t.exchange({5, Party::A, FiredAnnouncement{true}});
  t.exchange({2, Party::B, ClassAnnouncement{DetectorClass::wide}});
  EXPECT_THROW(t.exchange({4, Party::A, FiredAnnouncement{true}}), OrderingViolation);
  // A later phase starts its own sequence.
  EXPECT_NO_THROW(t.exchange(PublicMessage::disclosure(0, Party::A, 0.0)));
  EXPECT_NO_THROW(t.exchange(PublicMessage::disclosure(0, Party::A, 1e-9)));
  EXPECT_THROW(t.exchange(PublicMessage::disclosure(3, Party::B, 0.0));
               t.exchange(PublicMessage::disclosure(1, Party::B, 0.0)), OrderingViolation);
}

TEST(Transcript, ConcurrentAppendsKeepEveryMessage) {
  Transcript t;
  constexpr int kPerThread = 5000;
  auto writer = [&](Party p) {
    for (std::uint64_t r = 0; r < kPerThread; ++r) t.exchange({r, p, FiredAnnouncement{true}});
  };
  {
    std::jthread a(writer, Party::A), b(writer, Party::B);
  }
  const auto msgs = t.snapshot();
  ASSERT_EQ(msgs.size(), 2u * kPerThread);
  std::uint64_t next[2] = {0, 0};
  for (const auto& m : msgs) {
    auto& n = next[m.sender == Party::A ? 0 : 1];
    ASSERT_EQ(m.round, n);
    ++n;
  }
}

TEST(Transcript, ClassAnnouncementCarriesNoLine) {
  // Narrow-low and narrow-high are indistinguishable on the wire.
  const auto s = encode({0, Party::A, ClassAnnouncement{DetectorClass::narrow}});
  EXPECT_EQ(s.find("low"), std::string::npos);
  EXPECT_EQ(s.find("high"), std::string::npos);
}

TEST(Validation, ChannelRejectsBadSpecs) {
  Diagnostics d;
  validate(ChannelSpec{-1.0, 0.0, 0.0, -1.0}, "channel", d);
  EXPECT_EQ(d.errors.size(), 3u);
}

}  // namespace
}  // namespace teqkd::channel
