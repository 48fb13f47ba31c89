#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace teqkd {

/// Mixes a base seed with a list of tags into an independent 64-bit seed.
/// Used to key per-trial, per-round and per-party streams so that results do
/// not depend on execution order or thread count.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

/// Deterministic pseudo-random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Conversion to doubles is done here instead of through
/// std::uniform_real_distribution because the latter is implementation-defined
/// and would break byte-identical logs across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform_open();

  /// Uniform on [0, 1).
  double uniform();

  bool bernoulli(double p) { return uniform() < p; }

  /// Exponential variate with the given rate (mean 1/rate).
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

// Stream tags used by the simulation. Kept here so every module agrees.
namespace stream_tag {
inline constexpr std::uint64_t kPhysics = 0x7068797369637331ULL;
inline constexpr std::uint64_t kAdversary = 0x6164766572736172ULL;
inline constexpr std::uint64_t kPartyChoice = 0x63686f6963657321ULL;
inline constexpr std::uint64_t kTrial = 0x747269616c736565ULL;
inline constexpr std::uint64_t kSweepRow = 0x7377656570726f77ULL;
}  // namespace stream_tag

}  // namespace teqkd
