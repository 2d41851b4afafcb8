#pragma once

#include <array>
#include <cstdint>

namespace levyham {

/// Philox4x64-10 counter-based generator. A stream is identified by a
/// 128-bit key; output block i is a pure function of (key, i), so streams
/// can be consumed from any thread in any order with identical results.
struct Philox4x64 {
  static std::array<std::uint64_t, 4> block(
      const std::array<std::uint64_t, 2>& key,
      const std::array<std::uint64_t, 4>& counter);
};

std::uint64_t splitmix64(std::uint64_t x);

/// Identifies the ensemble member a stream belongs to. Regenerating with
/// the same record reproduces every draw bit-exactly.
struct StreamId {
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;

  bool operator==(const StreamId&) const = default;
};

/// Sequential view of one Philox stream. `substream` separates independent
/// purposes within a path (Brownian draws vs jump draws, etc.).
class RandomStream {
 public:
  RandomStream(StreamId id, std::uint64_t substream);

  std::uint64_t next_u64();
  /// Uniform on (0, 1); never returns 0 or 1.
  double uniform();
  /// Standard normal via Box-Muller (fixed draw count per pair).
  double gaussian();
  /// Exponential with unit rate.
  double exponential();

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 4> block_{};
  int block_pos_ = 4;
  double cached_gaussian_ = 0.0;
  bool have_cached_gaussian_ = false;
};

}  // namespace levyham
