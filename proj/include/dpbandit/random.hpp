#pragma once

#include <cstdint>
#include <random>

namespace dpbandit {

/// What a random stream is used for. Part of the stream key, so adding a new
/// purpose never shifts the draws of an existing one.
enum class StreamPurpose : std::uint32_t {
  kReward = 1,
  kTreeNoise = 2,
  kEliminationNoise = 3,
  kLocalNoise = 4,
  kPolicy = 5,
  kTest = 99,
};

struct StreamKey {
  std::uint64_t base_seed = 0;
  std::uint64_t rep = 0;
  std::uint64_t arm = 0;
  StreamPurpose purpose = StreamPurpose::kTest;
};

/// A seeded 64-bit stream keyed by (base seed, repetition, arm, purpose).
/// Streams with different keys are independent; the same key always
/// reproduces the same sequence.
class RandomStream {
 public:
  explicit RandomStream(const StreamKey& key);
  explicit RandomStream(std::uint64_t seed)
      : RandomStream(StreamKey{seed, 0, 0, StreamPurpose::kTest}) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1): 53 random bits, offset by half an
  /// ulp, so neither endpoint is reachable.
  double uniform_open() {
    const auto bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dpbandit
