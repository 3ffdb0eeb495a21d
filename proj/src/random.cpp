#include "dpbandit/random.hpp"

#include <array>

namespace dpbandit {

namespace {

std::mt19937_64 seeded_engine(const StreamKey& key) {
  const std::array<std::uint32_t, 8> words = {
      static_cast<std::uint32_t>(key.base_seed),
      static_cast<std::uint32_t>(key.base_seed >> 32),
      static_cast<std::uint32_t>(key.rep),
      static_cast<std::uint32_t>(key.rep >> 32),
      static_cast<std::uint32_t>(key.arm),
      static_cast<std::uint32_t>(key.arm >> 32),
      static_cast<std::uint32_t>(key.purpose),
      0x6470626eu,  // "dpbn"
  };
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(const StreamKey& key) : engine_(seeded_engine(key)) {}

}  // namespace dpbandit
