#pragma once

#include <array>
#include <cstdint>

namespace bellwright::simulate {

// Philox 4x32-10: a stateless counter-based block generator. Each block is a
// pure function of (counter, key), so trials can be sampled in any order and
// on any number of threads with identical results.
struct Philox4x32 {
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      std::array<std::uint32_t, 4> next = {
          static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
          static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
          static_cast<std::uint32_t>(p0),
      };
      ctr = next;
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

// The two uniform 64-bit draws a trial consumes, keyed by
// (seed, substream index, trial index within the substream).
struct TrialDraws {
  std::uint64_t first;
  std::uint64_t second;
};

inline TrialDraws trial_draws(std::uint64_t seed, std::uint32_t substream,
                              std::uint64_t trial) {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(trial),
      static_cast<std::uint32_t>(trial >> 32),
      substream,
      0u,
  };
  std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed),
      static_cast<std::uint32_t>(seed >> 32),
  };
  auto out = Philox4x32::block(ctr, key);
  return TrialDraws{
      (static_cast<std::uint64_t>(out[0]) << 32) | out[1],
      (static_cast<std::uint64_t>(out[2]) << 32) | out[3],
  };
}

}  // namespace bellwright::simulate
