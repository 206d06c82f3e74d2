#pragma once
// ============================================================================
// rng.hpp -- Philox4x32-10 counter-based generator
//
// Every Monte Carlo trial owns an independent stream addressed by
// (seed, stream tag, trial index), so results do not depend on how trials
// are scheduled across threads.
// ============================================================================
#include <array>
#include <cstdint>
#include <limits>

namespace edsense {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten rounds of the Philox 4x32 bijection.
constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53U;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// UniformRandomBitGenerator over one (seed, stream, substream) address.
/// Counter word 0 is the block index; words 1..3 hold the address.
class CounterRng {
 public:
  using result_type = std::uint32_t;

  CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t substream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0U, stream, static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (used_ == 4) {
      block_ = philox4x32_10(ctr_, key_);
      ++ctr_[0];
      used_ = 0;
    }
    return block_[used_++];
  }

 private:
  PhiloxKey key_;
  PhiloxCounter ctr_;
  PhiloxCounter block_{};
  int used_ = 4;
};

}  // namespace edsense
