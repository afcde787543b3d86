#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace merton {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Each (key, counter) pair maps to four independent 32-bit words, so a
/// stream is fully determined by its key and nothing is shared between
/// streams. Satisfies UniformRandomBitGenerator with 64-bit output.
class Philox4x32 {
public:
  using result_type = std::uint64_t;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (used_ >= 2) {
      block_ = generate(counter_, key_);
      increment();
      used_ = 0;
    }
    const auto lo = static_cast<result_type>(block_[2 * used_]);
    const auto hi = static_cast<result_type>(block_[2 * used_ + 1]);
    ++used_;
    return (hi << 32) | lo;
  }

  static std::array<std::uint32_t, 4> generate(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

private:
  void increment() noexcept {
    if (++counter_[0] == 0)
      ++counter_[1];
  }

  static constexpr std::uint32_t kMul0 = 0xD2511F53;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 2;
};

} // namespace merton
