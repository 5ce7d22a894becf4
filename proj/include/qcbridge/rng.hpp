#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The stream is a
// pure function of (key, counter): no hidden state beyond the counter, so
// independent chains are just different stream indices under one key.

#include <array>
#include <cstdint>
#include <limits>

namespace qcbridge {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

class CounterRng {
 public:
  using result_type = std::uint64_t;

  // Streams with the same seed and different `stream` never share a counter.
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t blocks_drawn() const noexcept { return block_; }

 private:
  PhiloxKey key_;
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace qcbridge
