#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace geonarrow {

/// Philox4x32-10 (Salmon et al., SC'11). Stateless: a block is a pure
/// function of (key, counter), so streams replay identically on any platform.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  static constexpr const char* kAlgorithmId = "philox4x32-10/box-muller/v1";

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Block block(std::uint64_t index, std::uint32_t stream) const {
    Block ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream, 0u};
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, k);
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    return ctr;
  }

 private:
  static Block single_round(const Block& c, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  std::array<std::uint32_t, 2> key_;
};

/// Sequential draws from one Philox stream.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t stream) : gen_(seed), stream_(stream) {}

  /// Uniform on (0, 1), 53 bits.
  double uniform() {
    if (cached_words_ < 2) refill();
    const std::uint64_t hi = words_[4 - cached_words_];
    const std::uint64_t lo = words_[5 - cached_words_];
    cached_words_ -= 2;
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second variate of each pair is kept.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t blocks_used() const { return counter_; }

 private:
  void refill() {
    words_ = gen_.block(counter_++, stream_);
    cached_words_ = 4;
  }

  Philox4x32 gen_;
  std::uint32_t stream_;
  std::uint64_t counter_ = 0;
  Philox4x32::Block words_{};
  int cached_words_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace geonarrow
