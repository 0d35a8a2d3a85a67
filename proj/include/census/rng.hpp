#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

namespace census {

/// SplitMix64 (Steele, Lea, Flood 2014). A counter-based generator: the state
/// is a Weyl sequence and every output is a bijective mix of the counter, so a
/// trace is reproducible bit-for-bit on any platform.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }
  constexpr std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
  constexpr std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// One independent stream per (seed, run id).
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t run_id = 0) {
  return SplitMix64(SplitMix64::mix(seed ^ 0x243F6A8885A308D3ULL) ^
                    SplitMix64::mix(run_id + 0x13198A2E03707344ULL));
}

/// Fair bits drawn from a stream, 64 at a time.
class BitSource {
 public:
  explicit BitSource(SplitMix64& rng) : rng_(&rng) {}
  bool next() {
    if (left_ == 0) {
      word_ = rng_->next();
      left_ = 64;
    }
    const bool bit = word_ & 1U;
    word_ >>= 1;
    --left_;
    return bit;
  }

 private:
  SplitMix64* rng_;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

/// Uniform ordered pair (initiator, responder), initiator != responder.
inline std::pair<std::size_t, std::size_t> sample_ordered_pair(SplitMix64& rng, std::size_t n) {
  if (n < 2) throw std::invalid_argument("population needs at least two agents");
  const std::uint64_t r = rng.below(static_cast<std::uint64_t>(n) * (n - 1));
  const std::size_t i = r / (n - 1);
  std::size_t j = r % (n - 1);
  if (j >= i) ++j;
  return {i, j};
}

}  // namespace census
