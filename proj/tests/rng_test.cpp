#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "census/rng.hpp"

using namespace census;

namespace {

// Upper 0.1% point of chi-square with df degrees of freedom (Wilson-Hilferty).
double chi2_critical(int df) {
  const double z = 3.090;
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1 - a + z * std::sqrt(a), 3);
}

double chi2_uniform(const std::vector<std::uint64_t>& counts, std::uint64_t samples) {
  const double expected = static_cast<double>(samples) / static_cast<double>(counts.size());
  double stat = 0;
  for (const auto c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

}  // namespace

TEST_CASE("n=2 yields both ordered pairs with probability 1/2") {
  auto rng = make_stream(42);
  std::uint64_t first = 0;
  constexpr int kSamples = 100000;
  for (int s = 0; s < kSamples; ++s) {
    const auto [i, j] = sample_ordered_pair(rng, 2);
    REQUIRE(i != j);
    REQUIRE(i < 2);
    REQUIRE(j < 2);
    first += i == 0 ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(first) / kSamples - 0.5) < 0.01);
}

TEST_CASE("n=3: each of the six ordered pairs has frequency 1/6 +- 0.01") {
  auto rng = make_stream(7);
  std::vector<std::uint64_t> counts(9, 0);
  constexpr std::uint64_t kSamples = 60000;
  for (std::uint64_t s = 0; s < kSamples; ++s) {
    const auto [i, j] = sample_ordered_pair(rng, 3);
    REQUIRE(i != j);
    ++counts[i * 3 + j];
  }
  std::vector<std::uint64_t> off_diagonal;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(counts[i * 3 + i] == 0);
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(std::abs(static_cast<double>(counts[i * 3 + j]) / kSamples - 1.0 / 6) < 0.01);
      off_diagonal.push_back(counts[i * 3 + j]);
    }
  }
  CHECK(chi2_uniform(off_diagonal, kSamples) < chi2_critical(5));
}

TEST_CASE("ordered pairs pass a chi-square test for n up to 8") {
  for (std::size_t n = 2; n <= 8; ++n) {
    auto rng = make_stream(1000 + n);
    const std::size_t cells = n * (n - 1);
    std::vector<std::uint64_t> counts(cells, 0);
    constexpr std::uint64_t kSamples = 200000;
    for (std::uint64_t s = 0; s < kSamples; ++s) {
      const auto [i, j] = sample_ordered_pair(rng, n);
      const std::size_t jj = j > i ? j - 1 : j;
      ++counts[i * (n - 1) + jj];
    }
    CAPTURE(n);
    CHECK(chi2_uniform(counts, kSamples) < chi2_critical(static_cast<int>(cells) - 1));
  }
}

TEST_CASE("below() is unbiased for small bounds") {
  for (const std::uint64_t bound : {3ULL, 5ULL, 7ULL}) {
    auto rng = make_stream(bound);
    std::vector<std::uint64_t> counts(bound, 0);
    constexpr std::uint64_t kSamples = 100000;
    for (std::uint64_t s = 0; s < kSamples; ++s) ++counts[rng.below(bound)];
    CHECK(chi2_uniform(counts, kSamples) < chi2_critical(static_cast<int>(bound) - 1));
  }
}

TEST_CASE("same seed and n replay the same pair sequence") {
  auto a = make_stream(99, 5);
  auto b = make_stream(99, 5);
  auto c = make_stream(99, 6);
  bool differs = false;
  for (int s = 0; s < 1000; ++s) {
    const auto pa = sample_ordered_pair(a, 17);
    CHECK(pa == sample_ordered_pair(b, 17));
    differs = differs || pa != sample_ordered_pair(c, 17);
  }
  CHECK(differs);
}

TEST_CASE("n < 2 is rejected") {
  auto rng = make_stream(1);
  CHECK_THROWS_AS(sample_ordered_pair(rng, 1), std::invalid_argument);
}

TEST_CASE("bit source is fair") {
  auto rng = make_stream(3);
  BitSource bits(rng);
  int ones = 0;
  constexpr int kSamples = 100000;
  for (int s = 0; s < kSamples; ++s) ones += bits.next() ? 1 : 0;
  CHECK(std::abs(static_cast<double>(ones) / kSamples - 0.5) < 0.01);
}
