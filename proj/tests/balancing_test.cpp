#include <doctest.h>

#include <bit>
#include <numeric>
#include <vector>

#include "census/balancing.hpp"
#include "census/rng.hpp"

using namespace census;

TEST_CASE("pow2_balance examples") {
  CHECK(pow2_balance(3, kEmpty, false, false) == std::pair{2, 2});
  CHECK(pow2_balance(0, kEmpty, false, false) == std::pair{0, kEmpty});
  CHECK(pow2_balance(2, 2, false, false) == std::pair{2, 2});
  CHECK(pow2_balance(kEmpty, 4, false, false) == std::pair{3, 3});
  CHECK(pow2_balance(3, kEmpty, true, false) == std::pair{3, kEmpty});
  CHECK(pow2_balance(3, kEmpty, false, true) == std::pair{3, kEmpty});
}

namespace {

std::uint64_t mass(LogLoad k) { return k < 0 ? 0 : std::uint64_t{1} << k; }

}  // namespace

TEST_CASE("pow2_balance conserves the total load and keeps loads powers of two") {
  auto rng = make_stream(3);
  std::vector<LogLoad> ks(40, kEmpty);
  ks[0] = 20;
  const std::uint64_t total = mass(ks[0]);
  for (int s = 0; s < 50000; ++s) {
    const auto i = rng.below(ks.size());
    auto j = rng.below(ks.size() - 1);
    if (j >= i) ++j;
    const auto [a, b] = pow2_balance(ks[i], ks[j], false, false);
    ks[i] = a;
    ks[j] = b;
    std::uint64_t sum = 0;
    for (const auto k : ks) {
      REQUIRE(k >= kEmpty);
      sum += mass(k);
    }
    REQUIRE(sum == total);
  }
}

TEST_CASE("classical_balance examples") {
  CHECK(classical_balance(5U, 2U) == std::pair{3U, 4U});
  CHECK(classical_balance(4U, 4U) == std::pair{4U, 4U});
  CHECK(classical_balance(0U, 7U) == std::pair{3U, 4U});
}

TEST_CASE("classical_balance conserves, differs by at most one, and is overflow safe") {
  auto rng = make_stream(9);
  for (int s = 0; s < 20000; ++s) {
    const std::uint64_t a = rng.next();
    const std::uint64_t b = rng.next();
    const auto [x, y] = classical_balance(a, b);
    CHECK(x <= y);
    CHECK(y - x <= 1);
    CHECK(static_cast<unsigned __int128>(x) + y == static_cast<unsigned __int128>(a) + b);
  }
  const unsigned __int128 big = ~static_cast<unsigned __int128>(0);
  const auto [x, y] = classical_balance(big, big - 1);
  CHECK(x == big - 1);
  CHECK(y == big);
}
