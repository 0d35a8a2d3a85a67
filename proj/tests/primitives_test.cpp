#include <doctest.h>

#include <cmath>
#include <vector>

#include "census/basic_suites.hpp"
#include "census/primitives.hpp"
#include "census/rng.hpp"

using namespace census;

TEST_CASE("broadcast_step: initiator takes the max, responder unchanged") {
  CHECK(broadcast_step(0, 5) == std::pair{5, 5});
  CHECK(broadcast_step(5, 0) == std::pair{5, 0});
  CHECK(broadcast_step(3, 3) == std::pair{3, 3});
}

TEST_CASE("junta_step examples") {
  SUBCASE("two active agents on one level: initiator climbs") {
    JuntaState u{2, true, true};
    JuntaState v{2, true, true};
    const auto out = junta_step(u, v);
    CHECK(u.level == 3);
    CHECK(out.u_level_raised);
  }
  SUBCASE("active agent meets a higher inactive agent") {
    JuntaState u{1, true, true};
    JuntaState v{3, false, true};
    junta_step(u, v);
    CHECK_FALSE(u.active);
    CHECK_FALSE(u.junta);
  }
  SUBCASE("inactive agent adopts a higher level") {
    JuntaState u{1, false, false};
    JuntaState v{4, false, false};
    junta_step(u, v);
    CHECK(u.level == 4);
  }
  SUBCASE("one-sided mode leaves the responder alone") {
    JuntaState u{0, true, true};
    JuntaState v{0, true, true};
    junta_step(u, v, JuntaMode::one_sided);
    CHECK(u.level == 1);
    CHECK(v == JuntaState{0, true, true});
  }
}

TEST_CASE("junta levels never decrease and inactivity is permanent") {
  auto rng = make_stream(5);
  for (int trial = 0; trial < 20000; ++trial) {
    JuntaState u{static_cast<std::uint8_t>(rng.below(5)), rng.below(2) == 1, rng.below(2) == 1};
    JuntaState v{static_cast<std::uint8_t>(rng.below(5)), rng.below(2) == 1, rng.below(2) == 1};
    const auto u0 = u;
    const auto v0 = v;
    junta_step(u, v);
    CHECK(u.level >= u0.level);
    CHECK(v.level >= v0.level);
    if (!u0.active) CHECK_FALSE(u.active);
    if (!u0.junta) CHECK_FALSE(u.junta);
    CHECK(u.level <= std::max<int>(u0.level, v0.level) + 1);
  }
}

TEST_CASE("clock_step examples with m = 60") {
  const ClockParams p{60, 1U << 16};
  SUBCASE("adopt a clock that is ahead") {
    ClockState u{10, 0};
    ClockState v{12, 0};
    clock_step(u, v, false, p);
    CHECK(u.clock == 12);
  }
  SUBCASE("junta member on an equal clock wraps and ticks") {
    ClockState u{59, 4};
    ClockState v{59, 4};
    const auto t = clock_step(u, v, true, p);
    CHECK(u.clock == 0);
    CHECK(u.phase == 5);
    CHECK(u.first_tick);
    CHECK(t.u_ticked);
  }
  SUBCASE("a clock behind across the wrap window is ignored") {
    ClockState u{5, 0};
    ClockState v{58, 0};
    clock_step(u, v, false, p);
    CHECK(u.clock == 5);
  }
  SUBCASE("stopped clocks do not move") {
    ClockState u{10, 3, false, true};
    ClockState v{12, 3};
    clock_step(u, v, true, p);
    CHECK(u.clock == 10);
  }
  SUBCASE("phase counter saturates at the cap") {
    ClockState u{59, 7};
    ClockState v{59, 7};
    clock_step(u, v, true, ClockParams{60, 7});
    CHECK(u.phase == 7);
    CHECK_FALSE(u.first_tick);
  }
}

TEST_CASE("clock_ahead is a strict half-window relation") {
  for (std::uint32_t m : {2U, 3U, 48U, 60U}) {
    for (std::uint32_t a = 0; a < m; ++a) {
      CHECK_FALSE(clock_ahead(a, a, m));
      for (std::uint32_t b = 0; b < m; ++b) {
        if (clock_ahead(b, a, m) && clock_ahead(a, b, m)) CHECK(2 * ((b + m - a) % m) == m);
      }
    }
  }
}

TEST_CASE("first_tick lasts exactly one interaction") {
  const ClockParams p{48, 1U << 16};
  ClockState u{47, 0};
  ClockState v{47, 0};
  clock_step(u, v, true, p);
  REQUIRE(u.first_tick);
  clock_step(u, v, false, p);
  CHECK_FALSE(u.first_tick);
}

TEST_CASE("clocks_consistent compares unrolled positions") {
  CHECK(clocks_consistent(ClockState{47, 2}, ClockState{1, 3}, 48));
  CHECK_FALSE(clocks_consistent(ClockState{10, 2}, ClockState{10, 3}, 48));
}

TEST_CASE("synthetic coins") {
  CoinState partner{false};
  CHECK(synthetic_coin(partner) == false);
  CHECK(partner.parity == true);
  const bool a = synthetic_coin(partner);
  const bool b = synthetic_coin(partner);
  CHECK(a != b);

  auto rng = make_stream(11);
  std::vector<CoinState> pool(64);
  for (auto& c : pool) c.parity = rng.below(2) == 1;
  int ones = 0;
  constexpr int kDraws = 100000;
  for (int s = 0; s < kDraws; ++s) ones += synthetic_coin(pool[rng.below(pool.size())]) ? 1 : 0;
  CHECK(std::abs(static_cast<double>(ones) / kDraws - 0.5) < 0.01);
}

TEST_CASE("junta process leaves a small junta on the top level") {
  for (const std::uint32_t n : {256U, 1024U, 4096U}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::vector<JuntaSuite::State> fin;
      const auto m = run(JuntaSuite(), n, seed, RunLimits{}, &fin);
      REQUIRE(m.correct);
      int top = 0;
      for (const auto& s : fin) top = std::max<int>(top, s.junta.level);
      std::uint32_t junta = 0;
      for (const auto& s : fin) {
        CHECK(s.junta.level == top);
        junta += s.junta.junta ? 1 : 0;
      }
      CAPTURE(n);
      CHECK(junta >= 1);
      CHECK(junta <= std::sqrt(static_cast<double>(n)) * std::log2(static_cast<double>(n)));
    }
  }
}
