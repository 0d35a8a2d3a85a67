#include <doctest.h>

#include "census/acceptance.hpp"
#include "census/exact.hpp"
#include "support.hpp"

using namespace census;
using census::test::about_to_tick;
using census::test::mid_phase;

namespace {

ExactAgent approximating(bool leader, std::uint32_t i, Load128 l) {
  ExactAgent a;
  a.le = FastLeaderState{0, 0, leader, true};
  a.i = i;
  a.l = l;
  return a;
}

ExactAgent refining(bool leader, std::int32_t k, Load128 l, std::uint32_t base) {
  ExactAgent a = approximating(leader, 0, l);
  a.done2 = true;
  a.k = k;
  a.base = base;
  return a;
}

}  // namespace

TEST_CASE("backup exact step") {
  SUBCASE("two uncounted agents pool their tokens") {
    BackupExactState u{false, 1};
    BackupExactState v{false, 1};
    backup_exact_step(u, v);
    CHECK(u == BackupExactState{false, 2});
    CHECK(v == BackupExactState{true, 2});
  }
  SUBCASE("a counted agent learns the larger count; the uncounted holder keeps its tokens") {
    BackupExactState u{true, 5};
    BackupExactState v{false, 3};
    backup_exact_step(u, v);
    CHECK(u == BackupExactState{true, 5});
    CHECK(v == BackupExactState{false, 3});
  }
}

TEST_CASE("backup exact reaches n for every n in [2, 32]") {
  RunLimits limits;
  limits.max_interactions = 5'000'000;
  for (std::uint32_t n = 2; n <= 32; ++n) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      std::vector<BackupExactState> fin;
      const auto m = run(BackupExactSuite(), n, seed, limits, &fin);
      CAPTURE(n);
      CHECK(m.correct);
      std::uint64_t uncounted_sum = 0;
      for (const auto& s : fin) {
        CHECK(s.nmax == n);
        if (!s.counted) uncounted_sum += s.nmax;
      }
      CHECK(uncounted_sum == n);
    }
  }
}

TEST_CASE("backup exact token mass is invariant along a run") {
  const BackupExactSuite suite;
  Simulation<BackupExactSuite> sim(suite, 20, 3);
  for (int s = 0; s < 5000; ++s) {
    sim.step();
    std::uint64_t total = 0;
    for (const auto& x : sim.states()) {
      if (!x.counted) total += x.nmax;
    }
    REQUIRE(total == 20);
  }
}

TEST_CASE("exact_output") {
  CHECK(exact_output(10, 268435) == 1000);
  for (std::uint64_t n : {3ULL, 100ULL, 1000ULL, 4096ULL}) {
    int k = 0;
    while ((Load128{1} << (8 + 2 * k)) < Load128{4} * n * n) ++k;
    const Load128 m = Load128{1} << (8 + 2 * k);
    if (m % n == 0) CHECK(exact_output(k, m / n) == static_cast<std::int64_t>(n));
    CHECK(exact_output(k, m / n + 1) == static_cast<std::int64_t>(n));
  }
  CHECK(exact_output(10, 0) == -1);
  CHECK(exact_output(-1, 5) == -1);
}

TEST_CASE("Lemma 9 algebra agrees between the integer and floating routes") {
  CHECK(output_algebra_failures(4, 20000) == 0);
}

TEST_CASE("checked_shift aborts on overflow") {
  CHECK(checked_shift(1, 127) == Load128{1} << 127);
  CHECK_THROWS_AS(checked_shift(2, 127), SimulationAbort);
  CHECK(checked_shift(0, 500) == 0);
}

TEST_CASE("approximation stage ticks") {
  const ExactSuite suite(desk_profile(), false);
  test::Ctx c;
  const std::uint64_t e = level_exponent(3, 0);
  SUBCASE("a leader with i = 0 seeds one token, then the load explodes") {
    auto u = approximating(true, 0, 0);
    auto v = approximating(false, 0, 0);
    about_to_tick(u.core, 20, true);
    about_to_tick(v.core, 20, false);
    suite.interact(u, v, c.ctx);
    CHECK(u.i == 1);
    CHECK(u.l == Load128{1} << e);
  }
  SUBCASE("a leader with l >= 4 records its approximation") {
    auto u = approximating(true, 3, 5);
    auto v = approximating(false, 3, 0);
    about_to_tick(u.core, 20, true);
    about_to_tick(v.core, 20, false);
    suite.interact(u, v, c.ctx);
    CHECK(u.done2);
    CHECK(u.k == static_cast<std::int32_t>(3 * e - 2));
    CHECK(u.base == 20);
    CHECK(v.done2);
    CHECK(v.base == 20);
    CHECK(v.k == u.k);
  }
}

TEST_CASE("refinement stage") {
  const ExactSuite suite(desk_profile(), false);
  test::Ctx c;
  SUBCASE("phase 0 spreads the larger k and clears loads") {
    auto u = refining(false, 9, 7, 30);
    auto v = refining(false, 11, 2, 30);
    mid_phase(u.core, 30);
    mid_phase(v.core, 30);
    suite.interact(u, v, c.ctx);
    CHECK(u.k == 11);
    CHECK(v.k == 11);
    CHECK(u.l == 0);
    CHECK(v.l == 0);
  }
  SUBCASE("phase 1: the leader injects 2^8 * 2^k") {
    auto u = refining(true, 10, 0, 30);
    auto v = refining(false, 10, 0, 30);
    about_to_tick(u.core, 31, true);
    about_to_tick(v.core, 31, false);
    suite.interact(u, v, c.ctx);
    CHECK(u.l == 262144);
    CHECK(v.l == 0);
  }
  SUBCASE("phase 2: every agent multiplies by 2^k and stops") {
    auto u = refining(false, 10, 256, 30);
    auto v = refining(false, 10, 262144, 30);
    about_to_tick(u.core, 32, false);
    // v already wrapped into phase 32; u adopts its clock and ticks.
    mid_phase(v.core, 32, 0);
    suite.interact(u, v, c.ctx);
    CHECK(u.l == 262144);
    CHECK(v.l == 262144);
    CHECK(u.core.clock.stopped);
  }
}

TEST_CASE("stable exact error checks") {
  const ExactSuite suite(desk_profile(), true);
  test::Ctx c;
  SUBCASE("two elected leaders") {
    auto u = approximating(true, 2, 4);
    auto v = approximating(true, 2, 4);
    mid_phase(u.core, 20);
    mid_phase(v.core, 20);
    suite.interact(u, v, c.ctx);
    CHECK(u.error);
    CHECK(v.error);
  }
  SUBCASE("phase counters that disagree") {
    auto u = approximating(false, 2, 4);
    auto v = approximating(false, 2, 4);
    mid_phase(u.core, 20);
    mid_phase(v.core, 22);
    suite.interact(u, v, c.ctx);
    CHECK(u.error);
    CHECK(v.error);
  }
  SUBCASE("load below 2^5 before the phase 2 multiply") {
    auto u = refining(false, 10, 30, 30);
    auto v = refining(false, 10, 40, 30);
    about_to_tick(u.core, 32, true);
    about_to_tick(v.core, 32, false);
    suite.interact(u, v, c.ctx);
    CHECK(u.error);
  }
  SUBCASE("k mismatch after refinement") {
    auto u = refining(false, 10, 1000, 30);
    auto v = refining(false, 11, 1000, 30);
    mid_phase(u.core, 33);
    mid_phase(v.core, 33);
    suite.interact(u, v, c.ctx);
    CHECK(u.error);
    CHECK(v.error);
  }
}

TEST_CASE("count-exact at n = 1024 outputs exactly 1024") {
  RunLimits limits;
  limits.max_interactions = 100'000'000;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto m = run(ExactSuite(desk_profile(), false), 1024, seed, limits);
    CHECK(m.correct);
    REQUIRE(m.telemetry.leader_estimate.has_value());
    CHECK(*m.telemetry.leader_estimate >= 7);
    CHECK(*m.telemetry.leader_estimate <= 13);
  }
}
