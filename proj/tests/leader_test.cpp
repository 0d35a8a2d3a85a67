#include <doctest.h>

#include "census/basic_suites.hpp"
#include "census/leader.hpp"
#include "census/profile.hpp"

using namespace census;

TEST_CASE("slow election: two contenders meeting keep only the initiator") {
  LeaderState u;
  LeaderState v;
  slow_leader_pair(u, v, false);
  CHECK(u.leader);
  CHECK_FALSE(v.leader);
}

TEST_CASE("slow election: tails contenders yield to heads within a phase") {
  LeaderState u{true, false, false};
  LeaderState v{false, false, true};
  slow_leader_pair(u, v, true);
  CHECK_FALSE(u.leader);
  CHECK(u.heads);

  LeaderState w{true, false, false};
  LeaderState x{false, false, true};
  slow_leader_pair(w, x, false);
  CHECK(w.leader);
  CHECK_FALSE(w.heads);
}

TEST_CASE("slow election tick") {
  LeaderState x;
  slow_leader_tick(x, 3, true, {24});
  CHECK(x.heads);
  CHECK_FALSE(x.done1);
  slow_leader_tick(x, 24, true, {24});
  CHECK(x.done1);
  LeaderState y{false, false, true};
  slow_leader_tick(y, 4, true, {24});
  CHECK_FALSE(y.heads);
}

TEST_CASE("fast election: odd phase comparisons") {
  const FastLeaderParams p{16, 0, 64};
  FastLeaderState u{5, 0, true, false};
  FastLeaderState v{9, 0, true, false};
  fast_leader_pair(u, v, 3, 8, false, p);
  CHECK_FALSE(u.leader);
  CHECK(u.coins == 9);

  FastLeaderState a{7, 0, true, false};
  FastLeaderState b{7, 0, true, false};
  fast_leader_pair(a, b, 3, 8, false, p);
  CHECK(a == FastLeaderState{7, 0, true, false});
  CHECK(b == FastLeaderState{7, 0, true, false});
}

TEST_CASE("fast election: even phases sample up to the budget") {
  const FastLeaderParams p{16, 0, 64};
  FastLeaderState u;
  FastLeaderState v;
  for (int s = 0; s < 5; ++s) fast_leader_pair(u, v, 2, 3, true, p);
  CHECK(u.counter == 3);
  CHECK(u.coins == 0b111);
  fast_leader_tick(u, 4, p);
  CHECK(u.coins == 0);
  CHECK(u.counter == 0);
  fast_leader_pair(u, v, 16, 3, false, p);
  CHECK(u.done1);
  CHECK(v.done1);
}

TEST_CASE("fast election budget follows the level exponent") {
  const FastLeaderParams p{16, 2, 64};
  CHECK(fast_leader_budget(0, p) == 1);
  CHECK(fast_leader_budget(2, p) == 1);
  CHECK(fast_leader_budget(5, p) == 8);
  CHECK(fast_leader_budget(9, p) == 64);
  CHECK(fast_leader_budget(200, p) == 64);
  CHECK(fast_leader_budget(9, FastLeaderParams{16, 2, 20}) == 20);
}

namespace {

template <class Suite>
void check_leader_never_vanishes(const Suite& suite, std::uint32_t n, std::uint64_t seed) {
  Simulation<Suite> sim(suite, n, seed);
  const auto budget = 4000ULL * n * 10;
  std::int64_t min_leaders = n;
  std::uint64_t done1 = 0;
  for (std::uint64_t s = 1; s <= budget && done1 < n; ++s) {
    sim.step();
    min_leaders = std::min(min_leaders, sim.leaders());
    if (s % n != 0) continue;
    done1 = 0;
    for (const auto& a : sim.states()) done1 += a.le.done1 ? 1 : 0;
  }
  CHECK(min_leaders >= 1);
  CHECK(done1 == n);
  CHECK(sim.leaders() == 1);
}

}  // namespace

TEST_CASE("elections keep at least one contender and end with one leader") {
  const Profile p = desk_profile();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    check_leader_never_vanishes(SlowLeaderSuite(p), 128, seed);
    check_leader_never_vanishes(FastLeaderSuite(p), 128, seed);
  }
}
