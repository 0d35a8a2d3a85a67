#include "census/leader.hpp"

#include <algorithm>

#include "census/profile.hpp"

namespace census {

void slow_leader_tick(LeaderState& x, std::uint32_t phase, bool coin, const SlowLeaderParams& params) {
  x.heads = x.leader && !x.done1 && coin;
  if (phase >= params.outer_modulus) x.done1 = true;
}

void slow_leader_pair(LeaderState& u, LeaderState& v, bool same_phase) {
  if (same_phase) {
    const bool hu = u.heads;
    const bool hv = v.heads;
    if (u.leader && !u.done1 && !hu && hv) u.leader = false;
    if (v.leader && !v.done1 && !hv && hu) v.leader = false;
    u.heads = v.heads = hu || hv;
  }
  if (u.leader && v.leader && !u.done1 && !v.done1) v.leader = false;
}

std::uint32_t fast_leader_budget(std::uint32_t level, const FastLeaderParams& params) {
  const std::uint32_t cap = std::min<std::uint32_t>(params.bit_budget_cap, 64);
  if (level >= params.level_offset + 7) return cap;
  return static_cast<std::uint32_t>(std::min<std::uint64_t>(cap, level_exponent(level, params.level_offset)));
}

void fast_leader_tick(FastLeaderState& x, std::uint32_t phase, const FastLeaderParams& params) {
  if (phase % 2 == 0) {
    x.coins = 0;
    x.counter = 0;
  }
  if (phase >= params.terminal_phase) x.done1 = true;
}

void fast_leader_pair(FastLeaderState& u, FastLeaderState& v, std::uint32_t phase, std::uint32_t budget,
                      bool bit, const FastLeaderParams& params) {
  if (phase % 2 == 0) {
    if (fast_leader_samples(u, phase, budget)) {
      u.coins = (u.coins << 1) | (bit ? 1U : 0U);
      ++u.counter;
    }
  } else if (u.coins < v.coins) {
    u.leader = false;
    u.coins = v.coins;
  }
  if (phase >= params.terminal_phase) {
    u.done1 = true;
    v.done1 = true;
  }
}

}  // namespace census
