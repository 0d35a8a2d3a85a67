#pragma once

// Leader election rules. Both elections are expressed as a per-agent tick
// action (run once when the agent's phase counter advances) plus a pair rule
// (run on every interaction whose participants reached the election stage).

#include <cstdint>

namespace census {

/// State of the slow, clock-gated election. Every agent starts as a contender.
struct LeaderState {
  bool leader = true;
  bool done1 = false;
  /// Some contender flipped heads in the current phase (broadcast by max).
  bool heads = false;

  friend bool operator==(const LeaderState&, const LeaderState&) = default;
};

struct SlowLeaderParams {
  /// Number of inner phases after which done1 is raised.
  std::uint32_t outer_modulus = 24;
};

/// Tick of agent x into `phase`: clear the heads bit, let a contender flip
/// `coin`, and raise done1 once the outer count is reached.
void slow_leader_tick(LeaderState& x, std::uint32_t phase, bool coin, const SlowLeaderParams& params);

/// Pair rule. Within a phase, a tails contender meeting a heads agent is
/// demoted and the heads bit spreads. Two contenders that meet before done1
/// keep only the initiator.
void slow_leader_pair(LeaderState& u, LeaderState& v, bool same_phase);

struct FastLeaderState {
  std::uint64_t coins = 0;
  std::uint8_t counter = 0;
  bool leader = true;
  bool done1 = false;

  friend bool operator==(const FastLeaderState&, const FastLeaderState&) = default;
};

struct FastLeaderParams {
  std::uint32_t terminal_phase = 16;
  std::uint32_t level_offset = 0;
  std::uint32_t bit_budget_cap = 64;
};

/// Bits a contender on `level` samples per even phase:
/// min(cap, max(1, 2^(level - offset))).
std::uint32_t fast_leader_budget(std::uint32_t level, const FastLeaderParams& params);

/// Tick of agent x into `phase`: even phases start a fresh coin string; the
/// terminal phase raises done1.
void fast_leader_tick(FastLeaderState& x, std::uint32_t phase, const FastLeaderParams& params);

/// Pair rule, active only when both phases match. `bit` is consumed only if
/// the initiator samples, i.e. when `fast_leader_samples` is true.
void fast_leader_pair(FastLeaderState& u, FastLeaderState& v, std::uint32_t phase, std::uint32_t budget,
                      bool bit, const FastLeaderParams& params);

inline bool fast_leader_samples(const FastLeaderState& u, std::uint32_t phase, std::uint32_t budget) {
  return u.leader && phase % 2 == 0 && u.counter < budget;
}

}  // namespace census
