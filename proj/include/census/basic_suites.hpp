#pragma once

// Stand-alone suites for the building blocks, used by the harness and the
// acceptance checks to measure each primitive in isolation.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "census/balancing.hpp"
#include "census/engine.hpp"
#include "census/leader.hpp"
#include "census/primitives.hpp"
#include "census/profile.hpp"

namespace census {

/// Junta, clock and coin parity: the part every clocked protocol shares.
struct ClockedCore {
  JuntaState junta;
  ClockState clock;
  CoinState coin;
};

/// Junta step for both participants. An agent whose level rises starts a
/// fresh clock; the returned flags tell the caller to reset the rest of its
/// protocol state as well.
JuntaOutcome core_junta(ClockedCore& u, ClockedCore& v, const Profile& profile);

/// Clock step, run only between agents on the same level.
TickOutcome core_clock(ClockedCore& u, ClockedCore& v, const Profile& profile);

/// Coin for agent x's draw this interaction: the partner's parity, or a
/// scheduler bit.
inline bool draw_coin(const ClockedCore& partner, Context& ctx, CoinMode mode) {
  return mode == CoinMode::synthetic ? partner.coin.parity : ctx.random_bit();
}

/// Both participants' parities flip once per interaction.
inline void flip_parities(ClockedCore& u, ClockedCore& v) {
  u.coin.parity = !u.coin.parity;
  v.coin.parity = !v.coin.parity;
}

/// Largest power-of-two exponent with 2^k <= 3n/4 (-1 if none).
std::int32_t lemma6_source_exponent(std::uint32_t n);

/// One informed agent spreads a bit by one-way epidemic.
class BroadcastSuite {
 public:
  struct State {
    std::uint8_t informed = 0;
  };
  static constexpr std::array<std::string_view, 1> kFields{"informed"};

  std::string_view name() const { return "broadcast"; }
  State initial(std::uint32_t, std::uint32_t index) const { return {static_cast<std::uint8_t>(index == 0)}; }
  void interact(State& u, State& v, Context&) const { u.informed = broadcast_step(u.informed, v.informed).first; }
  std::int64_t output(const State& s) const { return s.informed; }
  bool output_ok(const State&, std::int64_t out, std::uint32_t) const { return out == 1; }
  bool is_stable(std::span<const State> states, std::uint32_t n) const;
  std::int64_t ground_truth(std::uint32_t) const { return 1; }
  void fields(const State& s, std::int64_t* out) const { out[0] = s.informed; }
};

/// The junta process alone; output is 1 while the agent is still active.
class JuntaSuite {
 public:
  struct State {
    JuntaState junta;
  };
  static constexpr std::array<std::string_view, 3> kFields{"level", "active", "junta"};

  explicit JuntaSuite(JuntaMode mode = JuntaMode::symmetric) : mode_(mode) {}
  std::string_view name() const { return "junta"; }
  State initial(std::uint32_t, std::uint32_t) const { return {}; }
  void interact(State& u, State& v, Context&) const { junta_step(u.junta, v.junta, mode_); }
  std::int64_t output(const State& s) const { return s.junta.active ? 1 : 0; }
  bool output_ok(const State&, std::int64_t out, std::uint32_t) const { return out == 0; }
  bool is_stable(std::span<const State> states, std::uint32_t n) const;
  std::int64_t ground_truth(std::uint32_t) const { return 0; }
  void fields(const State& s, std::int64_t* out) const;

 private:
  JuntaMode mode_;
};

/// Junta plus phase clock, run for a fixed budget to observe phase lengths.
/// The output is constant; the suite never reports stability.
class ClockSuite {
 public:
  struct State {
    ClockedCore core;
  };
  static constexpr std::array<std::string_view, 5> kFields{"level", "active", "junta", "clock", "phase"};

  explicit ClockSuite(const Profile& profile) : profile_(profile) {}
  std::string_view name() const { return "clock"; }
  State initial(std::uint32_t, std::uint32_t) const { return {}; }
  void interact(State& u, State& v, Context& ctx) const;
  std::int64_t output(const State&) const { return 0; }
  bool output_ok(const State&, std::int64_t, std::uint32_t) const { return true; }
  bool is_stable(std::span<const State>, std::uint32_t) const { return false; }
  std::int64_t ground_truth(std::uint32_t) const { return 0; }
  void fields(const State& s, std::int64_t* out) const;
  std::optional<std::uint32_t> phase_of(const State& s) const { return s.core.clock.phase; }

 private:
  Profile profile_;
};

/// Slow clock-gated election. Output is 1 once the agent has done1.
class SlowLeaderSuite {
 public:
  struct State {
    ClockedCore core;
    LeaderState le;
  };
  static constexpr std::array<std::string_view, 7> kFields{"level", "active", "junta", "clock",
                                                           "phase", "leader", "done1"};

  explicit SlowLeaderSuite(const Profile& profile) : profile_(profile) {}
  std::string_view name() const { return "slow-leader"; }
  State initial(std::uint32_t, std::uint32_t) const { return {}; }
  void interact(State& u, State& v, Context& ctx) const;
  std::int64_t output(const State& s) const { return s.le.done1 ? 1 : 0; }
  bool output_ok(const State&, std::int64_t out, std::uint32_t) const { return out == 1; }
  bool is_stable(std::span<const State> states, std::uint32_t n) const;
  std::int64_t ground_truth(std::uint32_t) const { return 1; }
  void fields(const State& s, std::int64_t* out) const;
  std::optional<std::uint32_t> phase_of(const State& s) const { return s.core.clock.phase; }
  bool is_leader(const State& s) const { return s.le.leader; }
  bool has_done1(const State& s) const { return s.le.done1; }

 private:
  Profile profile_;
};

/// Fast election with coin strings. Output is 1 once the agent has done1.
class FastLeaderSuite {
 public:
  struct State {
    ClockedCore core;
    FastLeaderState le;
  };
  static constexpr std::array<std::string_view, 8> kFields{"level", "active", "junta",  "clock",
                                                           "phase", "leader", "done1", "counter"};

  explicit FastLeaderSuite(const Profile& profile) : profile_(profile) {}
  std::string_view name() const { return "fast-leader"; }
  State initial(std::uint32_t, std::uint32_t) const { return {}; }
  void interact(State& u, State& v, Context& ctx) const;
  std::int64_t output(const State& s) const { return s.le.done1 ? 1 : 0; }
  bool output_ok(const State&, std::int64_t out, std::uint32_t) const { return out == 1; }
  bool is_stable(std::span<const State> states, std::uint32_t n) const;
  std::int64_t ground_truth(std::uint32_t) const { return 1; }
  void fields(const State& s, std::int64_t* out) const;
  std::optional<std::uint32_t> phase_of(const State& s) const { return s.core.clock.phase; }
  bool is_leader(const State& s) const { return s.le.leader; }
  bool has_done1(const State& s) const { return s.le.done1; }

 private:
  Profile profile_;
};

/// Powers-of-two balancing from a single source holding 2^k tokens with
/// 2^k <= 3n/4. An agent is correct once its load is at most one token.
class Pow2BalanceSuite {
 public:
  struct State {
    LogLoad k = kEmpty;
  };
  static constexpr std::array<std::string_view, 1> kFields{"k"};

  std::string_view name() const { return "pow2-balance"; }
  State initial(std::uint32_t n, std::uint32_t index) const {
    return {index == 0 ? lemma6_source_exponent(n) : kEmpty};
  }
  void interact(State& u, State& v, Context&) const {
    const auto [a, b] = pow2_balance(u.k, v.k, false, false);
    u.k = a;
    v.k = b;
  }
  std::int64_t output(const State& s) const { return s.k; }
  bool output_ok(const State&, std::int64_t out, std::uint32_t) const { return out <= 0; }
  bool is_stable(std::span<const State> states, std::uint32_t n) const;
  std::int64_t ground_truth(std::uint32_t) const { return 0; }
  void fields(const State& s, std::int64_t* out) const { out[0] = s.k; }
};

/// Classical balancing of tokens_per_agent * n tokens injected at one agent.
/// Correct once the discrepancy is at most 2.
class ClassicalBalanceSuite {
 public:
  struct State {
    std::uint64_t l = 0;
  };
  static constexpr std::array<std::string_view, 1> kFields{"l"};

  explicit ClassicalBalanceSuite(std::uint64_t tokens_per_agent = 4) : per_agent_(tokens_per_agent) {}
  std::string_view name() const { return "classical-balance"; }
  State initial(std::uint32_t n, std::uint32_t index) const { return {index == 0 ? per_agent_ * n : 0}; }
  void interact(State& u, State& v, Context&) const {
    const auto [a, b] = classical_balance(u.l, v.l);
    u.l = a;
    v.l = b;
  }
  std::int64_t output(const State& s) const { return static_cast<std::int64_t>(s.l); }
  bool output_ok(const State&, std::int64_t out, std::uint32_t) const {
    const auto avg = static_cast<std::int64_t>(per_agent_);
    return out >= avg - 2 && out <= avg + 2;
  }
  bool is_stable(std::span<const State> states, std::uint32_t n) const;
  std::int64_t ground_truth(std::uint32_t) const { return static_cast<std::int64_t>(per_agent_); }
  void fields(const State& s, std::int64_t* out) const { out[0] = static_cast<std::int64_t>(s.l); }

 private:
  std::uint64_t per_agent_;
};

}  // namespace census
