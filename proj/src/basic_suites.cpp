#include "census/basic_suites.hpp"

#include <algorithm>

namespace census {

JuntaOutcome core_junta(ClockedCore& u, ClockedCore& v, const Profile& profile) {
  const JuntaOutcome out = junta_step(u.junta, v.junta, profile.junta);
  if (out.u_level_raised) u.clock = ClockState{};
  if (out.v_level_raised) v.clock = ClockState{};
  return out;
}

TickOutcome core_clock(ClockedCore& u, ClockedCore& v, const Profile& profile) {
  if (u.junta.level != v.junta.level) {
    u.clock.first_tick = false;
    v.clock.first_tick = false;
    return {};
  }
  const ClockParams params{profile.clock_modulus, profile.phase_cap};
  return clock_step(u.clock, v.clock, u.junta.junta, params);
}

std::int32_t lemma6_source_exponent(std::uint32_t n) {
  const std::uint64_t limit = 3ULL * n / 4;
  if (limit == 0) return kEmpty;
  std::int32_t k = 0;
  while ((2ULL << k) <= limit) ++k;
  return k;
}

bool BroadcastSuite::is_stable(std::span<const State> states, std::uint32_t) const {
  return std::all_of(states.begin(), states.end(), [](const State& s) { return s.informed == 1; });
}

bool JuntaSuite::is_stable(std::span<const State> states, std::uint32_t) const {
  return std::none_of(states.begin(), states.end(), [](const State& s) { return s.junta.active; });
}

void JuntaSuite::fields(const State& s, std::int64_t* out) const {
  out[0] = s.junta.level;
  out[1] = s.junta.active;
  out[2] = s.junta.junta;
}

void ClockSuite::interact(State& u, State& v, Context&) const {
  core_junta(u.core, v.core, profile_);
  core_clock(u.core, v.core, profile_);
  flip_parities(u.core, v.core);
}

void ClockSuite::fields(const State& s, std::int64_t* out) const {
  out[0] = s.core.junta.level;
  out[1] = s.core.junta.active;
  out[2] = s.core.junta.junta;
  out[3] = s.core.clock.clock;
  out[4] = s.core.clock.phase;
}

void SlowLeaderSuite::interact(State& u, State& v, Context& ctx) const {
  const JuntaOutcome raised = core_junta(u.core, v.core, profile_);
  if (raised.u_level_raised) u.le = LeaderState{};
  if (raised.v_level_raised) v.le = LeaderState{};
  const TickOutcome tick = core_clock(u.core, v.core, profile_);
  const SlowLeaderParams params{profile_.outer_modulus};
  if (tick.u_ticked) slow_leader_tick(u.le, u.core.clock.phase, draw_coin(v.core, ctx, profile_.coins), params);
  if (tick.v_ticked) slow_leader_tick(v.le, v.core.clock.phase, draw_coin(u.core, ctx, profile_.coins), params);
  if (u.core.junta.level == v.core.junta.level) {
    slow_leader_pair(u.le, v.le, u.core.clock.phase == v.core.clock.phase);
  }
  flip_parities(u.core, v.core);
}

bool SlowLeaderSuite::is_stable(std::span<const State> states, std::uint32_t) const {
  return std::all_of(states.begin(), states.end(), [](const State& s) { return s.le.done1; });
}

void SlowLeaderSuite::fields(const State& s, std::int64_t* out) const {
  out[0] = s.core.junta.level;
  out[1] = s.core.junta.active;
  out[2] = s.core.junta.junta;
  out[3] = s.core.clock.clock;
  out[4] = s.core.clock.phase;
  out[5] = s.le.leader;
  out[6] = s.le.done1;
}

void FastLeaderSuite::interact(State& u, State& v, Context& ctx) const {
  const JuntaOutcome raised = core_junta(u.core, v.core, profile_);
  if (raised.u_level_raised) u.le = FastLeaderState{};
  if (raised.v_level_raised) v.le = FastLeaderState{};
  const TickOutcome tick = core_clock(u.core, v.core, profile_);
  const FastLeaderParams params{profile_.terminal_phase, profile_.level_offset, profile_.bit_budget_cap};
  if (tick.u_ticked) fast_leader_tick(u.le, u.core.clock.phase, params);
  if (tick.v_ticked) fast_leader_tick(v.le, v.core.clock.phase, params);
  if (!u.le.done1 && u.core.junta.level == v.core.junta.level &&
      u.core.clock.phase == v.core.clock.phase) {
    const std::uint32_t phase = u.core.clock.phase;
    const std::uint32_t budget = fast_leader_budget(u.core.junta.level, params);
    const bool bit = fast_leader_samples(u.le, phase, budget) && draw_coin(v.core, ctx, profile_.coins);
    fast_leader_pair(u.le, v.le, phase, budget, bit, params);
  }
  flip_parities(u.core, v.core);
}

bool FastLeaderSuite::is_stable(std::span<const State> states, std::uint32_t) const {
  return std::all_of(states.begin(), states.end(), [](const State& s) { return s.le.done1; });
}

void FastLeaderSuite::fields(const State& s, std::int64_t* out) const {
  out[0] = s.core.junta.level;
  out[1] = s.core.junta.active;
  out[2] = s.core.junta.junta;
  out[3] = s.core.clock.clock;
  out[4] = s.core.clock.phase;
  out[5] = s.le.leader;
  out[6] = s.le.done1;
  out[7] = s.le.counter;
}

bool Pow2BalanceSuite::is_stable(std::span<const State> states, std::uint32_t) const {
  return std::all_of(states.begin(), states.end(), [](const State& s) { return s.k <= 0; });
}

bool ClassicalBalanceSuite::is_stable(std::span<const State> states, std::uint32_t) const {
  const auto [lo, hi] = std::minmax_element(states.begin(), states.end(),
                                            [](const State& a, const State& b) { return a.l < b.l; });
  return hi->l - lo->l <= 2;
}

}  // namespace census
