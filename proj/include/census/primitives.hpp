#pragma once

// Building blocks shared by every composite protocol: max broadcast, the junta
// process, junta-driven phase clocks and synthetic coins. All of them are pure
// rules over one ordered pair of agent states.

#include <algorithm>
#include <cstdint>
#include <utility>

#include "census/profile.hpp"

namespace census {

/// One-way epidemic: the initiator adopts the larger value, the responder is
/// untouched.
template <class T>
constexpr std::pair<T, T> broadcast_step(const T& u_val, const T& v_val) {
  return {std::max(u_val, v_val), v_val};
}

struct JuntaState {
  std::uint8_t level = 0;
  bool active = true;
  bool junta = true;

  friend bool operator==(const JuntaState&, const JuntaState&) = default;
};

struct JuntaOutcome {
  bool u_level_raised = false;
  bool v_level_raised = false;
};

/// Both participants are updated against the other's pre-interaction state
/// (symmetric mode) or only the initiator (one-sided mode).
///   - active agent meeting an active agent on its level: level + 1
///   - active agent otherwise: becomes inactive
///   - partner on a higher level: junta bit cleared; inactive agents adopt
///     the partner's level
JuntaOutcome junta_step(JuntaState& u, JuntaState& v, JuntaMode mode = JuntaMode::symmetric);

struct ClockState {
  std::uint16_t clock = 0;
  std::uint32_t phase = 0;
  bool first_tick = false;
  /// A stopped clock neither adopts nor advances (end of error detection and
  /// of refinement).
  bool stopped = false;

  friend bool operator==(const ClockState&, const ClockState&) = default;
};

struct ClockParams {
  std::uint32_t modulus = 48;
  std::uint32_t phase_cap = 1U << 16;
};

/// b is ahead of a iff (b - a) mod m lies in [1, floor(m / 2)].
constexpr bool clock_ahead(std::uint32_t b, std::uint32_t a, std::uint32_t m) {
  const std::uint32_t d = (b + m - a) % m;
  return d >= 1 && d <= m / 2;
}

/// Two synchronized clocks sit at most half a cycle apart once the phase
/// counter is unrolled into phase * m + clock. A larger gap means the phase
/// counters disagree with the clock positions.
constexpr bool clocks_consistent(const ClockState& a, const ClockState& b, std::uint32_t m) {
  const std::int64_t ea = std::int64_t{a.phase} * m + a.clock;
  const std::int64_t eb = std::int64_t{b.phase} * m + b.clock;
  const std::int64_t d = ea > eb ? ea - eb : eb - ea;
  return d <= m / 2;
}

struct TickOutcome {
  bool u_ticked = false;
  bool v_ticked = false;
};

/// Both agents adopt the partner's clock when it is ahead; a junta initiator
/// that meets its own clock value advances one step. Crossing m-1 -> 0 is a
/// tick: the phase counter increments (saturating at phase_cap) and
/// first_tick is raised for exactly this interaction.
TickOutcome clock_step(ClockState& u, ClockState& v, bool u_in_junta, const ClockParams& params);

struct CoinState {
  bool parity = false;
  friend bool operator==(const CoinState&, const CoinState&) = default;
};

/// Read the partner's parity as a coin and flip it.
inline bool synthetic_coin(CoinState& partner) {
  const bool bit = partner.parity;
  partner.parity = !partner.parity;
  return bit;
}

}  // namespace census
