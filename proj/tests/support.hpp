#pragma once

#include "census/basic_suites.hpp"
#include "census/engine.hpp"
#include "census/rng.hpp"

namespace census::test {

/// Settled junta (inactive, same level) with the clock one step before a wrap
/// into `next_phase`. When two such agents meet and the initiator is a junta
/// member, the initiator advances and ticks; the responder compares against
/// the initiator's old clock and stays put.
inline void about_to_tick(ClockedCore& c, std::uint32_t next_phase, bool junta, std::uint32_t m = 48,
                          std::uint8_t level = 3) {
  c.junta = JuntaState{level, false, junta};
  c.clock = ClockState{static_cast<std::uint16_t>(m - 1), next_phase - 1, false, false};
}

/// Settled junta, mid-phase clock: no tick happens when two such agents meet.
inline void mid_phase(ClockedCore& c, std::uint32_t phase, std::uint16_t clock = 10, std::uint8_t level = 3) {
  c.junta = JuntaState{level, false, false};
  c.clock = ClockState{clock, phase, false, false};
}

struct Ctx {
  SplitMix64 rng{make_stream(1, 2)};
  Context ctx{0, &rng};
};

}  // namespace census::test
