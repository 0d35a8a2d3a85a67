#include "census/primitives.hpp"

namespace census {

namespace {

void junta_against(JuntaState& self, const JuntaState& partner) {
  if (self.active) {
    if (partner.active && self.level == partner.level) {
      ++self.level;
    } else {
      self.active = false;
    }
  }
  if (self.level < partner.level) {
    self.junta = false;
    if (!self.active) self.level = partner.level;
  }
}

bool advance(ClockState& c, std::uint32_t next, const ClockParams& params) {
  const bool wrapped = next < c.clock;
  c.clock = static_cast<std::uint16_t>(next);
  if (wrapped && c.phase < params.phase_cap) {
    ++c.phase;
    return true;
  }
  return false;
}

}  // namespace

JuntaOutcome junta_step(JuntaState& u, JuntaState& v, JuntaMode mode) {
  const JuntaState pu = u;
  const JuntaState pv = v;
  junta_against(u, pv);
  if (mode == JuntaMode::symmetric) junta_against(v, pu);
  return {u.level > pu.level, v.level > pv.level};
}

TickOutcome clock_step(ClockState& u, ClockState& v, bool u_in_junta, const ClockParams& params) {
  const std::uint32_t m = params.modulus;
  const std::uint32_t cu = u.clock;
  const std::uint32_t cv = v.clock;
  TickOutcome out;
  u.first_tick = false;
  v.first_tick = false;
  if (!u.stopped) {
    if (clock_ahead(cv, cu, m)) {
      out.u_ticked = advance(u, cv, params);
    } else if (u_in_junta && cu == cv) {
      out.u_ticked = advance(u, (cu + 1) % m, params);
    }
  }
  if (!v.stopped && clock_ahead(cu, cv, m)) {
    out.v_ticked = advance(v, cu, params);
  }
  u.first_tick = out.u_ticked;
  v.first_tick = out.v_ticked;
  return out;
}

}  // namespace census
