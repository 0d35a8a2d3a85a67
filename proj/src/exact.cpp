#include "census/exact.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "census/balancing.hpp"

namespace census {

namespace {

constexpr int kElection = 0;
constexpr int kApproximation = 1;
constexpr int kRefinement = 2;

int stage_of(const ExactAgent& s) {
  if (!s.le.done1) return kElection;
  return s.done2 ? kRefinement : kApproximation;
}

static_assert(kElection < kApproximation && kApproximation < kRefinement);

int bit_length(Load128 x) {
  const auto hi = static_cast<std::uint64_t>(x >> 64);
  if (hi != 0) return 128 - std::countl_zero(hi);
  return 64 - std::countl_zero(static_cast<std::uint64_t>(x));
}

}  // namespace

void backup_exact_step(BackupExactState& u, BackupExactState& v) {
  if (!u.counted && !v.counted) {
    const std::uint32_t sum = u.nmax + v.nmax;
    u.nmax = sum;
    v.counted = true;
    v.nmax = sum;
    return;
  }
  const std::uint32_t m = std::max(u.nmax, v.nmax);
  if (u.counted) u.nmax = m;
  if (v.counted) v.nmax = m;
}

bool backup_exact_stable(std::span<const BackupExactState> states, std::uint32_t n) {
  std::size_t uncounted = 0;
  for (const auto& s : states) {
    if (s.nmax != n) return false;
    uncounted += s.counted ? 0 : 1;
  }
  return uncounted == 1;
}

Load128 checked_shift(Load128 x, std::uint64_t shift) {
  if (x == 0) return 0;
  if (shift >= 128 || (shift > 0 && (x >> (128 - shift)) != 0)) {
    throw SimulationAbort("token load overflowed 128 bits");
  }
  return x << shift;
}

std::int64_t exact_output(std::int32_t k, Load128 l) {
  if (l == 0 || k < 0 || 8 + 2 * k > 125) return -1;
  const Load128 m = Load128{1} << (8 + 2 * k);
  const Load128 q = (2 * m + l) / (2 * l);
  if (q > static_cast<Load128>(std::numeric_limits<std::int64_t>::max())) return -1;
  return static_cast<std::int64_t>(q);
}

std::uint32_t ExactSuite::refine_phase(const State& s) {
  if (s.core.clock.phase < s.base) return 0;
  return std::min<std::uint32_t>(s.core.clock.phase - s.base, 2);
}

void ExactSuite::enter_error(State& x) const {
  if (x.error) return;
  x.error = true;
  x.backup = BackupExactState{};
}

void ExactSuite::reinit(State& x) const {
  x.le = FastLeaderState{};
  x.i = 0;
  x.k = -1;
  x.done2 = false;
  x.base = 0;
  x.l = 0;
}

void ExactSuite::tick(State& x, State& y, Context&, int stage_before) const {
  const std::uint32_t phase = x.core.clock.phase;
  if (stage_before == kElection) {
    const bool had_done1 = x.le.done1;
    fast_leader_tick(x.le, phase, {profile_.terminal_phase, profile_.level_offset, profile_.bit_budget_cap});
    if (fault_.kind == FaultKind::dup_leader_post_election && !had_done1 && x.le.done1 && x.le.leader) {
      y.le.leader = true;
      y.le.done1 = true;
    }
    return;
  }

  if (stage_before == kApproximation) {
    const std::uint64_t e = level_exponent(x.core.junta.level, profile_.level_offset);
    if (x.le.leader) {
      if (x.i == 0) {
        x.l = 1;
      } else if (x.l >= 4) {
        // Found the approximation: k = i*e - floor(log l).
        x.done2 = true;
        x.k = static_cast<std::int32_t>(x.i * e) - (bit_length(x.l) - 1);
        if (fault_.kind == FaultKind::corrupt_k_pre_refine) x.k += fault_.delta;
        x.base = phase;
        x.l = 0;
        return;
      }
    }
    ++x.i;
    x.l = checked_shift(x.l, e);
    return;
  }

  const std::uint32_t since = phase - x.base;
  if (since == 1 && x.le.leader) {
    if (x.k < 0) {
      if (stable_) enter_error(x);
      return;
    }
    x.l = checked_shift(256, static_cast<std::uint64_t>(x.k));
  } else if (since == 2) {
    if (stable_ && x.l < 31) {
      enter_error(x);
      return;
    }
    if (x.k >= 0) x.l = checked_shift(x.l, static_cast<std::uint64_t>(x.k));
    x.core.clock.stopped = true;
  }
}

void ExactSuite::pair(State& u, State& v, Context& ctx) const {
  const bool same_phase = u.core.clock.phase == v.core.clock.phase;
  const int su = stage_of(u);
  const int sv = stage_of(v);

  if (su == kElection) {
    if (same_phase) {
      const FastLeaderParams params{profile_.terminal_phase, profile_.level_offset, profile_.bit_budget_cap};
      const std::uint32_t phase = u.core.clock.phase;
      const std::uint32_t budget = fast_leader_budget(u.core.junta.level, params);
      const bool bit = fast_leader_samples(u.le, phase, budget) && draw_coin(v.core, ctx, profile_.coins);
      fast_leader_pair(u.le, v.le, phase, budget, bit, params);
    }
    return;
  }
  if (sv == kElection) return;

  if (stable_ && u.le.leader && v.le.leader) {
    enter_error(u);
    enter_error(v);
    return;
  }

  if (u.done2 != v.done2) {
    const State& src = u.done2 ? u : v;
    State& dst = u.done2 ? v : u;
    dst.done2 = true;
    dst.base = src.base;
    dst.k = std::max(dst.k, src.k);
    dst.l = 0;
  }
  if (!same_phase) return;

  if (u.done2) {
    const std::uint32_t ru = refine_phase(u);
    const std::uint32_t rv = refine_phase(v);
    if (ru == 0 && rv == 0) {
      u.k = v.k = std::max(u.k, v.k);
      u.l = v.l = 0;
    }
    if (stable_ && ru >= 2 && rv >= 2 && u.k != v.k) {
      enter_error(u);
      enter_error(v);
      return;
    }
  }
  const auto [a, b] = classical_balance(u.l, v.l);
  u.l = a;
  v.l = b;
}

void ExactSuite::interact(State& u, State& v, Context& ctx) const {
  if (stable_ && (u.error || v.error)) {
    enter_error(u);
    enter_error(v);
    backup_exact_step(u.backup, v.backup);
    flip_parities(u.core, v.core);
    return;
  }

  const JuntaOutcome raised = core_junta(u.core, v.core, profile_);
  if (raised.u_level_raised) reinit(u);
  if (raised.v_level_raised) reinit(v);
  const bool same_level = u.core.junta.level == v.core.junta.level;
  const int su = stage_of(u);
  const int sv = stage_of(v);
  const TickOutcome t = core_clock(u.core, v.core, profile_);

  // Phase counters are compared once both agents finished the election; before
  // that, level changes legitimately restart clocks.
  if (stable_ && same_level && su != kElection && sv != kElection &&
      !clocks_consistent(u.core.clock, v.core.clock, profile_.clock_modulus)) {
    enter_error(u);
    enter_error(v);
  } else {
    if (t.u_ticked) tick(u, v, ctx, su);
    if (t.v_ticked) tick(v, u, ctx, sv);
    if (same_level && !u.error && !v.error) pair(u, v, ctx);
  }

  if (stable_ && u.error && v.error) backup_exact_step(u.backup, v.backup);
  flip_parities(u.core, v.core);
}

std::int64_t ExactSuite::output(const State& s) const {
  if (stable_ && s.error) return s.backup.nmax;
  if (!s.done2 || refine_phase(s) < 2) return -1;
  return exact_output(s.k, s.l);
}

bool ExactSuite::is_stable(std::span<const State> states, std::uint32_t n) const {
  const std::size_t count = states.size();
  std::size_t errors = 0;
  for (const auto& s : states) errors += s.error ? 1 : 0;
  if (errors == count) {
    std::vector<BackupExactState> b(count);
    for (std::size_t i = 0; i < count; ++i) b[i] = states[i].backup;
    return backup_exact_stable(b, n);
  }
  if (errors != 0) return false;

  const auto& first = states.front();
  Load128 lo = first.l;
  Load128 hi = first.l;
  std::size_t leaders = 0;
  for (const auto& s : states) {
    if (s.core.junta.active || s.core.junta.level != first.core.junta.level) return false;
    if (!s.done2 || refine_phase(s) < 2 || !s.core.clock.stopped || s.k != first.k) return false;
    lo = std::min(lo, s.l);
    hi = std::max(hi, s.l);
    leaders += s.le.leader ? 1 : 0;
  }
  if (stable_ && leaders != 1) return false;
  return exact_output(first.k, lo) == n && exact_output(first.k, hi) == n;
}

void ExactSuite::fields(const State& s, std::int64_t* out) const {
  out[0] = s.core.junta.level;
  out[1] = s.core.junta.active;
  out[2] = s.core.junta.junta;
  out[3] = s.core.clock.clock;
  out[4] = s.core.clock.phase;
  out[5] = s.le.leader;
  out[6] = s.le.done1;
  out[7] = s.le.counter;
  out[8] = s.i;
  out[9] = s.k;
  out[10] = s.done2;
  out[11] = s.base;
  const Load128 cap = static_cast<Load128>(std::numeric_limits<std::int64_t>::max());
  out[12] = static_cast<std::int64_t>(s.l > cap ? cap : s.l);
  out[13] = s.error;
  out[14] = s.backup.counted;
  out[15] = s.backup.nmax;
}

std::optional<std::int64_t> ExactSuite::estimate_event(const State& before, const State& after) const {
  if (before.le.leader && after.le.leader && !before.done2 && after.done2) return after.k;
  return std::nullopt;
}

}  // namespace census
