#include "census/approx.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "census/balancing.hpp"
#include "census/kernels.hpp"

namespace census {

std::int32_t floor_log2(std::uint64_t n) { return n == 0 ? -1 : 63 - std::countl_zero(n); }

std::int32_t ceil_log2(std::uint64_t n) { return n <= 1 ? 0 : floor_log2(n - 1) + 1; }

void backup_approx_step(BackupApproxState& u, BackupApproxState& v) {
  if (u.k == v.k && u.k >= 0) {
    ++u.k;
    v.k = -1;
  }
  const std::int16_t K = std::max({u.kmax, v.kmax, u.k, v.k});
  u.kmax = K;
  v.kmax = K;
}

void backup_approx_relaxed_step(BackupApproxState& u, BackupApproxState& v) {
  if (u.k == v.k && u.k >= 0) {
    ++u.k;
    v.k = -1;
  }
  const std::int16_t seen_u = u.k >= 0 ? u.k : u.kmax;
  const std::int16_t seen_v = v.k >= 0 ? v.k : v.kmax;
  u.kmax = u.k >= 0 ? u.k : std::max(u.kmax, seen_v);
  v.kmax = v.k >= 0 ? v.k : std::max(v.kmax, seen_u);
}

bool backup_approx_stable(std::span<const BackupApproxState> states, bool relaxed) {
  std::uint64_t seen = 0;
  std::int16_t top = -1;
  for (const auto& s : states) {
    if (s.k < 0) continue;
    if (s.k >= 64) return false;
    const std::uint64_t bit = std::uint64_t{1} << s.k;
    if (seen & bit) return false;
    seen |= bit;
    top = std::max(top, s.k);
  }
  return std::all_of(states.begin(), states.end(), [&](const BackupApproxState& s) {
    return (relaxed && s.k >= 0) || s.kmax == top;
  });
}

bool BackupApproxSuite::output_ok(const State& s, std::int64_t out, std::uint32_t n) const {
  if (relaxed_ && s.k >= 0) return true;
  return out == floor_log2(n);
}

std::string_view ApproxSuite::name() const {
  switch (variant_) {
    case ApproxVariant::plain:
      return "approximate";
    case ApproxVariant::stable:
      return "approximate-stable";
    case ApproxVariant::stable_relaxed:
      return "approximate-stable-relaxed";
  }
  return "approximate";
}

void ApproxSuite::enter_error(State& x) const {
  if (x.error) return;
  x.error = true;
  x.backup = BackupApproxState{};
}

void ApproxSuite::backup(State& u, State& v) const {
  relaxed() ? backup_approx_relaxed_step(u.backup, v.backup) : backup_approx_step(u.backup, v.backup);
}

void ApproxSuite::reinit(State& x) const {
  x.le = LeaderState{};
  x.k = 0;
  x.done2 = false;
  x.ed_phase = kEdOff;
  x.l = 0;
  x.ed_computed = false;
}

void ApproxSuite::tick(State& x, State& y, Context& ctx, bool was_searching, bool was_verifying) const {
  const std::uint32_t phase = x.core.clock.phase;
  if (!x.le.done1) {
    const bool was_leader = x.le.leader;
    slow_leader_tick(x.le, phase, draw_coin(y.core, ctx, profile_.coins), {profile_.outer_modulus});
    if (fault_.kind == FaultKind::dup_leader_post_election && x.le.done1 && was_leader && x.le.leader) {
      y.le.leader = true;
      y.le.done1 = true;
    }
    return;
  }

  if (was_searching && x.le.leader) {
    switch (phase % 5) {
      case 1:  // load infusion
        y.k = x.k;
        break;
      case 4:  // decision
        if (y.k <= 0) {
          ++x.k;
        } else {
          x.done2 = true;
          if (fault_.kind == FaultKind::corrupt_k_pre_errordetect) {
            x.k = static_cast<std::int16_t>(x.k + fault_.delta);
          }
          if (stable()) {
            x.ed_phase = -1;
            x.l = 0;
          }
        }
        break;
      default:
        break;
    }
  }

  if (!was_verifying) return;
  if (x.ed_phase < 4) ++x.ed_phase;
  switch (x.ed_phase) {
    case 0:
      if (x.le.leader) y.k = static_cast<std::int16_t>(std::max(-1, x.k - 2));
      break;
    case 2:
      if (x.le.leader || x.k == -1) {
        x.l = 0;
      } else if (x.k == 0) {
        x.l = 32;
      } else {
        enter_error(x);
      }
      break;
    case 4:
      if (x.le.leader) {
        if (x.l == 0) {
          enter_error(x);
        } else {
          x.k = static_cast<std::int16_t>(std::lround(x.k + 3 - std::log2(static_cast<double>(x.l))));
          x.ed_computed = true;
        }
      }
      x.core.clock.stopped = true;
      break;
    default:
      break;
  }
}

void ApproxSuite::pair(State& u, State& v) const {
  const bool same_phase = u.core.clock.phase == v.core.clock.phase;
  slow_leader_pair(u.le, v.le, same_phase);
  if (!u.le.done1 || !v.le.done1) return;
  if (stable() && u.le.leader && v.le.leader) {
    enter_error(u);
    enter_error(v);
    return;
  }

  if (u.done2 != v.done2) {
    const State& src = u.done2 ? u : v;
    State& dst = u.done2 ? v : u;
    dst.done2 = true;
    if (stable()) {
      dst.k = -1;
      dst.l = 0;
      dst.ed_phase = -1;
    } else {
      dst.k = src.k;
    }
    return;
  }
  if (!same_phase) return;

  if (!u.done2) {
    switch (u.core.clock.phase % 5) {
      case 0:
        if (!u.le.leader) u.k = -1;
        if (!v.le.leader) v.k = -1;
        break;
      case 2: {
        const auto [a, b] = pow2_balance(u.k, v.k, u.le.leader, v.le.leader);
        u.k = static_cast<std::int16_t>(a);
        v.k = static_cast<std::int16_t>(b);
        break;
      }
      case 3:
        if (!u.le.leader && !v.le.leader) u.k = v.k = std::max(u.k, v.k);
        break;
      default:
        break;
    }
    return;
  }

  if (!stable() || u.ed_phase != v.ed_phase) return;
  switch (u.ed_phase) {
    case 1: {
      const auto [a, b] = pow2_balance(u.k, v.k, u.le.leader, v.le.leader);
      u.k = static_cast<std::int16_t>(a);
      v.k = static_cast<std::int16_t>(b);
      break;
    }
    case 3: {
      const auto [a, b] = classical_balance<unsigned>(u.l, v.l);
      u.l = static_cast<std::uint8_t>(a);
      v.l = static_cast<std::uint8_t>(b);
      break;
    }
    case 4: {
      if (u.l < 3 || v.l < 3 || std::abs(int{u.l} - int{v.l}) > 2) {
        enter_error(u);
        enter_error(v);
        return;
      }
      const std::int16_t ku = u.k;
      const std::int16_t kv = v.k;
      if (!v.le.leader || v.ed_computed) u.k = std::max(ku, kv);
      if (!u.le.leader || u.ed_computed) v.k = std::max(kv, ku);
      break;
    }
    default:
      break;
  }
}

void ApproxSuite::interact(State& u, State& v, Context& ctx) const {
  if (stable() && (u.error || v.error)) {
    enter_error(u);
    enter_error(v);
    backup(u, v);
    flip_parities(u.core, v.core);
    return;
  }

  const JuntaOutcome raised = core_junta(u.core, v.core, profile_);
  if (raised.u_level_raised) reinit(u);
  if (raised.v_level_raised) reinit(v);
  const bool same_level = u.core.junta.level == v.core.junta.level;
  const bool u_searching = u.le.done1 && !u.done2;
  const bool v_searching = v.le.done1 && !v.done2;
  const bool u_verifying = u.ed_phase != kEdOff;
  const bool v_verifying = v.ed_phase != kEdOff;
  const TickOutcome t = core_clock(u.core, v.core, profile_);

  if (t.u_ticked) tick(u, v, ctx, u_searching, u_verifying);
  if (t.v_ticked) tick(v, u, ctx, v_searching, v_verifying);
  // Restarted phase counters must move in step with the clock phases.
  const auto phase_gap = static_cast<std::int64_t>(u.core.clock.phase) - v.core.clock.phase;
  if (stable() && same_level && u.ed_phase >= 0 && v.ed_phase >= 0 && u.ed_phase - v.ed_phase != phase_gap) {
    enter_error(u);
    enter_error(v);
  } else if (same_level && !u.error && !v.error) {
    pair(u, v);
  }

  if (stable()) {
    const bool both_error = u.error && v.error;
    const bool both_early = !u.error && !v.error && !u.le.done1 && !v.le.done1;
    if (both_error || both_early) backup(u, v);
  }
  flip_parities(u.core, v.core);
}

std::int64_t ApproxSuite::output(const State& s) const {
  if (stable() && (s.error || !s.le.done1)) return backup_approx_output(s.backup, relaxed());
  return s.k;
}

bool ApproxSuite::output_ok(const State& s, std::int64_t out, std::uint32_t n) const {
  if (relaxed() && (s.error || !s.le.done1) && s.backup.k >= 0) return true;
  return out == floor_log2(n) || out == ceil_log2(n);
}

bool ApproxSuite::is_stable(std::span<const State> states, std::uint32_t) const {
  const std::size_t n = states.size();
  std::size_t errors = 0;
  for (const auto& s : states) errors += s.error ? 1 : 0;
  if (errors == n) {
    std::vector<BackupApproxState> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = states[i].backup;
    return backup_approx_stable(b, relaxed());
  }
  if (errors != 0) return false;

  const auto& first = states.front();
  std::vector<std::int64_t> ks(n);
  std::vector<std::int64_t> ls(n);
  std::int64_t leaders = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = states[i];
    if (s.core.junta.active || s.core.junta.level != first.core.junta.level) return false;
    if (!s.le.done1 || !s.done2) return false;
    if (stable()) {
      if (s.ed_phase != 4) return false;
      if (s.le.leader) {
        if (!s.ed_computed) return false;
        ++leaders;
      }
    }
    ks[i] = s.k;
    ls[i] = s.l;
  }
  if (kernels::count_equal_i64(ks, ks[0]) != n) return false;
  if (!stable()) return true;
  if (leaders != 1) return false;
  const auto mm = kernels::minmax_i64(ls);
  return mm.min >= 3 && mm.max - mm.min <= 2;
}

void ApproxSuite::fields(const State& s, std::int64_t* out) const {
  out[0] = s.core.junta.level;
  out[1] = s.core.junta.active;
  out[2] = s.core.junta.junta;
  out[3] = s.core.clock.clock;
  out[4] = s.core.clock.phase;
  out[5] = s.le.leader;
  out[6] = s.le.done1;
  out[7] = s.le.heads;
  out[8] = s.k;
  out[9] = s.done2;
  out[10] = s.ed_phase;
  out[11] = s.l;
  out[12] = s.ed_computed;
  out[13] = s.error;
  out[14] = s.backup.k;
  out[15] = s.backup.kmax;
}

std::optional<std::int64_t> ApproxSuite::estimate_event(const State& before, const State& after) const {
  if (after.le.leader && !before.done2 && after.done2 && before.le.leader) return after.k;
  return std::nullopt;
}

}  // namespace census
