#pragma once

// Exact counting: fast leader election, an approximation stage that grows a
// token load until the leader's share pins down log n, and a refinement stage
// whose balanced load l yields n = round(2^8 * 2^(2k) / l).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "census/basic_suites.hpp"
#include "census/engine.hpp"
#include "census/fault.hpp"
#include "census/leader.hpp"
#include "census/profile.hpp"

namespace census {

using Load128 = unsigned __int128;

struct BackupExactState {
  bool counted = false;
  std::uint32_t nmax = 1;

  friend bool operator==(const BackupExactState&, const BackupExactState&) = default;
};

/// Two uncounted agents pool their tokens in the initiator and the responder
/// becomes counted. Otherwise counted agents move to the larger nmax while
/// uncounted agents keep their token count.
void backup_exact_step(BackupExactState& u, BackupExactState& v);

/// Exactly one uncounted agent remains and every agent reports n.
bool backup_exact_stable(std::span<const BackupExactState> states, std::uint32_t n);

class BackupExactSuite {
 public:
  using State = BackupExactState;
  static constexpr std::array<std::string_view, 2> kFields{"counted", "nmax"};

  std::string_view name() const { return "backup-exact"; }
  State initial(std::uint32_t, std::uint32_t) const { return {}; }
  void interact(State& u, State& v, Context&) const { backup_exact_step(u, v); }
  std::int64_t output(const State& s) const { return s.nmax; }
  bool output_ok(const State&, std::int64_t out, std::uint32_t n) const { return out == n; }
  bool is_stable(std::span<const State> states, std::uint32_t n) const { return backup_exact_stable(states, n); }
  std::int64_t ground_truth(std::uint32_t n) const { return n; }
  void fields(const State& s, std::int64_t* out) const {
    out[0] = s.counted;
    out[1] = s.nmax;
  }
};

/// round(2^8 * 2^(2k) / l) in exact integer arithmetic; -1 when l = 0 or the
/// numerator does not fit 128 bits.
std::int64_t exact_output(std::int32_t k, Load128 l);

/// x * 2^shift, throwing SimulationAbort if the result leaves 128 bits.
Load128 checked_shift(Load128 x, std::uint64_t shift);

struct ExactAgent {
  ClockedCore core;
  FastLeaderState le;
  std::uint32_t i = 0;
  std::int32_t k = -1;
  bool done2 = false;
  /// Phase in which the leader found its approximation (refinement phase 0).
  std::uint32_t base = 0;
  Load128 l = 0;
  bool error = false;
  BackupExactState backup;
};

class ExactSuite {
 public:
  using State = ExactAgent;
  static constexpr std::array<std::string_view, 16> kFields{
      "level", "active", "junta", "clock", "phase", "leader", "done1",   "counter",
      "i",     "k",      "done2", "base",  "l",     "error",  "counted", "nmax"};

  ExactSuite(const Profile& profile, bool stable, Fault fault = {})
      : profile_(profile), stable_(stable), fault_(fault) {}

  std::string_view name() const { return stable_ ? "count-exact-stable" : "count-exact"; }
  State initial(std::uint32_t, std::uint32_t) const { return {}; }
  void interact(State& u, State& v, Context& ctx) const;
  std::int64_t output(const State& s) const;
  bool output_ok(const State&, std::int64_t out, std::uint32_t n) const { return out == n; }
  bool is_stable(std::span<const State> states, std::uint32_t n) const;
  std::int64_t ground_truth(std::uint32_t n) const { return n; }
  void fields(const State& s, std::int64_t* out) const;
  std::optional<std::uint32_t> phase_of(const State& s) const { return s.core.clock.phase; }
  bool is_leader(const State& s) const { return s.le.leader; }
  bool has_done1(const State& s) const { return s.le.done1; }
  bool in_error(const State& s) const { return s.error; }
  /// The leader's k at the moment it leaves the approximation stage.
  std::optional<std::int64_t> estimate_event(const State& before, const State& after) const;

  /// Refinement phase 0, 1 or 2 (saturating) of an agent with done2.
  static std::uint32_t refine_phase(const State& s);

 private:
  void enter_error(State& x) const;
  void reinit(State& x) const;
  void tick(State& x, State& y, Context& ctx, int stage_before) const;
  void pair(State& u, State& v, Context& ctx) const;

  Profile profile_;
  bool stable_;
  Fault fault_;
};

}  // namespace census
