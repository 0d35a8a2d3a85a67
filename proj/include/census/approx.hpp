#pragma once

// Approximate counting: leader election, the doubling search for k with
// 2^k close to n, result broadcast, and the stable hybrid that verifies the
// estimate and falls back to a slow token-merging protocol on failure.

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

/// Merged-token exponent (k = -1: no token) and the largest exponent seen.
struct BackupApproxState {
  std::int16_t k = 0;
  std::int16_t kmax = 0;

  friend bool operator==(const BackupApproxState&, const BackupApproxState&) = default;
};

/// Equal tokens merge into the initiator; both agents then record
/// K = max(kmax_u, kmax_v, k_u', k_v').
void backup_approx_step(BackupApproxState& u, BackupApproxState& v);

/// Relaxed rule: holders keep kmax = k; agents without a token learn the
/// largest exponent from holders and from each other.
void backup_approx_relaxed_step(BackupApproxState& u, BackupApproxState& v);

/// No merge is possible and every agent agrees on kmax.
bool backup_approx_stable(std::span<const BackupApproxState> states, bool relaxed);

inline std::int64_t backup_approx_output(const BackupApproxState& s, bool relaxed) {
  return (relaxed && s.k >= 0) ? s.k : s.kmax;
}

std::int32_t floor_log2(std::uint64_t n);
std::int32_t ceil_log2(std::uint64_t n);

class BackupApproxSuite {
 public:
  using State = BackupApproxState;
  static constexpr std::array<std::string_view, 2> kFields{"k", "kmax"};

  explicit BackupApproxSuite(bool relaxed = false) : relaxed_(relaxed) {}
  std::string_view name() const { return relaxed_ ? "backup-approx-relaxed" : "backup-approx"; }
  State initial(std::uint32_t, std::uint32_t) const { return {}; }
  void interact(State& u, State& v, Context&) const {
    relaxed_ ? backup_approx_relaxed_step(u, v) : backup_approx_step(u, v);
  }
  std::int64_t output(const State& s) const { return backup_approx_output(s, relaxed_); }
  bool output_ok(const State& s, std::int64_t out, std::uint32_t n) const;
  bool is_stable(std::span<const State> states, std::uint32_t) const {
    return backup_approx_stable(states, relaxed_);
  }
  std::int64_t ground_truth(std::uint32_t n) const { return floor_log2(n); }
  void fields(const State& s, std::int64_t* out) const {
    out[0] = s.k;
    out[1] = s.kmax;
  }

 private:
  bool relaxed_;
};

enum class ApproxVariant { plain, stable, stable_relaxed };

inline constexpr std::int8_t kEdOff = -2;

struct ApproxAgent {
  ClockedCore core;
  LeaderState le;
  /// Leader: current search exponent. Others: logarithmic load, -1 = empty.
  std::int16_t k = 0;
  bool done2 = false;
  /// Restarted phase counter of the verification stage; kEdOff before entry,
  /// -1 between entry and the next tick.
  std::int8_t ed_phase = kEdOff;
  std::uint8_t l = 0;
  bool ed_computed = false;
  bool error = false;
  BackupApproxState backup;
};

class ApproxSuite {
 public:
  using State = ApproxAgent;
  static constexpr std::array<std::string_view, 16> kFields{
      "level", "active", "junta", "clock", "phase",  "leader", "done1",   "heads",
      "k",     "done2",  "ed_phase", "l", "ed_computed", "error", "backup_k", "backup_kmax"};

  ApproxSuite(const Profile& profile, ApproxVariant variant, Fault fault = {})
      : profile_(profile), variant_(variant), fault_(fault) {}

  std::string_view name() const;
  State initial(std::uint32_t, std::uint32_t) const { return {}; }
  void interact(State& u, State& v, Context& ctx) const;
  std::int64_t output(const State& s) const;
  bool output_ok(const State& s, std::int64_t out, std::uint32_t n) const;
  bool is_stable(std::span<const State> states, std::uint32_t n) const;
  std::int64_t ground_truth(std::uint32_t n) const { return floor_log2(n); }
  void fields(const State& s, std::int64_t* out) const;
  std::optional<std::uint32_t> phase_of(const State& s) const { return s.core.clock.phase; }
  bool is_leader(const State& s) const { return s.le.leader; }
  bool has_done1(const State& s) const { return s.le.done1; }
  bool in_error(const State& s) const { return s.error; }
  /// The leader's k at the moment it ends the search.
  std::optional<std::int64_t> estimate_event(const State& before, const State& after) const;

  [[nodiscard]] ApproxVariant variant() const { return variant_; }

 private:
  [[nodiscard]] bool stable() const { return variant_ != ApproxVariant::plain; }
  [[nodiscard]] bool relaxed() const { return variant_ == ApproxVariant::stable_relaxed; }
  void enter_error(State& x) const;
  void backup(State& u, State& v) const;
  void reinit(State& x) const;
  void tick(State& x, State& y, Context& ctx, bool was_searching, bool was_verifying) const;
  void pair(State& u, State& v) const;

  Profile profile_;
  ApproxVariant variant_;
  Fault fault_;
};

}  // namespace census
