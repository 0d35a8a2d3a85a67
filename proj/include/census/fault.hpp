#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace census {

enum class FaultKind {
  none,
  /// Shift the leader's k by `delta` when it finishes the search.
  corrupt_k_pre_errordetect,
  /// Shift the leader's k by `delta` when it finishes the approximation stage.
  corrupt_k_pre_refine,
  /// When a leader first reaches done1, its partner becomes a second leader
  /// that has also finished the election.
  dup_leader_post_election,
};

struct Fault {
  FaultKind kind = FaultKind::none;
  std::int32_t delta = 0;

  friend bool operator==(const Fault&, const Fault&) = default;
};

/// Parses "corrupt-k:<delta>@pre-errordetect", "corrupt-k:<delta>@pre-refine"
/// or "dup-leader@post-election"; an empty string means no fault. Throws
/// std::invalid_argument on anything else.
Fault parse_fault(std::string_view text);
std::string to_string(const Fault& fault);

}  // namespace census
