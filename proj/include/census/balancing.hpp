#pragma once

#include <cstdint>
#include <type_traits>
#include <utility>

namespace census {

/// Logarithmic load: k >= 0 stands for 2^k tokens, k = -1 for none.
using LogLoad = std::int32_t;
inline constexpr LogLoad kEmpty = -1;

/// Powers-of-two balancing. A loaded agent with k > 0 splits into an empty
/// partner, both ending at k - 1. Leaders never take part.
constexpr std::pair<LogLoad, LogLoad> pow2_balance(LogLoad k_u, LogLoad k_v, bool u_is_leader,
                                                   bool v_is_leader) {
  if (u_is_leader || v_is_leader) return {k_u, k_v};
  if (k_u > 0 && k_v == kEmpty) return {k_u - 1, k_u - 1};
  if (k_v > 0 && k_u == kEmpty) return {k_v - 1, k_v - 1};
  return {k_u, k_v};
}

/// Floor/ceil averaging; the initiator keeps the floor.
template <class T>
constexpr std::pair<T, T> classical_balance(T l_u, T l_v) {
  static_assert(std::is_unsigned_v<T> || std::is_same_v<T, unsigned __int128>,
                "loads are non-negative token counts");
  const T lo = l_u < l_v ? l_u : l_v;
  const T hi = l_u < l_v ? l_v : l_u;
  // lo + (hi - lo) / 2 avoids overflowing the sum.
  const T floor_half = lo + (hi - lo) / 2;
  const T ceil_half = hi - (hi - lo) / 2;
  return {floor_half, ceil_half};
}

}  // namespace census
