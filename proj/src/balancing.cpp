#include "census/balancing.hpp"

namespace census {

static_assert(pow2_balance(3, kEmpty, false, false) == std::pair<LogLoad, LogLoad>{2, 2});
static_assert(pow2_balance(0, kEmpty, false, false) == std::pair<LogLoad, LogLoad>{0, kEmpty});
static_assert(classical_balance<std::uint64_t>(5, 2) == std::pair<std::uint64_t, std::uint64_t>{3, 4});

}  // namespace census
