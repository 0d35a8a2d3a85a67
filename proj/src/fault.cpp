#include "census/fault.hpp"

#include <charconv>
#include <stdexcept>

namespace census {

Fault parse_fault(std::string_view text) {
  if (text.empty() || text == "none") return {};
  if (text == "dup-leader@post-election") return {FaultKind::dup_leader_post_election, 0};
  constexpr std::string_view prefix = "corrupt-k:";
  const auto at = text.find('@');
  if (text.substr(0, prefix.size()) != prefix || at == std::string_view::npos) {
    throw std::invalid_argument("unknown fault '" + std::string(text) + "'");
  }
  const std::string_view number = text.substr(prefix.size(), at - prefix.size());
  const std::string_view stage = text.substr(at + 1);
  std::int32_t delta = 0;
  const char* first = number.data();
  if (!number.empty() && number.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, number.data() + number.size(), delta);
  if (number.empty() || ec != std::errc{} || ptr != number.data() + number.size()) {
    throw std::invalid_argument("fault delta must be an integer, got '" + std::string(number) + "'");
  }
  if (stage == "pre-errordetect") return {FaultKind::corrupt_k_pre_errordetect, delta};
  if (stage == "pre-refine") return {FaultKind::corrupt_k_pre_refine, delta};
  throw std::invalid_argument("unknown fault stage '" + std::string(stage) + "'");
}

std::string to_string(const Fault& fault) {
  switch (fault.kind) {
    case FaultKind::none:
      return "none";
    case FaultKind::corrupt_k_pre_errordetect:
      return "corrupt-k:" + std::to_string(fault.delta) + "@pre-errordetect";
    case FaultKind::corrupt_k_pre_refine:
      return "corrupt-k:" + std::to_string(fault.delta) + "@pre-refine";
    case FaultKind::dup_leader_post_election:
      return "dup-leader@post-election";
  }
  return "none";
}

}  // namespace census
