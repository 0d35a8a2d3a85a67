#include "census/profile.hpp"

#include <charconv>
#include <stdexcept>

namespace census {

namespace {

std::uint32_t parse_u32(const std::string& key, const std::string& value) {
  std::uint32_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("override '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

}  // namespace

Profile desk_profile() { return Profile{}; }

Profile paper_profile() {
  Profile p;
  p.name = "paper";
  p.phase_c = 20;
  p.clock_modulus = 6 * p.phase_c;
  p.level_offset = 8;
  p.terminal_phase = 1U << 13;
  p.outer_modulus = 60;
  return p;
}

Profile profile_by_name(std::string_view name) {
  if (name == "desk") return desk_profile();
  if (name == "paper") return paper_profile();
  throw std::invalid_argument("unknown profile '" + std::string(name) + "' (expected desk or paper)");
}

void apply_overrides(Profile& profile, const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) {
    if (key == "clock_c") {
      profile.phase_c = parse_u32(key, value);
      profile.clock_modulus = 6 * profile.phase_c;
    } else if (key == "clock_modulus") {
      profile.clock_modulus = parse_u32(key, value);
    } else if (key == "level_offset") {
      profile.level_offset = parse_u32(key, value);
    } else if (key == "terminal_phase") {
      profile.terminal_phase = parse_u32(key, value);
    } else if (key == "outer_modulus") {
      profile.outer_modulus = parse_u32(key, value);
    } else if (key == "bit_budget") {
      profile.bit_budget_cap = parse_u32(key, value);
      if (profile.bit_budget_cap == 0 || profile.bit_budget_cap > 64) {
        throw std::invalid_argument("override 'bit_budget' must be in [1, 64]");
      }
    } else if (key == "coins") {
      if (value == "synthetic") profile.coins = CoinMode::synthetic;
      else if (value == "scheduler") profile.coins = CoinMode::scheduler;
      else throw std::invalid_argument("override 'coins' expects synthetic or scheduler");
    } else if (key == "junta") {
      if (value == "symmetric") profile.junta = JuntaMode::symmetric;
      else if (value == "one-sided") profile.junta = JuntaMode::one_sided;
      else throw std::invalid_argument("override 'junta' expects symmetric or one-sided");
    } else {
      throw std::invalid_argument("unknown override key '" + key + "'");
    }
  }
  if (profile.clock_modulus < 4) throw std::invalid_argument("clock modulus must be at least 4");
  if (profile.clock_modulus > 0xFFFF) throw std::invalid_argument("clock modulus must fit 16 bits");
}

std::uint64_t level_exponent(std::uint32_t level, std::uint32_t offset) {
  if (level <= offset) return 1;
  const std::uint32_t shift = level - offset;
  if (shift >= 63) throw std::overflow_error("level exponent exceeds 64 bits");
  return std::uint64_t{1} << shift;
}

}  // namespace census
