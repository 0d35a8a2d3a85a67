#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace census {

enum class CoinMode { synthetic, scheduler };
enum class JuntaMode { symmetric, one_sided };

/// Every protocol constant that differs between the asymptotic construction
/// and a run that finishes on a laptop.
struct Profile {
  std::string name = "desk";

  /// Phase-length multiplier: phases are meant to last at least
  /// phase_c * n * ln n interactions.
  std::uint32_t phase_c = 8;
  /// Clock modulus m.
  std::uint32_t clock_modulus = 48;
  /// Exponents of the form 2^(level - level_offset), floored at 2^0.
  std::uint32_t level_offset = 0;
  /// Phase at which FastLeaderElection concludes.
  std::uint32_t terminal_phase = 16;
  /// Inner phases the slow election runs before setting done1.
  std::uint32_t outer_modulus = 24;
  /// Upper bound on random bits a contender draws per even phase.
  std::uint32_t bit_budget_cap = 64;
  /// Saturation point of the exact phase counter.
  std::uint32_t phase_cap = 1U << 16;
  CoinMode coins = CoinMode::synthetic;
  JuntaMode junta = JuntaMode::symmetric;
};

Profile desk_profile();
Profile paper_profile();
/// "desk" or "paper"; throws std::invalid_argument otherwise.
Profile profile_by_name(std::string_view name);

/// Apply named overrides (clock_c, clock_modulus, level_offset,
/// terminal_phase, outer_modulus, bit_budget, coins, junta). Unknown keys or
/// malformed values throw std::invalid_argument before anything runs.
void apply_overrides(Profile& profile, const std::map<std::string, std::string>& overrides);

/// max(1, 2^(level - offset)), the exponent shared by the approximation stage
/// and the fast election's bit budget.
std::uint64_t level_exponent(std::uint32_t level, std::uint32_t offset);

}  // namespace census
