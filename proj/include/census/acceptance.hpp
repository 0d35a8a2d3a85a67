#pragma once

// The acceptance suite behind `census check`: scaled statistical experiments
// and exact property sweeps, one pass/fail line per criterion.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace census {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  /// 0 reads CENSUS_THREADS or the hardware concurrency.
  unsigned threads = 0;
  /// Criterion ids to run; empty runs all ten.
  std::vector<int> only;
  /// Called as soon as each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriterionCount = 10;
/// Wall-clock limit for the full suite, checked by the determinism criterion.
inline constexpr double kSuiteTimeLimitSeconds = 900;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

bool all_passed(std::span<const CriterionResult> results);

/// "PASS  [3] name: detail (1.2 s)".
std::string format_result(const CriterionResult& r);

/// Criterion 5 on its own, over n in [n_lo, n_hi]; returns the number of
/// (n, r, k) triples where either route disagrees with n.
std::uint64_t output_algebra_failures(std::uint32_t n_lo, std::uint32_t n_hi);

}  // namespace census
