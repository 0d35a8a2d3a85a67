#pragma once

// Experiment plumbing: protocol registry, sweeps over (n, seed) cells,
// complexity fits and CSV/JSON emission.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "census/engine.hpp"
#include "census/fault.hpp"
#include "census/profile.hpp"

namespace census {

enum class ComplexityForm { n_log_n, n_log2_n, n2_log_n };

std::string_view form_name(ComplexityForm form);
/// Value of the form at n, with base-2 logarithms.
double form_value(ComplexityForm form, double n);

struct FitResult {
  /// Least-squares constant for T = c * form(n).
  double c = 0;
  /// T / form(n) per point.
  std::vector<double> ratios;
  /// T - c * form(n) per point.
  std::vector<double> residuals;
};

/// Throws std::invalid_argument unless the points cover at least two
/// distinct n.
FitResult fit_complexity(std::span<const std::pair<double, double>> points, ComplexityForm form);

struct ProtocolInfo {
  std::string_view name;
  ComplexityForm form;
  std::string_view summary;
};

const std::vector<ProtocolInfo>& protocols();
const ProtocolInfo& protocol_info(std::string_view name);

/// Interaction budget used when a spec does not set one.
std::uint64_t default_max_interactions(std::string_view protocol, std::uint32_t n);

/// Run one (protocol, n, seed) cell.
RunMetrics run_cell(std::string_view protocol, std::uint32_t n, std::uint64_t seed, const Profile& profile,
                    const Fault& fault, const RunLimits& limits);

struct ExperimentSpec {
  std::string protocol;
  std::vector<std::uint32_t> ns;
  std::vector<std::uint64_t> seeds;
  std::string profile = "desk";
  std::map<std::string, std::string> overrides;
  /// 0 selects default_max_interactions.
  std::uint64_t max_interactions = 0;
  std::uint64_t probe_window = 0;
  std::string fault;
  bool record_usage = true;
  std::vector<std::string> outputs;
  std::string trace;
};

/// "a", "a..b" or a comma list of either; `key` names the setting in errors.
std::vector<std::uint64_t> parse_int_list(std::string_view key, std::string_view text);

/// Seeds 0 .. count-1.
std::vector<std::uint64_t> seed_range(std::uint64_t count);

struct RunRecord {
  std::string protocol;
  std::string profile;
  RunMetrics metrics;
};

struct Aggregate {
  std::string protocol;
  std::uint32_t n = 0;
  std::size_t runs = 0;
  double success_rate = 0;
  std::optional<double> median_tc;
  std::optional<double> p95_tc;
  /// Least-squares constant over this n's converged runs.
  std::optional<double> fitted_c;
  ComplexityForm form = ComplexityForm::n_log_n;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<Aggregate> aggregates;
};

/// Resolve profile, overrides and fault; throws std::invalid_argument on any
/// unknown protocol, override key, fault or n < 2.
struct ResolvedSpec {
  Profile profile;
  Fault fault;
};
ResolvedSpec validate(const ExperimentSpec& spec);

/// Thread count from CENSUS_THREADS, else the hardware concurrency.
unsigned thread_count_from_env();

/// Run every cell (in parallel when threads > 1) and aggregate per n.
ExperimentResult sweep(const ExperimentSpec& spec, unsigned threads = 0);

/// Aggregates computed from an arbitrary set of runs of one protocol.
std::vector<Aggregate> aggregate(std::span<const RunRecord> runs, ComplexityForm form);

/// Nearest-rank percentile (q in (0, 1]) of a non-empty sample.
double percentile(std::vector<double> values, double q);

inline constexpr std::string_view kCsvHeader =
    "protocol,n,seed,profile,correct,t_convergence,t_stabilization,distinct_states,error_raised";

std::string to_csv(const ExperimentResult& result);
std::string to_json(const ExperimentResult& result);
/// Write by extension (.csv or .json); throws std::runtime_error if the path
/// cannot be written and std::invalid_argument on other extensions.
void emit(const ExperimentResult& result, const std::string& path);

/// Flat "key = value" text with '#' comments; lists are comma separated.
/// Keys: protocol, n, seeds, seed, profile, max_interactions, probe_window,
/// override, fault, out, trace.
ExperimentSpec parse_config(std::string_view text);
ExperimentSpec load_config(const std::string& path);

}  // namespace census
