#include "census/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "census/approx.hpp"
#include "census/basic_suites.hpp"
#include "census/engine.hpp"
#include "census/exact.hpp"
#include "census/harness.hpp"
#include "census/kernels.hpp"

namespace census {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CriterionResult start_criterion(int id, std::string name) {
  CriterionResult c;
  c.id = id;
  c.name = std::move(name);
  return c;
}

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

ExperimentResult sweep_of(const std::string& protocol, std::vector<std::uint32_t> ns, std::uint64_t seeds,
                          unsigned threads, const std::string& fault = "") {
  ExperimentSpec spec;
  spec.protocol = protocol;
  spec.ns = std::move(ns);
  spec.seeds = seed_range(seeds);
  spec.fault = fault;
  spec.record_usage = false;
  return sweep(spec, threads);
}

/// Success rate >= threshold at every n, and per-n median T_C / form(n)
/// within a factor of two.
CriterionResult scaling_criterion(int id, std::string name, const ExperimentResult& r, ComplexityForm form,
                                  double threshold) {
  CriterionResult c = start_criterion(id, std::move(name));
  std::ostringstream detail;
  bool ok = true;
  std::vector<double> ratios;
  std::vector<std::pair<double, double>> points;
  for (const auto& a : r.aggregates) {
    ok = ok && a.success_rate >= threshold;
    detail << "n=" << a.n << " ok=" << fmt("%.2f", a.success_rate);
    if (a.median_tc) {
      const double ratio = *a.median_tc / form_value(form, a.n);
      ratios.push_back(ratio);
      points.emplace_back(a.n, *a.median_tc);
      detail << " T/f=" << fmt("%.1f", ratio);
    } else {
      ok = false;
    }
    detail << "; ";
  }
  if (ratios.size() == r.aggregates.size() && !ratios.empty()) {
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    const double spread = *hi / *lo;
    ok = ok && spread <= 2.0;
    detail << "spread=" << fmt("%.2f", spread);
    if (points.size() >= 2) detail << " c_hat=" << fmt("%.1f", fit_complexity(points, form).c);
  }
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

CriterionResult approximate_correctness(unsigned threads) {
  const auto r = sweep_of("approximate", {256, 1024, 4096}, 50, threads);
  return scaling_criterion(1, "approximate outputs log n, T_C ~ n log^2 n", r, ComplexityForm::n_log2_n, 0.90);
}

CriterionResult pow2_balancing_bound() {
  CriterionResult c = start_criterion(2, "powers-of-two balancing clears the source in 16 n log n");
  std::ostringstream detail;
  bool ok = true;
  const Pow2BalanceSuite suite;
  for (const std::uint32_t n : {256U, 1024U}) {
    const auto steps = static_cast<std::uint64_t>(16.0 * n * std::log2(n));
    int good = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Simulation<Pow2BalanceSuite> sim(suite, n, seed);
      for (std::uint64_t s = 0; s < steps; ++s) sim.step();
      std::int64_t top = kEmpty;
      for (const auto& x : sim.states()) top = std::max<std::int64_t>(top, x.k);
      good += top <= 0 ? 1 : 0;
    }
    ok = ok && good >= 95;
    detail << "n=" << n << " " << good << "/100; ";
  }
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

CriterionResult exact_correctness(const ExperimentResult& r) {
  return scaling_criterion(3, "count-exact outputs n, T_C ~ n log n", r, ComplexityForm::n_log_n, 0.90);
}

CriterionResult exact_estimate_quality(const ExperimentResult& r) {
  CriterionResult c = start_criterion(4, "count-exact leader estimate within log n +- 3");
  std::map<std::uint32_t, std::pair<int, int>> per_n;
  for (const auto& run : r.runs) {
    const auto& m = run.metrics;
    const double lg = std::log2(m.n);
    const auto& est = m.telemetry.leader_estimate;
    auto& [good, total] = per_n[m.n];
    ++total;
    if (est && *est >= lg - 3 && *est <= lg + 3) ++good;
  }
  std::ostringstream detail;
  bool ok = !per_n.empty();
  for (const auto& [n, gt] : per_n) {
    ok = ok && gt.first >= 0.9 * gt.second;
    detail << "n=" << n << " " << gt.first << "/" << gt.second << "; ";
  }
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

CriterionResult output_algebra() {
  CriterionResult c = start_criterion(5, "round(M / (M/n + r)) = n for M >= 4n^2");
  const auto failures = output_algebra_failures(4, 1'000'000);
  c.pass = failures == 0;
  c.detail = "n in [4, 1e6], r in {-1.5,-0.75,0,0.75,1.5}, 7 values of k each; failures=" + std::to_string(failures);
  return c;
}

CriterionResult election_uniqueness(unsigned threads) {
  CriterionResult c = start_criterion(6, "leader elections end with exactly one leader");
  std::ostringstream detail;
  bool ok = true;
  for (const char* protocol : {"slow-leader", "fast-leader"}) {
    const auto r = sweep_of(protocol, {1024}, 100, threads);
    int unique = 0;
    int never_empty = 0;
    for (const auto& run : r.runs) {
      unique += run.metrics.telemetry.leaders_at_first_done1 == 1 ? 1 : 0;
      never_empty += run.metrics.telemetry.min_leaders >= 1 ? 1 : 0;
    }
    ok = ok && unique >= 95 && never_empty == 100;
    detail << protocol << " unique=" << unique << "/100 min_leaders>=1 in " << never_empty << "/100; ";
  }
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

CriterionResult backup_exactness() {
  CriterionResult c = start_criterion(7, "backup protocols exact for n in [2, 64]");
  int exact_bad = 0;
  int approx_bad = 0;
  std::uint64_t worst_usage = 0;
  RunLimits limits;
  limits.record_usage = true;
  for (std::uint32_t n = 2; n <= 64; ++n) {
    const std::int32_t top = floor_log2(n);
    const auto bound = static_cast<std::uint64_t>(top + 1) * static_cast<std::uint64_t>(top + 1);
    limits.max_interactions = default_max_interactions("backup-exact", n);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto ex = run(BackupExactSuite(), n, seed, limits);
      exact_bad += ex.correct ? 0 : 1;

      std::vector<BackupApproxState> fin;
      const auto ap = run(BackupApproxSuite(), n, seed, limits, &fin);
      std::uint64_t bits = 0;
      std::int32_t max_k = -1;
      bool distinct = true;
      for (const auto& s : fin) {
        if (s.k < 0) continue;
        const std::uint64_t bit = std::uint64_t{1} << s.k;
        distinct = distinct && (bits & bit) == 0;
        bits |= bit;
        max_k = std::max<std::int32_t>(max_k, s.k);
      }
      const auto final_usage = measure_state_usage(BackupApproxSuite(), std::span<const BackupApproxState>(fin));
      worst_usage = std::max(worst_usage, ap.state_usage.distinct_composite_states);
      const bool good = ap.correct && distinct && bits == n && max_k == top &&
                        ap.state_usage.distinct_composite_states <= bound &&
                        final_usage.product_of_ranges <= bound;
      approx_bad += good ? 0 : 1;
    }
  }
  c.pass = exact_bad == 0 && approx_bad == 0;
  c.detail = "backup-exact failures=" + std::to_string(exact_bad) + "/630, backup-approx failures=" +
             std::to_string(approx_bad) + "/630, worst distinct (k,kmax) states=" + std::to_string(worst_usage);
  return c;
}

CriterionResult fault_recovery(unsigned threads) {
  CriterionResult c = start_criterion(8, "injected faults are detected and repaired by the backup");
  struct Case {
    const char* protocol;
    const char* fault;
  };
  const Case cases[] = {
      {"approximate-stable", "corrupt-k:-3@pre-errordetect"},
      {"count-exact-stable", "corrupt-k:-5@pre-refine"},
      {"approximate-stable", "dup-leader@post-election"},
      {"count-exact-stable", "dup-leader@post-election"},
  };
  std::ostringstream detail;
  bool ok = true;
  for (const auto& fc : cases) {
    const auto r = sweep_of(fc.protocol, {256}, 20, threads, fc.fault);
    int good = 0;
    for (const auto& run : r.runs) {
      const auto& m = run.metrics;
      good += (m.correct && m.telemetry.error_raised && m.telemetry.final_errors == m.n) ? 1 : 0;
    }
    ok = ok && good == 20;
    detail << fc.protocol << " " << fc.fault << " " << good << "/20; ";
  }
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

CriterionResult broadcast_bound(unsigned threads) {
  CriterionResult c = start_criterion(9, "broadcast completes within 4 n ln n");
  const auto r = sweep_of("broadcast", {256, 1024, 4096}, 100, threads);
  std::map<std::uint32_t, int> within;
  for (const auto& run : r.runs) {
    const auto& m = run.metrics;
    const double bound = 4.0 * m.n * std::log(static_cast<double>(m.n));
    within[m.n] += (m.correct && m.t_convergence && static_cast<double>(*m.t_convergence) <= bound) ? 1 : 0;
  }
  std::ostringstream detail;
  bool ok = within.size() == 3;
  for (const auto& [n, good] : within) {
    ok = ok && good >= 95;
    detail << "n=" << n << " " << good << "/100; ";
  }
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

CriterionResult determinism(unsigned threads, Clock::time_point suite_start, bool full_suite) {
  CriterionResult c = start_criterion(10, "identical seeds replay identically; suite fits the time limit");
  const char* protocols[] = {"approximate", "approximate-stable", "count-exact", "count-exact-stable",
                             "backup-approx", "backup-exact", "broadcast", "fast-leader"};
  int mismatches = 0;
  int csv_mismatches = 0;
  for (const char* p : protocols) {
    ExperimentSpec spec;
    spec.protocol = p;
    spec.ns = {64, 256};
    spec.seeds = {7, 11};
    const auto a = sweep(spec, threads);
    const auto b = sweep(spec, 1);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      mismatches += a.runs[i].metrics.output_history_digest == b.runs[i].metrics.output_history_digest ? 0 : 1;
    }
    csv_mismatches += (to_csv(a) == to_csv(b) && to_json(a) == to_json(b)) ? 0 : 1;
  }
  const double total = seconds_since(suite_start);
  c.pass = mismatches == 0 && csv_mismatches == 0 && (!full_suite || total < kSuiteTimeLimitSeconds);
  c.detail = "digest mismatches=" + std::to_string(mismatches) + ", output mismatches=" +
             std::to_string(csv_mismatches) + ", suite time " + fmt("%.0f", total) + " s" +
             (full_suite ? " (limit 900 s)" : " (partial run, limit not applied)");
  return c;
}

}  // namespace

std::uint64_t output_algebra_failures(std::uint32_t n_lo, std::uint32_t n_hi) {
  // r = a / 4.
  constexpr int kA[] = {-6, -3, 0, 3, 6};
  constexpr int kExtraK = 7;
  std::uint64_t failures = 0;
  std::vector<double> num;
  std::vector<double> den;
  std::vector<std::int64_t> expect;
  std::vector<std::int64_t> got;
  const auto flush = [&] {
    got.assign(num.size(), 0);
    kernels::round_quotient_f64(num, den, got);
    for (std::size_t i = 0; i < got.size(); ++i) failures += got[i] == expect[i] ? 0 : 1;
    num.clear();
    den.clear();
    expect.clear();
  };
  for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
    int kmin = 0;
    while ((Load128{1} << (8 + 2 * kmin)) < Load128{4} * n * n) ++kmin;
    for (int k = kmin; k < kmin + kExtraK; ++k) {
      const Load128 m = Load128{1} << (8 + 2 * k);
      for (const int a : kA) {
        // Route A: floor(x + 1/2) = n with x = 4Mn / (4M + an), all in integers.
        const auto an = static_cast<__int128>(a) * static_cast<__int128>(n);
        const __int128 d = static_cast<__int128>(4 * m) + an;
        const __int128 lhs = static_cast<__int128>(2 * n - 1) * d;
        const __int128 mid = static_cast<__int128>(8 * m) * static_cast<__int128>(n);
        const __int128 rhs = static_cast<__int128>(2 * n + 1) * d;
        if (!(d > 0 && lhs <= mid && mid < rhs)) ++failures;
        // Route B: the floating-point rounding kernel.
        num.push_back(static_cast<double>(m));
        den.push_back(static_cast<double>(m) / static_cast<double>(n) + a / 4.0);
        expect.push_back(static_cast<std::int64_t>(n));
      }
    }
    if (num.size() >= 4096) flush();
  }
  flush();
  return failures;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const auto suite_start = Clock::now();
  const unsigned threads = options.threads ? options.threads : thread_count_from_env();
  const auto wanted = [&](int id) {
    return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
  };
  std::vector<CriterionResult> results;
  std::optional<ExperimentResult> exact_runs;
  const auto exact = [&]() -> const ExperimentResult& {
    if (!exact_runs) exact_runs = sweep_of("count-exact", {256, 1024, 4096}, 50, threads);
    return *exact_runs;
  };
  const auto record = [&](int id, const auto& body) {
    if (!wanted(id)) return;
    const auto start = Clock::now();
    CriterionResult r = body();
    r.seconds = seconds_since(start);
    results.push_back(r);
    if (options.on_result) options.on_result(r);
  };

  record(1, [&] { return approximate_correctness(threads); });
  record(2, [&] { return pow2_balancing_bound(); });
  record(3, [&] { return exact_correctness(exact()); });
  record(4, [&] { return exact_estimate_quality(exact()); });
  record(5, [&] { return output_algebra(); });
  record(6, [&] { return election_uniqueness(threads); });
  record(7, [&] { return backup_exactness(); });
  record(8, [&] { return fault_recovery(threads); });
  record(9, [&] { return broadcast_bound(threads); });
  record(10, [&] { return determinism(threads, suite_start, options.only.empty()); });
  return results;
}

bool all_passed(std::span<const CriterionResult> results) {
  return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail << " ("
     << fmt("%.1f", r.seconds) << " s)";
  return os.str();
}

}  // namespace census
