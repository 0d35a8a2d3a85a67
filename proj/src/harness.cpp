#include "census/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "census/approx.hpp"
#include "census/basic_suites.hpp"
#include "census/exact.hpp"

namespace census {

namespace {

double log2_at_least_one(double n) { return std::max(1.0, std::log2(n)); }

const std::vector<ProtocolInfo> kProtocols = {
    {"approximate", ComplexityForm::n_log2_n, "leader election, doubling search, result broadcast"},
    {"approximate-stable", ComplexityForm::n_log2_n, "approximate with verification and backup fallback"},
    {"approximate-stable-relaxed", ComplexityForm::n_log2_n, "stable approximate with the relaxed backup"},
    {"backup-approx", ComplexityForm::n2_log_n, "token merging in powers of two"},
    {"count-exact", ComplexityForm::n_log_n, "fast election, approximation and refinement"},
    {"count-exact-stable", ComplexityForm::n_log_n, "count-exact with consistency checks and backup"},
    {"backup-exact", ComplexityForm::n2_log_n, "unary token merging"},
    {"broadcast", ComplexityForm::n_log_n, "one-way epidemic from one informed agent"},
    {"junta", ComplexityForm::n_log_n, "junta process until every agent is inactive"},
    {"clock", ComplexityForm::n_log_n, "junta-driven phase clock for a fixed budget"},
    {"slow-leader", ComplexityForm::n_log_n, "clock-gated coin-halving election"},
    {"fast-leader", ComplexityForm::n_log_n, "coin-string election"},
    {"pow2-balance", ComplexityForm::n_log_n, "powers-of-two balancing from one source"},
    {"classical-balance", ComplexityForm::n_log_n, "floor/ceil balancing of 4n tokens"},
};

template <class Suite>
RunMetrics run_suite(const Suite& suite, std::uint32_t n, std::uint64_t seed, const RunLimits& limits) {
  return run(suite, n, seed, limits);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("'" + std::string(key) + "' expects a non-negative integer, got '" +
                                std::string(text) + "'");
  }
  return v;
}

nlohmann::json optional_number(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<std::uint64_t> parse_int_list(std::string_view key, std::string_view text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_u64(key, item));
      continue;
    }
    const auto lo = parse_u64(key, trim(std::string_view(item).substr(0, dots)));
    const auto hi = parse_u64(key, trim(std::string_view(item).substr(dots + 2)));
    if (hi < lo) throw std::invalid_argument("empty range '" + item + "' for '" + std::string(key) + "'");
    for (auto x = lo; x <= hi; ++x) out.push_back(x);
  }
  return out;
}

std::string_view form_name(ComplexityForm form) {
  switch (form) {
    case ComplexityForm::n_log_n:
      return "n log n";
    case ComplexityForm::n_log2_n:
      return "n log^2 n";
    case ComplexityForm::n2_log_n:
      return "n^2 log n";
  }
  return "n log n";
}

double form_value(ComplexityForm form, double n) {
  const double lg = std::log2(n);
  switch (form) {
    case ComplexityForm::n_log_n:
      return n * lg;
    case ComplexityForm::n_log2_n:
      return n * lg * lg;
    case ComplexityForm::n2_log_n:
      return n * n * lg;
  }
  return n * lg;
}

FitResult fit_complexity(std::span<const std::pair<double, double>> points, ComplexityForm form) {
  std::vector<double> ns;
  for (const auto& p : points) ns.push_back(p.first);
  std::sort(ns.begin(), ns.end());
  if (std::unique(ns.begin(), ns.end()) - ns.begin() < 2) {
    throw std::invalid_argument("complexity fit needs points at two or more distinct n");
  }
  double tf = 0;
  double ff = 0;
  for (const auto& [n, t] : points) {
    const double f = form_value(form, n);
    tf += t * f;
    ff += f * f;
  }
  FitResult r;
  r.c = tf / ff;
  for (const auto& [n, t] : points) {
    const double f = form_value(form, n);
    r.ratios.push_back(t / f);
    r.residuals.push_back(t - r.c * f);
  }
  return r;
}

const std::vector<ProtocolInfo>& protocols() { return kProtocols; }

const ProtocolInfo& protocol_info(std::string_view name) {
  for (const auto& p : kProtocols) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

std::uint64_t default_max_interactions(std::string_view protocol, std::uint32_t n) {
  const double lg = log2_at_least_one(n);
  const double nlog = n * lg;
  const double backup = 200.0 * n * n * lg + 1e4;
  double budget = 0;
  if (protocol == "approximate") {
    budget = 400 * nlog * lg;
  } else if (protocol == "approximate-stable" || protocol == "approximate-stable-relaxed") {
    budget = 400 * nlog * lg + backup;
  } else if (protocol == "count-exact") {
    budget = 2000 * nlog;
  } else if (protocol == "count-exact-stable") {
    budget = 2000 * nlog + backup;
  } else if (protocol == "backup-approx" || protocol == "backup-exact") {
    budget = backup;
  } else if (protocol == "slow-leader" || protocol == "fast-leader") {
    budget = 2000 * nlog;
  } else if (protocol == "clock") {
    budget = 400 * nlog;
  } else {
    protocol_info(protocol);
    budget = 200 * nlog + 1e3;
  }
  return static_cast<std::uint64_t>(budget);
}

RunMetrics run_cell(std::string_view protocol, std::uint32_t n, std::uint64_t seed, const Profile& profile,
                    const Fault& fault, const RunLimits& limits) {
  if (protocol == "approximate") return run_suite(ApproxSuite(profile, ApproxVariant::plain, fault), n, seed, limits);
  if (protocol == "approximate-stable") {
    return run_suite(ApproxSuite(profile, ApproxVariant::stable, fault), n, seed, limits);
  }
  if (protocol == "approximate-stable-relaxed") {
    return run_suite(ApproxSuite(profile, ApproxVariant::stable_relaxed, fault), n, seed, limits);
  }
  if (protocol == "backup-approx") return run_suite(BackupApproxSuite(), n, seed, limits);
  if (protocol == "count-exact") return run_suite(ExactSuite(profile, false, fault), n, seed, limits);
  if (protocol == "count-exact-stable") return run_suite(ExactSuite(profile, true, fault), n, seed, limits);
  if (protocol == "backup-exact") return run_suite(BackupExactSuite(), n, seed, limits);
  if (protocol == "broadcast") return run_suite(BroadcastSuite(), n, seed, limits);
  if (protocol == "junta") return run_suite(JuntaSuite(profile.junta), n, seed, limits);
  if (protocol == "clock") return run_suite(ClockSuite(profile), n, seed, limits);
  if (protocol == "slow-leader") return run_suite(SlowLeaderSuite(profile), n, seed, limits);
  if (protocol == "fast-leader") return run_suite(FastLeaderSuite(profile), n, seed, limits);
  if (protocol == "pow2-balance") return run_suite(Pow2BalanceSuite(), n, seed, limits);
  if (protocol == "classical-balance") return run_suite(ClassicalBalanceSuite(), n, seed, limits);
  throw std::invalid_argument("unknown protocol '" + std::string(protocol) + "'");
}

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::uint64_t i = 0; i < count; ++i) out[i] = i;
  return out;
}

ResolvedSpec validate(const ExperimentSpec& spec) {
  protocol_info(spec.protocol);
  if (spec.ns.empty()) throw std::invalid_argument("no population sizes given");
  for (const auto n : spec.ns) {
    if (n < 2) throw std::invalid_argument("population size must be at least 2, got " + std::to_string(n));
  }
  if (spec.seeds.empty()) throw std::invalid_argument("at least one seed is required");
  ResolvedSpec r{profile_by_name(spec.profile), parse_fault(spec.fault)};
  apply_overrides(r.profile, spec.overrides);
  for (const auto& out : spec.outputs) {
    if (!out.ends_with(".csv") && !out.ends_with(".json")) {
      throw std::invalid_argument("output '" + out + "' must end in .csv or .json");
    }
  }
  if (!spec.trace.empty() && spec.ns.size() * spec.seeds.size() != 1) {
    throw std::invalid_argument("--trace needs exactly one (n, seed) cell");
  }
  if (!spec.trace.empty() && spec.ns.front() > 256) {
    throw std::invalid_argument("--trace is limited to n <= 256");
  }
  return r;
}

unsigned thread_count_from_env() {
  if (const char* env = std::getenv("CENSUS_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

std::vector<Aggregate> aggregate(std::span<const RunRecord> runs, ComplexityForm form) {
  std::map<std::pair<std::string, std::uint32_t>, std::vector<const RunRecord*>> groups;
  for (const auto& r : runs) groups[{r.protocol, r.metrics.n}].push_back(&r);
  std::vector<Aggregate> out;
  for (const auto& [key, members] : groups) {
    Aggregate a;
    a.protocol = key.first;
    a.n = key.second;
    a.runs = members.size();
    a.form = form;
    std::vector<double> tcs;
    for (const auto* r : members) {
      if (r->metrics.correct && r->metrics.t_convergence) tcs.push_back(static_cast<double>(*r->metrics.t_convergence));
    }
    std::size_t ok = 0;
    for (const auto* r : members) ok += r->metrics.correct ? 1 : 0;
    a.success_rate = members.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(members.size());
    if (!tcs.empty()) {
      a.median_tc = percentile(tcs, 0.5);
      a.p95_tc = percentile(tcs, 0.95);
      double sum = 0;
      for (const double t : tcs) sum += t;
      a.fitted_c = sum / static_cast<double>(tcs.size()) / form_value(form, a.n);
    }
    out.push_back(a);
  }
  return out;
}

ExperimentResult sweep(const ExperimentSpec& spec, unsigned threads) {
  const ResolvedSpec resolved = validate(spec);
  struct Cell {
    std::uint32_t n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto n : spec.ns) {
    for (const auto seed : spec.seeds) cells.push_back({n, seed});
  }
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& b) { return a.n != b.n ? a.n < b.n : a.seed < b.seed; });

  std::ofstream trace_file;
  if (!spec.trace.empty()) {
    trace_file.open(spec.trace);
    if (!trace_file) throw std::runtime_error("cannot write trace '" + spec.trace + "'");
  }

  ExperimentResult result;
  result.runs.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        RunLimits limits;
        limits.max_interactions =
            spec.max_interactions ? spec.max_interactions : default_max_interactions(spec.protocol, cells[i].n);
        limits.probe_window = spec.probe_window;
        limits.record_usage = spec.record_usage;
        if (trace_file.is_open()) limits.trace = &trace_file;
        result.runs[i] = {spec.protocol, resolved.profile.name,
                          run_cell(spec.protocol, cells[i].n, cells[i].seed, resolved.profile, resolved.fault, limits)};
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1U, std::min<unsigned>(threads ? threads : thread_count_from_env(),
                                                         static_cast<unsigned>(cells.size())));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.aggregates = aggregate(result.runs, protocol_info(spec.protocol).form);
  for (const auto& out : spec.outputs) emit(result, out);
  return result;
}

std::string to_csv(const ExperimentResult& result) {
  std::vector<const RunRecord*> rows;
  for (const auto& r : result.runs) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const RunRecord* a, const RunRecord* b) {
    return std::tie(a->protocol, a->metrics.n, a->metrics.seed) < std::tie(b->protocol, b->metrics.n, b->metrics.seed);
  });
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto* r : rows) {
    const auto& m = r->metrics;
    os << r->protocol << ',' << m.n << ',' << m.seed << ',' << r->profile << ',' << (m.correct ? "true" : "false")
       << ',';
    if (m.t_convergence) os << *m.t_convergence;
    os << ',';
    if (m.t_stabilization) os << *m.t_stabilization;
    os << ',' << m.state_usage.distinct_composite_states << ',' << (m.telemetry.error_raised ? "true" : "false")
       << '\n';
  }
  return os.str();
}

std::string to_json(const ExperimentResult& result) {
  auto rows = result.aggregates;
  std::sort(rows.begin(), rows.end(),
            [](const Aggregate& a, const Aggregate& b) { return std::tie(a.protocol, a.n) < std::tie(b.protocol, b.n); });
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& a : rows) {
    nlohmann::ordered_json row;
    row["protocol"] = a.protocol;
    row["n"] = a.n;
    row["success_rate"] = a.success_rate;
    row["median_tc"] = optional_number(a.median_tc);
    row["p95_tc"] = optional_number(a.p95_tc);
    row["fitted_c"] = optional_number(a.fitted_c);
    row["form"] = std::string(form_name(a.form));
    out.push_back(row);
  }
  return out.dump(2) + "\n";
}

void emit(const ExperimentResult& result, const std::string& path) {
  std::string body;
  if (path.ends_with(".csv")) {
    body = to_csv(result);
  } else if (path.ends_with(".json")) {
    body = to_json(result);
  } else {
    throw std::invalid_argument("output '" + path + "' must end in .csv or .json");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << body;
  if (!f.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

ExperimentSpec parse_config(std::string_view text) {
  ExperimentSpec spec;
  bool seeds_set = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "protocol") {
      spec.protocol = value;
    } else if (key == "n") {
      spec.ns.clear();
      for (const auto n : parse_int_list(key, value)) spec.ns.push_back(static_cast<std::uint32_t>(n));
    } else if (key == "seeds") {
      spec.seeds = seed_range(parse_u64(key, value));
      seeds_set = true;
    } else if (key == "seed") {
      spec.seeds = parse_int_list(key, value);
      seeds_set = true;
    } else if (key == "profile") {
      spec.profile = value;
    } else if (key == "max_interactions") {
      spec.max_interactions = parse_u64(key, value);
    } else if (key == "probe_window") {
      spec.probe_window = parse_u64(key, value);
    } else if (key == "override") {
      for (const auto& item : split_list(value)) {
        const auto e = item.find('=');
        if (e == std::string::npos) throw std::invalid_argument("override '" + item + "' must be key=value");
        spec.overrides[trim(std::string_view(item).substr(0, e))] = trim(std::string_view(item).substr(e + 1));
      }
    } else if (key == "fault") {
      spec.fault = value;
    } else if (key == "out") {
      spec.outputs = split_list(value);
    } else if (key == "trace") {
      spec.trace = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!seeds_set && spec.seeds.empty()) spec.seeds = seed_range(1);
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

}  // namespace census
