#pragma once

// Uniform random pairwise scheduler and the simulation loop.
//
// A suite is a plain object describing one protocol:
//   using State = ...;
//   std::string_view name() const;
//   State initial(std::uint32_t n, std::uint32_t index) const;
//   void interact(State& u, State& v, Context& ctx) const;
//   std::int64_t output(const State&) const;
//   bool output_ok(const State&, std::int64_t out, std::uint32_t n) const;
//   bool is_stable(std::span<const State>, std::uint32_t n) const;
//   std::int64_t ground_truth(std::uint32_t n) const;
//   static constexpr std::array<std::string_view, F> kFields;
//   void fields(const State&, std::int64_t* out) const;
// and optionally phase_of, is_leader, has_done1, in_error and
// estimate_event (see the concepts below).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "census/kernels.hpp"
#include "census/rng.hpp"

namespace census {

/// Thrown from inside a transition when a run cannot continue (arithmetic
/// overflow). The engine turns it into an aborted, incorrect run.
class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  std::uint64_t t = 0;
  SplitMix64* rng = nullptr;

  bool random_bit() { return ((*rng)() >> 63) != 0; }
};

struct RunLimits {
  std::uint64_t max_interactions = 1ULL << 32;
  /// 0 selects the default of 10 * n * ln n.
  std::uint64_t probe_window = 0;
  bool record_usage = false;
  bool record_phases = false;
  /// Newline-delimited JSON trace of every interaction (n <= 256 only).
  std::ostream* trace = nullptr;
};

struct VarRange {
  std::string name;
  std::int64_t min = 0;
  std::int64_t max = 0;
};

struct StateUsageReport {
  std::vector<VarRange> vars;
  std::uint64_t distinct_composite_states = 0;
  /// Product of (max - min + 1) over all variables, saturating at 2^64 - 1.
  std::uint64_t product_of_ranges = 0;
};

struct PhaseInterval {
  std::uint32_t phase = 0;
  /// First interaction at which every agent had reached `phase`.
  std::uint64_t start = 0;
  /// Last interaction before some agent reached `phase + 1`.
  std::uint64_t end = 0;

  [[nodiscard]] std::int64_t length() const {
    return static_cast<std::int64_t>(end) - static_cast<std::int64_t>(start);
  }
};

struct Telemetry {
  std::optional<std::uint64_t> first_done1_t;
  std::int64_t leaders_at_first_done1 = -1;
  /// Smallest number of leaders seen in any configuration (-1: not tracked).
  std::int64_t min_leaders = -1;
  std::int64_t final_leaders = -1;
  std::optional<std::int64_t> leader_estimate;
  bool error_raised = false;
  std::optional<std::uint64_t> first_error_t;
  std::optional<std::uint64_t> all_error_t;
  std::uint64_t final_errors = 0;
};

struct RunMetrics {
  std::uint32_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t interactions = 0;
  std::optional<std::uint64_t> t_convergence;
  std::optional<std::uint64_t> t_stabilization;
  bool correct = false;
  bool aborted = false;
  std::string abort_reason;
  StateUsageReport state_usage;
  std::vector<PhaseInterval> phase_intervals;
  std::uint64_t output_history_digest = 0;
  Telemetry telemetry;
};

std::uint64_t default_probe_window(std::uint32_t n);

/// Per-variable range and distinct composite states of one configuration.
template <class Suite>
StateUsageReport measure_state_usage(const Suite& suite, std::span<const typename Suite::State> states);

namespace detail {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t word) {
  for (int b = 0; b < 8; ++b) {
    h ^= (word >> (8 * b)) & 0xFF;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t run_id(std::string_view name, std::uint32_t n) {
  std::uint64_t h = kFnvOffset;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return fnv_mix(h, n);
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

template <class Suite>
concept HasPhase = requires(const Suite& s, const typename Suite::State& x) {
  { s.phase_of(x) } -> std::convertible_to<std::optional<std::uint32_t>>;
};
template <class Suite>
concept HasLeader = requires(const Suite& s, const typename Suite::State& x) {
  { s.is_leader(x) } -> std::convertible_to<bool>;
};
template <class Suite>
concept HasDone1 = requires(const Suite& s, const typename Suite::State& x) {
  { s.has_done1(x) } -> std::convertible_to<bool>;
};
template <class Suite>
concept HasError = requires(const Suite& s, const typename Suite::State& x) {
  { s.in_error(x) } -> std::convertible_to<bool>;
};
template <class Suite>
concept HasEstimate = requires(const Suite& s, const typename Suite::State& x) {
  { s.estimate_event(x, x) } -> std::convertible_to<std::optional<std::int64_t>>;
};

template <class Suite>
inline constexpr std::size_t field_count = Suite::kFields.size();

/// Incremental usage collector: exact capture of every touched agent for
/// small populations, otherwise one full configuration scan every n steps.
template <class Suite>
class UsageCollector {
 public:
  static constexpr std::size_t F = field_count<Suite>;

  explicit UsageCollector(const Suite& suite) : suite_(suite) {
    lo_.fill(std::numeric_limits<std::int64_t>::max());
    hi_.fill(std::numeric_limits<std::int64_t>::min());
  }

  void add(const typename Suite::State& s) {
    std::array<std::int64_t, F> f{};
    suite_.fields(s, f.data());
    add_fields(f);
  }

  void scan(std::span<const typename Suite::State> states) {
    columns_.resize(F);
    for (auto& c : columns_) c.resize(states.size());
    std::array<std::int64_t, F> f{};
    for (std::size_t i = 0; i < states.size(); ++i) {
      suite_.fields(states[i], f.data());
      for (std::size_t j = 0; j < F; ++j) columns_[j][i] = f[j];
      distinct_.insert(hash(f));
    }
    for (std::size_t j = 0; j < F; ++j) {
      const auto mm = kernels::minmax_i64(columns_[j]);
      lo_[j] = std::min(lo_[j], mm.min);
      hi_[j] = std::max(hi_[j], mm.max);
    }
  }

  [[nodiscard]] StateUsageReport report() const {
    StateUsageReport r;
    r.distinct_composite_states = distinct_.size();
    r.product_of_ranges = distinct_.empty() ? 0 : 1;
    for (std::size_t j = 0; j < F; ++j) {
      if (distinct_.empty()) {
        r.vars.push_back({std::string(Suite::kFields[j]), 0, 0});
        continue;
      }
      r.vars.push_back({std::string(Suite::kFields[j]), lo_[j], hi_[j]});
      const auto width = static_cast<std::uint64_t>(hi_[j] - lo_[j]) + 1;
      r.product_of_ranges = saturating_mul(r.product_of_ranges, width);
    }
    return r;
  }

 private:
  static std::uint64_t hash(const std::array<std::int64_t, F>& f) {
    std::uint64_t h = kFnvOffset;
    for (const auto x : f) h = SplitMix64::mix(h ^ static_cast<std::uint64_t>(x));
    return h;
  }

  void add_fields(const std::array<std::int64_t, F>& f) {
    for (std::size_t j = 0; j < F; ++j) {
      lo_[j] = std::min(lo_[j], f[j]);
      hi_[j] = std::max(hi_[j], f[j]);
    }
    distinct_.insert(hash(f));
  }

  const Suite& suite_;
  std::array<std::int64_t, F> lo_{};
  std::array<std::int64_t, F> hi_{};
  std::unordered_set<std::uint64_t> distinct_;
  std::vector<std::vector<std::int64_t>> columns_;
};

/// Tracks, for every phase p, when the slowest agent reached p and when the
/// fastest agent reached p + 1.
class PhaseTracker {
 public:
  void init(std::uint32_t n, std::uint32_t initial_phase);
  void move(std::uint32_t from, std::uint32_t to, std::uint64_t t);
  [[nodiscard]] std::vector<PhaseInterval> intervals() const;

 private:
  void ensure(std::uint32_t p);
  std::vector<std::uint32_t> count_;
  std::vector<std::optional<std::uint64_t>> all_reached_;
  std::vector<std::optional<std::uint64_t>> first_reached_;
  std::uint32_t min_ = 0;
  std::uint32_t max_ = 0;
};

}  // namespace detail

/// One run in progress: the configuration, the interaction counter and the
/// incremental output bookkeeping.
template <class Suite>
class Simulation {
 public:
  using State = typename Suite::State;

  Simulation(const Suite& suite, std::uint32_t n, std::uint64_t seed)
      : suite_(suite), n_(n), rng_(make_stream(seed, detail::run_id(suite.name(), n))) {
    if (n < 2) throw std::invalid_argument("population size must be at least 2");
    states_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) states_.push_back(suite.initial(n, i));
    outputs_.resize(n);
    ok_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      outputs_[i] = suite.output(states_[i]);
      ok_[i] = suite.output_ok(states_[i], outputs_[i], n) ? 1 : 0;
      ok_count_ += ok_[i];
    }
    if constexpr (detail::HasLeader<Suite>) {
      leaders_ = 0;
      for (const auto& s : states_) leaders_ += suite.is_leader(s) ? 1 : 0;
      telemetry_.min_leaders = leaders_;
    }
    if constexpr (detail::HasDone1<Suite>) {
      for (const auto& s : states_) done1_ += suite.has_done1(s) ? 1 : 0;
      if (done1_ > 0) note_first_done1();
    }
    if constexpr (detail::HasError<Suite>) {
      for (const auto& s : states_) errors_ += suite.in_error(s) ? 1 : 0;
    }
  }

  /// One scheduler step followed by the transition. Returns true if the
  /// output of either participant changed.
  bool step() {
    const auto [i, j] = sample_ordered_pair(rng_, n_);
    ++t_;
    State& u = states_[i];
    State& v = states_[j];
    u_old_ = u;
    v_old_ = v;
    Context ctx{t_, &rng_};
    suite_.interact(u, v, ctx);
    last_pair_ = {i, j};
    track(u_old_, u);
    track(v_old_, v);
    const bool changed_u = refresh(i);
    const bool changed_v = refresh(j);
    settle();
    return changed_u || changed_v;
  }

  [[nodiscard]] std::uint64_t t() const { return t_; }
  [[nodiscard]] std::uint32_t n() const { return n_; }
  [[nodiscard]] std::span<const State> states() const { return states_; }
  [[nodiscard]] std::span<State> mutable_states() { return states_; }
  [[nodiscard]] std::span<const std::int64_t> outputs() const { return outputs_; }
  [[nodiscard]] bool all_ok() const { return ok_count_ == n_; }
  [[nodiscard]] std::uint64_t digest() const { return digest_; }
  [[nodiscard]] std::pair<std::uint32_t, std::uint32_t> last_pair() const { return last_pair_; }
  /// Pre-interaction states of the last pair.
  [[nodiscard]] const State& previous_initiator() const { return u_old_; }
  [[nodiscard]] const State& previous_responder() const { return v_old_; }
  [[nodiscard]] const Telemetry& telemetry() const { return telemetry_; }
  [[nodiscard]] std::int64_t leaders() const { return leaders_; }
  [[nodiscard]] std::uint64_t errors() const { return errors_; }

  /// Re-derive outputs after external edits to the configuration.
  void resync() {
    ok_count_ = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
      outputs_[i] = suite_.output(states_[i]);
      ok_[i] = suite_.output_ok(states_[i], outputs_[i], n_) ? 1 : 0;
      ok_count_ += ok_[i];
    }
  }

 private:
  void note_first_done1() {
    if (!telemetry_.first_done1_t) {
      telemetry_.first_done1_t = t_;
      telemetry_.leaders_at_first_done1 = leaders_;
    }
  }

  void track(const State& before, const State& after) {
    if constexpr (detail::HasLeader<Suite>) {
      leaders_ += static_cast<std::int64_t>(suite_.is_leader(after)) -
                  static_cast<std::int64_t>(suite_.is_leader(before));
    }
    if constexpr (detail::HasError<Suite>) {
      const bool e0 = suite_.in_error(before);
      const bool e1 = suite_.in_error(after);
      if (e1 && !e0) {
        ++errors_;
        telemetry_.error_raised = true;
        if (!telemetry_.first_error_t) telemetry_.first_error_t = t_;
      } else if (e0 && !e1) {
        --errors_;
      }
      if (errors_ == n_ && !telemetry_.all_error_t) telemetry_.all_error_t = t_;
    }
    if constexpr (detail::HasEstimate<Suite>) {
      if (const auto e = suite_.estimate_event(before, after)) telemetry_.leader_estimate = *e;
    }
    if constexpr (detail::HasDone1<Suite>) {
      const bool d0 = suite_.has_done1(before);
      const bool d1 = suite_.has_done1(after);
      done1_ += static_cast<std::int64_t>(d1) - static_cast<std::int64_t>(d0);
    }
  }

  // Runs once both participants are tracked, so leader counts and done1 refer
  // to the same post-interaction configuration.
  void settle() {
    if constexpr (detail::HasLeader<Suite>) {
      telemetry_.min_leaders = std::min(telemetry_.min_leaders, leaders_);
      telemetry_.final_leaders = leaders_;
    }
    if constexpr (detail::HasDone1<Suite>) {
      if (done1_ > 0) note_first_done1();
    }
    telemetry_.final_errors = errors_;
  }

  bool refresh(std::uint32_t a) {
    const std::int64_t out = suite_.output(states_[a]);
    const std::uint8_t ok = suite_.output_ok(states_[a], out, n_) ? 1 : 0;
    ok_count_ += ok;
    ok_count_ -= ok_[a];
    ok_[a] = ok;
    if (out == outputs_[a]) return false;
    outputs_[a] = out;
    digest_ = detail::fnv_mix(digest_, t_);
    digest_ = detail::fnv_mix(digest_, a);
    digest_ = detail::fnv_mix(digest_, static_cast<std::uint64_t>(out));
    return true;
  }

  const Suite& suite_;
  std::uint32_t n_;
  SplitMix64 rng_;
  std::uint64_t t_ = 0;
  std::vector<State> states_;
  std::vector<std::int64_t> outputs_;
  std::vector<std::uint8_t> ok_;
  std::uint32_t ok_count_ = 0;
  std::uint64_t digest_ = detail::kFnvOffset;
  std::pair<std::uint32_t, std::uint32_t> last_pair_{0, 0};
  State u_old_{};
  State v_old_{};
  Telemetry telemetry_;
  std::int64_t leaders_ = -1;
  std::int64_t done1_ = 0;
  std::uint64_t errors_ = 0;
};

namespace detail {

template <class Suite>
void write_trace(std::ostream& os, const Suite& suite, std::uint64_t t, std::uint32_t i, std::uint32_t j,
                 const typename Suite::State& u_old, const typename Suite::State& v_old,
                 const typename Suite::State& u_new, const typename Suite::State& v_new) {
  constexpr std::size_t F = field_count<Suite>;
  std::array<std::int64_t, F> a{};
  std::array<std::int64_t, F> b{};
  os << "{\"t\":" << t << ",\"initiator\":" << i << ",\"responder\":" << j << ",\"changed_fields\":{";
  bool first = true;
  const auto emit = [&](std::string_view role, const auto& before, const auto& after) {
    suite.fields(before, a.data());
    suite.fields(after, b.data());
    for (std::size_t f = 0; f < F; ++f) {
      if (a[f] == b[f]) continue;
      if (!first) os << ',';
      first = false;
      os << '"' << role << '.' << Suite::kFields[f] << "\":" << b[f];
    }
  };
  emit("initiator", u_old, u_new);
  emit("responder", v_old, v_new);
  os << "}}\n";
}

}  // namespace detail

/// Run until the suite's stability predicate holds with every output correct
/// and no output changes for a probe window, or until the interaction budget
/// is exhausted.
template <class Suite>
RunMetrics run(const Suite& suite, std::uint32_t n, std::uint64_t seed, const RunLimits& limits,
               std::vector<typename Suite::State>* final_states = nullptr) {
  if (limits.max_interactions < 1) throw std::invalid_argument("max_interactions must be at least 1");
  RunMetrics m;
  m.n = n;
  m.seed = seed;
  Simulation<Suite> sim(suite, n, seed);
  const std::uint64_t window = limits.probe_window ? limits.probe_window : default_probe_window(n);
  const std::uint64_t stable_stride = std::max<std::uint64_t>(1, n / 4);

  std::optional<detail::UsageCollector<Suite>> usage;
  const bool exact_usage = n <= 64;
  if (limits.record_usage) {
    usage.emplace(suite);
    usage->scan(sim.states());
  }
  std::optional<detail::PhaseTracker> phases;
  if constexpr (detail::HasPhase<Suite>) {
    if (limits.record_phases) {
      phases.emplace();
      phases->init(n, suite.phase_of(sim.states()[0]).value_or(0));
    }
  }
  std::ostream* trace = (limits.trace != nullptr && n <= 256) ? limits.trace : nullptr;

  std::uint64_t last_change = 0;
  std::uint64_t next_check = 0;
  std::optional<std::uint64_t> stable_at;
  bool success = false;
  try {
    while (sim.t() < limits.max_interactions) {
      const bool changed = sim.step();
      const auto [i, j] = sim.last_pair();
      const auto& u_old = sim.previous_initiator();
      const auto& v_old = sim.previous_responder();
      const std::uint64_t t = sim.t();
      const auto& cfg = sim.states();
      if (changed) {
        last_change = t;
        if (stable_at) stable_at.reset();
      }
      if (usage) {
        if (exact_usage) {
          usage->add(cfg[i]);
          usage->add(cfg[j]);
        } else if (t % n == 0) {
          usage->scan(cfg);
        }
      }
      if constexpr (detail::HasPhase<Suite>) {
        if (phases) {
          const auto p0 = suite.phase_of(u_old).value_or(0);
          const auto p1 = suite.phase_of(cfg[i]).value_or(0);
          if (p0 != p1) phases->move(p0, p1, t);
          const auto q0 = suite.phase_of(v_old).value_or(0);
          const auto q1 = suite.phase_of(cfg[j]).value_or(0);
          if (q0 != q1) phases->move(q0, q1, t);
        }
      }
      if (trace) detail::write_trace(*trace, suite, t, i, j, u_old, v_old, cfg[i], cfg[j]);

      if (stable_at) {
        if (t - *stable_at >= window) {
          success = true;
          break;
        }
      } else if (sim.all_ok() && t >= next_check) {
        next_check = t + stable_stride;
        if (suite.is_stable(cfg, n)) stable_at = t;
      }
    }
  } catch (const SimulationAbort& e) {
    m.aborted = true;
    m.abort_reason = e.what();
  }

  m.interactions = sim.t();
  m.correct = success;
  if (success) {
    m.t_stabilization = *stable_at;
    m.t_convergence = last_change;
  }
  if (usage) {
    if (!exact_usage) usage->scan(sim.states());
    m.state_usage = usage->report();
  }
  if (phases) m.phase_intervals = phases->intervals();
  m.output_history_digest = sim.digest();
  m.telemetry = sim.telemetry();
  if (final_states != nullptr) final_states->assign(sim.states().begin(), sim.states().end());
  return m;
}

template <class Suite>
StateUsageReport measure_state_usage(const Suite& suite, std::span<const typename Suite::State> states) {
  if (states.empty()) throw std::invalid_argument("state usage needs at least one configuration");
  detail::UsageCollector<Suite> c(suite);
  c.scan(states);
  return c.report();
}

}  // namespace census
