// census: run single cells, sweeps and the acceptance suite from the shell.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "census/acceptance.hpp"
#include "census/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::string protocol;
  std::string n;
  std::uint64_t seeds = 0;
  std::string seed;
  std::string profile;
  std::uint64_t max_interactions = 0;
  std::vector<std::string> overrides;
  std::string fault;
  std::vector<std::string> out;
  std::string trace;
};

void add_experiment_flags(CLI::App* cmd, Flags& f, bool sweep) {
  cmd->add_option("--config", f.config, "Experiment file (key = value lines); flags override it");
  cmd->add_option("--protocol", f.protocol, "Protocol name (see `census list`)");
  cmd->add_option("--n", f.n, sweep ? "Population sizes: 256,1024 or 2..16" : "Population size");
  if (sweep) cmd->add_option("--seeds", f.seeds, "Run seeds 0 .. N-1");
  cmd->add_option("--seed", f.seed, sweep ? "Explicit seed list" : "Seed");
  cmd->add_option("--profile", f.profile, "desk or paper");
  cmd->add_option("--max-interactions", f.max_interactions, "Interaction budget per run");
  cmd->add_option("--override", f.overrides, "Profile override key=value (repeatable)");
  cmd->add_option("--fault", f.fault, "Fault descriptor, e.g. corrupt-k:-3@pre-errordetect");
  cmd->add_option("--out", f.out, "Write results to .csv or .json (repeatable)");
  cmd->add_option("--trace", f.trace, "NDJSON interaction trace (single cell, n <= 256)");
}

census::ExperimentSpec build_spec(const CLI::App* cmd, const Flags& f) {
  census::ExperimentSpec spec = f.config.empty() ? census::ExperimentSpec{} : census::load_config(f.config);
  if (f.config.empty()) spec.seeds.clear();
  if (cmd->count("--protocol")) spec.protocol = f.protocol;
  if (cmd->count("--n")) {
    spec.ns.clear();
    for (const auto n : census::parse_int_list("n", f.n)) spec.ns.push_back(static_cast<std::uint32_t>(n));
  }
  if (cmd->get_option_no_throw("--seeds") && cmd->count("--seeds")) spec.seeds = census::seed_range(f.seeds);
  if (cmd->count("--seed")) spec.seeds = census::parse_int_list("seed", f.seed);
  if (spec.seeds.empty()) spec.seeds = census::seed_range(1);
  if (cmd->count("--profile")) spec.profile = f.profile;
  if (cmd->count("--max-interactions")) spec.max_interactions = f.max_interactions;
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override '" + kv + "' must be key=value");
    spec.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (cmd->count("--fault")) spec.fault = f.fault;
  if (cmd->count("--out")) spec.outputs = f.out;
  if (cmd->count("--trace")) spec.trace = f.trace;
  if (spec.protocol.empty()) throw std::invalid_argument("--protocol is required");
  return spec;
}

std::string opt(const std::optional<std::uint64_t>& x) { return x ? std::to_string(*x) : "-"; }

void print_run(const census::RunRecord& r) {
  const auto& m = r.metrics;
  const auto& t = m.telemetry;
  std::cout << "protocol         " << r.protocol << "\n"
            << "n                " << m.n << "\n"
            << "seed             " << m.seed << "\n"
            << "profile          " << r.profile << "\n"
            << "correct          " << (m.correct ? "true" : "false") << "\n"
            << "interactions     " << m.interactions << "\n"
            << "t_convergence    " << opt(m.t_convergence) << "\n"
            << "t_stabilization  " << opt(m.t_stabilization) << "\n"
            << "distinct_states  " << m.state_usage.distinct_composite_states << "\n"
            << "error_raised     " << (t.error_raised ? "true" : "false") << "\n"
            << "digest           " << std::hex << m.output_history_digest << std::dec << "\n";
  if (t.leader_estimate) std::cout << "leader_estimate  " << *t.leader_estimate << "\n";
  if (t.leaders_at_first_done1 >= 0) std::cout << "leaders_at_done1 " << t.leaders_at_first_done1 << "\n";
  if (m.aborted) std::cout << "aborted          " << m.abort_reason << "\n";
}

void print_aggregates(const census::ExperimentResult& r) {
  std::cout << "protocol,n,runs,success_rate,median_tc,p95_tc,fitted_c,form\n";
  for (const auto& a : r.aggregates) {
    const auto num = [](const std::optional<double>& x) {
      if (!x) return std::string();
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", *x);
      return std::string(buf);
    };
    std::cout << a.protocol << ',' << a.n << ',' << a.runs << ',' << a.success_rate << ',' << num(a.median_tc)
              << ',' << num(a.p95_tc) << ',' << num(a.fitted_c) << ',' << census::form_name(a.form) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population-protocol simulator for approximate and exact counting"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run a single (protocol, n, seed) cell");
  add_experiment_flags(run_cmd, run_flags, false);

  Flags sweep_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run every (n, seed) cell and aggregate per n");
  add_experiment_flags(sweep_cmd, sweep_flags, true);

  std::vector<int> only;
  auto* check_cmd = app.add_subcommand("check", "Run the acceptance suite; exit 0 iff every criterion passes");
  check_cmd->add_option("--only", only, "Criterion ids to run")->check(CLI::Range(1, census::kCriterionCount));

  app.add_subcommand("list", "List protocols");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      auto spec = build_spec(run_cmd, run_flags);
      if (spec.ns.size() != 1 || spec.seeds.size() != 1) {
        throw std::invalid_argument("`run` takes exactly one n and one seed; use `sweep` for more");
      }
      const auto result = census::sweep(spec, 1);
      print_run(result.runs.front());
      return 0;
    }
    if (*sweep_cmd) {
      const auto spec = build_spec(sweep_cmd, sweep_flags);
      print_aggregates(census::sweep(spec));
      return 0;
    }
    if (*check_cmd) {
      census::AcceptanceOptions options;
      options.only = only;
      options.on_result = [](const census::CriterionResult& r) {
        std::cout << census::format_result(r) << std::endl;
      };
      const auto results = census::run_acceptance(options);
      const bool ok = census::all_passed(results);
      std::cout << (ok ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
      return ok ? 0 : 1;
    }
    for (const auto& p : census::protocols()) {
      std::cout << p.name << "  [" << census::form_name(p.form) << "]  " << p.summary << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "census: " << e.what() << "\n";
    return 2;
  }
}
