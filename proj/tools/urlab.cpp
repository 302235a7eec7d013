// The urlab command line: run seeded experiments, compare emitted
// summaries, and exercise the brute-force oracle suites.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "urlab/urlab.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override, int runs_override,
            long long cycles_override, long long seed_override, int parallel_override,
            const std::string& preset, const std::string& label_override, bool search_trace) {
  urlab::ExperimentConfig base;
  if (!preset.empty()) urlab::apply_preset(base, preset);
  urlab::ExperimentConfig cfg = urlab::load_experiment_config(config_path, base);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (runs_override > 0) cfg.runs = runs_override;
  if (cycles_override > 0) cfg.cycles = cycles_override;
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  if (parallel_override > 0) cfg.parallel = parallel_override;
  if (!label_override.empty()) cfg.label = label_override;
  if (search_trace) cfg.search_trace = true;
  cfg.validate();

  const urlab::ExperimentResult result = urlab::run_experiment(cfg);
  const auto dir = urlab::emit_outputs(result, cfg.out_dir);

  const auto fw = urlab::sample_moments(result.stats.final_window_scores);
  std::cout << "experiment '" << cfg.label << "': " << cfg.runs << " runs x " << cfg.cycles
            << " cycles\n"
            << "  final mean score (cumulative): " << result.stats.mean.back() << " (sd "
            << result.stats.sd.back() << ")\n"
            << "  final-window score mean: " << fw.mean << " (sd " << fw.sd << ")\n"
            << "  final exploration: " << result.stats.final_exploration_mean << "% (sd "
            << result.stats.final_exploration_sd << ")\n"
            << "  outputs: " << dir.string() << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& summaries, const std::string& out_path) {
  std::vector<urlab::ExperimentResult> loaded;
  loaded.reserve(summaries.size());
  for (const std::string& path : summaries) loaded.push_back(urlab::load_experiment_outputs(path));
  std::vector<const urlab::ExperimentResult*> refs;
  for (const auto& e : loaded) refs.push_back(&e);
  const urlab::ComparisonReport report = urlab::compare(refs);
  if (out_path.empty()) {
    urlab::print_comparison(report, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    urlab::print_comparison(report, out);
    std::cout << "comparison written to " << out_path << "\n";
  }
  return 0;
}

int cmd_oracle(const std::string& suite) {
  bool ok = true;
  const bool all = suite == "all";

  if (all || suite == "bayes") {
    const urlab::GridSpec spec = urlab::parse_layout({"...", ".#.", "..D"}, {0.75});
    const auto mixture = urlab::make_location_mixture(spec, 0.75);
    const auto report = urlab::bayes_update_equivalence(*mixture, 4);
    const bool pass = report.max_abs_error <= 1e-9;
    ok = ok && pass;
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " bayes: " << report.sequences_checked
              << " sequences, max |error| = " << report.max_abs_error << "\n";
  }
  if (all || suite == "ig") {
    const auto report = urlab::ig_identity_suite(1000, 20240817);
    const bool pass = report.max_abs_error <= 1e-6;
    ok = ok && pass;
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " ig: " << report.instances
              << " instances, max |error| = " << report.max_abs_error << "\n";
  }
  if (all || suite == "expectimax") {
    for (const auto& instance : urlab::standard_planner_oracle_instances()) {
      const auto r = urlab::run_planner_oracle_instance(instance, 20000, 20, 7);
      const bool pass = r.max_abs_error <= 0.05 && r.argmax_matches >= 19;
      ok = ok && pass;
      std::cout << (pass ? "[PASS]" : "[FAIL]") << " expectimax " << r.name << ": max |error| = "
                << r.max_abs_error << ", argmax " << r.argmax_matches << "/" << r.searches << "\n";
    }
  }
  if (!all && suite != "bayes" && suite != "ig" && suite != "expectimax")
    throw urlab::config_error("unknown oracle suite '" + suite + "'");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urlab: universal reinforcement learning laboratory"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a seeded experiment from a config file");
  std::string config_path, out_override, preset, label_override;
  int runs_override = -1, parallel_override = -1;
  long long cycles_override = -1, seed_override = -1;
  bool search_trace = false;
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_override, "output directory (overrides config)");
  run->add_option("--runs", runs_override, "number of runs (overrides config)");
  run->add_option("--cycles", cycles_override, "cycles per run (overrides config)");
  run->add_option("--seed", seed_override, "base seed (overrides config)");
  run->add_option("--parallel", parallel_override, "worker threads (overrides config)");
  run->add_option("--preset", preset, "parameter preset: smoke or full");
  run->add_option("--label", label_override, "experiment label (overrides config)");
  run->add_flag("--search-trace", search_trace, "dump per-simulation planner records for run 0");

  // compare
  auto* cmp = app.add_subcommand("compare", "compare emitted summary.csv files");
  std::vector<std::string> summaries;
  std::string compare_out;
  cmp->add_option("summaries", summaries, "summary.csv paths")->required()->expected(-1);
  cmp->add_option("--out", compare_out, "write the report to a file");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "run brute-force oracle suites");
  std::string suite = "all";
  oracle->add_option("--check", suite, "suite: bayes, ig, expectimax, or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, out_override, runs_override, cycles_override, seed_override,
                     parallel_override, preset, label_override, search_trace);
    if (cmp->parsed()) return cmd_compare(summaries, compare_out);
    if (oracle->parsed()) return cmd_oracle(suite);
  } catch (const urlab::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
