// Experiment orchestration: declarative configs, seeded multi-run
// simulation of the Algorithm-1 interaction loop, score metrics, CSV/JSON
// trace outputs, and cross-experiment comparisons.
#pragma once

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "urlab/agents.hpp"
#include "urlab/dirichlet.hpp"
#include "urlab/gridworld.hpp"
#include "urlab/known_grid.hpp"
#include "urlab/mixture.hpp"
#include "urlab/stats.hpp"

namespace urlab {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration

enum class ModelChoice { Loc, Dirichlet, Truth };

inline const char* to_string(ModelChoice m) {
  switch (m) {
    case ModelChoice::Loc: return "loc";
    case ModelChoice::Dirichlet: return "dirichlet";
    case ModelChoice::Truth: return "truth";
  }
  return "?";
}

struct EnvironmentConfig {
  std::optional<std::vector<std::string>> layout;
  std::vector<double> thetas = {0.75};
  int noise_alphabet = kDefaultNoiseAlphabet;
  std::optional<GridGeneratorConfig> generator;
};

struct AgentSpec {
  AgentType type = AgentType::Aixi;
  ModelChoice model = ModelChoice::Loc;
  AgentConfig planner;  // horizon, samples, ucb_c, gamma, schedules, caps
};

struct ExperimentConfig {
  std::string label = "experiment";
  EnvironmentConfig environment;
  AgentSpec agent;
  std::int64_t cycles = 300;
  int runs = 10;
  std::uint64_t seed = 1;
  int parallel = 1;
  std::string out_dir = "out";
  bool search_trace = false;

  void validate() const {
    if (cycles < 1) throw config_error("cycles must be >= 1");
    if (runs < 1) throw config_error("runs must be >= 1");
    if (parallel < 1) throw config_error("parallel must be >= 1");
  }
};

// Desk-scale presets: "smoke" shrinks the paper-scale experiment so the whole
// comparison battery fits on a desktop; "full" mirrors the reference setup.
inline void apply_preset(ExperimentConfig& cfg, const std::string& preset) {
  if (preset == "smoke") {
    cfg.runs = 10;
    cfg.cycles = 300;
    cfg.agent.planner.samples = 200;
    cfg.agent.planner.horizon = 4;
  } else if (preset == "full") {
    cfg.runs = 50;
    cfg.cycles = 500;
    cfg.agent.planner.samples = 600;
    cfg.agent.planner.horizon = 6;
  } else {
    throw config_error("unknown preset '" + preset + "' (expected smoke or full)");
  }
}

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  std::unordered_set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw config_error("unknown key '" + key + "' in " + where);
}

template <typename T>
T fetch(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error("bad value for '" + where + "." + key + "': " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                                ExperimentConfig base = {}) {
  using detail::check_keys;
  using detail::fetch;
  ExperimentConfig cfg = std::move(base);
  check_keys(j, {"label", "environment", "agent", "cycles", "runs", "seed", "parallel", "out",
                 "search_trace"},
             "config");
  cfg.label = fetch<std::string>(j, "label", cfg.label, "config");
  cfg.cycles = fetch<std::int64_t>(j, "cycles", cfg.cycles, "config");
  cfg.runs = fetch<int>(j, "runs", cfg.runs, "config");
  cfg.seed = fetch<std::uint64_t>(j, "seed", cfg.seed, "config");
  cfg.parallel = fetch<int>(j, "parallel", cfg.parallel, "config");
  cfg.out_dir = fetch<std::string>(j, "out", cfg.out_dir, "config");
  cfg.search_trace = fetch<bool>(j, "search_trace", cfg.search_trace, "config");

  if (j.contains("environment")) {
    const auto& je = j.at("environment");
    check_keys(je, {"layout", "thetas", "noise_alphabet", "generator"}, "environment");
    if (je.contains("layout"))
      cfg.environment.layout = fetch<std::vector<std::string>>(je, "layout", {}, "environment");
    cfg.environment.thetas =
        fetch<std::vector<double>>(je, "thetas", cfg.environment.thetas, "environment");
    cfg.environment.noise_alphabet =
        fetch<int>(je, "noise_alphabet", cfg.environment.noise_alphabet, "environment");
    if (je.contains("generator")) {
      const auto& jg = je.at("generator");
      check_keys(jg, {"side", "wall_density", "noise_tiles"}, "environment.generator");
      GridGeneratorConfig gen;
      gen.side = fetch<int>(jg, "side", 10, "environment.generator");
      gen.wall_density = fetch<double>(jg, "wall_density", 0.0, "environment.generator");
      gen.noise_tiles = fetch<int>(jg, "noise_tiles", 0, "environment.generator");
      gen.thetas = cfg.environment.thetas;
      gen.noise_alphabet = cfg.environment.noise_alphabet;
      cfg.environment.generator = gen;
    }
  }

  if (j.contains("agent")) {
    const auto& ja = j.at("agent");
    check_keys(ja,
               {"type", "model", "horizon", "samples", "time_budget_ms", "ucb_c", "gamma",
                "epsilon0", "epsilon_decay", "lambda", "shannon_beta_cap"},
               "agent");
    const std::string type_name = fetch<std::string>(ja, "type", to_string(cfg.agent.type), "agent");
    const auto type = parse_agent_type(type_name);
    if (!type) throw config_error("unknown agent.type '" + type_name + "'");
    cfg.agent.type = *type;
    cfg.agent.planner.type = *type;

    std::string model_name = to_string(cfg.agent.model);
    if (cfg.agent.type == AgentType::Aimu) model_name = "truth";
    model_name = fetch<std::string>(ja, "model", model_name, "agent");
    if (model_name == "loc") cfg.agent.model = ModelChoice::Loc;
    else if (model_name == "dirichlet") cfg.agent.model = ModelChoice::Dirichlet;
    else if (model_name == "truth") cfg.agent.model = ModelChoice::Truth;
    else throw config_error("unknown agent.model '" + model_name + "'");

    AgentConfig& pc = cfg.agent.planner;
    pc.horizon = fetch<int>(ja, "horizon", pc.horizon, "agent");
    pc.samples = fetch<std::int64_t>(ja, "samples", pc.samples, "agent");
    if (ja.contains("time_budget_ms") && !ja.at("time_budget_ms").is_null())
      pc.time_budget_ms = fetch<double>(ja, "time_budget_ms", 0.0, "agent");
    pc.ucb_c = fetch<double>(ja, "ucb_c", pc.ucb_c, "agent");
    pc.gamma = fetch<double>(ja, "gamma", pc.gamma, "agent");
    pc.epsilon0 = fetch<double>(ja, "epsilon0", pc.epsilon0, "agent");
    pc.epsilon_decay = fetch<double>(ja, "epsilon_decay", pc.epsilon_decay, "agent");
    pc.lambda = fetch<double>(ja, "lambda", pc.lambda, "agent");
    pc.shannon_beta_cap = fetch<double>(ja, "shannon_beta_cap", pc.shannon_beta_cap, "agent");
  }

  // Cross-field validation.
  if (cfg.agent.type == AgentType::Aimu && cfg.agent.model != ModelChoice::Truth)
    throw config_error("agent.type aimu requires agent.model truth");
  if (cfg.agent.type != AgentType::Aimu && cfg.agent.model == ModelChoice::Truth)
    throw config_error("agent.model truth is reserved for agent.type aimu");
  if ((cfg.agent.type == AgentType::Thompson || cfg.agent.type == AgentType::Mdl) &&
      cfg.agent.model != ModelChoice::Loc)
    throw config_error("thompson/mdl agents require the explicit mixture model (agent.model loc)");
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                               ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("config parse error in " + path.string() + ": " + e.what());
  }
  return parse_experiment_config(j, std::move(base));
}

// Materializes the environment. Random generation is seeded from the base
// seed so the layout is shared by every run and reproducible.
inline GridSpec build_environment(const ExperimentConfig& cfg) {
  if (cfg.environment.layout)
    return parse_layout(*cfg.environment.layout, cfg.environment.thetas,
                        cfg.environment.noise_alphabet);
  if (!cfg.environment.generator) throw config_error("environment needs a layout or a generator");
  RandomSource rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  return generate_spec(*cfg.environment.generator, rng);
}

inline std::vector<std::string> layout_rows(const GridSpec& spec) {
  std::vector<std::string> rows;
  for (int y = 0; y < spec.side(); ++y) {
    std::string row;
    for (int x = 0; x < spec.side(); ++x) {
      switch (spec.at(Coord{x, y}).kind) {
        case TileKind::Empty: row += '.'; break;
        case TileKind::Wall: row += '#'; break;
        case TileKind::Dispenser: row += 'D'; break;
        case TileKind::Noise: row += 'N'; break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::unique_ptr<Agent> build_agent(const ExperimentConfig& cfg, const GridSpec& spec,
                                          std::ostream* search_trace) {
  AgentConfig ac = cfg.agent.planner;
  ac.type = cfg.agent.type;
  ac.search_trace = search_trace;
  std::unique_ptr<EnvironmentModel> model;
  switch (cfg.agent.model) {
    case ModelChoice::Loc: {
      const auto dispensers = spec.dispenser_indices();
      const double theta = spec.at(dispensers.front()).theta;
      model = make_location_mixture(spec, theta);
      break;
    }
    case ModelChoice::Dirichlet:
      model = std::make_unique<DirichletGridModel>(spec.side(), spec.observation_width());
      break;
    case ModelChoice::Truth:
      model = std::make_unique<KnownGridModel>(spec);
      break;
  }
  return make_agent(std::move(model), ac, spec.reward_bounds());
}

// ---------------------------------------------------------------------------
// Traces and summaries

struct CycleRecord {
  std::int64_t t = 0;
  double score = 0.0;          // reward for RL agents, explored % for KSA
  double cum_avg = 0.0;        // (1/t) sum_{j<=t} score_j
  double explored_frac = 0.0;  // 100 * visited / reachable
  double reward = 0.0;
  std::string mode;
};

struct RunTrace {
  int run_id = 0;
  std::vector<CycleRecord> records;
  nlohmann::json posterior_final;
};

enum class ScoreKind { Reward, Exploration };

inline std::vector<double> score(ScoreKind kind, const RunTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const CycleRecord& r : trace.records)
    out.push_back(kind == ScoreKind::Reward ? r.reward : r.explored_frac);
  return out;
}

struct SummaryStats {
  std::string label;
  std::int64_t cycles = 0;
  int runs = 0;
  std::vector<double> mean;  // s_bar_t across runs
  std::vector<double> sd;
  double final_exploration_mean = 0.0;
  double final_exploration_sd = 0.0;
  std::vector<double> final_window_scores;  // per-run mean score over the last 10% of cycles
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> resolved_layout;
  SummaryStats stats;
  std::vector<RunTrace> traces;
};

namespace detail {

inline nlohmann::json posterior_snapshot(const Agent& agent, const GridSpec& spec) {
  nlohmann::json j;
  if (const auto* mixture = dynamic_cast<const MixtureModel*>(&agent.model())) {
    j["type"] = "mixture";
    const auto w = mixture->weights();
    if (mixture->size() == spec.side() * spec.side()) {
      nlohmann::json rows = nlohmann::json::array();
      for (int y = 0; y < spec.side(); ++y) {
        nlohmann::json row = nlohmann::json::array();
        for (int x = 0; x < spec.side(); ++x) row.push_back(w[y * spec.side() + x]);
        rows.push_back(std::move(row));
      }
      j["weights"] = std::move(rows);
    } else {
      j["weights"] = std::vector<double>(w.begin(), w.end());
    }
  } else if (const auto* dirichlet = dynamic_cast<const DirichletGridModel*>(&agent.model())) {
    j["type"] = "dirichlet";
    nlohmann::json tiles = nlohmann::json::array();
    for (const auto& t : dirichlet->belief_snapshot()) {
      tiles.push_back({{"x", t.x},
                       {"y", t.y},
                       {"wall", t.wall == WallBelief::Unknown
                                    ? "unknown"
                                    : (t.wall == WallBelief::KnownWall ? "wall" : "open")},
                       {"payouts", t.payouts},
                       {"visits", t.visits},
                       {"payout_mean", t.payout_mean}});
    }
    j["tiles"] = std::move(tiles);
  } else {
    j["type"] = "known";
  }
  return j;
}

}  // namespace detail

// One seeded simulation run of the interaction loop.
inline RunTrace run_single(const ExperimentConfig& cfg, const GridSpec& spec, int run_index,
                           std::ostream* search_trace = nullptr) {
  RandomSource rng(RandomSource::stream_seed(cfg.seed, static_cast<std::uint64_t>(run_index)));
  auto agent = build_agent(cfg, spec, search_trace);
  const bool ksa = is_knowledge_seeking(cfg.agent.type);
  const int reachable = reachable_count(spec);

  RunTrace trace;
  trace.run_id = run_index;
  trace.records.reserve(cfg.cycles);

  GridState state{spec.start()};
  std::set<int> visited{spec.index_of(state.pos)};
  double score_sum = 0.0;
  double reward_sum = 0.0;

  for (std::int64_t t = 1; t <= cfg.cycles; ++t) {
    const Action a = agent->act(rng);
    const std::string mode = agent->mode_string();
    const auto [next, percept] = step(spec, state, a, rng);
    agent->update(a, percept);
    state = next;
    visited.insert(spec.index_of(state.pos));

    CycleRecord rec;
    rec.t = t;
    rec.reward = percept.reward;
    rec.explored_frac = 100.0 * static_cast<double>(visited.size()) / reachable;
    rec.score = ksa ? rec.explored_frac : rec.reward;
    score_sum += rec.score;
    reward_sum += rec.reward;
    rec.cum_avg = score_sum / static_cast<double>(t);
    rec.mode = mode;
    trace.records.push_back(std::move(rec));
  }

  trace.posterior_final = detail::posterior_snapshot(*agent, spec);
  trace.posterior_final["total_reward"] = reward_sum;
  trace.posterior_final["run"] = run_index;
  return trace;
}

inline SummaryStats summarize(const ExperimentConfig& cfg, const std::vector<RunTrace>& traces) {
  SummaryStats stats;
  stats.label = cfg.label;
  stats.cycles = cfg.cycles;
  stats.runs = static_cast<int>(traces.size());
  stats.mean.resize(cfg.cycles);
  stats.sd.resize(cfg.cycles);
  std::vector<double> column(traces.size());
  for (std::int64_t t = 0; t < cfg.cycles; ++t) {
    for (std::size_t r = 0; r < traces.size(); ++r) column[r] = traces[r].records[t].cum_avg;
    const SampleMoments m = sample_moments(column);
    stats.mean[t] = m.mean;
    stats.sd[t] = m.sd;
  }
  std::vector<double> final_explored(traces.size());
  for (std::size_t r = 0; r < traces.size(); ++r)
    final_explored[r] = traces[r].records.back().explored_frac;
  const SampleMoments fe = sample_moments(final_explored);
  stats.final_exploration_mean = fe.mean;
  stats.final_exploration_sd = fe.sd;

  const std::int64_t window = std::max<std::int64_t>(1, cfg.cycles / 10);
  for (const RunTrace& trace : traces) {
    double sum = 0.0;
    for (std::int64_t t = cfg.cycles - window; t < cfg.cycles; ++t) sum += trace.records[t].score;
    stats.final_window_scores.push_back(sum / static_cast<double>(window));
  }
  return stats;
}

// Executes N independent runs (optionally across worker threads; results are
// merged by run id, so parallel and sequential execution emit identical
// files) and summarizes.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridSpec spec = build_environment(cfg);
  ExperimentResult result;
  result.config = cfg;
  result.resolved_layout = layout_rows(spec);
  result.traces.resize(cfg.runs);

  std::ofstream trace_stream;
  if (cfg.search_trace) {
    std::filesystem::create_directories(cfg.out_dir);
    trace_stream.open(std::filesystem::path(cfg.out_dir) / "search_trace.jsonl");
  }

  const int workers = std::min(cfg.parallel, cfg.runs);
  if (workers <= 1) {
    for (int r = 0; r < cfg.runs; ++r)
      result.traces[r] = run_single(cfg, spec, r, cfg.search_trace && r == 0 ? &trace_stream : nullptr);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < cfg.runs; r = next.fetch_add(1))
          result.traces[r] =
              run_single(cfg, spec, r, cfg.search_trace && r == 0 ? &trace_stream : nullptr);
      });
    }
    for (auto& t : pool) t.join();
  }

  result.stats = summarize(cfg, result.traces);
  return result;
}

// ---------------------------------------------------------------------------
// File outputs

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline nlohmann::json resolved_config_json(const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  nlohmann::json j;
  j["label"] = cfg.label;
  j["environment"] = {{"layout", result.resolved_layout},
                      {"thetas", cfg.environment.thetas},
                      {"noise_alphabet", cfg.environment.noise_alphabet}};
  nlohmann::json ja;
  ja["type"] = to_string(cfg.agent.type);
  ja["model"] = to_string(cfg.agent.model);
  ja["horizon"] = cfg.agent.planner.horizon;
  ja["samples"] = cfg.agent.planner.samples;
  if (cfg.agent.planner.time_budget_ms) ja["time_budget_ms"] = *cfg.agent.planner.time_budget_ms;
  ja["ucb_c"] = cfg.agent.planner.ucb_c;
  ja["gamma"] = cfg.agent.planner.gamma;
  ja["epsilon0"] = cfg.agent.planner.epsilon0;
  ja["epsilon_decay"] = cfg.agent.planner.epsilon_decay;
  ja["lambda"] = cfg.agent.planner.lambda;
  ja["shannon_beta_cap"] = cfg.agent.planner.shannon_beta_cap;
  j["agent"] = std::move(ja);
  j["cycles"] = cfg.cycles;
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  j["parallel"] = cfg.parallel;
  j["out"] = cfg.out_dir;
  j["search_trace"] = cfg.search_trace;
  return j;
}

// Writes summary.csv, one trace_<run>.csv per run, per-run posterior
// snapshots, and the fully resolved config.
inline std::filesystem::path emit_outputs(const ExperimentResult& result,
                                          const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_outputs: cannot create " + dir.string());

  {
    std::ofstream out(dir / "summary.csv");
    if (!out) throw std::runtime_error("emit_outputs: cannot write " + (dir / "summary.csv").string());
    out << "label,t,mean,sd\n";
    for (std::int64_t t = 0; t < result.stats.cycles; ++t)
      out << result.stats.label << ',' << (t + 1) << ',' << detail::format_double(result.stats.mean[t])
          << ',' << detail::format_double(result.stats.sd[t]) << '\n';
  }
  for (const RunTrace& trace : result.traces) {
    const fs::path path = dir / ("trace_" + std::to_string(trace.run_id) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_outputs: cannot write " + path.string());
    out << "run,t,score,cum_avg,explored_frac,mode\n";
    for (const CycleRecord& r : trace.records)
      out << trace.run_id << ',' << r.t << ',' << detail::format_double(r.score) << ','
          << detail::format_double(r.cum_avg) << ',' << detail::format_double(r.explored_frac) << ','
          << r.mode << '\n';
  }
  for (const RunTrace& trace : result.traces) {
    const fs::path path = dir / ("posterior_final_" + std::to_string(trace.run_id) + ".json");
    std::ofstream out(path);
    out << trace.posterior_final.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "config.resolved.json");
    out << resolved_config_json(result).dump(2) << '\n';
  }
  return dir;
}

// ---------------------------------------------------------------------------
// Comparison across experiments

struct ComparisonEntry {
  std::string label;
  SampleMoments final_window;
};

struct ComparisonPair {
  std::string label_a, label_b;
  double mean_a = 0.0, mean_b = 0.0;
  WelchResult welch;
};

struct ComparisonReport {
  std::vector<ComparisonEntry> entries;
  std::vector<ComparisonPair> pairs;
};

// Final-window (last 10% of cycles) means with pairwise Welch tests. All
// experiments must share T.
inline ComparisonReport compare(const std::vector<const ExperimentResult*>& experiments) {
  if (experiments.size() < 1) throw std::invalid_argument("compare: nothing to compare");
  const std::int64_t cycles = experiments.front()->stats.cycles;
  ComparisonReport report;
  for (const ExperimentResult* e : experiments) {
    if (e->stats.cycles != cycles) throw std::invalid_argument("compare: cycle-count mismatch");
    report.entries.push_back({e->stats.label, sample_moments(e->stats.final_window_scores)});
  }
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    for (std::size_t j = i + 1; j < experiments.size(); ++j) {
      ComparisonPair pair;
      pair.label_a = experiments[i]->stats.label;
      pair.label_b = experiments[j]->stats.label;
      pair.mean_a = sample_moments(experiments[i]->stats.final_window_scores).mean;
      pair.mean_b = sample_moments(experiments[j]->stats.final_window_scores).mean;
      pair.welch = welch_t_test(experiments[i]->stats.final_window_scores,
                                experiments[j]->stats.final_window_scores);
      report.pairs.push_back(std::move(pair));
    }
  }
  return report;
}

inline void print_comparison(const ComparisonReport& report, std::ostream& out) {
  out << "label,final_window_mean,final_window_sd,runs\n";
  for (const ComparisonEntry& e : report.entries)
    out << e.label << ',' << detail::format_double(e.final_window.mean) << ','
        << detail::format_double(e.final_window.sd) << ',' << e.final_window.n << '\n';
  out << '\n';
  for (const ComparisonPair& p : report.pairs) {
    out << p.label_a << " vs " << p.label_b << ": mean " << detail::format_double(p.mean_a) << " vs "
        << detail::format_double(p.mean_b) << ", t=" << detail::format_double(p.welch.t)
        << ", p(two-sided)=" << detail::format_double(p.welch.p_two_sided)
        << (p.welch.p_two_sided < 0.05 ? " [significant]" : " [n.s.]") << '\n';
  }
}

// ---------------------------------------------------------------------------
// Loading emitted outputs back (for the compare subcommand)

inline ExperimentResult load_experiment_outputs(const std::filesystem::path& summary_path) {
  namespace fs = std::filesystem;
  const fs::path dir = summary_path.has_parent_path() ? summary_path.parent_path() : fs::path(".");
  ExperimentResult result;

  std::ifstream summary(summary_path);
  if (!summary) throw std::runtime_error("cannot open " + summary_path.string());
  std::string line;
  std::getline(summary, line);  // header
  while (std::getline(summary, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string label, t, mean, sd;
    std::getline(ss, label, ',');
    std::getline(ss, t, ',');
    std::getline(ss, mean, ',');
    std::getline(ss, sd, ',');
    result.stats.label = label;
    result.stats.mean.push_back(std::stod(mean));
    result.stats.sd.push_back(std::stod(sd));
  }
  result.stats.cycles = static_cast<std::int64_t>(result.stats.mean.size());
  result.config.label = result.stats.label;
  result.config.cycles = result.stats.cycles;

  // Per-run traces provide the final-window samples for significance tests.
  for (int run = 0;; ++run) {
    const fs::path trace_path = dir / ("trace_" + std::to_string(run) + ".csv");
    std::ifstream in(trace_path);
    if (!in) break;
    RunTrace trace;
    trace.run_id = run;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string run_s, t_s, score_s, cum_s, explored_s, mode_s;
      std::getline(ss, run_s, ',');
      std::getline(ss, t_s, ',');
      std::getline(ss, score_s, ',');
      std::getline(ss, cum_s, ',');
      std::getline(ss, explored_s, ',');
      std::getline(ss, mode_s, ',');
      CycleRecord rec;
      rec.t = std::stoll(t_s);
      rec.score = std::stod(score_s);
      rec.cum_avg = std::stod(cum_s);
      rec.explored_frac = std::stod(explored_s);
      rec.mode = mode_s;
      trace.records.push_back(std::move(rec));
    }
    result.traces.push_back(std::move(trace));
  }
  if (!result.traces.empty()) {
    result.config.runs = static_cast<int>(result.traces.size());
    result.stats.runs = result.config.runs;
    const std::int64_t window = std::max<std::int64_t>(1, result.stats.cycles / 10);
    for (const RunTrace& trace : result.traces) {
      double sum = 0.0;
      for (std::int64_t t = result.stats.cycles - window; t < result.stats.cycles; ++t)
        sum += trace.records[t].score;
      result.stats.final_window_scores.push_back(sum / static_cast<double>(window));
    }
  }
  return result;
}

}  // namespace urlab
