#include "cli_commands.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <json.hpp>
#include <memory>
#include <optional>

#include "patrol/baselines.hpp"
#include "patrol/error.hpp"
#include "patrol/io.hpp"
#include "patrol/learner.hpp"
#include "patrol/metrics.hpp"

#ifndef PATROL_DATA_DIR
#define PATROL_DATA_DIR "data"
#endif

namespace patrol::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

fs::path bundled_map(std::string_view file_name) { return fs::path(PATROL_DATA_DIR) / "maps" / file_name; }

namespace {

constexpr const char* kDefaultMap = "grid20_h3.json";

struct EnvFlags {
  std::string map = bundled_map(kDefaultMap).string();
  int agents = EnvConfig{}.num_agents;
  int line_of_sight = EnvConfig{}.line_of_sight;
  std::string start = "random";
  int horizon = EnvConfig{}.horizon;
  double discount = EnvConfig{}.discount;
  std::string preset = "default";
  std::optional<double> eta, phi, nu, alpha_minus, alpha_plus;

  void add_to(CLI::App& app, bool with_scalar_agents = true) {
    app.add_option("--map", map, "Map file")->capture_default_str();
    if (with_scalar_agents) app.add_option("--agents", agents, "Number of patrols")->capture_default_str();
    app.add_option("--line-of-sight", line_of_sight, "Observation radius in cells")->capture_default_str();
    if (with_scalar_agents) app.add_option("--start", start, "Start mode: random|best")->capture_default_str();
    app.add_option("--horizon", horizon, "Steps per episode")->capture_default_str();
    app.add_option("--discount", discount, "Discount factor")->capture_default_str();
    app.add_option("--preset", preset, "Reward preset: default|sparse-zone")->capture_default_str();
    app.add_option("--eta", eta, "Reward normalization factor");
    app.add_option("--phi", phi, "Relevance threshold");
    app.add_option("--nu", nu, "Coverage penalty");
    app.add_option("--alpha-minus", alpha_minus, "Exploration reward");
    app.add_option("--alpha-plus", alpha_plus, "Optimal exploration reward");
  }

  EnvConfig build(int num_agents, const std::string& start_text) const {
    EnvConfig c;
    c.num_agents = num_agents;
    c.line_of_sight = line_of_sight;
    c.start_mode = parse_start_mode(start_text);
    c.horizon = horizon;
    c.discount = discount;
    if (preset == "sparse-zone") {
      c.reward = RewardParams::sparse_zone();
    } else if (preset != "default") {
      throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + preset + "'");
    }
    if (eta) c.reward.eta = *eta;
    if (phi) c.reward.phi = *phi;
    if (nu) c.reward.nu = *nu;
    if (alpha_minus) c.reward.alpha_minus = *alpha_minus;
    if (alpha_plus) c.reward.alpha_plus = *alpha_plus;
    c.validate();
    return c;
  }
};

struct EvalFlags {
  int runs = 100;
  std::uint64_t seed = 0;
  std::vector<double> psi = kDefaultPsi;
  bool pooled = false;
  std::string greedy_score = "discounted";
  bool argmax = false;
  int jobs = 1;

  void add_to(CLI::App& app) {
    app.add_option("--runs", runs, "Number of rollouts")->capture_default_str();
    app.add_option("--seed", seed, "Base seed")->capture_default_str();
    app.add_option("--psi", psi, "Top-psi percentages")->delimiter(',')->capture_default_str();
    app.add_flag("--pooled", pooled, "Coverage of the union of visited nodes over all runs");
    app.add_option("--greedy-score", greedy_score, "Greedy score: discounted|raw")->capture_default_str();
    app.add_flag("--argmax", argmax, "Trained policies take their most likely action instead of sampling");
    app.add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  }

  void check() const {
    if (runs < 1) throw Error(ErrorCode::kInvalidArgument, "--runs must be >= 1");
    if (jobs < 1) throw Error(ErrorCode::kInvalidArgument, "--jobs must be >= 1");
    if (psi.empty()) throw Error(ErrorCode::kInvalidArgument, "--psi needs at least one value");
    for (double p : psi) {
      if (!(p > 0.0 && p <= 100.0)) throw Error(ErrorCode::kInvalidArgument, "psi values must lie in (0, 100]");
    }
  }
};

struct Resolved {
  std::string label;
  std::unique_ptr<Policy> policy;
};

Resolved resolve_policy(const std::string& selector, const EvalFlags& flags) {
  GreedyScore score = GreedyScore::kDiscounted;
  if (flags.greedy_score == "raw") {
    score = GreedyScore::kRaw;
  } else if (flags.greedy_score != "discounted") {
    throw Error(ErrorCode::kInvalidArgument, "unknown greedy score '" + flags.greedy_score + "'");
  }
  if (selector == "greedy") {
    auto policy = greedy_policy(score);
    return {policy->name(), std::move(policy)};
  }
  if (selector == "random") return {selector, random_policy()};
  const std::string prefix = "trained:";
  if (selector.rfind(prefix, 0) == 0 && selector.size() > prefix.size()) {
    const fs::path path = selector.substr(prefix.size());
    return {"trained:" + path.stem().string(), std::make_unique<LearnedPolicy>(load_params(path), !flags.argmax)};
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown policy '" + selector + "' (expected greedy, random or trained:<path>)");
}

ordered_json env_json(const EnvConfig& c) {
  return {{"num_agents", c.num_agents},
          {"line_of_sight", c.line_of_sight},
          {"start_mode", std::string(to_string(c.start_mode))},
          {"horizon", c.horizon},
          {"discount", c.discount},
          {"reward",
           {{"eta", c.reward.eta},
            {"phi", c.reward.phi},
            {"nu", c.reward.nu},
            {"alpha_minus", c.reward.alpha_minus},
            {"alpha_plus", c.reward.alpha_plus}}},
          {"config_hash", config_hash(c)}};
}

ordered_json eval_json(const EvalFlags& f) {
  return {{"runs", f.runs}, {"seed", f.seed},          {"psi", f.psi},   {"pooled", f.pooled},
          {"greedy_score", f.greedy_score}, {"argmax", f.argmax}};
}

void write_config(const fs::path& dir, const ordered_json& doc) { write_text_file(dir / "config.json", doc.dump(2) + "\n"); }

PatrolGraph load_graph(const std::string& map_path, std::ostream& err) {
  std::vector<Diagnostic> diagnostics;
  PatrolGraph graph = skeletonize(load_map(map_path), &diagnostics);
  for (const auto& d : diagnostics) err << "warning: " << d.kind << ": " << d.message << "\n";
  return graph;
}

std::string heatmap(const PatrolGraph& graph, std::span<const EpisodeLog> episodes) {
  std::vector<double> counts(graph.size(), 0.0);
  for (const auto& ep : episodes) {
    for (const auto& route : ep.routes) {
      for (NodeId v : route) counts[static_cast<std::size_t>(v)] += 1.0;
    }
  }
  const double runs = static_cast<double>(std::max<std::size_t>(1, episodes.size()));
  std::string out;
  for (int r = 0; r < graph.rows(); ++r) {
    for (int c = 0; c < graph.cols(); ++c) {
      if (c > 0) out += '\t';
      const NodeId v = graph.node_at({r, c});
      out += v < 0 ? std::string("-") : format_fixed(counts[static_cast<std::size_t>(v)] / runs, 3);
    }
    out += '\n';
  }
  return out;
}

// --- gen-map -------------------------------------------------------------

struct GenMapCommand {
  SyntheticSpec spec;
  std::uint64_t seed = 0;
  std::string out;

  void add_to(CLI::App& app) {
    app.add_option("--rows", spec.rows)->capture_default_str();
    app.add_option("--cols", spec.cols)->capture_default_str();
    app.add_option("--hotspots", spec.hotspots)->capture_default_str();
    app.add_option("--peak-min", spec.peak_min)->capture_default_str();
    app.add_option("--peak-max", spec.peak_max)->capture_default_str();
    app.add_option("--density", spec.road_density, "Probability that a cell is a road")->capture_default_str();
    app.add_option("--decay-radius", spec.decay_radius)->capture_default_str();
    app.add_option("--aux-border", spec.aux_border, "Width of the out-of-zone ring")->capture_default_str();
    app.add_option("--cell-side", spec.cell_side_m, "Cell side in metres")->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
    app.add_option("--out", out, "Output map file (default <out-dir>/map.json)");
  }

  int run(const fs::path& out_dir, std::ostream& os, std::ostream& err) const {
    const GridMap grid = generate_synthetic_map(spec, seed);
    const fs::path path = out.empty() ? out_dir / "map.json" : fs::path(out);
    save_map(grid, path);
    const PatrolGraph graph = load_graph(path.string(), err);
    os << "map\t" << path.string() << "\n";
    os << "nodes\t" << graph.size() << "\n";
    os << "edges\t" << graph.edge_count() << "\n";
    os << "monitored\t" << graph.monitored().size() << "\n";
    return kExitOk;
  }
};

// --- simulate ------------------------------------------------------------

struct SimulateCommand {
  EnvFlags env;
  EvalFlags eval;
  std::string policy = "greedy";

  void add_to(CLI::App& app) {
    env.add_to(app);
    eval.add_to(app);
    app.add_option("--policy", policy, "greedy | random | trained:<path>")->capture_default_str();
  }

  int run(const fs::path& out_dir, std::ostream& os, std::ostream& err) const {
    eval.check();
    const EnvConfig config = env.build(env.agents, env.start);
    const PatrolGraph graph = load_graph(env.map, err);
    const Resolved resolved = resolve_policy(policy, eval);
    const Evaluation result =
        evaluate(graph, config, *resolved.policy, eval.runs, eval.seed, eval.psi, eval.pooled, eval.jobs);

    char name[64];
    for (std::size_t i = 0; i < result.episodes.size(); ++i) {
      std::snprintf(name, sizeof name, "episode_%04zu.json", i);
      save_episode(result.episodes[i], out_dir / "episodes" / name);
    }
    save_report(result.report, out_dir / "report.json");
    Table table{eval.psi, {make_row(resolved.label, config, result.report)}};
    const std::string tsv = format_table(table);
    write_text_file(out_dir / "report.tsv", tsv);
    write_text_file(out_dir / "heatmap.tsv", heatmap(graph, result.episodes));

    ordered_json doc{{"command", "simulate"}, {"map", env.map}, {"policy", policy}};
    doc["env"] = env_json(config);
    doc["evaluation"] = eval_json(eval);
    write_config(out_dir, doc);
    os << tsv;
    return kExitOk;
  }
};

// --- train ---------------------------------------------------------------

struct TrainCommand {
  EnvFlags env;
  LearnerConfig learner;
  bool no_gae = false;

  void add_to(CLI::App& app) {
    env.add_to(app);
    app.add_option("--learning-rate", learner.learning_rate)->capture_default_str();
    app.add_option("--gae-lambda", learner.gae_lambda)->capture_default_str();
    app.add_option("--entropy-coeff", learner.entropy_coeff)->capture_default_str();
    app.add_option("--kl-coeff", learner.kl_coeff)->capture_default_str();
    app.add_flag("--no-gae", no_gae, "Monte Carlo returns instead of GAE");
    app.add_option("--clip-epsilon", learner.clip_epsilon)->capture_default_str();
    app.add_option("--episodes-per-update", learner.episodes_per_update)->capture_default_str();
    app.add_option("--total-updates", learner.total_updates)->capture_default_str();
    app.add_option("--epochs", learner.epochs)->capture_default_str();
    app.add_option("--minibatch-size", learner.minibatch_size)->capture_default_str();
    app.add_option("--value-coeff", learner.value_coeff)->capture_default_str();
    app.add_option("--reward-scale", learner.reward_scale)->capture_default_str();
    app.add_option("--seed", learner.seed)->capture_default_str();
    app.add_option("--jobs", learner.jobs, "Worker threads")->capture_default_str();
  }

  int run(const fs::path& out_dir, std::ostream& os, std::ostream& err) const {
    const EnvConfig config = env.build(env.agents, env.start);
    LearnerConfig lc = learner;
    lc.use_gae = !no_gae;
    lc.discount = config.discount;
    lc.validate();
    const PatrolGraph graph = load_graph(env.map, err);
    const TrainResult result = train(graph, config, lc);

    save_params(result.params, out_dir / "policy.json");
    write_text_file(out_dir / "curve.csv", serialize_curve(result.curve));
    ordered_json doc{{"command", "train"}, {"map", env.map}};
    doc["env"] = env_json(config);
    doc["learner"] = {{"learning_rate", lc.learning_rate},
                      {"gae_lambda", lc.gae_lambda},
                      {"entropy_coeff", lc.entropy_coeff},
                      {"kl_coeff", lc.kl_coeff},
                      {"use_gae", lc.use_gae},
                      {"clip_epsilon", lc.clip_epsilon},
                      {"discount", lc.discount},
                      {"episodes_per_update", lc.episodes_per_update},
                      {"total_updates", lc.total_updates},
                      {"epochs", lc.epochs},
                      {"minibatch_size", lc.minibatch_size},
                      {"value_coeff", lc.value_coeff},
                      {"reward_scale", lc.reward_scale},
                      {"seed", lc.seed}};
    doc["feature_schema_hash"] = feature_schema_hash();
    write_config(out_dir, doc);

    os << "updates\t" << result.curve.size() << "\n";
    if (!result.curve.empty()) os << "final_mean_joint_reward\t" << format_fixed(result.curve.back(), 3) << "\n";
    return kExitOk;
  }
};

// --- evaluate ------------------------------------------------------------

struct EvaluateCommand {
  EnvFlags env;
  EvalFlags eval;
  std::vector<std::string> policies;
  std::vector<std::string> starts{"random"};
  std::vector<int> agents{EnvConfig{}.num_agents};

  void add_to(CLI::App& app) {
    env.add_to(app, false);
    eval.add_to(app);
    app.add_option("--policy", policies, "greedy | random | trained:<path>; repeatable");
    app.add_option("--start", starts, "Start modes; repeatable")->capture_default_str();
    app.add_option("--agents", agents, "Patrol counts; repeatable")->capture_default_str();
  }

  int run(const fs::path& out_dir, std::ostream& os, std::ostream& err) const {
    if (policies.empty()) throw Error(ErrorCode::kInvalidArgument, "evaluate needs at least one --policy");
    if (starts.empty() || agents.empty()) throw Error(ErrorCode::kInvalidArgument, "empty --start or --agents list");
    eval.check();
    const PatrolGraph graph = load_graph(env.map, err);
    Table table{eval.psi, {}};
    ordered_json cells = ordered_json::array();
    for (const auto& selector : policies) {
      const Resolved resolved = resolve_policy(selector, eval);
      for (const auto& start : starts) {
        for (int n : agents) {
          const EnvConfig config = env.build(n, start);
          const Evaluation result =
              evaluate(graph, config, *resolved.policy, eval.runs, eval.seed, eval.psi, eval.pooled, eval.jobs);
          table.rows.push_back(make_row(resolved.label, config, result.report));
          cells.push_back({{"policy", selector}, {"env", env_json(config)}});
        }
      }
    }
    const std::string tsv = format_table(table);
    write_text_file(out_dir / "evaluation.tsv", tsv);
    ordered_json doc{{"command", "evaluate"}, {"map", env.map}};
    doc["cells"] = cells;
    doc["evaluation"] = eval_json(eval);
    write_config(out_dir, doc);
    os << tsv;
    return kExitOk;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooperative patrol routing: maps, simulation, training and evaluation", "patrol"};
  app.set_config("--config", "", "INI/TOML file with option values; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = "patrol_out";
  app.add_option("--out-dir", out_dir, "Output directory")->envname("PATROL_OUT_DIR")->capture_default_str();

  GenMapCommand gen_map;
  SimulateCommand simulate;
  TrainCommand train_cmd;
  EvaluateCommand evaluate_cmd;
  CLI::App* gen_app = app.add_subcommand("gen-map", "Generate a synthetic map");
  CLI::App* sim_app = app.add_subcommand("simulate", "Roll out one policy and report coverage");
  CLI::App* train_app = app.add_subcommand("train", "Train the shared policy");
  CLI::App* eval_app = app.add_subcommand("evaluate", "Compare policies in one table");
  gen_map.add_to(*gen_app);
  simulate.add_to(*sim_app);
  train_cmd.add_to(*train_app);
  evaluate_cmd.add_to(*eval_app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen_app->parsed()) return gen_map.run(out_dir, out, err);
    if (sim_app->parsed()) return simulate.run(out_dir, out, err);
    if (train_app->parsed()) return train_cmd.run(out_dir, out, err);
    return evaluate_cmd.run(out_dir, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_config_error() ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace patrol::cli
