#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dphmm/harness.hpp"
#include "dphmm/model_io.hpp"

namespace {

using dphmm::GraphSpec;
using dphmm::MechanismKind;
using dphmm::MetricsFormat;
using dphmm::PolicyGraph;
using dphmm::PolicyKind;
using dphmm::RepairKind;
using nlohmann::json;
using nlohmann::ordered_json;

struct LoadedModel {
  dphmm::ModelFile file;
  GraphSpec spec;
  PolicyGraph graph;
};

// Resolve the policy from an explicit argument or the model file's own
// policy object; a bare "categorical" argument borrows the file's category
// ids, since the string form cannot carry them.
LoadedModel load_with_policy(const std::string& model_path,
                             const std::string& policy_arg) {
  LoadedModel loaded;
  loaded.file = dphmm::load_model_file(model_path);
  if (!policy_arg.empty()) {
    loaded.spec = dphmm::parse_policy_string(policy_arg);
    if (loaded.spec.kind == PolicyKind::kCategorical) {
      if (loaded.file.policy &&
          loaded.file.policy->kind == PolicyKind::kCategorical) {
        loaded.spec.categories = loaded.file.policy->categories;
      } else {
        throw std::runtime_error(
            "categorical policy needs category ids in the model file");
      }
    }
  } else if (loaded.file.policy) {
    loaded.spec = *loaded.file.policy;
  } else {
    throw std::runtime_error(
        "no policy given: pass one or add a policy object to the model file");
  }
  if (!loaded.file.query) {
    throw std::runtime_error("model file has no query object");
  }
  loaded.graph =
      build_policy(loaded.spec, loaded.file.model.n_states(),
                   &*loaded.file.query, &loaded.file.model);
  return loaded;
}

dphmm::Constraint checked_constraint(std::vector<int> states, int n_states) {
  if (states.empty()) throw std::runtime_error("constraint must not be empty");
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  for (int s : states) {
    if (s < 0 || s >= n_states) {
      throw std::runtime_error("constraint state " + std::to_string(s) +
                               " out of range");
    }
  }
  return states;
}

MechanismKind parse_mechanism(const std::string& text) {
  if (text == "knorm") return MechanismKind::kKNorm;
  if (text == "laplace") return MechanismKind::kLaplace;
  throw std::runtime_error("unknown mechanism '" + text +
                           "' (expected knorm|laplace)");
}

RepairKind parse_repair(const std::string& text) {
  if (text == "greedy") return RepairKind::kGreedy;
  if (text == "min2d") return RepairKind::kMin2d;
  throw std::runtime_error("unknown repair '" + text +
                           "' (expected greedy|min2d)");
}

MetricsFormat parse_format(const std::string& text) {
  if (text == "csv") return MetricsFormat::kCsv;
  if (text == "jsonl") return MetricsFormat::kJsonl;
  throw std::runtime_error("unknown format '" + text +
                           "' (expected csv|jsonl)");
}

int run_hull(const std::string& model_path, const std::string& policy_arg,
             const std::vector<int>& constraint_arg) {
  LoadedModel loaded = load_with_policy(model_path, policy_arg);
  PolicyGraph graph = loaded.graph;
  if (!constraint_arg.empty()) {
    graph = restricted(graph, checked_constraint(constraint_arg,
                                                 loaded.file.model.n_states()));
  }
  const dphmm::MeasurementQuery& query = *loaded.file.query;
  const dphmm::DifferenceSet diffs = dphmm::difference_set(graph, query);
  const dphmm::Polytope hull = dphmm::sensitivity_hull(diffs);

  ordered_json out;
  out["delta_f"] = diffs.columns;
  out["vertices"] = hull.vertices;
  try {
    out["area"] = dphmm::hull_measure(hull);
  } catch (const dphmm::UnsupportedDimensionError&) {
    out["area"] = nullptr;
  }
  out["l1_sensitivity"] = dphmm::l1_sensitivity(graph, query);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_audit(const std::string& model_path, const std::string& policy_arg,
              const std::vector<int>& constraint_arg) {
  LoadedModel loaded = load_with_policy(model_path, policy_arg);
  const dphmm::Constraint constraint =
      checked_constraint(constraint_arg, loaded.file.model.n_states());
  const dphmm::ProtectionReport report = dphmm::protection_report(
      restricted(loaded.graph, constraint), constraint, *loaded.file.query);

  ordered_json out;
  out["constraint"] = report.constraint;
  out["dop"] = report.dop;
  out["exposed"] = report.exposed;
  out["protectable"] = report.protectable;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_release(const std::string& model_path,
                const std::string& trajectory_path,
                const std::string& policy_arg, double epsilon,
                const std::string& mechanism_arg, const std::string& repair_arg,
                std::uint64_t seed, const std::string& out_path) {
  LoadedModel loaded = load_with_policy(model_path, policy_arg);
  const int n = loaded.file.model.n_states();
  const std::vector<std::vector<int>> trajectories =
      dphmm::load_trajectories(trajectory_path, n);
  if (trajectories.empty()) {
    throw std::runtime_error("no trajectories in " + trajectory_path);
  }
  const dphmm::MechanismConfig mechanism{parse_mechanism(mechanism_arg),
                                         epsilon};
  const RepairKind repair = parse_repair(repair_arg);

  std::ofstream file_out;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary);
    if (!file_out) {
      throw std::runtime_error("cannot open " + out_path + " for writing");
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file_out;

  for (std::size_t traj = 0; traj < trajectories.size(); ++traj) {
    const std::vector<int>& path = trajectories[traj];
    if (path.size() < 2) {
      throw std::runtime_error("trajectory " + std::to_string(traj) +
                               " needs at least one step");
    }
    dphmm::BeliefState start;
    start.probs.assign(n, 0.0);
    start.probs[path[0]] = 1.0;
    start.kind = dphmm::BeliefKind::kPosterior;
    start.timestamp = 0;
    const std::uint64_t stream_seed = dphmm::splitmix64(
        seed ^ dphmm::splitmix64(static_cast<std::uint64_t>(traj) + 1));
    dphmm::ReleaseSession session(loaded.file.model, *loaded.file.query,
                                  loaded.graph, mechanism, repair, start,
                                  stream_seed);
    for (std::size_t t = 1; t < path.size(); ++t) {
      session.step(path[t]);
      const std::string record =
          dphmm::ledger_record_json(session.ledger().records.back());
      out << "{\"trajectory\":" << traj << "," << record.substr(1) << "\n";
    }
  }
  if (!out) throw std::runtime_error("failed writing release output");
  return 0;
}

struct SimulateArgs {
  int grid_side = 8;
  std::string model_path;
  std::vector<std::string> policies;
  std::vector<double> epsilons;
  std::vector<double> radius;
  int timesteps = 100;
  int trajectories = 20;
  std::uint64_t seed = 0;
  std::string repair = "greedy";
  std::string mechanism = "knorm";
  std::string out_path = "metrics.csv";
  std::string format = "csv";
  std::string config_path;
  bool no_timing = false;
  int threads = 0;
  std::vector<int> categories;
};

void apply_config_file(SimulateArgs& args, const CLI::App* cmd) {
  const json doc = [&] {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + args.config_path);
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw std::runtime_error("bad JSON in " + args.config_path + ": " +
                               e.what());
    }
  }();

  // Explicit command-line flags win over config-file values.
  auto unset = [&](const std::string& flag) {
    return cmd->get_option(flag)->count() == 0;
  };
  if (doc.contains("grid") && unset("--grid")) {
    args.grid_side = doc["grid"].get<int>();
  }
  if (doc.contains("model") && unset("--model")) {
    args.model_path = doc["model"].get<std::string>();
  }
  if (doc.contains("policies") && unset("--policy")) {
    args.policies = doc["policies"].get<std::vector<std::string>>();
  }
  if (doc.contains("epsilons") && unset("--epsilon")) {
    args.epsilons = doc["epsilons"].get<std::vector<double>>();
  }
  if (doc.contains("radius") && unset("--radius")) {
    args.radius = doc["radius"].get<std::vector<double>>();
  }
  if (doc.contains("timesteps") && unset("--timesteps")) {
    args.timesteps = doc["timesteps"].get<int>();
  }
  if (doc.contains("trajectories") && unset("--trajectories")) {
    args.trajectories = doc["trajectories"].get<int>();
  }
  if (doc.contains("seed") && unset("--seed")) {
    args.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("repair") && unset("--repair")) {
    args.repair = doc["repair"].get<std::string>();
  }
  if (doc.contains("mechanism") && unset("--mechanism")) {
    args.mechanism = doc["mechanism"].get<std::string>();
  }
  if (doc.contains("out") && unset("--out")) {
    args.out_path = doc["out"].get<std::string>();
  }
  if (doc.contains("format") && unset("--format")) {
    args.format = doc["format"].get<std::string>();
  }
  if (doc.contains("timing") && unset("--no-timing")) {
    args.no_timing = !doc["timing"].get<bool>();
  }
  if (doc.contains("threads") && unset("--threads")) {
    args.threads = doc["threads"].get<int>();
  }
  if (doc.contains("categories")) {
    args.categories = doc["categories"].get<std::vector<int>>();
  }
}

std::string cell_out_path(const std::string& base, const std::string& label,
                          double epsilon, bool single_cell) {
  if (single_cell) return base;
  std::string tag = label;
  std::replace(tag.begin(), tag.end(), ':', '-');
  char eps_buf[32];
  std::snprintf(eps_buf, sizeof(eps_buf), "%g", epsilon);
  const std::size_t dot = base.find_last_of('.');
  const std::string stem = dot == std::string::npos ? base : base.substr(0, dot);
  const std::string ext = dot == std::string::npos ? "" : base.substr(dot);
  return stem + "." + tag + ".eps" + eps_buf + ext;
}

int run_simulate(SimulateArgs& args, const CLI::App* cmd) {
  if (!args.config_path.empty()) apply_config_file(args, cmd);
  if (args.policies.empty() && args.radius.empty()) {
    args.policies = {"util:1"};
  }

  dphmm::ExperimentConfig config;
  config.side = args.grid_side;
  config.timesteps = args.timesteps;
  config.n_trajectories = args.trajectories;
  config.seed = args.seed;
  config.mechanism = parse_mechanism(args.mechanism);
  config.repair = parse_repair(args.repair);
  config.timing = !args.no_timing;
  config.threads = args.threads;
  if (!args.epsilons.empty()) config.epsilons = args.epsilons;

  const bool model_mode = !args.model_path.empty();
  dphmm::GridWorld world;
  if (model_mode) {
    dphmm::ModelFile mf = dphmm::load_model_file(args.model_path);
    if (!mf.query) throw std::runtime_error("model file has no query object");
    world.model = std::move(mf.model);
    world.query = std::move(*mf.query);
    world.trajectories = dphmm::sample_trajectories(
        world.model, args.seed, args.trajectories, args.timesteps);
    if (mf.policy && mf.policy->kind == PolicyKind::kCategorical &&
        args.categories.empty()) {
      args.categories = mf.policy->categories;
    }
  }

  config.policies.clear();
  for (const std::string& text : args.policies) {
    GraphSpec spec = dphmm::parse_policy_string(text);
    if (spec.kind == PolicyKind::kCategorical) {
      if (args.categories.empty()) {
        throw std::runtime_error(
            "categorical policy needs category ids (config \"categories\" or "
            "the model file's policy object)");
      }
      spec.categories = args.categories;
    }
    config.policies.push_back(std::move(spec));
  }
  for (double r : args.radius) {
    config.policies.push_back({PolicyKind::kUtility, {}, r});
  }

  const std::vector<dphmm::CellResult> cells =
      model_mode ? run_experiment(config, world) : run_experiment(config);

  const MetricsFormat format = parse_format(args.format);
  const bool single_cell = cells.size() == 1;
  for (const dphmm::CellResult& cell : cells) {
    const std::string path =
        cell_out_path(args.out_path, cell.policy_label, cell.epsilon,
                      single_cell);
    dphmm::write_metrics(cell.rows, path, format);
    ordered_json summary;
    summary["policy"] = cell.policy_label;
    summary["epsilon"] = cell.epsilon;
    summary["rows"] = cell.rows.size();
    summary["mean_dop"] = cell.mean_dop;
    summary["rms_error"] = cell.rms_error;
    summary["mean_runtime_ms"] = cell.mean_runtime_ms;
    summary["out"] = path;
    if (cell.failed) summary["error"] = cell.error;
    std::cout << summary.dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Differentially private release of per-step query answers over a "
      "hidden Markov model"};
  app.require_subcommand(1);

  std::string model_path;
  std::string policy_arg;
  std::vector<int> constraint_arg;

  CLI::App* hull = app.add_subcommand(
      "hull", "Print difference columns, hull vertices, area and l1 "
              "sensitivity for a model's policy graph");
  hull->add_option("--model", model_path, "model JSON file")->required();
  hull->add_option("--policy", policy_arg,
                   "complete|categorical|util:<r>|transition (defaults to the "
                   "model file's policy)");
  hull->add_option("--constraint", constraint_arg,
                   "restrict the graph to these states first")
      ->delimiter(',');

  CLI::App* audit = app.add_subcommand(
      "audit", "Degree-of-protection report for a constraint");
  audit->add_option("--model", model_path, "model JSON file")->required();
  audit->add_option("--policy", policy_arg,
                    "complete|categorical|util:<r>|transition (defaults to "
                    "the model file's policy)");
  audit->add_option("--constraint", constraint_arg, "constraint states")
      ->delimiter(',')
      ->required();

  std::string trajectory_path;
  double epsilon = 1.0;
  std::string mechanism_arg = "knorm";
  std::string repair_arg = "greedy";
  std::uint64_t seed = 0;
  std::string out_path;

  CLI::App* release = app.add_subcommand(
      "release", "Run the private release loop over recorded trajectories, "
                 "one JSON line per step");
  release->add_option("--model", model_path, "model JSON file")->required();
  release->add_option("--trajectories", trajectory_path,
                      "trajectory CSV (trajectory_id,t,state_index)")
      ->required();
  release->add_option("--graph", policy_arg,
                      "complete|categorical|util:<r>|transition (defaults to "
                      "the model file's policy)");
  release->add_option("--epsilon", epsilon, "per-step privacy budget");
  release->add_option("--mechanism", mechanism_arg, "knorm|laplace");
  release->add_option("--repair", repair_arg, "greedy|min2d");
  release->add_option("--seed", seed, "noise stream seed");
  release->add_option("--out", out_path, "output path (default stdout)");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Sweep policies and budgets over a synthetic grid or an "
                  "explicit model, writing metrics files");
  simulate->add_option("--grid", sim.grid_side, "grid side length");
  simulate->add_option("--model", sim.model_path,
                       "explicit model JSON instead of a grid");
  simulate->add_option("--policy", sim.policies,
                       "complete|categorical|util:<r>|transition (repeatable)")
      ->delimiter(',');
  simulate->add_option("--epsilon", sim.epsilons, "per-step budgets to sweep")
      ->delimiter(',');
  simulate->add_option("--radius", sim.radius,
                       "utility radii to sweep (adds util:<r> cells)")
      ->delimiter(',');
  simulate->add_option("--timesteps", sim.timesteps, "steps per trajectory");
  simulate->add_option("--trajectories", sim.trajectories,
                       "number of trajectories");
  simulate->add_option("--seed", sim.seed, "world and noise seed");
  simulate->add_option("--repair", sim.repair, "greedy|min2d");
  simulate->add_option("--mechanism", sim.mechanism, "knorm|laplace");
  simulate->add_option("--out", sim.out_path,
                       "metrics path (multi-cell sweeps add a suffix per "
                       "cell)");
  simulate->add_option("--format", sim.format, "csv|jsonl");
  simulate->add_option("--config", sim.config_path,
                       "JSON config file; explicit flags override it");
  simulate->add_flag("--no-timing", sim.no_timing,
                     "write runtime_ms as 0 so same-seed runs are "
                     "byte-identical");
  simulate->add_option("--threads", sim.threads,
                       "worker threads (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (hull->parsed()) return run_hull(model_path, policy_arg, constraint_arg);
    if (audit->parsed()) {
      return run_audit(model_path, policy_arg, constraint_arg);
    }
    if (release->parsed()) {
      return run_release(model_path, trajectory_path, policy_arg, epsilon,
                         mechanism_arg, repair_arg, seed, out_path);
    }
    if (simulate->parsed()) return run_simulate(sim, simulate);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
