#include "dphmm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace dphmm {

namespace {

constexpr std::uint64_t kTrajectorySalt = 0x7472616a65637473ull;

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

// JSON number, except non-finite values become the string "inf" / "-inf"
// so every line stays valid JSON.
std::string json_double(double x) {
  if (std::isfinite(x)) return format_double(x);
  return x > 0.0 ? "\"inf\"" : "\"-inf\"";
}

double parse_json_double(const nlohmann::json& value) {
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("unrecognized numeric string: " + s);
  }
  return value.get<double>();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

GridWorld generate_grid_world(int side, std::uint64_t seed, int n_trajectories,
                              int timesteps) {
  if (side < 2) throw std::invalid_argument("grid side must be at least 2");
  if (n_trajectories < 0 || timesteps < 0) {
    throw std::invalid_argument("trajectory counts must be nonnegative");
  }
  const int n = side * side;

  std::vector<std::vector<int>> neighbors(n);
  for (int s = 0; s < n; ++s) {
    const int x = s % side;
    const int y = s / side;
    if (y > 0) neighbors[s].push_back(s - side);
    if (x > 0) neighbors[s].push_back(s - 1);
    if (x < side - 1) neighbors[s].push_back(s + 1);
    if (y < side - 1) neighbors[s].push_back(s + side);
  }

  std::vector<std::vector<double>> transition(n, std::vector<double>(n, 0.0));
  for (int s = 0; s < n; ++s) {
    const double p = 1.0 / static_cast<double>(neighbors[s].size());
    for (int nb : neighbors[s]) transition[s][nb] = p;
  }

  std::vector<std::vector<double>> rows(2, std::vector<double>(n));
  for (int s = 0; s < n; ++s) {
    rows[0][s] = static_cast<double>(s % side);
    rows[1][s] = static_cast<double>(s / side);
  }

  GridWorld world;
  world.side = side;
  world.model = MarkovModel(transition);
  world.query = MeasurementQuery(rows);
  world.trajectories =
      sample_trajectories(world.model, seed, n_trajectories, timesteps);
  return world;
}

std::vector<std::vector<int>> sample_trajectories(const MarkovModel& model,
                                                  std::uint64_t seed,
                                                  int n_trajectories,
                                                  int timesteps) {
  if (n_trajectories < 0 || timesteps < 0) {
    throw std::invalid_argument("trajectory counts must be nonnegative");
  }
  const int n = model.n_states();
  if (n < 1) throw std::invalid_argument("model has no states");
  std::vector<std::vector<int>> out;
  out.reserve(n_trajectories);
  for (int traj = 0; traj < n_trajectories; ++traj) {
    RandomStream stream = RandomStream::derive(
        seed ^ kTrajectorySalt, static_cast<std::uint64_t>(traj));
    std::vector<int> path;
    path.reserve(timesteps + 1);
    int current = stream.below(n);
    path.push_back(current);
    for (int t = 1; t <= timesteps; ++t) {
      const double u = stream.uniform();
      double cumulative = 0.0;
      int pick = -1;
      for (int j = 0; j < n; ++j) {
        const double p = model.at(current, j);
        if (p <= 0.0) continue;
        cumulative += p;
        pick = j;
        if (u < cumulative) break;
      }
      if (pick < 0) {
        throw std::invalid_argument("transition row has no positive entries");
      }
      current = pick;
      path.push_back(current);
    }
    out.push_back(std::move(path));
  }
  return out;
}

std::vector<CellResult> run_experiment(const ExperimentConfig& config) {
  if (config.timesteps < 1) {
    throw std::invalid_argument("timesteps must be positive");
  }
  if (config.n_trajectories < 1) {
    throw std::invalid_argument("need at least one trajectory");
  }
  const GridWorld world = generate_grid_world(
      config.side, config.seed, config.n_trajectories, config.timesteps);
  return run_experiment(config, world);
}

std::vector<CellResult> run_experiment(const ExperimentConfig& config,
                                       const GridWorld& world) {
  if (config.policies.empty() || config.epsilons.empty()) {
    throw std::invalid_argument("need at least one policy and one epsilon");
  }
  for (double eps : config.epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  }
  if (world.trajectories.empty()) {
    throw std::invalid_argument("need at least one trajectory");
  }
  for (const std::vector<int>& path : world.trajectories) {
    if (path.size() < 2) {
      throw std::invalid_argument("every trajectory needs at least one step");
    }
  }

  const int n = world.model.n_states();
  const int n_traj = static_cast<int>(world.trajectories.size());

  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min(threads, n_traj);

  std::vector<CellResult> cells;
  for (const GraphSpec& spec : config.policies) {
    for (double eps : config.epsilons) {
      CellResult cell;
      cell.policy = spec;
      cell.policy_label = policy_label(spec);
      cell.epsilon = eps;

      std::vector<std::vector<MetricsRow>> slots(n_traj);
      std::vector<std::string> errors(n_traj);
      try {
        const PolicyGraph graph =
            build_policy(spec, n, &world.query, &world.model);

        auto run_trajectory = [&](int traj) {
          const std::vector<int>& path = world.trajectories[traj];
          const std::uint64_t stream_seed = splitmix64(
              config.seed ^ splitmix64(static_cast<std::uint64_t>(traj) + 1));
          BeliefState start;
          start.probs.assign(n, 0.0);
          start.probs[path[0]] = 1.0;
          start.kind = BeliefKind::kPosterior;
          start.timestamp = 0;
          ReleaseSession session(world.model, world.query, graph,
                                 {config.mechanism, eps}, config.repair,
                                 start, stream_seed);
          const int steps = static_cast<int>(path.size()) - 1;
          std::vector<MetricsRow>& out = slots[traj];
          out.reserve(steps);
          for (int t = 1; t <= steps; ++t) {
            double elapsed_ms = 0.0;
            if (config.timing) {
              const auto begin = std::chrono::steady_clock::now();
              session.step(path[t]);
              const auto end = std::chrono::steady_clock::now();
              elapsed_ms =
                  std::chrono::duration<double, std::milli>(end - begin)
                      .count();
            } else {
              session.step(path[t]);
            }
            const LedgerRecord& record = session.ledger().records.back();
            MetricsRow row;
            row.trajectory = traj;
            row.t = record.timestamp;
            row.dop = record.dop_true_state;
            row.error = record.error_l2;
            row.epsilon = record.epsilon;
            row.factor = record.factor;
            row.runtime_ms = elapsed_ms;
            out.push_back(row);
          }
        };

        if (threads == 1) {
          for (int traj = 0; traj < n_traj; ++traj) run_trajectory(traj);
        } else {
          std::atomic<int> next{0};
          auto worker = [&]() {
            for (;;) {
              const int traj = next.fetch_add(1);
              if (traj >= n_traj) return;
              try {
                run_trajectory(traj);
              } catch (const std::exception& e) {
                errors[traj] = e.what();
              }
            }
          };
          std::vector<std::thread> pool;
          pool.reserve(threads);
          for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
          for (std::thread& th : pool) th.join();
        }
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }

      for (const std::string& message : errors) {
        if (!message.empty() && !cell.failed) {
          cell.failed = true;
          cell.error = message;
        }
      }

      double dop_sum = 0.0;
      double err_sq_sum = 0.0;
      double runtime_sum = 0.0;
      std::size_t count = 0;
      for (std::vector<MetricsRow>& slot : slots) {
        for (const MetricsRow& row : slot) {
          dop_sum += row.dop;
          err_sq_sum += row.error * row.error;
          runtime_sum += row.runtime_ms;
          ++count;
        }
        cell.rows.insert(cell.rows.end(), slot.begin(), slot.end());
        slot.clear();
      }
      if (count > 0) {
        cell.mean_dop = dop_sum / static_cast<double>(count);
        cell.rms_error = std::sqrt(err_sq_sum / static_cast<double>(count));
        cell.mean_runtime_ms = runtime_sum / static_cast<double>(count);
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_metrics(const std::vector<MetricsRow>& rows,
                   const std::string& path, MetricsFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == MetricsFormat::kCsv) {
    out << "trajectory,t,dop,error,epsilon,factor,runtime_ms\n";
    for (const MetricsRow& row : rows) {
      out << row.trajectory << ',' << row.t << ',' << row.dop << ','
          << format_double(row.error) << ',' << format_double(row.epsilon)
          << ',' << format_double(row.factor) << ','
          << format_double(row.runtime_ms) << '\n';
    }
  } else {
    for (const MetricsRow& row : rows) {
      out << "{\"trajectory\":" << row.trajectory << ",\"t\":" << row.t
          << ",\"dop\":" << row.dop << ",\"error\":" << json_double(row.error)
          << ",\"epsilon\":" << json_double(row.epsilon)
          << ",\"factor\":" << json_double(row.factor)
          << ",\"runtime_ms\":" << json_double(row.runtime_ms) << "}\n";
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<MetricsRow> read_metrics(const std::string& path,
                                     MetricsFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<MetricsRow> rows;
  std::string line;
  if (format == MetricsFormat::kCsv) {
    if (!std::getline(in, line) ||
        line != "trajectory,t,dop,error,epsilon,factor,runtime_ms") {
      throw std::runtime_error("bad metrics header in " + path);
    }
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const std::vector<std::string> fields = split_csv_line(line);
      if (fields.size() != 7) {
        throw std::runtime_error("bad metrics row at " + path + ":" +
                                 std::to_string(line_no));
      }
      MetricsRow row;
      row.trajectory = std::stoi(fields[0]);
      row.t = std::stoi(fields[1]);
      row.dop = std::stoi(fields[2]);
      row.error = std::stod(fields[3]);
      row.epsilon = std::stod(fields[4]);
      row.factor = std::stod(fields[5]);
      row.runtime_ms = std::stod(fields[6]);
      rows.push_back(row);
    }
  } else {
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad metrics row at " + path + ":" +
                                 std::to_string(line_no) + ": " + e.what());
      }
      MetricsRow row;
      row.trajectory = obj.at("trajectory").get<int>();
      row.t = obj.at("t").get<int>();
      row.dop = obj.at("dop").get<int>();
      row.error = parse_json_double(obj.at("error"));
      row.epsilon = parse_json_double(obj.at("epsilon"));
      row.factor = parse_json_double(obj.at("factor"));
      row.runtime_ms = parse_json_double(obj.at("runtime_ms"));
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<double> moving_average(const std::vector<double>& values,
                                   int window) {
  if (window < 1) throw std::invalid_argument("window must be positive");
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - (window - 1) / 2);
    const int hi = std::min(n - 1, i + window / 2);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += values[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::string policy_label(const GraphSpec& spec) {
  switch (spec.kind) {
    case PolicyKind::kComplete:
      return "complete";
    case PolicyKind::kCategorical:
      return "categorical";
    case PolicyKind::kUtility: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "util:%g", spec.radius);
      return buf;
    }
    case PolicyKind::kTransition:
      return "transition";
  }
  throw std::invalid_argument("unknown policy kind");
}

}  // namespace dphmm
