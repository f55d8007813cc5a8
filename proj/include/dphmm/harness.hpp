#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dphmm/release.hpp"

namespace dphmm {

struct GridWorld {
  int side = 0;
  MarkovModel model;
  MeasurementQuery query;  // cell coordinates (x, y), d = 2
  std::vector<std::vector<int>> trajectories;
};

// side x side grid of states with a uniform random walk over 4-neighbors
// (boundary rows renormalized) and integer cell-coordinate answers.
// Trajectories start at uniformly drawn cells; entry t of a trajectory is
// the state at timestamp t, so each has timesteps + 1 entries.
GridWorld generate_grid_world(int side, std::uint64_t seed,
                              int n_trajectories, int timesteps);

// Model-driven walks with uniformly drawn starts; entry t is the state at
// timestamp t. Streams are salted away from the per-session noise streams.
std::vector<std::vector<int>> sample_trajectories(const MarkovModel& model,
                                                  std::uint64_t seed,
                                                  int n_trajectories,
                                                  int timesteps);

struct ExperimentConfig {
  int side = 8;
  int timesteps = 100;
  int n_trajectories = 20;
  std::vector<GraphSpec> policies = {{PolicyKind::kUtility, {}, 1.0}};
  std::vector<double> epsilons = {1.0};
  MechanismKind mechanism = MechanismKind::kKNorm;
  RepairKind repair = RepairKind::kGreedy;
  std::uint64_t seed = 0;
  // Wall-clock capture. Off, runtime_ms is written as exactly 0.0 so that
  // same-seed runs produce byte-identical metrics files.
  bool timing = true;
  int threads = 0;  // 0 picks hardware concurrency
};

struct MetricsRow {
  int trajectory = 0;
  int t = 0;
  int dop = 1;          // DoP of the true state
  double error = 0.0;   // |z_t - f(s*_t)|_2
  double epsilon = 0.0;
  double factor = 0.0;
  double runtime_ms = 0.0;
};

// One (policy, epsilon) sweep cell.
struct CellResult {
  GraphSpec policy;
  std::string policy_label;
  double epsilon = 0.0;
  std::vector<MetricsRow> rows;  // ordered by (trajectory, t)
  double mean_dop = 0.0;
  double rms_error = 0.0;
  double mean_runtime_ms = 0.0;
  bool failed = false;
  std::string error;
};

// Runs a ReleaseSession per trajectory for every (policy, epsilon) cell.
// Trajectories within a cell run in parallel; each one owns a stream
// derived from (seed, trajectory id) only, so sweeps are seed-paired across
// epsilon and policy. A failing session aborts its cell, not the sweep.
std::vector<CellResult> run_experiment(const ExperimentConfig& config);

// Same sweep over a caller-supplied world (explicit model files, custom
// trajectory sets). Runs whatever the world contains: config.side,
// timesteps and n_trajectories are ignored in favor of the world's own
// shape; each trajectory of length L + 1 contributes L steps.
std::vector<CellResult> run_experiment(const ExperimentConfig& config,
                                       const GridWorld& world);

enum class MetricsFormat { kCsv, kJsonl };

// Bit-stable serialization given identical rows; floats at 9 significant
// digits; CSV header trajectory,t,dop,error,epsilon,factor,runtime_ms.
void write_metrics(const std::vector<MetricsRow>& rows,
                   const std::string& path, MetricsFormat format);
std::vector<MetricsRow> read_metrics(const std::string& path,
                                     MetricsFormat format);

// Centered moving average used only at reporting time; raw rows are always
// what gets written.
std::vector<double> moving_average(const std::vector<double>& values,
                                   int window);

std::string policy_label(const GraphSpec& spec);

}  // namespace dphmm
