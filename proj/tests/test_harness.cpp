#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "dphmm/harness.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dphmm;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.side = 4;
  config.timesteps = 6;
  config.n_trajectories = 3;
  config.policies = {{PolicyKind::kUtility, {}, 1.0}};
  config.epsilons = {1.0};
  config.seed = 9001;
  config.timing = false;
  config.threads = 1;
  return config;
}

bool rows_equal(const std::vector<MetricsRow>& a,
                const std::vector<MetricsRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].trajectory != b[i].trajectory || a[i].t != b[i].t ||
        a[i].dop != b[i].dop || a[i].error != b[i].error ||
        a[i].epsilon != b[i].epsilon || a[i].factor != b[i].factor ||
        a[i].runtime_ms != b[i].runtime_ms) {
      return false;
    }
  }
  return true;
}

std::string slurp(const std::string& path) {
  std::string text;
  if (FILE* f = std::fopen(path.c_str(), "rb")) {
    char buffer[4096];
    std::size_t got;
    while ((got = std::fread(buffer, 1, sizeof buffer, f)) > 0) {
      text.append(buffer, got);
    }
    std::fclose(f);
  }
  return text;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("grid world shape and walk rows") {
  const GridWorld world = generate_grid_world(2, 7, 3, 5);
  CHECK(world.side == 2);
  CHECK(world.model.n_states() == 4);
  CHECK(world.query.n_states() == 4);
  CHECK(world.query.dim() == 2);
  CHECK(world.query.answer(0) == Vec{0, 0});
  CHECK(world.query.answer(1) == Vec{1, 0});
  CHECK(world.query.answer(2) == Vec{0, 1});
  CHECK(world.query.answer(3) == Vec{1, 1});

  // Every 2x2 cell is a corner with two neighbors at probability 1/2.
  CHECK(world.model.transition() ==
        std::vector<std::vector<double>>{{0, 0.5, 0.5, 0},
                                         {0.5, 0, 0, 0.5},
                                         {0.5, 0, 0, 0.5},
                                         {0, 0.5, 0.5, 0}});

  REQUIRE(world.trajectories.size() == 3);
  for (const auto& path : world.trajectories) {
    REQUIRE(path.size() == 6);  // timesteps + 1 entries
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
      CHECK(world.model.at(path[t], path[t + 1]) > 0.0);
    }
  }

  const GridWorld mid = generate_grid_world(3, 7, 1, 1);
  CHECK(mid.model.at(4, 1) == 0.25);  // center cell, four ways out
  CHECK(mid.model.at(1, 0) == doctest::Approx(1.0 / 3.0));  // edge cell
  CHECK(mid.model.at(1, 1) == 0.0);   // no self loops

  CHECK_THROWS_AS(generate_grid_world(1, 7, 1, 1), std::invalid_argument);
}

TEST_CASE("grid trajectories are seed deterministic") {
  const GridWorld a = generate_grid_world(4, 11, 5, 20);
  const GridWorld b = generate_grid_world(4, 11, 5, 20);
  const GridWorld c = generate_grid_world(4, 12, 5, 20);
  CHECK(a.trajectories == b.trajectories);
  CHECK(a.trajectories != c.trajectories);
}

TEST_CASE("long walks approach the degree-weighted stationary law") {
  const GridWorld world = generate_grid_world(3, 5, 1, 100000);
  const std::vector<double> stationary =
      oracle::stationary_distribution(world.model.transition());
  std::vector<double> freq(9, 0.0);
  for (int s : world.trajectories[0]) freq[s] += 1.0;
  double tv = 0.0;
  for (int s = 0; s < 9; ++s) {
    tv += std::abs(freq[s] / world.trajectories[0].size() - stationary[s]);
  }
  CHECK(tv / 2 < 0.05);
}

TEST_CASE("model-driven walks respect the transition support") {
  const MarkovModel walk = fixtures::example_walk();
  const auto paths = sample_trajectories(walk, 13, 50, 12);
  REQUIRE(paths.size() == 50);
  std::set<int> starts;
  for (const auto& path : paths) {
    REQUIRE(path.size() == 13);
    starts.insert(path[0]);
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
      CHECK(walk.at(path[t], path[t + 1]) > 0.0);
    }
  }
  CHECK(starts.size() >= 4);  // uniform starts spread over 6 states
  CHECK(sample_trajectories(walk, 13, 50, 12) == paths);
}

TEST_CASE("experiment rows are ordered and aggregated") {
  const std::vector<CellResult> cells = run_experiment(small_config());
  REQUIRE(cells.size() == 1);
  const CellResult& cell = cells[0];
  CHECK_FALSE(cell.failed);
  CHECK(cell.policy_label == "util:1");
  CHECK(cell.epsilon == 1.0);
  REQUIRE(cell.rows.size() == 18);

  double dop_sum = 0.0, sq_sum = 0.0;
  std::size_t i = 0;
  for (int trajectory = 0; trajectory < 3; ++trajectory) {
    for (int t = 1; t <= 6; ++t, ++i) {
      const MetricsRow& row = cell.rows[i];
      CHECK(row.trajectory == trajectory);
      CHECK(row.t == t);
      CHECK(row.dop >= 2);        // grid constraints are never singletons
      CHECK(row.factor >= 1.0);   // some constraint pair sits on the hull
      CHECK(row.epsilon == 1.0);
      CHECK(row.runtime_ms == 0.0);  // timing off
      dop_sum += row.dop;
      sq_sum += row.error * row.error;
    }
  }
  CHECK(cell.mean_dop == doctest::Approx(dop_sum / 18).epsilon(1e-12));
  CHECK(cell.rms_error ==
        doctest::Approx(std::sqrt(sq_sum / 18)).epsilon(1e-12));
  CHECK(cell.mean_runtime_ms == 0.0);
}

TEST_CASE("thread count does not change results") {
  ExperimentConfig config = small_config();
  config.n_trajectories = 6;
  config.threads = 1;
  const auto serial = run_experiment(config);
  config.threads = 4;
  const auto parallel = run_experiment(config);
  REQUIRE(serial.size() == 1);
  REQUIRE(parallel.size() == 1);
  CHECK(rows_equal(serial[0].rows, parallel[0].rows));
}

TEST_CASE("sweeps cover every policy-epsilon cell") {
  ExperimentConfig config = small_config();
  config.policies = {{PolicyKind::kUtility, {}, 1.0},
                     {PolicyKind::kComplete, {}, 0.0}};
  config.epsilons = {0.5, 1.0};
  const auto cells = run_experiment(config);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].policy_label == "util:1");
  CHECK(cells[0].epsilon == 0.5);
  CHECK(cells[1].epsilon == 1.0);
  CHECK(cells[2].policy_label == "complete");
  CHECK(cells[3].epsilon == 1.0);
  for (const auto& cell : cells) {
    CHECK_FALSE(cell.failed);
    CHECK(cell.rows.size() == 18);
  }
}

TEST_CASE("a failing cell does not poison the sweep") {
  ExperimentConfig config = small_config();
  config.policies = {{PolicyKind::kUtility, {}, 1.0},
                     {PolicyKind::kUtility, {}, 0.0}};  // invalid radius
  const auto cells = run_experiment(config);
  REQUIRE(cells.size() == 2);
  CHECK_FALSE(cells[0].failed);
  CHECK(cells[0].rows.size() == 18);
  CHECK(cells[1].failed);
  CHECK(cells[1].rows.empty());
  CHECK_FALSE(cells[1].error.empty());
}

TEST_CASE("epsilon sweeps are seed paired") {
  ExperimentConfig config = small_config();
  config.policies = {{PolicyKind::kComplete, {}, 0.0}};
  config.epsilons = {0.5, 2.0};
  const auto cells = run_experiment(config);
  REQUIRE(cells.size() == 2);
  REQUIRE(cells[0].rows.size() == cells[1].rows.size());
  for (std::size_t i = 0; i < cells[0].rows.size(); ++i) {
    const MetricsRow& low = cells[0].rows[i];
    const MetricsRow& high = cells[1].rows[i];
    CHECK(low.dop == high.dop);
    CHECK(low.factor == high.factor);
    // Same direction draw, radius scaled by the budget ratio.
    CHECK(low.error == doctest::Approx(4.0 * high.error).epsilon(1e-9));
  }
}

TEST_CASE("experiment over an explicit world") {
  GridWorld world;
  world.model = fixtures::example_walk();
  world.query = fixtures::example_query();
  world.trajectories = {{0, 1, 2}, {3, 4}};

  ExperimentConfig config = small_config();
  config.policies = {{PolicyKind::kComplete, {}, 0.0}};
  const auto cells = run_experiment(config, world);
  REQUIRE(cells.size() == 1);
  const auto& rows = cells[0].rows;
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].trajectory == 0);
  CHECK(rows[0].t == 1);
  CHECK(rows[1].trajectory == 0);
  CHECK(rows[1].t == 2);
  CHECK(rows[2].trajectory == 1);
  CHECK(rows[2].t == 1);

  world.trajectories = {{5}};
  CHECK_THROWS_AS(run_experiment(config, world), std::invalid_argument);
}

TEST_CASE("experiment input validation") {
  ExperimentConfig config = small_config();
  config.timesteps = 0;
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config = small_config();
  config.n_trajectories = 0;
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config = small_config();
  config.policies.clear();
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config = small_config();
  config.epsilons = {1.0, -0.5};
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config = small_config();
  config.side = 1;
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_CASE("policy families order the protection and the noise") {
  ExperimentConfig config;
  config.side = 4;
  config.timesteps = 30;
  config.n_trajectories = 4;
  config.seed = 4242;
  config.timing = false;
  config.threads = 1;
  config.policies = {{PolicyKind::kUtility, {}, 1.0},
                     {PolicyKind::kUtility, {}, 2.0},
                     {PolicyKind::kUtility, {}, 3.0},
                     {PolicyKind::kTransition, {}, 0.0},
                     {PolicyKind::kComplete, {}, 0.0}};
  const auto cells = run_experiment(config);
  REQUIRE(cells.size() == 5);
  for (const auto& cell : cells) REQUIRE_FALSE(cell.failed);

  const CellResult& util1 = cells[0];
  const CellResult& util2 = cells[1];
  const CellResult& util3 = cells[2];
  const CellResult& transition = cells[3];
  const CellResult& complete = cells[4];

  // Wider utility radii only add edges, so protection never drops.
  CHECK(util1.mean_dop <= util2.mean_dop);
  CHECK(util2.mean_dop <= util3.mean_dop);
  // Same-parity constraints make the transition graph a clique on them.
  CHECK(transition.mean_dop >= util1.mean_dop);
  // The tight hull pays less noise than the complete one.
  CHECK(util1.rms_error <= complete.rms_error);
}

TEST_CASE("metrics files round trip") {
  const std::vector<MetricsRow> rows = {
      {0, 1, 3, 0.5, 1.0, 1.25, 0.0},
      {0, 2, 4, 1.75, 1.0, 2.0, 0.0},
      {1, 1, 2, 0.0, 0.5, std::numeric_limits<double>::infinity(), 0.0},
  };
  const std::string csv = "/tmp/dphmm_metrics_test.csv";
  const std::string jsonl = "/tmp/dphmm_metrics_test.jsonl";
  write_metrics(rows, csv, MetricsFormat::kCsv);
  write_metrics(rows, jsonl, MetricsFormat::kJsonl);
  CHECK(rows_equal(read_metrics(csv, MetricsFormat::kCsv), rows));
  CHECK(rows_equal(read_metrics(jsonl, MetricsFormat::kJsonl), rows));

  CHECK(slurp(csv).substr(0, 48) ==
        "trajectory,t,dop,error,epsilon,factor,runtime_ms");
}

TEST_CASE("empty metrics files keep their header") {
  const std::string path = "/tmp/dphmm_metrics_empty.csv";
  write_metrics({}, path, MetricsFormat::kCsv);
  CHECK(slurp(path) == "trajectory,t,dop,error,epsilon,factor,runtime_ms\n");
  CHECK(read_metrics(path, MetricsFormat::kCsv).empty());

  const std::string bad = "/tmp/dphmm_metrics_bad.csv";
  if (FILE* f = std::fopen(bad.c_str(), "wb")) {
    std::fputs("wrong,header\n", f);
    std::fclose(f);
  }
  CHECK_THROWS(read_metrics(bad, MetricsFormat::kCsv));
}

TEST_CASE("same-seed runs write byte-identical metrics") {
  ExperimentConfig config = small_config();
  const auto first = run_experiment(config);
  const auto second = run_experiment(config);
  const std::string a = "/tmp/dphmm_metrics_a.csv";
  const std::string b = "/tmp/dphmm_metrics_b.csv";
  write_metrics(first[0].rows, a, MetricsFormat::kCsv);
  write_metrics(second[0].rows, b, MetricsFormat::kCsv);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(!text.empty());
}

TEST_CASE("timing captures nonnegative step costs") {
  ExperimentConfig config = small_config();
  config.timing = true;
  const auto cells = run_experiment(config);
  bool any_positive = false;
  for (const MetricsRow& row : cells[0].rows) {
    CHECK(row.runtime_ms >= 0.0);
    if (row.runtime_ms > 0.0) any_positive = true;
  }
  CHECK(any_positive);
  CHECK(cells[0].mean_runtime_ms > 0.0);
}

TEST_CASE("moving average clips its window at the edges") {
  const std::vector<double> values{1, 2, 3, 4};
  CHECK(moving_average(values, 1) == values);
  CHECK(moving_average(values, 3) == std::vector<double>{1.5, 2, 3, 3.5});
  CHECK(moving_average(values, 4) == std::vector<double>{2, 2.5, 3, 3.5});
  CHECK(moving_average({}, 3).empty());
  CHECK_THROWS_AS(moving_average(values, 0), std::invalid_argument);
}

TEST_CASE("policy labels") {
  CHECK(policy_label({PolicyKind::kComplete, {}, 0.0}) == "complete");
  CHECK(policy_label({PolicyKind::kCategorical, {0, 1}, 0.0}) ==
        "categorical");
  CHECK(policy_label({PolicyKind::kUtility, {}, 1.0}) == "util:1");
  CHECK(policy_label({PolicyKind::kUtility, {}, 2.5}) == "util:2.5");
  CHECK(policy_label({PolicyKind::kTransition, {}, 0.0}) == "transition");
}

}  // TEST_SUITE
