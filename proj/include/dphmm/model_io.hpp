#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dphmm/harness.hpp"

namespace dphmm {

// Parsed model JSON file: {"n_states": N, "transition": [[...], ...]} with
// optional {"policy": {"kind", "categories", "radius"}} and
// {"query": {"answers": [[...d rows of N...], ...]}} objects.
struct ModelFile {
  MarkovModel model;
  std::optional<GraphSpec> policy;
  std::optional<MeasurementQuery> query;
};

ModelFile load_model_file(const std::string& path);

// Trajectory CSV with header trajectory_id,t,state_index. Rows of one
// trajectory must be consecutive with t starting at 0; states are range
// checked against n_states.
std::vector<std::vector<int>> load_trajectories(const std::string& path,
                                                int n_states);
void save_trajectories(const std::vector<std::vector<int>>& trajectories,
                       const std::string& path);

// Parse "complete" | "categorical" | "util:<r>" | "transition" into a
// GraphSpec; categorical requires category ids from the model file, so only
// the kind is filled here.
GraphSpec parse_policy_string(const std::string& text);

// Stable JSON serializations used by the CLI and the determinism checks.
std::string ledger_record_json(const LedgerRecord& record);
std::string ledger_json(const PrivacyLedger& ledger);

}  // namespace dphmm
