#pragma once

#include <cstdint>
#include <vector>

#include "dphmm/mechanisms.hpp"
#include "dphmm/protection.hpp"

namespace dphmm {

enum class RepairKind { kGreedy, kMin2d };

struct LedgerRecord {
  int timestamp = 0;
  double epsilon = 0.0;
  // Constrained-DP multiplier: max pairwise K-norm of answers over the
  // constraint; +infinity when some pair is off-span.
  double factor = 0.0;
  int dop_true_state = 1;
  double error_l2 = 0.0;
  // Constraint had a single state: answer released exactly (the privacy
  // condition is vacuous there, so the step is flagged instead of failing).
  bool singleton = false;
  std::vector<Edge> repaired_edges;  // edges the repair added this step
  Vec z;
};

struct PrivacyLedger {
  std::vector<LedgerRecord> records;
};

struct ComposeEntry {
  int timestamp = 0;
  double epsilon = 0.0;
  double constrained = 0.0;  // factor * epsilon
};

struct ComposeSummary {
  double dphmm_total = 0.0;       // sum of per-step epsilon
  double constrained_total = 0.0; // sum of factor * epsilon
  std::vector<ComposeEntry> per_timestamp;
};

ComposeSummary compose(const PrivacyLedger& ledger);

// Max pairwise K-norm of answer differences over the constraint; 0 for a
// singleton; +infinity when a pair is off the hull's span.
double constrained_dp_factor(const Constraint& constraint,
                             const MeasurementQuery& query,
                             const Polytope& hull);

struct AuditResult {
  double epsilon = 0.0;
  std::vector<double> factors;  // K-norm of each per-secret difference
  std::vector<double> levels;   // epsilon * factor
  double overall = 0.0;         // max level
};

// Per-secret effective privacy levels for a table-counts database: level_i
// = epsilon * |f(D + s_i) - f(D)|_K. Off-span differences get +infinity.
AuditResult audit_blowfish_database(const std::vector<Vec>& per_secret_diffs,
                                    const Polytope& hull, double epsilon);

// One trajectory's stateful release loop: belief, accounting ledger and RNG
// stream. Single-owner; distinct sessions run independently.
class ReleaseSession {
 public:
  ReleaseSession(MarkovModel model, MeasurementQuery query,
                 PolicyGraph base_graph, MechanismConfig mechanism,
                 RepairKind repair, BeliefState initial_belief,
                 std::uint64_t stream_seed);

  // Propagate, extract the constraint, restrict and repair the graph, build
  // the hull, sample, update the posterior with the mechanism's own
  // density, append a ledger record. Returns the released answer.
  NoisyAnswer step(int true_state);
  NoisyAnswer step(int true_state, double epsilon_t);

  const BeliefState& belief() const { return belief_; }
  const PrivacyLedger& ledger() const { return ledger_; }
  const MarkovModel& model() const { return model_; }
  const MeasurementQuery& query() const { return query_; }
  int timestamp() const { return belief_.timestamp; }

 private:
  MarkovModel model_;
  MeasurementQuery query_;
  PolicyGraph base_graph_;
  MechanismConfig mechanism_;
  RepairKind repair_;
  BeliefState belief_;
  PrivacyLedger ledger_;
  RandomStream rng_;
};

inline NoisyAnswer release_step(ReleaseSession& session, int true_state,
                                double epsilon_t) {
  return session.step(true_state, epsilon_t);
}

}  // namespace dphmm
