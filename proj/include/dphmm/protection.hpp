#pragma once

#include <vector>

#include "dphmm/geometry.hpp"

namespace dphmm {

struct ProtectionReport {
  Constraint constraint;
  std::vector<int> dop;      // parallel to constraint
  std::vector<int> exposed;  // states with dop == 1
  bool protectable = false;
};

// 1 + number of other constraint states whose answer difference to this
// state lies inside the hull of diffs.
int degree_of_protection(int state, const DifferenceSet& diffs,
                         const Constraint& constraint,
                         const MeasurementQuery& query);

// DoP for every constraint state against the graph's own hull. The graph is
// expected to be already restricted to the constraint.
ProtectionReport protection_report(const PolicyGraph& graph,
                                   const Constraint& constraint,
                                   const MeasurementQuery& query);

// Connects each exposed node to its l2-nearest constraint neighbor.
// Exposed nodes are processed in ascending index order; a node already
// protected by an earlier addition is skipped; ties break to the lowest
// index. Output is a protectable supergraph of the input.
PolicyGraph greedy_repair(const PolicyGraph& graph,
                          const Constraint& constraint,
                          const MeasurementQuery& query);

// d=2 exact variant: for each exposed node, evaluates the hull area of the
// graph plus each candidate edge and commits the minimum-area edge
// (degenerate hulls count as area 0). Same ordering and tie rules as
// greedy_repair.
PolicyGraph min_repair_2d(const PolicyGraph& graph,
                          const Constraint& constraint,
                          const MeasurementQuery& query);

}  // namespace dphmm
