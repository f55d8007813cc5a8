#include "dphmm/protection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dphmm {

namespace {

bool in_constraint(int state, const Constraint& constraint) {
  return std::binary_search(constraint.begin(), constraint.end(), state);
}

Vec answer_diff(const MeasurementQuery& query, int from, int to) {
  const Vec& a = query.answer(from);
  const Vec& b = query.answer(to);
  Vec d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return d;
}

int dop_against_hull(int state, const Polytope& hull,
                     const Constraint& constraint,
                     const MeasurementQuery& query) {
  int count = 1;
  for (int j : constraint) {
    if (j == state) continue;
    if (contains(hull, answer_diff(query, j, state))) ++count;
  }
  return count;
}

double squared_l2(const Vec& a, const Vec& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return sum;
}

// Hull area with degenerate hulls counting as zero: the repair objective is
// the ambient 2D volume, and a segment confines noise to a line.
double repair_area(const std::vector<Vec>& columns) {
  const Polytope hull = hull_of_points(columns, 2);
  return hull.intrinsic_dim == 2 ? hull_measure(hull) : 0.0;
}

}  // namespace

int degree_of_protection(int state, const DifferenceSet& diffs,
                         const Constraint& constraint,
                         const MeasurementQuery& query) {
  if (!in_constraint(state, constraint)) {
    throw std::invalid_argument("state is not in the constraint");
  }
  return dop_against_hull(state, sensitivity_hull(diffs), constraint, query);
}

ProtectionReport protection_report(const PolicyGraph& graph,
                                   const Constraint& constraint,
                                   const MeasurementQuery& query) {
  const Polytope hull = sensitivity_hull(difference_set(graph, query));
  ProtectionReport report;
  report.constraint = constraint;
  report.dop.reserve(constraint.size());
  for (int s : constraint) {
    const int dop = dop_against_hull(s, hull, constraint, query);
    report.dop.push_back(dop);
    if (dop == 1) report.exposed.push_back(s);
  }
  report.protectable = report.exposed.empty();
  return report;
}

PolicyGraph greedy_repair(const PolicyGraph& graph,
                          const Constraint& constraint,
                          const MeasurementQuery& query) {
  if (constraint.size() < 2) {
    throw CannotProtectError("no candidate neighbor in a singleton constraint");
  }
  PolicyGraph out = graph;
  const std::vector<int> exposed =
      protection_report(out, constraint, query).exposed;

  for (int s : exposed) {
    const Polytope hull = sensitivity_hull(difference_set(out, query));
    if (dop_against_hull(s, hull, constraint, query) > 1) continue;

    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int j : constraint) {
      if (j == s || out.has_edge(s, j)) continue;
      const double dist = squared_l2(query.answer(j), query.answer(s));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best < 0) {
      throw CannotProtectError("exposed state has no candidate edge left");
    }
    out.add_edge(s, best);
  }
  return out;
}

PolicyGraph min_repair_2d(const PolicyGraph& graph,
                          const Constraint& constraint,
                          const MeasurementQuery& query) {
  if (query.dim() != 2) {
    throw UnsupportedDimensionError("minimum-area repair is 2D only");
  }
  if (constraint.size() < 2) {
    throw CannotProtectError("no candidate neighbor in a singleton constraint");
  }
  PolicyGraph out = graph;
  const std::vector<int> exposed =
      protection_report(out, constraint, query).exposed;

  for (int s : exposed) {
    DifferenceSet diffs = difference_set(out, query);
    if (dop_against_hull(s, sensitivity_hull(diffs), constraint, query) > 1) {
      continue;
    }

    int best = -1;
    double best_area = std::numeric_limits<double>::infinity();
    std::vector<Vec> candidate_columns = diffs.columns;
    for (int j : constraint) {
      if (j == s || out.has_edge(s, j)) continue;
      const Edge e = make_edge(s, j);
      candidate_columns.push_back(answer_diff(query, e.first, e.second));
      candidate_columns.push_back(answer_diff(query, e.second, e.first));
      const double area = repair_area(candidate_columns);
      candidate_columns.resize(candidate_columns.size() - 2);
      if (area < best_area) {
        best_area = area;
        best = j;
      }
    }
    if (best < 0) {
      throw CannotProtectError("exposed state has no candidate edge left");
    }
    out.add_edge(s, best);
  }
  return out;
}

}  // namespace dphmm
