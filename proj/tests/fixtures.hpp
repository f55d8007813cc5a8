// Shared 6-state example used across the test suites: query answers
// f(s1..s6) = (1,0),(2,1),(3,0),(0,1),(4,2),(1,2), categories
// {s1},{s2,s3},{s4,s5,s6}, and an explicit 3-regular random walk whose step
// from s1 reaches exactly {s2,s3,s5}.
#pragma once

#include <vector>

#include "dphmm/geometry.hpp"
#include "dphmm/policy.hpp"

namespace fixtures {

inline dphmm::MeasurementQuery example_query() {
  return dphmm::MeasurementQuery({{1, 2, 3, 0, 4, 1}, {0, 1, 0, 1, 2, 2}});
}

inline std::vector<int> example_categories() { return {0, 1, 1, 2, 2, 2}; }

inline dphmm::PolicyGraph example_graph() {
  return dphmm::build_policy(
      {dphmm::PolicyKind::kCategorical, example_categories(), 0.0}, 6);
}

inline dphmm::MarkovModel example_walk() {
  const double t = 1.0 / 3.0;
  return dphmm::MarkovModel({
      {0, t, t, 0, t, 0},
      {t, 0, t, t, 0, 0},
      {t, t, 0, 0, 0, t},
      {0, t, 0, 0, t, t},
      {t, 0, 0, t, 0, t},
      {0, 0, t, t, t, 0},
  });
}

}  // namespace fixtures
