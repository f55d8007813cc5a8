#pragma once

#include <set>
#include <utility>
#include <vector>

#include "dphmm/markov.hpp"
#include "dphmm/query.hpp"

namespace dphmm {

// Undirected edge in canonical (min, max) order.
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

// Undirected indistinguishability graph over state indices. No self-loops;
// edges are kept in canonical order so iteration is deterministic.
class PolicyGraph {
 public:
  PolicyGraph() = default;
  explicit PolicyGraph(int n_states) : n_(n_states) {}
  PolicyGraph(int n_states, const std::vector<Edge>& edges);

  int n_states() const { return n_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_edge(int a, int b) const {
    return edges_.count(make_edge(a, b)) > 0;
  }
  void add_edge(int a, int b);

 private:
  int n_ = 0;
  std::set<Edge> edges_;
};

enum class PolicyKind { kComplete, kCategorical, kUtility, kTransition };

struct GraphSpec {
  PolicyKind kind = PolicyKind::kComplete;
  std::vector<int> categories;  // per-state category id (categorical only)
  double radius = 0.0;          // answer-space distance bound (utility only)
};

// The four graph families: complete; per-category cliques; answers within
// l2 distance radius; pairs sharing a positive-probability predecessor.
PolicyGraph build_policy(const GraphSpec& spec, int n_states,
                         const MeasurementQuery* query = nullptr,
                         const MarkovModel* model = nullptr);

// Subgraph with exactly the edges whose endpoints both lie in the
// constraint. States keep their original indices.
PolicyGraph restricted(const PolicyGraph& graph, const Constraint& constraint);

}  // namespace dphmm
