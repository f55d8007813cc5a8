#include "dphmm/policy.hpp"

#include <cmath>

namespace dphmm {

MeasurementQuery::MeasurementQuery(std::vector<std::vector<double>> rows) {
  if (rows.empty()) throw std::invalid_argument("query has no rows");
  dim_ = static_cast<int>(rows.size());
  n_states_ = static_cast<int>(rows[0].size());
  if (n_states_ == 0) throw std::invalid_argument("query has no states");
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n_states_) {
      throw std::invalid_argument("query rows have unequal lengths");
    }
    for (double x : row) {
      if (!std::isfinite(x)) {
        throw std::invalid_argument("query entries must be finite");
      }
    }
  }
  columns_.assign(n_states_, Vec(dim_));
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < n_states_; ++c) columns_[c][r] = rows[r][c];
  }
}

std::vector<std::vector<double>> MeasurementQuery::rows() const {
  std::vector<std::vector<double>> out(dim_, std::vector<double>(n_states_));
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < n_states_; ++c) out[r][c] = columns_[c][r];
  }
  return out;
}

PolicyGraph::PolicyGraph(int n_states, const std::vector<Edge>& edges)
    : n_(n_states) {
  for (const Edge& e : edges) add_edge(e.first, e.second);
}

void PolicyGraph::add_edge(int a, int b) {
  if (a == b) throw std::invalid_argument("policy graphs have no self-loops");
  if (a < 0 || b < 0 || a >= n_ || b >= n_) {
    throw std::invalid_argument("edge endpoint out of range");
  }
  edges_.insert(make_edge(a, b));
}

namespace {

double l2_distance(const Vec& a, const Vec& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

PolicyGraph build_policy(const GraphSpec& spec, int n_states,
                         const MeasurementQuery* query,
                         const MarkovModel* model) {
  if (n_states <= 0) throw std::invalid_argument("n_states must be positive");
  PolicyGraph graph(n_states);

  switch (spec.kind) {
    case PolicyKind::kComplete:
      for (int i = 0; i < n_states; ++i) {
        for (int j = i + 1; j < n_states; ++j) graph.add_edge(i, j);
      }
      break;

    case PolicyKind::kCategorical:
      if (static_cast<int>(spec.categories.size()) != n_states) {
        throw std::invalid_argument(
            "categorical policy needs one category per state");
      }
      for (int i = 0; i < n_states; ++i) {
        for (int j = i + 1; j < n_states; ++j) {
          if (spec.categories[i] == spec.categories[j]) graph.add_edge(i, j);
        }
      }
      break;

    case PolicyKind::kUtility:
      if (query == nullptr) {
        throw std::invalid_argument("utility policy needs the query");
      }
      if (query->n_states() != n_states) {
        throw std::invalid_argument("query does not match the state space");
      }
      if (!(spec.radius > 0.0)) {
        throw std::invalid_argument("utility radius must be positive");
      }
      for (int i = 0; i < n_states; ++i) {
        for (int j = i + 1; j < n_states; ++j) {
          if (l2_distance(query->answer(i), query->answer(j)) <= spec.radius) {
            graph.add_edge(i, j);
          }
        }
      }
      break;

    case PolicyKind::kTransition:
      if (model == nullptr) {
        throw std::invalid_argument("transition policy needs the model");
      }
      if (model->n_states() != n_states) {
        throw std::invalid_argument("model does not match the state space");
      }
      for (int i = 0; i < n_states; ++i) {
        const auto& row = model->transition()[i];
        for (int j = 0; j < n_states; ++j) {
          if (row[j] <= kZeroThreshold) continue;
          for (int k = j + 1; k < n_states; ++k) {
            if (row[k] > kZeroThreshold) graph.add_edge(j, k);
          }
        }
      }
      break;
  }
  return graph;
}

PolicyGraph restricted(const PolicyGraph& graph, const Constraint& constraint) {
  std::vector<char> member(graph.n_states(), 0);
  for (int s : constraint) {
    if (s < 0 || s >= graph.n_states()) {
      throw std::invalid_argument("constraint state out of range");
    }
    member[s] = 1;
  }
  PolicyGraph out(graph.n_states());
  for (const Edge& e : graph.edges()) {
    if (member[e.first] && member[e.second]) out.add_edge(e.first, e.second);
  }
  return out;
}

}  // namespace dphmm
