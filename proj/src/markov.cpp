#include "dphmm/markov.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace dphmm {

namespace {

void check_distribution(const std::vector<double>& probs) {
  if (probs.empty()) throw InvalidBeliefError("belief vector is empty");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || p > 1.0 + kSumTolerance) {
      throw InvalidBeliefError("belief entry outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InvalidBeliefError("belief sums to " + std::to_string(sum) +
                             ", expected 1");
  }
}

void renormalize(std::vector<double>& probs) {
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (!(sum > 0.0)) throw InvalidBeliefError("belief has no mass left");
  for (double& p : probs) p /= sum;
}

}  // namespace

MarkovModel::MarkovModel(std::vector<std::vector<double>> transition)
    : rows_(std::move(transition)) {
  const std::size_t n = rows_.size();
  if (n == 0) throw std::invalid_argument("transition matrix is empty");
  for (const auto& row : rows_) {
    if (row.size() != n) {
      throw std::invalid_argument("transition matrix is not square");
    }
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0) || p > 1.0 + kSumTolerance) {
        throw std::invalid_argument("transition entry outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw std::invalid_argument("transition row sums to " +
                                  std::to_string(sum) + ", expected 1");
    }
  }
}

BeliefState propagate(const BeliefState& belief, const MarkovModel& model) {
  const int n = model.n_states();
  if (static_cast<int>(belief.probs.size()) != n) {
    throw std::invalid_argument("belief length does not match the model");
  }
  check_distribution(belief.probs);

  std::vector<double> next(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double p = belief.probs[i];
    if (p == 0.0) continue;
    const auto& row = model.transition()[i];
    for (int j = 0; j < n; ++j) next[j] += p * row[j];
  }
  renormalize(next);
  return {std::move(next), BeliefKind::kPrior, belief.timestamp + 1};
}

Constraint extract_constraint(const BeliefState& prior) {
  check_distribution(prior.probs);
  Constraint constraint;
  for (int i = 0; i < static_cast<int>(prior.probs.size()); ++i) {
    if (prior.probs[i] > 0.0) constraint.push_back(i);
  }
  if (constraint.empty()) {
    throw InvalidBeliefError("belief has no positive-probability state");
  }
  return constraint;
}

BeliefState posterior_update(const BeliefState& prior,
                             const std::function<double(int)>& likelihood) {
  const Constraint constraint = extract_constraint(prior);
  std::vector<double> post(prior.probs.size(), 0.0);
  double sum = 0.0;
  for (int i : constraint) {
    const double l = likelihood(i);
    if (!(l >= 0.0)) {
      throw std::invalid_argument("likelihood must be nonnegative and finite");
    }
    post[i] = l * prior.probs[i];
    sum += post[i];
  }
  if (!(sum > 0.0)) {
    throw ImpossibleObservationError(
        "every constraint state has zero likelihood");
  }
  for (double& p : post) p /= sum;
  return {std::move(post), BeliefKind::kPosterior, prior.timestamp};
}

MarkovModel learn_model(const std::vector<std::vector<int>>& trajectories,
                        int n_states, double smoothing) {
  if (trajectories.empty()) {
    throw std::invalid_argument("no trajectories to learn from");
  }
  if (n_states <= 0) throw std::invalid_argument("n_states must be positive");
  if (smoothing < 0.0) throw std::invalid_argument("smoothing must be >= 0");

  std::vector<std::vector<double>> counts(
      n_states, std::vector<double>(n_states, 0.0));
  for (const auto& trajectory : trajectories) {
    if (trajectory.size() < 2) {
      throw std::invalid_argument("trajectories need at least two steps");
    }
    for (std::size_t k = 0; k + 1 < trajectory.size(); ++k) {
      const int a = trajectory[k];
      const int b = trajectory[k + 1];
      if (a < 0 || a >= n_states || b < 0 || b >= n_states) {
        throw std::invalid_argument("trajectory state out of range");
      }
      counts[a][b] += 1.0;
    }
  }

  for (int i = 0; i < n_states; ++i) {
    double total = 0.0;
    for (int j = 0; j < n_states; ++j) total += counts[i][j] + smoothing;
    if (total == 0.0) {
      counts[i][i] = 1.0;  // unobserved state, no smoothing: self-loop
      continue;
    }
    for (int j = 0; j < n_states; ++j) {
      counts[i][j] = (counts[i][j] + smoothing) / total;
    }
  }
  return MarkovModel(std::move(counts));
}

}  // namespace dphmm
