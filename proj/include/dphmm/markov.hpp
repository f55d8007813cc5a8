#pragma once

#include <functional>
#include <vector>

#include "dphmm/errors.hpp"

namespace dphmm {

// Transition entries at or below this count as zero when reachability is
// read off a model row (positive-transition policy graphs).
inline constexpr double kZeroThreshold = 1e-12;

// Absolute tolerance for "sums to one" checks.
inline constexpr double kSumTolerance = 1e-9;

enum class BeliefKind { kPrior, kPosterior };

struct BeliefState {
  std::vector<double> probs;
  BeliefKind kind = BeliefKind::kPosterior;
  int timestamp = 0;
};

// Sorted state indices with positive probability.
using Constraint = std::vector<int>;

class MarkovModel {
 public:
  MarkovModel() = default;
  // Validates: square matrix, entries in [0,1], rows sum to 1 within 1e-9.
  explicit MarkovModel(std::vector<std::vector<double>> transition);

  int n_states() const { return static_cast<int>(rows_.size()); }
  const std::vector<std::vector<double>>& transition() const { return rows_; }
  double at(int i, int j) const { return rows_[i][j]; }

 private:
  std::vector<std::vector<double>> rows_;
};

// One Markov transition: prior at t+1 = belief row-vector times the matrix,
// renormalized. The result is marked as a prior.
BeliefState propagate(const BeliefState& belief, const MarkovModel& model);

// States with strictly positive probability. Belief arithmetic is
// subtraction-free, so exact zeros are structural rather than float dust.
Constraint extract_constraint(const BeliefState& prior);

// Bayes update: posterior[i] proportional to likelihood(i) * prior[i] for
// states inside the prior's constraint, zero outside, renormalized.
BeliefState posterior_update(const BeliefState& prior,
                             const std::function<double(int)>& likelihood);

// Transition counts with additive smoothing. Rows that were never observed
// and get zero smoothing become self-loops.
MarkovModel learn_model(const std::vector<std::vector<int>>& trajectories,
                        int n_states, double smoothing);

}  // namespace dphmm
