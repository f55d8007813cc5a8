#pragma once

#include <stdexcept>
#include <vector>

namespace dphmm {

using Vec = std::vector<double>;

// Measurement query f : states -> R^d, stored as d rows of N answers
// (column j is f(s_j)).
class MeasurementQuery {
 public:
  MeasurementQuery() = default;
  explicit MeasurementQuery(std::vector<std::vector<double>> rows);

  int dim() const { return dim_; }
  int n_states() const { return n_states_; }
  const Vec& answer(int state) const { return columns_[state]; }
  const std::vector<Vec>& columns() const { return columns_; }
  std::vector<std::vector<double>> rows() const;

 private:
  int dim_ = 0;
  int n_states_ = 0;
  std::vector<Vec> columns_;
};

}  // namespace dphmm
