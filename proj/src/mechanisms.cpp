#include "dphmm/mechanisms.hpp"

#include <cmath>

namespace dphmm {

namespace {

double l1_norm_diff(const Vec& a, const Vec& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return sum;
}

bool exactly_equal(const Vec& a, const Vec& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) return false;
  }
  return true;
}

}  // namespace

double l1_sensitivity(const PolicyGraph& graph,
                      const MeasurementQuery& query) {
  if (graph.n_states() != query.n_states()) {
    throw std::invalid_argument("graph and query state spaces differ");
  }
  double best = 0.0;
  for (const Edge& e : graph.edges()) {
    best = std::max(best,
                    l1_norm_diff(query.answer(e.first), query.answer(e.second)));
  }
  return best;
}

NoisyAnswer knorm_sample(const Vec& true_answer, const Polytope& hull,
                         double epsilon, RandomStream& rng, int timestamp) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (static_cast<int>(true_answer.size()) != hull.dim) {
    throw std::invalid_argument("answer dimension does not match the hull");
  }
  NoisyAnswer answer;
  answer.timestamp = timestamp;
  answer.epsilon_spent = epsilon;
  answer.hull_used = hull;
  if (hull.intrinsic_dim == 0) {
    answer.z = true_answer;
    answer.exact = true;
    return answer;
  }
  // Direction first, radius second; the draw count depends only on the
  // hull's shape, so seed-paired epsilon sweeps stay aligned.
  const Vec u = sample_uniform(hull, rng);
  const double r = rng.gamma_integer(hull.intrinsic_dim + 1, epsilon);
  answer.radial = r;
  answer.z = true_answer;
  for (std::size_t k = 0; k < answer.z.size(); ++k) answer.z[k] += r * u[k];
  return answer;
}

double knorm_density(const Vec& z, const Vec& true_answer,
                     const Polytope& hull, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (hull.intrinsic_dim == 0) {
    return exactly_equal(z, true_answer) ? 1.0 : 0.0;  // exact-release atom
  }
  Vec v(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) v[k] = z[k] - true_answer[k];
  const double norm = k_norm(hull, v);
  if (!std::isfinite(norm)) return 0.0;
  const int d = hull.intrinsic_dim;
  const double normalizer = std::tgamma(d + 1.0) * hull_measure(hull) /
                            std::pow(epsilon, d);
  return std::exp(-epsilon * norm) / normalizer;
}

NoisyAnswer laplace_sample(const Vec& true_answer, double s_f, double epsilon,
                           RandomStream& rng, int timestamp) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (s_f < 0.0) throw std::invalid_argument("sensitivity must be >= 0");
  NoisyAnswer answer;
  answer.timestamp = timestamp;
  answer.epsilon_spent = epsilon;
  answer.z = true_answer;
  if (s_f == 0.0) {
    answer.exact = true;
    return answer;
  }
  const double scale = s_f / epsilon;
  for (double& zk : answer.z) zk += scale * rng.laplace_unit();
  return answer;
}

double laplace_density(const Vec& z, const Vec& true_answer, double s_f,
                       double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (s_f < 0.0) throw std::invalid_argument("sensitivity must be >= 0");
  if (s_f == 0.0) {
    return exactly_equal(z, true_answer) ? 1.0 : 0.0;  // exact-release atom
  }
  const int d = static_cast<int>(z.size());
  return std::pow(epsilon / (2.0 * s_f), d) *
         std::exp(-(epsilon / s_f) * l1_norm_diff(z, true_answer));
}

}  // namespace dphmm
