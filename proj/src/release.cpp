#include "dphmm/release.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace dphmm {

namespace {

Vec answer_diff(const MeasurementQuery& query, int from, int to) {
  const Vec& a = query.answer(from);
  const Vec& b = query.answer(to);
  Vec d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return d;
}

double l2_norm_diff(const Vec& a, const Vec& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

int dop_with_hull(int state, const Polytope& hull, const Constraint& constraint,
                  const MeasurementQuery& query) {
  int count = 1;
  for (int j : constraint) {
    if (j == state) continue;
    if (contains(hull, answer_diff(query, j, state))) ++count;
  }
  return count;
}

}  // namespace

ComposeSummary compose(const PrivacyLedger& ledger) {
  ComposeSummary summary;
  summary.per_timestamp.reserve(ledger.records.size());
  for (const LedgerRecord& record : ledger.records) {
    const double constrained = record.factor * record.epsilon;
    summary.dphmm_total += record.epsilon;
    summary.constrained_total += constrained;
    summary.per_timestamp.push_back(
        {record.timestamp, record.epsilon, constrained});
  }
  return summary;
}

double constrained_dp_factor(const Constraint& constraint,
                             const MeasurementQuery& query,
                             const Polytope& hull) {
  if (constraint.empty()) {
    throw std::invalid_argument("constraint must not be empty");
  }
  double factor = 0.0;
  for (std::size_t a = 0; a < constraint.size(); ++a) {
    for (std::size_t b = a + 1; b < constraint.size(); ++b) {
      factor = std::max(
          factor, k_norm(hull, answer_diff(query, constraint[b], constraint[a])));
    }
  }
  return factor;
}

AuditResult audit_blowfish_database(const std::vector<Vec>& per_secret_diffs,
                                    const Polytope& hull, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  AuditResult result;
  result.epsilon = epsilon;
  result.factors.reserve(per_secret_diffs.size());
  result.levels.reserve(per_secret_diffs.size());
  for (const Vec& diff : per_secret_diffs) {
    const double factor = k_norm(hull, diff);
    result.factors.push_back(factor);
    result.levels.push_back(epsilon * factor);
    result.overall = std::max(result.overall, result.levels.back());
  }
  return result;
}

ReleaseSession::ReleaseSession(MarkovModel model, MeasurementQuery query,
                               PolicyGraph base_graph,
                               MechanismConfig mechanism, RepairKind repair,
                               BeliefState initial_belief,
                               std::uint64_t stream_seed)
    : model_(std::move(model)),
      query_(std::move(query)),
      base_graph_(std::move(base_graph)),
      mechanism_(mechanism),
      repair_(repair),
      belief_(std::move(initial_belief)),
      rng_(stream_seed) {
  if (model_.n_states() != query_.n_states() ||
      model_.n_states() != base_graph_.n_states() ||
      model_.n_states() != static_cast<int>(belief_.probs.size())) {
    throw std::invalid_argument("session components disagree on state count");
  }
  if (!(mechanism_.epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

NoisyAnswer ReleaseSession::step(int true_state) {
  return step(true_state, mechanism_.epsilon);
}

NoisyAnswer ReleaseSession::step(int true_state, double epsilon_t) {
  if (!(epsilon_t > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (true_state < 0 || true_state >= model_.n_states()) {
    throw std::invalid_argument("true state out of range");
  }

  const BeliefState prior = propagate(belief_, model_);
  const Constraint constraint = extract_constraint(prior);
  const int t = prior.timestamp;
  if (!std::binary_search(constraint.begin(), constraint.end(), true_state)) {
    throw ModelInconsistencyError("true state " + std::to_string(true_state) +
                                  " outside the constraint at t=" +
                                  std::to_string(t));
  }
  const Vec& true_answer = query_.answer(true_state);

  LedgerRecord record;
  record.timestamp = t;
  record.epsilon = epsilon_t;

  NoisyAnswer answer;
  BeliefState posterior;

  if (constraint.size() == 1) {
    // The privacy condition is vacuous with one possible state; release the
    // exact answer and flag the step.
    record.singleton = true;
    record.factor = 0.0;
    record.dop_true_state = 1;
    answer.z = true_answer;
    answer.timestamp = t;
    answer.epsilon_spent = epsilon_t;
    answer.exact = true;
    answer.hull_used =
        sensitivity_hull(DifferenceSet{query_.dim(), {}, {}});
    posterior = posterior_update(prior, [](int) { return 1.0; });
  } else {
    const PolicyGraph base = restricted(base_graph_, constraint);
    PolicyGraph repaired = base;
    if (!protection_report(base, constraint, query_).protectable) {
      repaired = repair_ == RepairKind::kGreedy
                     ? greedy_repair(base, constraint, query_)
                     : min_repair_2d(base, constraint, query_);
      for (const Edge& e : repaired.edges()) {
        if (!base.has_edge(e.first, e.second)) {
          record.repaired_edges.push_back(e);
        }
      }
    }
    const Polytope hull = sensitivity_hull(difference_set(repaired, query_));
    record.factor = constrained_dp_factor(constraint, query_, hull);
    record.dop_true_state = dop_with_hull(true_state, hull, constraint, query_);

    if (mechanism_.kind == MechanismKind::kKNorm) {
      answer = knorm_sample(true_answer, hull, epsilon_t, rng_, t);
      posterior = posterior_update(prior, [&](int i) {
        return knorm_density(answer.z, query_.answer(i), hull, epsilon_t);
      });
    } else {
      const double s_f = l1_sensitivity(repaired, query_);
      answer = laplace_sample(true_answer, s_f, epsilon_t, rng_, t);
      posterior = posterior_update(prior, [&](int i) {
        return laplace_density(answer.z, query_.answer(i), s_f, epsilon_t);
      });
    }
  }

  record.z = answer.z;
  record.error_l2 = l2_norm_diff(answer.z, true_answer);
  belief_ = std::move(posterior);
  ledger_.records.push_back(std::move(record));
  return answer;
}

}  // namespace dphmm
