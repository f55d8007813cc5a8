#pragma once

#include <cstdint>

#include "dphmm/geometry.hpp"

namespace dphmm {

enum class MechanismKind { kKNorm, kLaplace };

struct MechanismConfig {
  MechanismKind kind = MechanismKind::kKNorm;
  double epsilon = 1.0;  // budget per release
};

struct NoisyAnswer {
  Vec z;
  int timestamp = 0;
  double epsilon_spent = 0.0;
  // True when the answer was released exactly (zero-dimensional hull or
  // zero sensitivity); no randomness was consumed in that case.
  bool exact = false;
  // Radial draw r of the K-norm sampler (z = true + r*u); 0 when exact or
  // for the Laplace mechanism.
  double radial = 0.0;
  Polytope hull_used;
};

// Max l1 norm of answer differences over the graph's edges; 0 if edgeless.
double l1_sensitivity(const PolicyGraph& graph, const MeasurementQuery& query);

// z = true_answer + r*u with u uniform in the hull and r Gamma-distributed
// with integer shape d'+1 and rate epsilon (d' = intrinsic dimension); the
// output density over the hull's span is knorm_density. A zero-dimensional
// hull releases the exact answer, flagged.
NoisyAnswer knorm_sample(const Vec& true_answer, const Polytope& hull,
                         double epsilon, RandomStream& rng, int timestamp = 0);

// exp(-eps * |z - true|_K) / (Gamma(d'+1) * measure(K) / eps^d'), with the
// intrinsic measure of the hull; 0 off-span. A zero-dimensional hull is an
// atom: 1 at the true answer, 0 elsewhere.
double knorm_density(const Vec& z, const Vec& true_answer,
                     const Polytope& hull, double epsilon);

// Adds d independent standard double-exponential draws scaled by
// s_f / epsilon. s_f = 0 releases the exact answer, flagged.
NoisyAnswer laplace_sample(const Vec& true_answer, double s_f, double epsilon,
                           RandomStream& rng, int timestamp = 0);

// (eps / (2 s_f))^d * exp(-(eps / s_f) * |z - true|_1). s_f = 0 is treated
// as an atom, matching the exact-release convention above.
double laplace_density(const Vec& z, const Vec& true_answer, double s_f,
                       double epsilon);

}  // namespace dphmm
