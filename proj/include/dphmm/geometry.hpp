#pragma once

#include <vector>

#include "dphmm/errors.hpp"
#include "dphmm/policy.hpp"
#include "dphmm/query.hpp"
#include "dphmm/rng.hpp"

namespace dphmm {

// Where a difference column came from: +1 means f(s_first) - f(s_second) of
// the canonical edge, -1 its negation.
struct DiffProvenance {
  Edge edge;
  int sign = 1;
};

// Signed answer differences over the edges of a policy graph. Closed under
// negation; two columns per edge, in canonical edge order.
struct DifferenceSet {
  int dim = 0;
  std::vector<Vec> columns;
  std::vector<DiffProvenance> provenance;
};

// Centrally symmetric convex hull of a difference set, kept in ambient
// coordinates. vertices is counterclockwise for intrinsic_dim 2, {w, -w}
// for a segment, {0} for a point. For full-dimensional bodies with d > 2
// only generators and intrinsic_dim are meaningful.
struct Polytope {
  int dim = 0;
  int intrinsic_dim = 0;
  std::vector<Vec> vertices;
  std::vector<Vec> generators;  // deduplicated input points
};

DifferenceSet difference_set(const PolicyGraph& graph,
                             const MeasurementQuery& query);

// Convex hull of the difference columns. Empty input yields the single
// point {0}. d=2 uses a monotone chain with exact cross-product signs;
// collinear boundary points are dropped.
Polytope sensitivity_hull(const DifferenceSet& diffs);
Polytope hull_of_points(const std::vector<Vec>& points, int dim);

// Minkowski functional: inf{r > 0 : v in rK}. +infinity off the span of K,
// 0 only at v = 0.
double k_norm(const Polytope& polytope, const Vec& v);

// Hull membership, boundary inclusive. d=2 by half-plane tests against the
// hull; general d by the constrained least-squares program (nonnegative
// combination summing to one) with residual tolerance 1e-9 * (1 + |v|).
bool contains(const DifferenceSet& diffs, const Vec& v);
bool contains(const Polytope& polytope, const Vec& v);

// Intrinsic measure: shoelace area for intrinsic_dim 2 (requires d = 2),
// length for segments, 0 for a point.
double hull_measure(const Polytope& polytope);

// Uniform sample: one draw for segments; centroid-fan triangulation with an
// area-weighted triangle pick for 2D polygons (three draws). The draw count
// depends only on the hull's intrinsic dimension, never on epsilon.
Vec sample_uniform(const Polytope& polytope, RandomStream& rng);

// The l1 ball of the given radius: vertices ±radius * e_i.
Polytope cross_polytope(double radius, int dim);

}  // namespace dphmm
