#include "dphmm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dphmm {

namespace {

constexpr double kGeomTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const Vec& a, const Vec& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Vec& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

Vec axpy(const Vec& a, double t, const Vec& b) {  // a + t*b
  Vec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + t * b[k];
  return out;
}

// Cross product sign of (a - o) x (b - o). Exact for integer-valued
// coordinates up to ~2^26.
double cross2(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<Vec> dedupe(std::vector<Vec> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

double coordinate_scale(const std::vector<Vec>& points) {
  double scale = 0.0;
  for (const Vec& p : points) scale = std::max(scale, max_abs(p));
  return scale;
}

// Rank of the linear span, by Gram-Schmidt with largest-residual pivoting.
int span_rank(const std::vector<Vec>& points, int dim) {
  const double scale = coordinate_scale(points);
  if (scale == 0.0) return 0;
  std::vector<Vec> basis;
  std::vector<Vec> residuals = points;
  while (static_cast<int>(basis.size()) < dim) {
    double best = 0.0;
    std::size_t best_i = residuals.size();
    for (std::size_t i = 0; i < residuals.size(); ++i) {
      const double m = norm2(residuals[i]);
      if (m > best) {
        best = m;
        best_i = i;
      }
    }
    if (best <= kGeomTol * scale) break;
    Vec b = residuals[best_i];
    for (double& x : b) x /= best;
    for (Vec& r : residuals) r = axpy(r, -dot(r, b), b);
    basis.push_back(std::move(b));
  }
  return static_cast<int>(basis.size());
}

// The extreme point of a rank-1 set: largest norm, ties to the
// lexicographically greater point so the choice is deterministic.
Vec segment_endpoint(const std::vector<Vec>& points) {
  const Vec* best = &points[0];
  double best_n = dot(points[0], points[0]);
  for (const Vec& p : points) {
    const double n = dot(p, p);
    if (n > best_n || (n == best_n && p > *best)) {
      best_n = n;
      best = &p;
    }
  }
  return *best;
}

// Andrew's monotone chain; counterclockwise output, collinear boundary
// points removed. Expects at least three points of full 2D rank.
std::vector<Vec> monotone_chain(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end());
  const std::size_t n = pts.size();
  std::vector<Vec> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point equals the first
  return hull;
}

// Lawson-Hanson nonnegative least squares for min |Bx - w|, x >= 0, with B
// given by columns. Returns the final residual norm. Solving the membership
// program of the containment test: v is in conv(columns) iff the
// homogenized system reaches residual ~0.
double nnls_residual(const std::vector<Vec>& columns, const Vec& w,
                     int max_iterations) {
  const int rows = static_cast<int>(w.size());
  const int m = static_cast<int>(columns.size());
  std::vector<double> x(m, 0.0);
  std::vector<char> passive(m, 0);
  std::vector<int> pset;
  Vec residual = w;

  const double scale = std::max(1.0, max_abs(w));
  const double grad_tol = 1e-13 * std::max(1.0, coordinate_scale(columns)) *
                          scale * std::max(1, rows);

  auto solve_passive = [&](std::vector<double>& z) {
    // Normal equations on the passive set; tiny pivots mean a dependent
    // column, whose coefficient is pinned to zero.
    const int p = static_cast<int>(pset.size());
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) {
        a[r][c] = dot(columns[pset[r]], columns[pset[c]]);
      }
      a[r][p] = dot(columns[pset[r]], w);
    }
    std::vector<int> order(p);
    for (int r = 0; r < p; ++r) order[r] = r;
    for (int col = 0; col < p; ++col) {
      int pivot = col;
      for (int r = col + 1; r < p; ++r) {
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      }
      std::swap(a[col], a[pivot]);
      if (std::abs(a[col][col]) < 1e-14 * std::max(1.0, std::abs(a[0][0]))) {
        a[col][col] = 0.0;
        continue;
      }
      for (int r = col + 1; r < p; ++r) {
        const double f = a[r][col] / a[col][col];
        for (int c = col; c <= p; ++c) a[r][c] -= f * a[col][c];
      }
    }
    z.assign(p, 0.0);
    for (int col = p - 1; col >= 0; --col) {
      if (a[col][col] == 0.0) {
        z[col] = 0.0;
        continue;
      }
      double s = a[col][p];
      for (int c = col + 1; c < p; ++c) s -= a[col][c] * z[c];
      z[col] = s / a[col][col];
    }
  };

  auto recompute_residual = [&]() {
    residual = w;
    for (int j : pset) {
      if (x[j] != 0.0) residual = axpy(residual, -x[j], columns[j]);
    }
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    int best_j = -1;
    double best_g = grad_tol;
    for (int j = 0; j < m; ++j) {
      if (passive[j]) continue;
      const double g = dot(columns[j], residual);
      if (g > best_g) {
        best_g = g;
        best_j = j;
      }
    }
    if (best_j < 0) break;
    passive[best_j] = 1;
    pset.push_back(best_j);

    std::vector<double> z;
    for (int inner = 0; inner < max_iterations; ++inner) {
      solve_passive(z);
      bool all_positive = true;
      for (double zi : z) {
        if (zi <= 0.0) {
          all_positive = false;
          break;
        }
      }
      if (all_positive) break;
      double alpha = 1.0;
      for (std::size_t k = 0; k < pset.size(); ++k) {
        if (z[k] <= 0.0) {
          const double xk = x[pset[k]];
          if (xk - z[k] > 0.0) alpha = std::min(alpha, xk / (xk - z[k]));
        }
      }
      for (std::size_t k = 0; k < pset.size(); ++k) {
        x[pset[k]] += alpha * (z[k] - x[pset[k]]);
      }
      std::vector<int> kept;
      for (int j : pset) {
        if (x[j] <= 1e-14) {
          x[j] = 0.0;
          passive[j] = 0;
        } else {
          kept.push_back(j);
        }
      }
      pset = std::move(kept);
      if (pset.empty()) break;
    }
    for (std::size_t k = 0; k < pset.size(); ++k) x[pset[k]] = z[k];
    recompute_residual();
  }
  return norm2(residual);
}

// Membership in conv(points) for general dimension: fold the sum-to-one
// constraint of the least-squares program into a homogeneous coordinate and
// solve the cone problem with NNLS.
bool contains_general(const std::vector<Vec>& points, const Vec& v) {
  std::vector<Vec> columns;
  columns.reserve(points.size());
  for (const Vec& p : points) {
    Vec c = p;
    c.push_back(1.0);
    columns.push_back(std::move(c));
  }
  Vec w = v;
  w.push_back(1.0);
  const double residual = nnls_residual(columns, w, 100000);
  return residual <= kGeomTol * (1.0 + norm2(v));
}

bool is_zero(const Vec& v) { return max_abs(v) == 0.0; }

Polytope point_polytope(int dim, std::vector<Vec> generators) {
  Polytope p;
  p.dim = dim;
  p.intrinsic_dim = 0;
  p.vertices = {Vec(dim, 0.0)};
  if (generators.empty()) generators = {Vec(dim, 0.0)};
  p.generators = std::move(generators);
  return p;
}

}  // namespace

DifferenceSet difference_set(const PolicyGraph& graph,
                             const MeasurementQuery& query) {
  if (graph.n_states() != query.n_states()) {
    throw std::invalid_argument("graph and query state spaces differ");
  }
  DifferenceSet diffs;
  diffs.dim = query.dim();
  for (const Edge& e : graph.edges()) {
    const Vec& fa = query.answer(e.first);
    const Vec& fb = query.answer(e.second);
    Vec forward(diffs.dim), backward(diffs.dim);
    for (int k = 0; k < diffs.dim; ++k) {
      forward[k] = fa[k] - fb[k];
      backward[k] = fb[k] - fa[k];
    }
    diffs.columns.push_back(std::move(forward));
    diffs.provenance.push_back({e, +1});
    diffs.columns.push_back(std::move(backward));
    diffs.provenance.push_back({e, -1});
  }
  return diffs;
}

Polytope hull_of_points(const std::vector<Vec>& points, int dim) {
  for (const Vec& p : points) {
    if (static_cast<int>(p.size()) != dim) {
      throw std::invalid_argument("point dimension mismatch");
    }
  }
  std::vector<Vec> pts = dedupe(points);
  if (pts.empty() || (pts.size() == 1 && is_zero(pts[0]))) {
    return point_polytope(dim, std::move(pts));
  }

  const int rank = span_rank(pts, dim);
  Polytope hull;
  hull.dim = dim;
  hull.generators = pts;
  hull.intrinsic_dim = rank;

  if (rank == 0) return point_polytope(dim, std::move(pts));
  if (rank == 1) {
    const Vec w = segment_endpoint(pts);
    Vec neg(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) neg[k] = -w[k];
    hull.vertices = {w, neg};
    return hull;
  }
  if (dim == 2) {
    hull.vertices = monotone_chain(pts);
    return hull;
  }
  // d > 2: keep the extreme generators, unordered. Volume and sampling are
  // not offered here, only membership and norms.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<Vec> others;
    others.reserve(pts.size() - 1);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) others.push_back(pts[j]);
    }
    if (!contains_general(others, pts[i])) hull.vertices.push_back(pts[i]);
  }
  return hull;
}

Polytope sensitivity_hull(const DifferenceSet& diffs) {
  return hull_of_points(diffs.columns, diffs.dim);
}

double k_norm(const Polytope& polytope, const Vec& v) {
  if (static_cast<int>(v.size()) != polytope.dim) {
    throw std::invalid_argument("vector dimension mismatch");
  }
  if (is_zero(v)) return 0.0;

  switch (polytope.intrinsic_dim) {
    case 0:
      return kInf;
    case 1: {
      const Vec& w = polytope.vertices[0];
      const double t = dot(v, w) / dot(w, w);
      const Vec off = axpy(v, -t, w);
      if (norm2(off) > kGeomTol * (1.0 + norm2(v))) return kInf;
      return std::abs(t);
    }
    default:
      break;
  }

  if (polytope.dim == 2) {
    // Each hull edge P->Q (counterclockwise) gives a half-plane
    // n.x <= c with c > 0; the Minkowski functional is max n.v / c.
    const auto& vs = polytope.vertices;
    double best = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Vec& p = vs[i];
      const Vec& q = vs[(i + 1) % vs.size()];
      const double nx = q[1] - p[1];
      const double ny = p[0] - q[0];
      const double c = nx * p[0] + ny * p[1];
      best = std::max(best, (nx * v[0] + ny * v[1]) / c);
    }
    return best;
  }

  // General dimension: bracket and bisect on membership of v/t.
  const auto member = [&](double t) {
    Vec scaled(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) scaled[k] = v[k] / t;
    return contains_general(polytope.generators, scaled);
  };
  double hi = 1.0;
  int doublings = 0;
  while (!member(hi)) {
    hi *= 2.0;
    if (++doublings > 64) return kInf;  // off-span or unboundedly far
  }
  double lo = hi * 0.5;
  if (doublings == 0) lo = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (member(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool contains(const Polytope& polytope, const Vec& v) {
  if (static_cast<int>(v.size()) != polytope.dim) {
    throw std::invalid_argument("vector dimension mismatch");
  }
  if (is_zero(v)) return true;  // the hull always contains the origin

  switch (polytope.intrinsic_dim) {
    case 0:
      return false;
    case 1: {
      const Vec& w = polytope.vertices[0];
      const double t = dot(v, w) / dot(w, w);
      const Vec off = axpy(v, -t, w);
      if (norm2(off) > kGeomTol * (1.0 + norm2(v))) return false;
      return std::abs(t) <= 1.0 + kGeomTol;
    }
    default:
      break;
  }

  if (polytope.dim == 2) {
    const auto& vs = polytope.vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Vec& p = vs[i];
      const Vec& q = vs[(i + 1) % vs.size()];
      const double nx = q[1] - p[1];
      const double ny = p[0] - q[0];
      const double c = nx * p[0] + ny * p[1];
      if (nx * v[0] + ny * v[1] > c + kGeomTol * std::max(1.0, c)) {
        return false;
      }
    }
    return true;
  }
  return contains_general(polytope.generators, v);
}

bool contains(const DifferenceSet& diffs, const Vec& v) {
  if (static_cast<int>(v.size()) != diffs.dim) {
    throw std::invalid_argument("vector dimension mismatch");
  }
  if (diffs.columns.empty()) return is_zero(v);
  if (diffs.dim == 2 || span_rank(diffs.columns, diffs.dim) <= 1) {
    return contains(sensitivity_hull(diffs), v);
  }
  return contains_general(diffs.columns, v);
}

double hull_measure(const Polytope& polytope) {
  switch (polytope.intrinsic_dim) {
    case 0:
      return 0.0;
    case 1:
      return 2.0 * norm2(polytope.vertices[0]);
    case 2:
      if (polytope.dim == 2) {
        const auto& vs = polytope.vertices;
        double twice_area = 0.0;
        for (std::size_t i = 0; i < vs.size(); ++i) {
          const Vec& p = vs[i];
          const Vec& q = vs[(i + 1) % vs.size()];
          twice_area += p[0] * q[1] - p[1] * q[0];
        }
        return 0.5 * std::abs(twice_area);
      }
      [[fallthrough]];
    default:
      throw UnsupportedDimensionError(
          "measure is defined for 2D bodies and degenerate hulls only");
  }
}

Vec sample_uniform(const Polytope& polytope, RandomStream& rng) {
  switch (polytope.intrinsic_dim) {
    case 0:
      return Vec(polytope.dim, 0.0);
    case 1: {
      const Vec& w = polytope.vertices[0];
      const double t = 2.0 * rng.uniform() - 1.0;
      Vec out(w.size());
      for (std::size_t k = 0; k < w.size(); ++k) out[k] = t * w[k];
      return out;
    }
    case 2: {
      if (polytope.dim != 2) break;
      // Fan triangulation around the center (the origin, by symmetry).
      const auto& vs = polytope.vertices;
      const std::size_t n = vs.size();
      std::vector<double> cumulative(n);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec& p = vs[i];
        const Vec& q = vs[(i + 1) % n];
        total += 0.5 * std::abs(p[0] * q[1] - p[1] * q[0]);
        cumulative[i] = total;
      }
      const double pick = rng.uniform() * total;
      std::size_t tri = 0;
      while (tri + 1 < n && cumulative[tri] <= pick) ++tri;
      const Vec& b = vs[tri];
      const Vec& c = vs[(tri + 1) % n];
      const double su = std::sqrt(rng.uniform());
      const double tv = rng.uniform();
      return {su * ((1.0 - tv) * b[0] + tv * c[0]),
              su * ((1.0 - tv) * b[1] + tv * c[1])};
    }
    default:
      break;
  }
  throw UnsupportedDimensionError(
      "uniform sampling is defined for segments and 2D polygons");
}

Polytope cross_polytope(double radius, int dim) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  std::vector<Vec> points;
  points.reserve(2 * dim);
  for (int k = 0; k < dim; ++k) {
    Vec plus(dim, 0.0), minus(dim, 0.0);
    plus[k] = radius;
    minus[k] = -radius;
    points.push_back(std::move(plus));
    points.push_back(std::move(minus));
  }
  if (dim <= 2) return hull_of_points(points, dim);
  Polytope hull;  // all generators are extreme by construction
  hull.dim = dim;
  hull.intrinsic_dim = dim;
  hull.generators = dedupe(points);
  hull.vertices = hull.generators;
  return hull;
}

}  // namespace dphmm
