#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "dphmm/geometry.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dphmm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Vec> sorted(std::vector<Vec> points) {
  std::sort(points.begin(), points.end());
  return points;
}

// Negation-closed integer point sets, the shape difference sets take.
std::vector<Vec> random_symmetric_points(RandomStream& rng, int max_pairs) {
  const int pairs = 1 + rng.below(max_pairs);
  std::vector<Vec> points;
  points.reserve(2 * pairs);
  for (int i = 0; i < pairs; ++i) {
    const double x = rng.below(19) - 9;
    const double y = rng.below(19) - 9;
    points.push_back({x, y});
    points.push_back({-x, -y});
  }
  return points;
}

DifferenceSet as_diffs(const std::vector<Vec>& columns) {
  DifferenceSet diffs;
  diffs.dim = 2;
  diffs.columns = columns;
  return diffs;
}

Polytope squares_hull() {
  const PolicyGraph graph(6, {{3, 4}, {3, 5}, {4, 5}});
  return sensitivity_hull(difference_set(graph, fixtures::example_query()));
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("measurement query shape and validation") {
  const MeasurementQuery query = fixtures::example_query();
  CHECK(query.dim() == 2);
  CHECK(query.n_states() == 6);
  CHECK(query.answer(4) == Vec{4, 2});
  CHECK(query.rows() ==
        std::vector<std::vector<double>>{{1, 2, 3, 0, 4, 1},
                                         {0, 1, 0, 1, 2, 2}});

  CHECK_THROWS_AS(
      MeasurementQuery(std::vector<std::vector<double>>{{1, 2}, {3}}),
      std::invalid_argument);
  const double inf = kInf;
  CHECK_THROWS_AS(MeasurementQuery(std::vector<std::vector<double>>{{inf}}),
                  std::invalid_argument);
}

TEST_CASE("difference set of the example graph") {
  const DifferenceSet diffs =
      difference_set(fixtures::example_graph(), fixtures::example_query());
  CHECK(diffs.dim == 2);
  CHECK(diffs.columns == std::vector<Vec>{{-1, 1},
                                          {1, -1},
                                          {-4, -1},
                                          {4, 1},
                                          {-1, -1},
                                          {1, 1},
                                          {3, 0},
                                          {-3, 0}});
  REQUIRE(diffs.provenance.size() == 8);
  CHECK(diffs.provenance[0].edge == Edge{1, 2});
  CHECK(diffs.provenance[0].sign == 1);
  CHECK(diffs.provenance[1].sign == -1);
  CHECK(diffs.provenance[6].edge == Edge{4, 5});
}

TEST_CASE("difference set edge cases") {
  const MeasurementQuery query = fixtures::example_query();
  const DifferenceSet single =
      difference_set(PolicyGraph(6, {{1, 2}}), query);
  CHECK(single.columns == std::vector<Vec>{{-1, 1}, {1, -1}});

  const DifferenceSet empty = difference_set(PolicyGraph(6), query);
  CHECK(empty.columns.empty());

  CHECK_THROWS_AS(difference_set(PolicyGraph(5), query),
                  std::invalid_argument);
}

TEST_CASE("hull of the example difference set") {
  const Polytope hull = sensitivity_hull(
      difference_set(fixtures::example_graph(), fixtures::example_query()));
  CHECK(hull.dim == 2);
  CHECK(hull.intrinsic_dim == 2);
  CHECK(hull.vertices == std::vector<Vec>{{-4, -1},
                                          {1, -1},
                                          {3, 0},
                                          {4, 1},
                                          {-1, 1},
                                          {-3, 0}});
  CHECK(sorted(hull.vertices) ==
        sorted(oracle::hull_vertices_2d(hull.generators)));
}

TEST_CASE("degenerate hulls") {
  const Polytope segment = sensitivity_hull(as_diffs({{-1, 1}, {1, -1}}));
  CHECK(segment.intrinsic_dim == 1);
  CHECK(sorted(segment.vertices) == std::vector<Vec>{{-1, 1}, {1, -1}});

  const Polytope point = sensitivity_hull(as_diffs({}));
  CHECK(point.intrinsic_dim == 0);
  CHECK(point.vertices == std::vector<Vec>{{0, 0}});

  const Polytope zero = sensitivity_hull(as_diffs({{0, 0}, {0, 0}}));
  CHECK(zero.intrinsic_dim == 0);
}

TEST_CASE("hull matches the brute-force extremality oracle") {
  RandomStream rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<Vec> points = random_symmetric_points(rng, 12);
    const Polytope hull = hull_of_points(points, 2);
    CHECK(sorted(hull.vertices) == sorted(oracle::hull_vertices_2d(points)));
  }
}

TEST_CASE("hull is stable under permutation and duplication") {
  RandomStream rng(31);
  const std::vector<Vec> base = {{-4, -1}, {4, 1},  {-1, 1}, {1, -1},
                                 {3, 0},   {-3, 0}, {1, 1},  {-1, -1}};
  const Polytope reference = hull_of_points(base, 2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> shuffled = base;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.below(static_cast<int>(i))]);
    }
    shuffled.push_back(shuffled[rng.below(static_cast<int>(shuffled.size()))]);
    shuffled.push_back({0, 0});  // interior point changes nothing
    CHECK(hull_of_points(shuffled, 2).vertices == reference.vertices);
  }
}

TEST_CASE("hull vertex set is centrally symmetric") {
  RandomStream rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const Polytope hull =
        hull_of_points(random_symmetric_points(rng, 10), 2);
    std::vector<Vec> negated;
    for (const Vec& v : hull.vertices) negated.push_back({-v[0], -v[1]});
    CHECK(sorted(hull.vertices) == sorted(negated));
  }
}

TEST_CASE("hull contains its generators and the origin") {
  RandomStream rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<Vec> points = random_symmetric_points(rng, 8);
    const Polytope hull = hull_of_points(points, 2);
    if (hull.intrinsic_dim == 0) continue;
    CHECK(contains(hull, {0, 0}));
    for (const Vec& p : points) CHECK(contains(hull, p));
  }
}

TEST_CASE("k_norm basics") {
  const Polytope hull = sensitivity_hull(
      difference_set(fixtures::example_graph(), fixtures::example_query()));
  CHECK(k_norm(hull, {0, 0}) == 0.0);
  for (const Vec& v : hull.vertices) CHECK(k_norm(hull, v) == 1.0);
  CHECK(k_norm(hull, {8, 2}) == 2.0);  // twice the vertex (4, 1)

  CHECK_THROWS_AS(k_norm(hull, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("k_norm of the two-generator audit hull") {
  const Polytope hull =
      hull_of_points({{1, 0}, {-1, 0}, {1, -1}, {-1, 1}}, 2);
  CHECK(sorted(hull.vertices) ==
        std::vector<Vec>{{-1, 0}, {-1, 1}, {1, -1}, {1, 0}});
  CHECK(k_norm(hull, {0, 1}) == 2.0);
  CHECK(k_norm(hull, {1, 0}) == 1.0);
  CHECK(oracle::shoelace_area(hull.vertices) == 2.0);
}

TEST_CASE("k_norm on degenerate hulls") {
  const Polytope segment = sensitivity_hull(as_diffs({{-1, 1}, {1, -1}}));
  CHECK(k_norm(segment, {-0.5, 0.5}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(k_norm(segment, {-1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k_norm(segment, {1, 1}) == kInf);

  const Polytope point = sensitivity_hull(as_diffs({}));
  CHECK(k_norm(point, {0, 0}) == 0.0);
  CHECK(k_norm(point, {1, 0}) == kInf);
}

TEST_CASE("k_norm is homogeneous and subadditive") {
  RandomStream rng(43);
  const Polytope hull = squares_hull();
  for (int trial = 0; trial < 200; ++trial) {
    const Vec u{rng.uniform() * 8 - 4, rng.uniform() * 8 - 4};
    const Vec v{rng.uniform() * 8 - 4, rng.uniform() * 8 - 4};
    const double alpha = rng.uniform() * 4;
    const double ku = k_norm(hull, u);
    CHECK(k_norm(hull, {alpha * u[0], alpha * u[1]}) ==
          doctest::Approx(alpha * ku).epsilon(1e-12));
    CHECK(k_norm(hull, {-u[0], -u[1]}) == doctest::Approx(ku).epsilon(1e-12));
    const double sum = k_norm(hull, {u[0] + v[0], u[1] + v[1]});
    CHECK(sum <= ku + k_norm(hull, v) + 1e-9);
  }
}

TEST_CASE("containment of the protection examples") {
  const Polytope hull = squares_hull();
  CHECK(contains(hull, {-2, 0}));
  CHECK(contains(hull, {2, 1}));  // boundary point counts
  CHECK_FALSE(contains(hull, {-1, 1}));

  const PolicyGraph graph(6, {{3, 4}, {3, 5}, {4, 5}});
  const DifferenceSet diffs =
      difference_set(graph, fixtures::example_query());
  CHECK(contains(diffs, {-2, 0}));
  CHECK(contains(diffs, {2, 1}));
  CHECK_FALSE(contains(diffs, {-1, 1}));
}

TEST_CASE("containment matches the brute-force oracle") {
  RandomStream rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<Vec> points = random_symmetric_points(rng, 10);
    const Polytope hull = hull_of_points(points, 2);
    for (int probe = 0; probe < 20; ++probe) {
      const Vec v{static_cast<double>(rng.below(25) - 12),
                  static_cast<double>(rng.below(25) - 12)};
      CHECK(contains(hull, v) == oracle::contains_2d(points, v));
    }
  }
}

TEST_CASE("containment agrees with the norm") {
  RandomStream rng(53);
  const Polytope hull = sensitivity_hull(
      difference_set(fixtures::example_graph(), fixtures::example_query()));
  for (int trial = 0; trial < 300; ++trial) {
    const Vec v{rng.uniform() * 10 - 5, rng.uniform() * 4 - 2};
    CHECK(contains(hull, v) == (k_norm(hull, v) <= 1.0 + 1e-9));
  }
}

TEST_CASE("empty difference sets contain only the origin") {
  const DifferenceSet empty = as_diffs({});
  CHECK(contains(empty, {0, 0}));
  CHECK_FALSE(contains(empty, {0, 1e-6}));
}

TEST_CASE("hull measure") {
  const Polytope example = sensitivity_hull(
      difference_set(fixtures::example_graph(), fixtures::example_query()));
  CHECK(hull_measure(example) == 11.0);
  CHECK(hull_measure(example) ==
        doctest::Approx(oracle::shoelace_area(example.vertices))
            .epsilon(1e-12));

  CHECK(hull_measure(squares_hull()) == 9.0);

  const Polytope segment = sensitivity_hull(as_diffs({{-1, 1}, {1, -1}}));
  CHECK(hull_measure(segment) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));

  CHECK(hull_measure(sensitivity_hull(as_diffs({}))) == 0.0);
}

TEST_CASE("uniform samples from a point polytope") {
  RandomStream rng(59);
  const Polytope point = sensitivity_hull(as_diffs({}));
  for (int i = 0; i < 10; ++i) {
    CHECK(sample_uniform(point, rng) == Vec{0, 0});
  }
  const double untouched = RandomStream(59).uniform();
  CHECK(rng.uniform() == untouched);  // point sampling consumes no draws
}

TEST_CASE("uniform samples from a segment average to zero") {
  RandomStream rng(61);
  const Polytope segment = hull_of_points({{1, 0}, {-1, 0}}, 2);
  double mean = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec z = sample_uniform(segment, rng);
    CHECK(z[1] == 0.0);
    mean += z[0];
  }
  mean /= n;
  CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("uniform polygon samples are symmetric and inside") {
  RandomStream rng(67);
  const Polytope hull = sensitivity_hull(
      difference_set(fixtures::example_graph(), fixtures::example_query()));
  int positive = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec z = sample_uniform(hull, rng);
    if (z[0] > 0.0) ++positive;
    if (i < 10000) CHECK(k_norm(hull, z) <= 1.0 + 1e-9);
  }
  const double fraction = static_cast<double>(positive) / n;
  CHECK(std::abs(fraction - 0.5) < 0.01);
}

TEST_CASE("cross polytope in the plane") {
  const Polytope ball = cross_polytope(2.0, 2);
  CHECK(ball.intrinsic_dim == 2);
  CHECK(sorted(ball.vertices) ==
        std::vector<Vec>{{-2, 0}, {0, -2}, {0, 2}, {2, 0}});
  CHECK(hull_measure(ball) == 8.0);
  CHECK(hull_measure(ball) ==
        doctest::Approx(oracle::shoelace_area(ball.vertices)).epsilon(1e-12));

  RandomStream rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec v{rng.uniform() * 6 - 3, rng.uniform() * 6 - 3};
    const double l1 = std::abs(v[0]) + std::abs(v[1]);
    CHECK(k_norm(ball, v) == doctest::Approx(l1 / 2.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(cross_polytope(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(cross_polytope(1.0, 0), std::invalid_argument);
}

TEST_CASE("cross polytope of the graph sensitivity covers the hull") {
  const Polytope hull = sensitivity_hull(
      difference_set(fixtures::example_graph(), fixtures::example_query()));
  const Polytope ball = cross_polytope(5.0, 2);
  for (const Vec& v : hull.vertices) CHECK(contains(ball, v));
}

TEST_CASE("general-dimension membership and norm") {
  const Polytope ball = cross_polytope(1.0, 3);
  CHECK(ball.intrinsic_dim == 3);
  CHECK(ball.vertices.size() == 6);

  CHECK(contains(ball, {0.3, 0.3, 0.3}));
  CHECK(contains(ball, {1, 0, 0}));
  CHECK(contains(ball, {0.5, -0.5, 0}));
  CHECK_FALSE(contains(ball, {0.4, 0.4, 0.4}));
  CHECK_FALSE(contains(ball, {1.01, 0, 0}));

  RandomStream rng(73);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec v{rng.uniform() * 2 - 1, rng.uniform() * 2 - 1,
                rng.uniform() * 2 - 1};
    const double l1 = std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2]);
    if (l1 < 1e-3) continue;
    CHECK(k_norm(ball, v) == doctest::Approx(l1).epsilon(1e-6));
    CHECK(contains(ball, v) == (l1 <= 1.0 + 1e-9));
  }

  CHECK_THROWS_AS(hull_measure(ball), UnsupportedDimensionError);
  RandomStream sampler(79);
  CHECK_THROWS_AS(sample_uniform(ball, sampler), UnsupportedDimensionError);
}

TEST_CASE("general-dimension extremality filtering") {
  std::vector<Vec> points;
  for (int k = 0; k < 3; ++k) {
    Vec plus(3, 0.0), minus(3, 0.0);
    plus[k] = 1.0;
    minus[k] = -1.0;
    points.push_back(plus);
    points.push_back(minus);
  }
  points.push_back({0.1, 0.1, 0.1});
  points.push_back({-0.1, -0.1, -0.1});
  const Polytope hull = hull_of_points(points, 3);
  CHECK(hull.intrinsic_dim == 3);
  CHECK(hull.vertices.size() == 6);  // interior pair filtered out
}

TEST_CASE("three-dimensional segments stay on their line") {
  const Polytope segment = hull_of_points({{1, 1, 1}, {-1, -1, -1}}, 3);
  CHECK(segment.intrinsic_dim == 1);
  CHECK(k_norm(segment, {0.5, 0.5, 0.5}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(k_norm(segment, {1, 1, 0}) == kInf);
  CHECK(contains(segment, {-1, -1, -1}));
  CHECK_FALSE(contains(segment, {0, 0, 0.5}));
}

}  // TEST_SUITE
