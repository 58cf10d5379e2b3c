#include <doctest.h>

#include "smrec/algebra.hpp"
#include "smrec/closure.hpp"
#include "support.hpp"

using namespace smrec;
using namespace smrec::testing;

namespace {

DistanceGraph distance_graph(std::size_t n, std::vector<WeightedPair> pairs) {
  return DistanceGraph(SymmetricGraph::from_pairs(n, std::move(pairs)), std::vector<bool>(n, true),
                       sequential_labels(n));
}

ProximityGraph proximity_graph(std::size_t n, std::vector<WeightedPair> pairs) {
  return ProximityGraph(SymmetricGraph::from_pairs(n, std::move(pairs)),
                        std::vector<bool>(n, true), sequential_labels(n));
}

}  // namespace

TEST_CASE("phi and its inverse") {
  CHECK(proximity_to_distance(1.0) == 0.0);
  CHECK(proximity_to_distance(0.5) == 1.0);
  CHECK(proximity_to_distance(1.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::isinf(proximity_to_distance(0.0)));
  CHECK(distance_to_proximity(0.0) == 1.0);
  CHECK(distance_to_proximity(3.0) == 0.25);
  CHECK(distance_to_proximity(kInfinity) == 0.0);
}

TEST_CASE("Hamacher product matches the composed distances on a grid") {
  double worst = 0.0;
  for (int i = 1; i <= 100; ++i)
    for (int j = 1; j <= 100; ++j) {
      const double a = i / 100.0, b = j / 100.0;
      const double direct = a * b / (a + b - a * b);
      worst = std::max(worst, std::abs(hamacher_product(a, b) - direct));
      const double via_phi =
          distance_to_proximity(proximity_to_distance(a) + proximity_to_distance(b));
      worst = std::max(worst, std::abs(via_phi - direct));
    }
  CHECK(worst <= 1e-12);
  CHECK(hamacher_product(0.0, 0.7) == 0.0);
}

TEST_CASE("both algebras pass the isomorphism self-check") {
  for (const auto& a : {metric_algebra(), max_min_algebra()}) {
    const auto check = check_algebra(a);
    INFO(a.name << ": " << check.detail);
    CHECK(check.ok);
  }
  CHECK(algebra_by_name("metric").name == "metric");
  CHECK(algebra_by_name("max-min").name == "max-min");
  CHECK_THROWS_AS(algebra_by_name("tropical"), UsageError);
}

TEST_CASE("metric triangle closes through the middle vertex") {
  const auto d = distance_graph(3, {{0, 1, 2.0}, {1, 2, 3.0}, {0, 2, 10.0}});
  const auto c = distance_closure(d, metric_algebra());
  CHECK(c.weight(0, 2) == 5.0);
  CHECK(c.weight(0, 1) == 2.0);
  CHECK(c.weight(1, 2) == 3.0);
  CHECK(floyd_warshall(dense_distances(d))[0][2] == 5.0);
}

TEST_CASE("metric chain creates the missing edge") {
  // i1 - i3 - i4 as vertices 0, 1, 2
  const auto d = distance_graph(3, {{0, 1, 2.0}, {1, 2, 1.0}});
  const auto c = distance_closure(d, metric_algebra());
  CHECK(c.weight(0, 2) == 3.0);
}

TEST_CASE("single edge graph is already closed") {
  const auto d = distance_graph(2, {{0, 1, 4.0}});
  CHECK(distance_closure(d, metric_algebra()).edges() == d.edges());
  const auto p = proximity_graph(2, {{0, 1, 0.3}});
  CHECK(transitive_closure(p, max_min_algebra()).edges() == p.edges());
}

TEST_CASE("max-min closure on three vertices") {
  const auto p = proximity_graph(3, {{0, 1, 0.8}, {1, 2, 0.6}, {0, 2, 0.2}});
  const auto c = transitive_closure(p, max_min_algebra());
  CHECK(c.weight(0, 2) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(max_min_path(dense_proximities(p), 0, 2) == 0.6);
  const auto fixed = fixed_point_transitive_closure(p, max_min_algebra());
  CHECK(fixed.weight(0, 2) == 0.6);
}

TEST_CASE("already transitive graph is unchanged") {
  const auto p = proximity_graph(3, {{0, 1, 0.5}, {1, 2, 0.5}, {0, 2, 0.5}});
  CHECK(fixed_point_transitive_closure(p, max_min_algebra()).edges() == p.edges());
}

TEST_CASE("metric closure matches Floyd-Warshall, any thread count") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_distance_graph(rng, 40);
    const auto oracle = floyd_warshall(dense_distances(d));
    for (unsigned threads : {1u, 3u}) {
      ClosureOptions options;
      options.threads = threads;
      const auto c = distance_closure(d, metric_algebra(), options);
      CHECK(max_abs_diff(dense_distances(c), oracle) <= 1e-9);
    }
  }
}

TEST_CASE("max-min closure matches bottleneck Floyd-Warshall and path enumeration") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_proximity_graph(rng, 8);
    const auto closed = transitive_closure(p, max_min_algebra());
    const auto dense = dense_proximities(p);
    for (Index i = 0; i < p.size(); ++i)
      for (Index j = 0; j < p.size(); ++j)
        if (i != j) CHECK(closed.weight(i, j) == doctest::Approx(max_min_path(dense, i, j)).epsilon(1e-12));

    const auto d = to_distance(p, max_min_algebra());
    CHECK(max_abs_diff(dense_distances(distance_closure(d, max_min_algebra())),
                       floyd_warshall(dense_distances(d), true)) <= 1e-12);
  }
}

TEST_CASE("fixed-point and shortest-path kernels agree") {
  std::mt19937_64 rng(13);
  for (const auto& algebra : {metric_algebra(), max_min_algebra()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_proximity_graph(rng, 25);
      const auto a = dense_proximities(fixed_point_transitive_closure(p, algebra));
      const auto b = dense_proximities(transitive_closure(p, algebra));
      CHECK(max_abs_diff(a, b) <= 1e-9);
      const auto d = to_distance(p, algebra);
      const auto fd = dense_distances(fixed_point_distance_closure(d, algebra));
      const auto sd = dense_distances(distance_closure(d, algebra));
      CHECK(max_abs_diff(fd, sd) <= 1e-9);
    }
  }
}

TEST_CASE("closure is idempotent and monotone") {
  std::mt19937_64 rng(14);
  for (const auto& algebra : {metric_algebra(), max_min_algebra()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_proximity_graph(rng, 30);
      const auto once = transitive_closure(p, algebra);
      const auto twice = transitive_closure(once, algebra);
      CHECK(max_abs_diff(dense_proximities(once), dense_proximities(twice)) <= 1e-12);
      const auto before = dense_proximities(p), after = dense_proximities(once);
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) CHECK(after[i][j] >= before[i][j]);

      const auto d = to_distance(p, algebra);
      const auto dc = distance_closure(d, algebra);
      CHECK(max_abs_diff(dense_distances(dc), dense_distances(distance_closure(dc, algebra))) <=
            1e-12);
      const auto dd = dense_distances(d), dcd = dense_distances(dc);
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) CHECK(dcd[i][j] <= dd[i][j]);
    }
  }
}

TEST_CASE("metric closure satisfies the triangle inequality") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = dense_distances(distance_closure(random_distance_graph(rng, 30), metric_algebra()));
    const auto n = c.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) CHECK(c[i][j] <= c[i][k] + c[k][j] + 1e-9);
  }
}

TEST_CASE("commutation square under the metric algebra") {
  std::mt19937_64 rng(16);
  const auto algebra = metric_algebra();
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_proximity_graph(rng, 30);
    const auto left = dense_distances(to_distance(fixed_point_transitive_closure(p, algebra), algebra));
    const auto right = dense_distances(distance_closure(to_distance(p, algebra), algebra));
    CHECK(max_abs_diff(left, right) <= 1e-9);
  }
}

TEST_CASE("fixed-point closure reports an exhausted budget") {
  std::vector<WeightedPair> chain;
  for (Index v = 0; v + 1 < 12; ++v) chain.push_back({v, v + 1, 0.9});
  const auto p = proximity_graph(12, chain);
  ClosureOptions options;
  options.max_iterations = 1;
  CHECK_THROWS_AS(fixed_point_transitive_closure(p, metric_algebra(), options), ConvergenceError);
}
