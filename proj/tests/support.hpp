#pragma once

// Independent reference implementations and random fixtures shared by the
// unit tests and the acceptance binary. Nothing here calls into the kernels
// it is used to check.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "smrec/graph.hpp"
#include "smrec/relation.hpp"

namespace smrec::testing {

using Dense = std::vector<std::vector<double>>;

inline Dense dense_distances(const DistanceGraph& g) {
  const auto n = g.size();
  Dense d(n, std::vector<double>(n, kInfinity));
  for (Index i = 0; i < n; ++i) {
    d[i][i] = 0.0;
    for (const Edge& e : g.edges().neighbors(i)) d[i][e.to] = e.weight;
  }
  return d;
}

inline Dense dense_proximities(const ProximityGraph& g) {
  const auto n = g.size();
  Dense p(n, std::vector<double>(n, 0.0));
  for (Index i = 0; i < n; ++i) {
    p[i][i] = g.active(i) ? 1.0 : 0.0;
    for (const Edge& e : g.edges().neighbors(i)) p[i][e.to] = e.weight;
  }
  return p;
}

/// Floyd-Warshall; `bottleneck` composes paths with max instead of +.
inline Dense floyd_warshall(Dense d, bool bottleneck = false) {
  const auto n = d.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double via = bottleneck ? std::max(d[i][k], d[k][j]) : d[i][k] + d[k][j];
        if (via < d[i][j]) d[i][j] = via;
      }
  return d;
}

/// Best max-min path strength by exhaustive simple-path enumeration.
inline double max_min_path(const Dense& p, std::size_t from, std::size_t to) {
  const auto n = p.size();
  std::vector<bool> seen(n, false);
  double best = from == to ? p[from][from] : 0.0;
  auto walk = [&](auto&& self, std::size_t v, double strength) -> void {
    if (v == to) {
      best = std::max(best, strength);
      return;
    }
    seen[v] = true;
    for (std::size_t w = 0; w < n; ++w)
      if (!seen[w] && w != v && p[v][w] > 0.0) self(self, w, std::min(strength, p[v][w]));
    seen[v] = false;
  };
  if (from != to) walk(walk, from, 1.0);
  return best;
}

/// Jaccard of two row sets of a dense 0/1 matrix, by explicit set counting.
inline double jaccard(const std::vector<std::vector<bool>>& sets, std::size_t a, std::size_t b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t k = 0; k < sets[a].size(); ++k) {
    inter += sets[a][k] && sets[b][k];
    uni += sets[a][k] || sets[b][k];
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

inline DistanceGraph random_distance_graph(std::mt19937_64& rng, std::size_t max_vertices) {
  std::uniform_int_distribution<std::size_t> size(2, max_vertices);
  const auto n = size(rng);
  std::uniform_real_distribution<double> density(0.05, 0.6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.05, 10.0);
  const double q = density(rng);
  std::vector<WeightedPair> pairs;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      if (unit(rng) < q) pairs.push_back({a, b, weight(rng)});
  return DistanceGraph(SymmetricGraph::from_pairs(n, std::move(pairs)),
                       std::vector<bool>(n, true), sequential_labels(n));
}

inline ProximityGraph random_proximity_graph(std::mt19937_64& rng, std::size_t max_vertices) {
  std::uniform_int_distribution<std::size_t> size(2, max_vertices);
  const auto n = size(rng);
  std::uniform_real_distribution<double> density(0.05, 0.6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double q = density(rng);
  std::vector<WeightedPair> pairs;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      if (unit(rng) < q) pairs.push_back({a, b, std::max(1e-3, unit(rng))});
  return ProximityGraph(SymmetricGraph::from_pairs(n, std::move(pairs)),
                        std::vector<bool>(n, true), sequential_labels(n));
}

struct RandomRelation {
  std::vector<std::vector<bool>> dense;  // rows x cols
  BinaryRelation relation;
};

inline RandomRelation random_relation(std::mt19937_64& rng, std::size_t max_rows,
                                      std::size_t max_cols) {
  std::uniform_int_distribution<std::size_t> rows(1, max_rows), cols(1, max_cols);
  const auto n = rows(rng), m = cols(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double q = 0.05 + 0.5 * unit(rng);
  RandomRelation out;
  out.dense.assign(n, std::vector<bool>(m, false));
  std::vector<RelationEntry> entries;
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < m; ++c)
      if (unit(rng) < q) {
        out.dense[r][c] = true;
        entries.push_back({r, c});
      }
  if (entries.empty()) {
    out.dense[0][0] = true;
    entries.push_back({0, 0});
  }
  std::vector<ExternalId> row_ids(n), col_ids(m);
  for (std::size_t r = 0; r < n; ++r) row_ids[r] = static_cast<ExternalId>(r + 1);
  for (std::size_t c = 0; c < m; ++c) col_ids[c] = static_cast<ExternalId>(c + 1);
  out.relation = BinaryRelation(IdIndex(row_ids), IdIndex(col_ids), std::move(entries));
  return out;
}

inline std::vector<std::vector<bool>> transpose(const std::vector<std::vector<bool>>& m) {
  if (m.empty()) return {};
  std::vector<std::vector<bool>> t(m[0].size(), std::vector<bool>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

/// Largest |a - b| over two dense matrices; equal infinities count as 0.
inline double max_abs_diff(const Dense& a, const Dense& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (a[i][j] == b[i][j]) continue;
      worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
    }
  return worst;
}

}  // namespace smrec::testing
