#include "smrec/closure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "smrec/parallel.hpp"

namespace smrec {

namespace {

template <typename Map>
SymmetricGraph map_edges(const SymmetricGraph& edges, Map&& map) {
  std::vector<std::vector<Edge>> rows(edges.size());
  for (Index v = 0; v < edges.size(); ++v) {
    for (const Edge& e : edges.neighbors(v)) {
      const auto w = map(e.weight);
      if (w) rows[v].push_back({e.to, *w});
    }
  }
  return SymmetricGraph::from_rows(std::move(rows));
}

}  // namespace

DistanceGraph to_distance(const ProximityGraph& graph, const DualAlgebra& algebra) {
  auto edges = map_edges(graph.edges(), [&](double p) -> std::optional<double> {
    const double d = algebra.phi(p);
    if (std::isinf(d)) return std::nullopt;
    return d;
  });
  return DistanceGraph(std::move(edges), graph.active_flags(), graph.labels());
}

ProximityGraph to_proximity(const DistanceGraph& graph, const DualAlgebra& algebra) {
  auto edges = map_edges(graph.edges(), [&](double d) -> std::optional<double> {
    const double p = algebra.phi_inverse(d);
    if (p <= 0.0) return std::nullopt;
    return p;
  });
  return ProximityGraph(std::move(edges), graph.active_flags(), graph.labels());
}

namespace {

class DenseMatrix {
public:
  DenseMatrix(std::size_t n, double fill) : n_(n), cells_(n * n, fill) {}

  double& at(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  std::size_t size() const noexcept { return n_; }

private:
  std::size_t n_;
  std::vector<double> cells_;
};

bool within(const DenseMatrix& a, const DenseMatrix& b, double tolerance) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double x = a.at(i, j), y = b.at(i, j);
      if (x == y) continue;
      if (!(std::abs(x - y) <= tolerance)) return false;
    }
  }
  return true;
}

// One composition C_ij = select_k combine(M_ik, M_kj), folding from k = 0 so no
// identity element is assumed for `select`.
DenseMatrix compose(const DenseMatrix& m, const BinaryOp& combine, const BinaryOp& select,
                    unsigned threads) {
  const std::size_t n = m.size();
  DenseMatrix out(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = combine(m.at(i, 0), m.at(0, j));
      for (std::size_t k = 1; k < n; ++k) acc = select(acc, combine(m.at(i, k), m.at(k, j)));
      out.at(i, j) = acc;
    }
  });
  return out;
}

DenseMatrix iterate_to_fixed_point(DenseMatrix m, const BinaryOp& combine, const BinaryOp& select,
                                   const ClosureOptions& options) {
  const std::size_t budget =
      options.max_iterations ? options.max_iterations : std::max<std::size_t>(1, m.size());
  for (std::size_t it = 0; it < budget; ++it) {
    DenseMatrix next = compose(m, combine, select, options.threads);
    if (within(next, m, options.tolerance)) return next;
    m = std::move(next);
  }
  throw ConvergenceError(budget);
}

}  // namespace

ProximityGraph fixed_point_transitive_closure(const ProximityGraph& graph,
                                              const DualAlgebra& algebra,
                                              const ClosureOptions& options) {
  const std::size_t n = graph.size();
  DenseMatrix m(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    m.at(i, i) = graph.active(i) ? 1.0 : 0.0;
    for (const Edge& e : graph.edges().neighbors(i)) m.at(i, e.to) = e.weight;
  }
  const DenseMatrix closed =
      iterate_to_fixed_point(std::move(m), algebra.conjunction, algebra.disjunction, options);

  std::vector<std::vector<Edge>> rows(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && closed.at(i, j) > 0.0) rows[i].push_back({j, closed.at(i, j)});
  return ProximityGraph(SymmetricGraph::from_rows(std::move(rows)), graph.active_flags(),
                        graph.labels());
}

DistanceGraph fixed_point_distance_closure(const DistanceGraph& graph, const DualAlgebra& algebra,
                                           const ClosureOptions& options) {
  const std::size_t n = graph.size();
  DenseMatrix m(n, kInfinity);
  for (Index i = 0; i < n; ++i) {
    m.at(i, i) = 0.0;
    for (const Edge& e : graph.edges().neighbors(i)) m.at(i, e.to) = e.weight;
  }
  const DenseMatrix closed =
      iterate_to_fixed_point(std::move(m), algebra.td_norm, algebra.td_conorm, options);

  std::vector<std::vector<Edge>> rows(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && !std::isinf(closed.at(i, j))) rows[i].push_back({j, closed.at(i, j)});
  return DistanceGraph(SymmetricGraph::from_rows(std::move(rows)), graph.active_flags(),
                       graph.labels());
}

namespace {

template <typename Combine>
std::vector<std::vector<Edge>> best_first_rows(const SymmetricGraph& edges, Combine combine,
                                               unsigned threads) {
  const std::size_t n = edges.size();
  std::vector<std::vector<Edge>> rows(n);

  parallel_for(n, threads, [&](std::size_t source) {
    if (edges.neighbors(static_cast<Index>(source)).empty()) return;
    thread_local std::vector<double> dist;
    dist.assign(n, kInfinity);
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    dist[source] = 0.0;
    frontier.emplace(0.0, static_cast<Index>(source));
    while (!frontier.empty()) {
      const auto [d, v] = frontier.top();
      frontier.pop();
      if (d > dist[v]) continue;
      for (const Edge& e : edges.neighbors(v)) {
        const double candidate = combine(d, e.weight);
        if (candidate < dist[e.to]) {
          dist[e.to] = candidate;
          frontier.emplace(candidate, e.to);
        }
      }
    }
    auto& row = rows[source];
    for (Index v = 0; v < n; ++v)
      if (v != source && !std::isinf(dist[v])) row.push_back({v, dist[v]});
  });
  return rows;
}

// Searches from i and from j can sum the same path in different orders; keep
// the smaller value on both sides so the result is exactly symmetric.
void symmetrize(std::vector<std::vector<Edge>>& rows) {
  auto less = [](const Edge& a, const Edge& b) { return a.to < b.to; };
  for (Index i = 0; i < rows.size(); ++i) {
    for (Edge& e : rows[i]) {
      if (e.to <= i) continue;
      auto& other = rows[e.to];
      auto it = std::lower_bound(other.begin(), other.end(), Edge{i, 0.0}, less);
      if (it == other.end() || it->to != i)
        throw ComputeError("closure rows disagree on reachability of (" + std::to_string(i) +
                           ", " + std::to_string(e.to) + ")");
      const double w = std::min(e.weight, it->weight);
      e.weight = w;
      it->weight = w;
    }
  }
}

}  // namespace

DistanceGraph shortest_path_closure(const DistanceGraph& graph, ClosureKernel kernel,
                                    unsigned threads) {
  std::vector<std::vector<Edge>> rows;
  switch (kernel) {
    case ClosureKernel::shortest_path_sum:
      rows = best_first_rows(graph.edges(), [](double a, double b) { return a + b; }, threads);
      break;
    case ClosureKernel::shortest_path_max:
      rows = best_first_rows(graph.edges(), [](double a, double b) { return std::max(a, b); },
                             threads);
      break;
    case ClosureKernel::fixed_point:
      throw UsageError("shortest_path_closure needs a shortest-path kernel");
  }
  symmetrize(rows);
  return DistanceGraph(SymmetricGraph::from_rows(std::move(rows)), graph.active_flags(),
                       graph.labels());
}

DistanceGraph distance_closure(const DistanceGraph& graph, const DualAlgebra& algebra,
                               const ClosureOptions& options) {
  if (algebra.kernel == ClosureKernel::fixed_point)
    return fixed_point_distance_closure(graph, algebra, options);
  return shortest_path_closure(graph, algebra.kernel, options.threads);
}

ProximityGraph transitive_closure(const ProximityGraph& graph, const DualAlgebra& algebra,
                                  const ClosureOptions& options) {
  if (algebra.kernel == ClosureKernel::fixed_point)
    return fixed_point_transitive_closure(graph, algebra, options);
  const auto closed = to_proximity(
      shortest_path_closure(to_distance(graph, algebra), algebra.kernel, options.threads), algebra);

  // The phi round trip can land an unimproved edge one ulp below its input.
  std::vector<std::vector<Edge>> rows(closed.size());
  for (Index v = 0; v < closed.size(); ++v) {
    const auto row = closed.edges().neighbors(v);
    rows[v].assign(row.begin(), row.end());
    for (Edge& e : rows[v])
      if (const auto original = graph.edges().find(v, e.to))
        e.weight = std::max(e.weight, *original);
  }
  return ProximityGraph(SymmetricGraph::from_rows(std::move(rows)), closed.active_flags(),
                        closed.labels());
}

}  // namespace smrec
