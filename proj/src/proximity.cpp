#include "smrec/proximity.hpp"

#include <vector>

#include "smrec/parallel.hpp"

namespace smrec {

namespace {

// Jaccard rows over an inverted index: for each vertex v, walk its
// counterparts and then every vertex sharing that counterpart. Cost scales
// with co-occurrences rather than with all vertex pairs.
template <typename Members, typename Holders>
ProximityGraph jaccard_graph(std::size_t size, Members members, Holders holders,
                             const IdIndex& ids, unsigned threads) {
  std::vector<std::vector<Edge>> rows(size);
  std::vector<bool> active(size);
  for (Index v = 0; v < size; ++v) active[v] = !members(v).empty();

  parallel_for(size, threads, [&](std::size_t vi) {
    const auto v = static_cast<Index>(vi);
    const auto own = members(v);
    if (own.empty()) return;
    thread_local std::vector<std::uint32_t> shared;
    thread_local std::vector<Index> touched;
    if (shared.size() != size) shared.assign(size, 0);
    touched.clear();
    for (Index c : own) {
      for (Index w : holders(c)) {
        if (w == v) continue;
        if (shared[w]++ == 0) touched.push_back(w);
      }
    }
    auto& row = rows[v];
    row.reserve(touched.size());
    for (Index w : touched) {
      const double both = shared[w];
      const double either = static_cast<double>(own.size() + members(w).size()) - both;
      row.push_back({w, both / either});
      shared[w] = 0;
    }
  });

  return ProximityGraph(SymmetricGraph::from_rows(std::move(rows)), std::move(active), ids.ids());
}

}  // namespace

ProximityGraph item_proximity(const BinaryRelation& relation, unsigned threads) {
  if (relation.empty()) throw DataError("cannot build item proximity from an empty relation");
  return jaccard_graph(
      relation.cols(), [&](Index i) { return relation.col(i); },
      [&](Index u) { return relation.row(u); }, relation.col_ids(), threads);
}

ProximityGraph user_proximity(const BinaryRelation& relation, unsigned threads) {
  if (relation.empty()) throw DataError("cannot build user proximity from an empty relation");
  return jaccard_graph(
      relation.rows(), [&](Index u) { return relation.row(u); },
      [&](Index i) { return relation.col(i); }, relation.row_ids(), threads);
}

}  // namespace smrec
