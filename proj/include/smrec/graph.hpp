#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smrec/common.hpp"

namespace smrec {

struct Edge {
  Index to;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct WeightedPair {
  Index a;
  Index b;
  double weight;
};

/// Undirected weighted graph stored as sorted adjacency lists, one list per
/// vertex, each undirected edge present in both endpoint lists. Self loops are
/// not stored; diagonal semantics belong to the wrapping graph type.
class SymmetricGraph {
public:
  SymmetricGraph() = default;
  explicit SymmetricGraph(std::size_t size) : adjacency_(size) {}

  /// Builds from undirected pairs (each pair given once or in both
  /// orientations). Self loops are ignored. A pair listed twice with different
  /// weights throws DataError.
  static SymmetricGraph from_pairs(std::size_t size, std::vector<WeightedPair> pairs);

  /// Adopts precomputed rows. Each row is sorted by target here; callers must
  /// supply a symmetric structure (checked by is_symmetric in tests).
  static SymmetricGraph from_rows(std::vector<std::vector<Edge>> rows);

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::span<const Edge> neighbors(Index v) const { return adjacency_.at(v); }
  std::optional<double> find(Index a, Index b) const;
  /// Number of undirected edges.
  std::size_t edge_count() const noexcept;

  bool is_symmetric(double tolerance = 0.0) const;

  /// Calls f(a, b, w) once per undirected edge with a < b.
  template <typename F>
  void for_each_edge(F&& f) const {
    for (Index a = 0; a < adjacency_.size(); ++a)
      for (const Edge& e : adjacency_[a])
        if (a < e.to) f(a, e.to, e.weight);
  }

  friend bool operator==(const SymmetricGraph&, const SymmetricGraph&) = default;

private:
  std::vector<std::vector<Edge>> adjacency_;
};

/// Reflexive symmetric fuzzy graph with weights in [0, 1]. Absent edges are 0.
/// A vertex is "active" when it takes part in at least one relation entry; only
/// active vertices have p_ii = 1.
class ProximityGraph {
public:
  ProximityGraph() = default;
  ProximityGraph(SymmetricGraph edges, std::vector<bool> active, std::vector<ExternalId> labels);

  std::size_t size() const noexcept { return edges_.size(); }
  double weight(Index a, Index b) const;
  bool active(Index v) const { return active_.at(v); }

  const SymmetricGraph& edges() const noexcept { return edges_; }
  const std::vector<bool>& active_flags() const noexcept { return active_; }
  const std::vector<ExternalId>& labels() const noexcept { return labels_; }

  /// Throws ComputeError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const ProximityGraph&, const ProximityGraph&) = default;

private:
  SymmetricGraph edges_;
  std::vector<bool> active_;
  std::vector<ExternalId> labels_;
};

/// Symmetric graph with weights in [0, inf]; absent edges are infinite and
/// d_ii = 0 for every vertex. The active flags mirror the proximity graph the
/// distances came from so the conversion round-trips.
class DistanceGraph {
public:
  DistanceGraph() = default;
  DistanceGraph(SymmetricGraph edges, std::vector<bool> active, std::vector<ExternalId> labels);

  std::size_t size() const noexcept { return edges_.size(); }
  double weight(Index a, Index b) const;
  bool active(Index v) const { return active_.at(v); }

  const SymmetricGraph& edges() const noexcept { return edges_; }
  const std::vector<bool>& active_flags() const noexcept { return active_; }
  const std::vector<ExternalId>& labels() const noexcept { return labels_; }

  void validate() const;

  friend bool operator==(const DistanceGraph&, const DistanceGraph&) = default;

private:
  SymmetricGraph edges_;
  std::vector<bool> active_;
  std::vector<ExternalId> labels_;
};

/// Labels 0..n-1, for graphs built directly in tests and tools.
std::vector<ExternalId> sequential_labels(std::size_t size);

/// Edge list `id_a \t id_b \t weight`, one undirected edge per line with
/// id_a < id_b. Weights use shortest round-trip formatting.
void write_edge_list(std::ostream& out, const ProximityGraph& graph);
void write_edge_list(std::ostream& out, const DistanceGraph& graph);

/// Reads an edge list; vertices are the ids that appear in it and every one of
/// them is active. Distance lists accept `inf` for explicit infinite edges,
/// which are dropped.
ProximityGraph read_proximity_edge_list(std::istream& in);
DistanceGraph read_distance_edge_list(std::istream& in);

/// Shortest round-trip decimal form; infinity prints as `inf`.
std::string format_number(double value);

}  // namespace smrec
