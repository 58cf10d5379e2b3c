#include "smrec/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "smrec/relation.hpp"

namespace smrec {

namespace {

bool edge_less(const Edge& a, const Edge& b) { return a.to < b.to; }

}  // namespace

SymmetricGraph SymmetricGraph::from_pairs(std::size_t size, std::vector<WeightedPair> pairs) {
  std::vector<std::vector<Edge>> rows(size);
  for (const auto& p : pairs) {
    if (p.a >= size || p.b >= size)
      throw DataError("edge (" + std::to_string(p.a) + ", " + std::to_string(p.b) +
                      ") outside graph of size " + std::to_string(size));
    if (p.a == p.b) continue;
    rows[p.a].push_back({p.b, p.weight});
    rows[p.b].push_back({p.a, p.weight});
  }
  for (Index v = 0; v < size; ++v) {
    auto& row = rows[v];
    std::sort(row.begin(), row.end(),
              [](const Edge& x, const Edge& y) { return x.to != y.to ? x.to < y.to : x.weight < y.weight; });
    std::vector<Edge> unique;
    unique.reserve(row.size());
    for (const Edge& e : row) {
      if (!unique.empty() && unique.back().to == e.to) {
        if (unique.back().weight != e.weight)
          throw DataError("conflicting weights for edge (" + std::to_string(v) + ", " +
                          std::to_string(e.to) + ")");
        continue;
      }
      unique.push_back(e);
    }
    row = std::move(unique);
  }
  return from_rows(std::move(rows));
}

SymmetricGraph SymmetricGraph::from_rows(std::vector<std::vector<Edge>> rows) {
  SymmetricGraph g;
  for (auto& row : rows)
    if (!std::is_sorted(row.begin(), row.end(), edge_less)) std::sort(row.begin(), row.end(), edge_less);
  g.adjacency_ = std::move(rows);
  return g;
}

std::optional<double> SymmetricGraph::find(Index a, Index b) const {
  const auto& row = adjacency_.at(a);
  auto it = std::lower_bound(row.begin(), row.end(), Edge{b, 0.0}, edge_less);
  if (it == row.end() || it->to != b) return std::nullopt;
  return it->weight;
}

std::size_t SymmetricGraph::edge_count() const noexcept {
  std::size_t directed = 0;
  for (const auto& row : adjacency_) directed += row.size();
  return directed / 2;
}

bool SymmetricGraph::is_symmetric(double tolerance) const {
  for (Index a = 0; a < adjacency_.size(); ++a) {
    for (const Edge& e : adjacency_[a]) {
      if (e.to == a) return false;
      auto back = find(e.to, a);
      if (!back || std::abs(*back - e.weight) > tolerance) return false;
    }
  }
  return true;
}

ProximityGraph::ProximityGraph(SymmetricGraph edges, std::vector<bool> active,
                               std::vector<ExternalId> labels)
    : edges_(std::move(edges)), active_(std::move(active)), labels_(std::move(labels)) {
  if (active_.size() != edges_.size() || labels_.size() != edges_.size())
    throw ComputeError("proximity graph: vertex metadata does not match graph size");
}

double ProximityGraph::weight(Index a, Index b) const {
  if (a == b) return active_.at(a) ? 1.0 : 0.0;
  return edges_.find(a, b).value_or(0.0);
}

void ProximityGraph::validate() const {
  for (Index a = 0; a < size(); ++a) {
    for (const Edge& e : edges_.neighbors(a)) {
      if (!(e.weight > 0.0 && e.weight <= 1.0))
        throw ComputeError("proximity weight outside (0, 1] on edge (" + std::to_string(a) + ", " +
                           std::to_string(e.to) + ")");
      if (!active_[a] || !active_[e.to])
        throw ComputeError("edge touches inactive vertex " + std::to_string(a));
    }
  }
  if (!edges_.is_symmetric()) throw ComputeError("proximity graph is not symmetric");
}

DistanceGraph::DistanceGraph(SymmetricGraph edges, std::vector<bool> active,
                             std::vector<ExternalId> labels)
    : edges_(std::move(edges)), active_(std::move(active)), labels_(std::move(labels)) {
  if (active_.size() != edges_.size() || labels_.size() != edges_.size())
    throw ComputeError("distance graph: vertex metadata does not match graph size");
}

double DistanceGraph::weight(Index a, Index b) const {
  if (a == b) return 0.0;
  return edges_.find(a, b).value_or(kInfinity);
}

void DistanceGraph::validate() const {
  for (Index a = 0; a < size(); ++a) {
    for (const Edge& e : edges_.neighbors(a)) {
      if (!(e.weight >= 0.0) || std::isinf(e.weight))
        throw ComputeError("distance weight outside [0, inf) on edge (" + std::to_string(a) +
                           ", " + std::to_string(e.to) + ")");
    }
  }
  if (!edges_.is_symmetric()) throw ComputeError("distance graph is not symmetric");
}

std::vector<ExternalId> sequential_labels(std::size_t size) {
  std::vector<ExternalId> labels(size);
  for (std::size_t i = 0; i < size; ++i) labels[i] = static_cast<ExternalId>(i);
  return labels;
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

void write_edges(std::ostream& out, const SymmetricGraph& edges,
                 const std::vector<ExternalId>& labels) {
  std::vector<std::tuple<ExternalId, ExternalId, double>> rows;
  rows.reserve(edges.edge_count());
  edges.for_each_edge([&](Index a, Index b, double w) {
    ExternalId x = labels[a], y = labels[b];
    if (x > y) std::swap(x, y);
    rows.emplace_back(x, y, w);
  });
  std::sort(rows.begin(), rows.end());
  for (const auto& [x, y, w] : rows) out << x << '\t' << y << '\t' << format_number(w) << '\n';
}

struct ParsedEdges {
  IdIndex ids;
  std::vector<WeightedPair> pairs;
};

ParsedEdges parse_edges(std::istream& in, bool allow_inf) {
  std::vector<std::tuple<ExternalId, ExternalId, double>> raw;
  std::vector<ExternalId> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    ExternalId a = 0, b = 0;
    std::string weight_token, extra;
    if (!(fields >> a >> b >> weight_token) || (fields >> extra))
      throw ParseError(line_no, "expected `id_a <tab> id_b <tab> weight`");
    double w = 0.0;
    if (weight_token == "inf") {
      if (!allow_inf) throw ParseError(line_no, "infinite weight in a proximity edge list");
      w = kInfinity;
    } else {
      auto [ptr, ec] = std::from_chars(weight_token.data(),
                                       weight_token.data() + weight_token.size(), w);
      if (ec != std::errc{} || ptr != weight_token.data() + weight_token.size())
        throw ParseError(line_no, "weight is not a number: '" + weight_token + "'");
    }
    seen.push_back(a);
    seen.push_back(b);
    raw.emplace_back(a, b, w);
  }
  ParsedEdges out{IdIndex(std::move(seen)), {}};
  for (const auto& [a, b, w] : raw) {
    if (std::isinf(w)) continue;
    out.pairs.push_back({*out.ids.find(a), *out.ids.find(b), w});
  }
  return out;
}

}  // namespace

void write_edge_list(std::ostream& out, const ProximityGraph& graph) {
  write_edges(out, graph.edges(), graph.labels());
}

void write_edge_list(std::ostream& out, const DistanceGraph& graph) {
  write_edges(out, graph.edges(), graph.labels());
}

ProximityGraph read_proximity_edge_list(std::istream& in) {
  auto parsed = parse_edges(in, false);
  const std::size_t n = parsed.ids.size();
  ProximityGraph g(SymmetricGraph::from_pairs(n, std::move(parsed.pairs)),
                   std::vector<bool>(n, true), parsed.ids.ids());
  g.validate();
  return g;
}

DistanceGraph read_distance_edge_list(std::istream& in) {
  auto parsed = parse_edges(in, true);
  const std::size_t n = parsed.ids.size();
  DistanceGraph g(SymmetricGraph::from_pairs(n, std::move(parsed.pairs)),
                  std::vector<bool>(n, true), parsed.ids.ids());
  g.validate();
  return g;
}

}  // namespace smrec
