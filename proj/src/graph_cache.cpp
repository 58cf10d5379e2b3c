#include <cstring>
#include <fstream>

#include "smrec/experiment.hpp"

namespace smrec {

namespace {

constexpr char kMagic[8] = {'S', 'M', 'R', 'C', 'A', 'C', 'H', '1'};

class Writer {
public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(const T& value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

private:
  std::ostream& out_;
};

class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw DataError("truncated cache file");
    return value;
  }
  std::string get_string() {
    const auto size = get<std::uint64_t>();
    if (size > (1u << 20)) throw DataError("corrupt cache file");
    std::string s(size, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(size));
    if (!in_) throw DataError("truncated cache file");
    return s;
  }
  std::uint64_t get_count(std::uint64_t limit) {
    const auto n = get<std::uint64_t>();
    if (n > limit) throw DataError("corrupt cache file");
    return n;
  }

private:
  std::istream& in_;
};

}  // namespace

void save_graph_cache(const std::filesystem::path& path, const ProximityGraph& graph,
                      const std::map<std::string, std::vector<SemiMetricEdgeStats>>& stats) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write cache '" + tmp.string() + "'");
    Writer w(out);
    out.write(kMagic, sizeof kMagic);
    const std::uint64_t n = graph.size();
    w.put(n);
    for (Index v = 0; v < n; ++v) {
      w.put<std::int64_t>(graph.labels()[v]);
      w.put<std::uint8_t>(graph.active(v) ? 1 : 0);
      const auto row = graph.edges().neighbors(v);
      w.put<std::uint64_t>(row.size());
      for (const Edge& e : row) {
        w.put(e.to);
        w.put(e.weight);
      }
    }
    w.put<std::uint64_t>(stats.size());
    for (const auto& [name, records] : stats) {
      w.put_string(name);
      w.put<std::uint64_t>(records.size());
      for (const auto& r : records) {
        w.put(r.i);
        w.put(r.j);
        w.put(r.direct);
        w.put(r.shortest);
        w.put(r.s);
        w.put(r.b_ij);
        w.put(r.b_ji);
      }
    }
    if (!out) throw DataError("failed writing cache '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::pair<ProximityGraph, std::map<std::string, std::vector<SemiMetricEdgeStats>>>>
load_graph_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) return std::nullopt;
    Reader r(in);
    const auto n = r.get_count(1u << 26);
    std::vector<std::vector<Edge>> rows(n);
    std::vector<bool> active(n);
    std::vector<ExternalId> labels(n);
    for (std::uint64_t v = 0; v < n; ++v) {
      labels[v] = r.get<std::int64_t>();
      active[v] = r.get<std::uint8_t>() != 0;
      const auto degree = r.get_count(n);
      rows[v].resize(degree);
      for (auto& e : rows[v]) {
        e.to = r.get<Index>();
        e.weight = r.get<double>();
        if (e.to >= n) return std::nullopt;
      }
    }
    ProximityGraph graph(SymmetricGraph::from_rows(std::move(rows)), std::move(active),
                         std::move(labels));

    std::map<std::string, std::vector<SemiMetricEdgeStats>> stats;
    const auto groups = r.get_count(64);
    for (std::uint64_t g = 0; g < groups; ++g) {
      auto name = r.get_string();
      const auto count = r.get_count(n * n);
      std::vector<SemiMetricEdgeStats> records(count);
      for (auto& rec : records) {
        rec.i = r.get<Index>();
        rec.j = r.get<Index>();
        rec.direct = r.get<double>();
        rec.shortest = r.get<double>();
        rec.s = r.get<double>();
        rec.b_ij = r.get<double>();
        rec.b_ji = r.get<double>();
      }
      stats.emplace(std::move(name), std::move(records));
    }
    return std::make_pair(std::move(graph), std::move(stats));
  } catch (const DataError&) {
    return std::nullopt;
  }
}

}  // namespace smrec
