#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "smrec/experiment.hpp"

using namespace smrec;
namespace fs = std::filesystem;

namespace {

/// Scratch directory with a synthetic ratings file, removed on destruction.
struct Workspace {
  fs::path dir;

  Workspace() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("smrec_experiment_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::ofstream out(dir / "u.data");
    for (int u = 1; u <= 40; ++u)
      for (int i = 1; i <= 60; ++i)
        // Two loose taste groups so that the graphs have structure.
        if (unit(rng) < ((u % 2) == (i % 2) ? 0.35 : 0.08))
          out << u << '\t' << i << '\t' << 1 + (u * i) % 5 << '\t' << 880000000 + u * i << '\n';
  }
  ~Workspace() { fs::remove_all(dir); }
};

ExperimentConfig base_config(const Workspace& ws) {
  ExperimentConfig c;
  c.data = ws.dir;
  c.seed = 3;
  return c;
}

std::string report_text(const ExperimentConfig& config, const ExperimentResult& result) {
  std::ostringstream out;
  write_report(out, config, result);
  return out.str();
}

}  // namespace

TEST_CASE("same config twice gives byte-identical reports") {
  Workspace ws;
  for (auto algorithm : {Algorithm::item_prox, Algorithm::item_sm, Algorithm::user_prox, Algorithm::user_sm}) {
    auto c = base_config(ws);
    c.algorithm = algorithm;
    c.k_neighbors = 5;
    c.threshold_policy = ThresholdPolicy::percentile(0.2);
    const auto a = report_text(c, run_experiment(c));
    c.threads = 3;
    const auto b = report_text(c, run_experiment(c));
    CHECK(a == b);
    c.format = ReportFormat::tsv;
    CHECK(report_text(c, run_experiment(c)) == report_text(c, run_experiment(c)));
  }
}

TEST_CASE("report carries provenance and both agreement variants") {
  Workspace ws;
  auto c = base_config(ws);
  c.algorithm = Algorithm::item_sm;
  c.threshold_policy = ThresholdPolicy::percentile(0.1);
  const auto result = run_experiment(c);
  const auto j = report_json(c, result);
  CHECK(j["schema"] == "smrec-report/1");
  CHECK(j["config"]["algorithm"] == "item-sm");
  CHECK(j["provenance"]["split"] == "random-holdout");
  CHECK(j["provenance"].contains("ratings_file_fnv1a64"));
  CHECK(j["aggregate"].contains("agreement_macro"));
  CHECK(j["aggregate"].contains("agreement_pooled"));
  CHECK(j["enhancement"]["inserted_edges"].get<std::size_t>() > 0);
  CHECK(j["per_user"].size() == result.report.per_user.size());
  CHECK(result.train_entries + result.test_entries > 0);
}

TEST_CASE("missing data path is a data error naming it") {
  ExperimentConfig c;
  c.data = "/no/such/ratings.dat";
  try {
    run_experiment(c);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("/no/such/ratings.dat") != std::string::npos);
  }
  c.data.clear();
  c.train = "/no/base";
  c.test = "/no/test";
  CHECK_THROWS_AS(run_experiment(c), DataError);
}

TEST_CASE("invalid configs are usage errors") {
  Workspace ws;
  auto c = base_config(ws);
  c.top_n = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = base_config(ws);
  c.holdout = 1.5;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = base_config(ws);
  c.train = ws.dir / "u.data";
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = base_config(ws);
  c.algorithm = Algorithm::item_sm;
  c.threshold_policy = ThresholdPolicy::percentile(0.0);
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = base_config(ws);
  c.algebra = "other";
  CHECK_THROWS_AS(c.validate(), UsageError);
}

TEST_CASE("published split files are preferred inside a directory") {
  Workspace ws;
  {
    std::ofstream(ws.dir / "u1.base") << "1\t1\t5\t0\n1\t2\t5\t0\n2\t2\t5\t0\n2\t3\t5\t0\n";
    std::ofstream(ws.dir / "u1.test") << "1\t3\t5\t0\n2\t1\t5\t0\n";
  }
  auto c = base_config(ws);
  auto source = resolve_data(c);
  CHECK(source.mode == SplitMode::file_pair);
  CHECK(source.base == ws.dir / "u1.base");
  c.holdout = 0.3;
  source = resolve_data(c);
  CHECK(source.mode == SplitMode::random_holdout);
  CHECK(source.ratings == ws.dir / "u.data");
  CHECK(source.holdout == 0.3);

  c = base_config(ws);
  const auto result = run_experiment(c);
  CHECK(result.train_entries == 4);
  CHECK(result.test_entries == 2);
}

TEST_CASE("sweep over k gives one report per point") {
  Workspace ws;
  auto c = base_config(ws);
  c.algorithm = Algorithm::user_prox;
  SweepGrid grid;
  grid.k_neighbors = {2, 6, 10};
  const auto points = sweep(c, grid);
  REQUIRE(points.size() == 3);
  for (const auto& p : points) CHECK(p.result.has_value());
  CHECK(points[1].config.k_neighbors == 6);
  CHECK(sweep_json(points).size() == 3);
  CHECK_FALSE(format_sweep_summary(points).empty());
}

TEST_CASE("percentile sweep inserts monotonically more edges") {
  Workspace ws;
  auto c = base_config(ws);
  c.algorithm = Algorithm::item_sm;
  SweepGrid grid;
  grid.b_percentiles = {0.05, 0.1, 0.2};
  const auto points = sweep(c, grid);
  REQUIRE(points.size() == 3);
  std::size_t previous = 0;
  for (const auto& p : points) {
    REQUIRE(p.result.has_value());
    const auto inserted = p.result->enhancement->inserted;
    CHECK(inserted >= previous);
    previous = inserted;
  }
}

TEST_CASE("failing grid points are recorded and the sweep continues") {
  Workspace ws;
  auto c = base_config(ws);
  c.algorithm = Algorithm::item_sm;
  SweepGrid grid;
  grid.b_percentiles = {0.1, 2.0};
  const auto points = sweep(c, grid);
  REQUIRE(points.size() == 2);
  CHECK(points[0].result.has_value());
  CHECK_FALSE(points[1].result.has_value());
  CHECK_FALSE(points[1].error.empty());
}

TEST_CASE("empty grid is a usage error") {
  Workspace ws;
  CHECK_THROWS_AS(sweep(base_config(ws), SweepGrid{}), UsageError);
}

TEST_CASE("disk cache reproduces the uncached run") {
  Workspace ws;
  auto c = base_config(ws);
  c.algorithm = Algorithm::item_sm;
  c.threshold_policy = ThresholdPolicy::percentile(0.1);
  const auto plain = report_text(c, run_experiment(c));
  c.cache_dir = ws.dir / "cache";
  const auto first = report_text(c, run_experiment(c));
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(*c.cache_dir)) files += entry.is_regular_file();
  CHECK(files == 1);
  const auto second = report_text(c, run_experiment(c));
  CHECK(plain == first);
  CHECK(first == second);

  for (const auto& entry : fs::directory_iterator(*c.cache_dir))
    std::ofstream(entry.path(), std::ios::trunc) << "garbage";
  CHECK(report_text(c, run_experiment(c)) == plain);
}

TEST_CASE("cache file round-trip") {
  const auto path = fs::temp_directory_path() / "smrec_cache_roundtrip.bin";
  ProximityGraph g(SymmetricGraph::from_pairs(3, {{0, 1, 0.5}, {1, 2, 0.25}}), {true, true, false},
                   {10, 20, 30});
  std::map<std::string, std::vector<SemiMetricEdgeStats>> stats;
  stats["metric"] = {SemiMetricEdgeStats{0, 2, kInfinity, 4.0, kInfinity, 0.25, 0.5}};
  save_graph_cache(path, g, stats);
  const auto back = load_graph_cache(path);
  REQUIRE(back.has_value());
  CHECK(back->first == g);
  CHECK(back->second == stats);
  fs::remove(path);
  CHECK_FALSE(load_graph_cache(path).has_value());
}

TEST_CASE("exports are written") {
  Workspace ws;
  auto c = base_config(ws);
  c.algorithm = Algorithm::item_sm;
  c.threshold_policy = ThresholdPolicy::percentile(0.1);
  c.out = ws.dir / "out" / "report.json";
  c.export_graph = ws.dir / "out" / "graph.tsv";
  c.export_stats = ws.dir / "out" / "stats.tsv";
  c.export_rankings = ws.dir / "out" / "rankings.tsv";
  c.export_ranking_limit = 3;
  const auto result = run_experiment(c);
  for (const auto& p : {*c.out, *c.export_graph, *c.export_stats, *c.export_rankings})
    CHECK(fs::file_size(p) > 0);
  std::ifstream rankings(*c.export_rankings);
  std::size_t lines = 0;
  for (std::string line; std::getline(rankings, line);) ++lines;
  CHECK(lines == 3 * result.report.per_user.size());
}
