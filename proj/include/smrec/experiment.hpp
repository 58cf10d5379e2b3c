#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smrec/evaluation.hpp"
#include "smrec/recommenders.hpp"
#include "smrec/relation.hpp"
#include "smrec/semimetric.hpp"

namespace smrec {

enum class ReportFormat { tsv, structured };

struct ExperimentConfig {
  /// Ratings file, or a MovieLens directory (u1.base/u1.test preferred, else u.data).
  std::filesystem::path data;
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> test;
  /// Forces a seeded random holdout of this fraction.
  std::optional<double> holdout;
  std::uint64_t seed = 42;

  Algorithm algorithm = Algorithm::item_prox;
  std::size_t top_n = 10;
  unsigned k_neighbors = 60;
  ThresholdPolicy threshold_policy = ThresholdPolicy::power_law(0.1);
  QualificationRule rule = QualificationRule::either;
  std::string algebra = "metric";
  bool exclude_profile = true;

  unsigned threads = 1;
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::structured;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> export_graph;
  std::optional<std::filesystem::path> export_stats;
  std::optional<std::filesystem::path> export_rankings;
  /// Rows per user in the ranking export; 0 = full ranking.
  std::size_t export_ranking_limit = 0;

  /// Throws UsageError on out-of-range parameters.
  void validate() const;
  /// Settings that affect results, in a fixed order.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

enum class SplitMode { file_pair, random_holdout };

/// Where the train/test relations come from after applying the defaults.
struct DataSource {
  SplitMode mode = SplitMode::file_pair;
  std::filesystem::path ratings;  ///< random holdout input
  std::filesystem::path base;     ///< file-pair inputs
  std::filesystem::path test;
  double holdout = 0.2;
  std::uint64_t seed = 42;
};

/// Applies the data defaults: explicit --train/--test, else a forced holdout
/// on the ratings file, else u1.base/u1.test inside a directory, else a 0.2
/// holdout of the ratings file (or <dir>/u.data). Missing files throw DataError
/// naming the path.
DataSource resolve_data(const ExperimentConfig& config);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ExperimentResult {
  EvalReport report;
  std::optional<EnhancementSummary> enhancement;
  std::size_t train_entries = 0;
  std::size_t test_entries = 0;
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t skipped_no_profile = 0;
  std::size_t skipped_no_test = 0;
  std::size_t graph_edges = 0;
  std::vector<std::string> warnings;
  /// Input and relation checksums.
  std::vector<std::pair<std::string, std::string>> provenance;
  /// Wall-clock stage timings; kept out of the machine-readable report.
  std::vector<StageTiming> timings;
};

/// Loaded split plus lazily built graphs and semi-metric stats, shared by the
/// runs of a sweep. Graphs and stats are also cached on disk when the config
/// names a cache directory.
class ExperimentContext {
public:
  explicit ExperimentContext(const ExperimentConfig& config);

  const Split& split() const noexcept { return split_; }
  const DataSource& source() const noexcept { return source_; }
  const std::vector<std::pair<std::string, std::string>>& provenance() const noexcept {
    return provenance_;
  }

  /// Item graph for item-based algorithms, user graph otherwise.
  const ProximityGraph& graph(bool item_based, unsigned threads,
                              std::vector<StageTiming>* timings = nullptr);
  const std::vector<SemiMetricEdgeStats>& stats(bool item_based, const DualAlgebra& algebra,
                                                unsigned threads,
                                                std::vector<StageTiming>* timings = nullptr);

private:
  struct CachedGraph {
    ProximityGraph graph;
    std::map<std::string, std::vector<SemiMetricEdgeStats>> stats;  // by algebra name
  };
  void load();
  CachedGraph& cached(bool item_based, unsigned threads, std::vector<StageTiming>* timings);
  std::optional<std::filesystem::path> cache_path(const std::string& kind) const;

  DataSource source_;
  Split split_;
  std::vector<std::pair<std::string, std::string>> provenance_;
  std::optional<std::filesystem::path> cache_dir_;
  std::optional<CachedGraph> item_;
  std::optional<CachedGraph> user_;
};

/// Full pipeline: load, graph, enhancement, per-user scoring, evaluation, and
/// any requested exports and report file.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config, ExperimentContext& context);

/// Parameter grid for sweeps. Each non-empty dimension is varied; empty ones
/// keep the base config value. Threshold policies from `b_percentiles`,
/// `b_thresholds` and `b_powerlaw` form a single dimension.
struct SweepGrid {
  std::vector<unsigned> k_neighbors;
  std::vector<std::size_t> top_n;
  std::vector<double> b_percentiles;
  std::vector<double> b_thresholds;
  bool b_powerlaw = false;

  bool empty() const;
};

struct SweepPoint {
  std::string label;
  ExperimentConfig config;
  std::optional<ExperimentResult> result;
  std::string error;
};

/// One run per grid point over a shared context. A failing point records its
/// error and the sweep continues. Throws UsageError for an empty grid.
std::vector<SweepPoint> sweep(const ExperimentConfig& base, const SweepGrid& grid);

/// Deterministic machine-readable report (no timings).
nlohmann::json report_json(const ExperimentConfig& config, const ExperimentResult& result);
/// Per-user TSV with `#`-prefixed config, provenance and aggregate lines.
void write_report_tsv(std::ostream& out, const ExperimentConfig& config,
                      const ExperimentResult& result);
void write_report(std::ostream& out, const ExperimentConfig& config,
                  const ExperimentResult& result);
/// Human-readable summary table including stage timings.
std::string format_summary(const ExperimentConfig& config, const ExperimentResult& result);
std::string format_sweep_summary(const std::vector<SweepPoint>& points);
nlohmann::json sweep_json(const std::vector<SweepPoint>& points);

/// Binary cache of a proximity graph and its semi-metric stats.
void save_graph_cache(const std::filesystem::path& path, const ProximityGraph& graph,
                      const std::map<std::string, std::vector<SemiMetricEdgeStats>>& stats);
/// Returns nothing when the file is absent or not a valid cache.
std::optional<std::pair<ProximityGraph, std::map<std::string, std::vector<SemiMetricEdgeStats>>>>
load_graph_cache(const std::filesystem::path& path);

}  // namespace smrec
