// smrec: benchmark harness for proximity and semi-metric recommenders.
//
//   smrec run    --data data/ml-100k --algorithm item-sm --b-percentile 0.002
//   smrec sweep  --data data/ml-100k --algorithm user-prox --grid-k 20,60,100
//   smrec closure --in graph.tsv --out closed.tsv --stats-out stats.tsv
//
// Exit codes: 0 success, 1 usage, 2 data, 3 compute.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "smrec/closure.hpp"
#include "smrec/experiment.hpp"

namespace {

using namespace smrec;

struct ThresholdFlags {
  std::optional<double> value;
  std::optional<double> percentile;
  bool powerlaw = false;
  double fallback = 0.1;

  ThresholdPolicy policy() const {
    if (value) return ThresholdPolicy::explicit_value(*value);
    if (percentile) return ThresholdPolicy::percentile(*percentile);
    return ThresholdPolicy::power_law(fallback);
  }
};

struct RunFlags {
  ExperimentConfig config;
  std::string algorithm = "item-prox";
  std::string rule = "either";
  std::string format = "structured";
  bool keep_profile = false;
  ThresholdFlags threshold;
};

void add_experiment_options(CLI::App& cmd, RunFlags& f) {
  auto& c = f.config;
  cmd.add_option("--data", c.data,
                 "ratings file, or a MovieLens directory (u1.base/u1.test, else u.data)");
  auto* train = cmd.add_option("--train", c.train, "training ratings file (file-pair mode)");
  auto* test = cmd.add_option("--test", c.test, "test ratings file (file-pair mode)");
  train->needs(test);
  test->needs(train);
  cmd.add_option("--holdout", c.holdout, "random holdout fraction in (0,1); default 0.2 when no split files")
      ->excludes(train);
  cmd.add_option("--seed", c.seed, "seed for the random holdout")->capture_default_str();
  cmd.add_option("--algorithm", f.algorithm, "recommender")
      ->check(CLI::IsMember({"item-prox", "item-sm", "user-prox", "user-sm"}))
      ->capture_default_str();
  cmd.add_option("--top-n", c.top_n, "list length for precision/recall/F1")->capture_default_str();
  cmd.add_option("--k", c.k_neighbors, "neighbourhood size for user-based algorithms")
      ->capture_default_str();

  auto* value = cmd.add_option("--b-threshold", f.threshold.value, "explicit b threshold (> 0)");
  auto* pct = cmd.add_option("--b-percentile", f.threshold.percentile,
                             "threshold at this upper fraction of the b values");
  auto* pl = cmd.add_flag("--b-powerlaw", f.threshold.powerlaw,
                          "threshold at the fitted power-law tail cutoff (default)");
  value->excludes(pct)->excludes(pl);
  pct->excludes(pl);
  cmd.add_option("--b-fallback", f.threshold.fallback,
                 "percentile used when the power-law fit fails")
      ->capture_default_str();
  cmd.add_option("--rule", f.rule, "edge qualifies when either or both b values pass")
      ->check(CLI::IsMember({"either", "both"}))
      ->capture_default_str();
  cmd.add_option("--algebra", c.algebra, "closure algebra")
      ->check(CLI::IsMember({"metric", "max-min"}))
      ->capture_default_str();
  cmd.add_flag("--keep-profile", f.keep_profile, "rank training items too");

  cmd.add_option("--threads", c.threads, "worker threads")->capture_default_str();
  cmd.add_option("--out", c.out, "report file (default: stdout)");
  cmd.add_option("--format", f.format, "report format")
      ->check(CLI::IsMember({"tsv", "structured"}))
      ->capture_default_str();
  cmd.add_option("--cache-dir", c.cache_dir, "cache for proximity graphs and semi-metric stats");
  cmd.add_option("--export-graph", c.export_graph, "write the (enhanced) graph as an edge list");
  cmd.add_option("--export-stats", c.export_stats, "write semi-metric stats (sm algorithms)");
  cmd.add_option("--export-rankings", c.export_rankings, "write per-user rankings");
  cmd.add_option("--ranking-limit", c.export_ranking_limit, "rows per user in ranking export (0 = all)")
      ->capture_default_str();
}

ExperimentConfig finish(RunFlags& f) {
  auto c = f.config;
  c.algorithm = parse_algorithm(f.algorithm);
  c.rule = f.rule == "both" ? QualificationRule::both : QualificationRule::either;
  c.format = f.format == "tsv" ? ReportFormat::tsv : ReportFormat::structured;
  c.exclude_profile = !f.keep_profile;
  c.threshold_policy = f.threshold.policy();
  c.validate();
  return c;
}

std::ofstream open_or_throw(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

int run_command(RunFlags& f) {
  const auto config = finish(f);
  const auto result = run_experiment(config);
  if (!config.out) write_report(std::cout, config, result);
  std::cerr << format_summary(config, result);
  return 0;
}

struct SweepFlags {
  std::vector<unsigned> k;
  std::vector<std::size_t> top_n;
  std::vector<double> percentiles;
  std::vector<double> thresholds;
  bool powerlaw = false;
};

int sweep_command(RunFlags& f, const SweepFlags& g) {
  const auto config = finish(f);
  SweepGrid grid;
  grid.k_neighbors = g.k;
  grid.top_n = g.top_n;
  grid.b_percentiles = g.percentiles;
  grid.b_thresholds = g.thresholds;
  grid.b_powerlaw = g.powerlaw;
  const auto points = sweep(config, grid);

  const auto report = sweep_json(points).dump(2);
  if (config.out) {
    open_or_throw(*config.out) << report << '\n';
  } else {
    std::cout << report << '\n';
  }
  std::cerr << format_sweep_summary(points);
  for (const auto& p : points)
    if (p.result) return 0;
  return 3;
}

struct ClosureFlags {
  std::filesystem::path in;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> stats_out;
  std::string algebra = "metric";
  bool distance_input = false;
  unsigned threads = 1;
};

int closure_command(const ClosureFlags& f) {
  const auto algebra = algebra_by_name(f.algebra);
  std::ifstream in(f.in);
  if (!in) throw DataError("cannot open '" + f.in.string() + "'");
  const DistanceGraph direct = f.distance_input ? read_distance_edge_list(in)
                                                : to_distance(read_proximity_edge_list(in), algebra);
  ClosureOptions options;
  options.threads = f.threads;
  const DistanceGraph closed = distance_closure(direct, algebra, options);
  if (f.out) {
    auto out = open_or_throw(*f.out);
    write_edge_list(out, closed);
  } else {
    write_edge_list(std::cout, closed);
  }
  if (f.stats_out) {
    auto out = open_or_throw(*f.stats_out);
    write_stats(out, semimetric_stats(direct, closed, f.threads), direct.labels());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximity and semi-metric recommender benchmark"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run one experiment and write its report");
  add_experiment_options(*run, run_flags);

  RunFlags sweep_flags;
  SweepFlags grid;
  auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment over a parameter grid");
  add_experiment_options(*sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--grid-k", grid.k, "neighbourhood sizes")->delimiter(',');
  sweep_cmd->add_option("--grid-top-n", grid.top_n, "list lengths")->delimiter(',');
  sweep_cmd->add_option("--grid-b-percentile", grid.percentiles, "b percentiles")->delimiter(',');
  sweep_cmd->add_option("--grid-b-threshold", grid.thresholds, "explicit b thresholds")
      ->delimiter(',');
  sweep_cmd->add_flag("--grid-b-powerlaw", grid.powerlaw, "add the power-law threshold");

  ClosureFlags closure_flags;
  auto* closure = app.add_subcommand("closure", "close an edge-list graph");
  closure->add_option("--in", closure_flags.in, "edge list `a \\t b \\t weight`")->required();
  closure->add_flag("--distance", closure_flags.distance_input,
                    "input weights are distances (default: proximities)");
  closure->add_option("--algebra", closure_flags.algebra, "closure algebra")
      ->check(CLI::IsMember({"metric", "max-min"}))
      ->capture_default_str();
  closure->add_option("--out", closure_flags.out, "closed distance edge list (default: stdout)");
  closure->add_option("--stats-out", closure_flags.stats_out, "semi-metric stats");
  closure->add_option("--threads", closure_flags.threads, "worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_command(run_flags);
    if (*sweep_cmd) return sweep_command(sweep_flags, grid);
    return closure_command(closure_flags);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "compute error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
