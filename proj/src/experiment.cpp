#include "smrec/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "smrec/checksum.hpp"
#include "smrec/parallel.hpp"
#include "smrec/proximity.hpp"

namespace smrec {

namespace fs = std::filesystem;

namespace {

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void note_time(std::vector<StageTiming>* timings, std::string stage, const Stopwatch& watch) {
  if (timings) timings->push_back({std::move(stage), watch.seconds()});
}

std::string rule_name(QualificationRule rule) {
  return rule == QualificationRule::either ? "either" : "both";
}

std::string kind_name(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::explicit_value: return "explicit";
    case ThresholdKind::percentile: return "percentile";
    case ThresholdKind::power_law_cutoff: return "powerlaw";
  }
  return "";
}

/// Runs one pipeline stage, prefixing any error with the stage name while
/// keeping its category (and so the CLI exit code).
template <typename F>
decltype(auto) in_stage(const char* stage, F&& body) {
  const auto label = [stage](const std::exception& e) { return std::string(stage) + ": " + e.what(); };
  try {
    return body();
  } catch (const UsageError& e) {
    throw UsageError(label(e));
  } catch (const DataError& e) {
    throw DataError(label(e));
  } catch (const ComputeError& e) {
    throw ComputeError(label(e));
  }
}

void require_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw DataError("data file not found: '" + path.string() + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (top_n < 1) throw UsageError("--top-n must be at least 1");
  if (k_neighbors < 1) throw UsageError("--k must be at least 1");
  if (threads < 1) throw UsageError("--threads must be at least 1");
  if (holdout && !(*holdout > 0.0 && *holdout < 1.0))
    throw UsageError("--holdout must lie in (0, 1)");
  if (train.has_value() != test.has_value())
    throw UsageError("--train and --test must be given together");
  if (train && holdout) throw UsageError("--holdout cannot be combined with --train/--test");
  if (data.empty() && !train) throw UsageError("either --data or --train/--test is required");
  if (is_semi_metric(algorithm)) threshold_policy.validate();
  algebra_by_name(algebra);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("data", data.string());
  e.emplace_back("train", train ? train->string() : "");
  e.emplace_back("test", test ? test->string() : "");
  e.emplace_back("holdout", holdout ? format_number(*holdout) : "");
  e.emplace_back("seed", std::to_string(seed));
  e.emplace_back("algorithm", to_string(algorithm));
  e.emplace_back("top_n", std::to_string(top_n));
  e.emplace_back("k_neighbors", std::to_string(k_neighbors));
  e.emplace_back("threshold_policy", threshold_policy.describe());
  e.emplace_back("qualification_rule", rule_name(rule));
  e.emplace_back("algebra", algebra);
  e.emplace_back("exclude_profile", exclude_profile ? "true" : "false");
  return e;
}

DataSource resolve_data(const ExperimentConfig& config) {
  DataSource src;
  src.seed = config.seed;
  if (config.train) {
    require_file(*config.train);
    require_file(*config.test);
    src.mode = SplitMode::file_pair;
    src.base = *config.train;
    src.test = *config.test;
    return src;
  }

  std::error_code ec;
  if (!fs::exists(config.data, ec))
    throw DataError("data path not found: '" + config.data.string() + "'");
  const bool is_dir = fs::is_directory(config.data, ec);

  if (is_dir && !config.holdout && fs::is_regular_file(config.data / "u1.base", ec) &&
      fs::is_regular_file(config.data / "u1.test", ec)) {
    src.mode = SplitMode::file_pair;
    src.base = config.data / "u1.base";
    src.test = config.data / "u1.test";
    return src;
  }
  src.mode = SplitMode::random_holdout;
  src.ratings = is_dir ? config.data / "u.data" : config.data;
  require_file(src.ratings);
  src.holdout = config.holdout.value_or(0.2);
  return src;
}

ExperimentContext::ExperimentContext(const ExperimentConfig& config)
    : source_(in_stage("load", [&] { return resolve_data(config); })), cache_dir_(config.cache_dir) {
  in_stage("load", [&] { load(); });
}

void ExperimentContext::load() {
  if (source_.mode == SplitMode::file_pair) {
    split_ = load_file_pair(source_.base, source_.test);
    provenance_.emplace_back("split", "file-pair");
    provenance_.emplace_back("train_file", source_.base.string());
    provenance_.emplace_back("train_file_fnv1a64", to_hex(file_checksum(source_.base)));
    provenance_.emplace_back("test_file", source_.test.string());
    provenance_.emplace_back("test_file_fnv1a64", to_hex(file_checksum(source_.test)));
  } else {
    const BinaryRelation full = load_ratings(source_.ratings);
    split_ = smrec::split(full, RandomHoldout{source_.holdout, source_.seed});
    provenance_.emplace_back("split", "random-holdout");
    provenance_.emplace_back("ratings_file", source_.ratings.string());
    provenance_.emplace_back("ratings_file_fnv1a64", to_hex(file_checksum(source_.ratings)));
    provenance_.emplace_back("holdout", format_number(source_.holdout));
    provenance_.emplace_back("seed", std::to_string(source_.seed));
  }
  provenance_.emplace_back("train_relation_fnv1a64", to_hex(split_.train.checksum()));
  provenance_.emplace_back("test_relation_fnv1a64", to_hex(split_.test.checksum()));
  if (cache_dir_) fs::create_directories(*cache_dir_);
}

std::optional<fs::path> ExperimentContext::cache_path(const std::string& kind) const {
  if (!cache_dir_) return std::nullopt;
  return *cache_dir_ / (kind + "-" + to_hex(split_.train.checksum()) + ".bin");
}

ExperimentContext::CachedGraph& ExperimentContext::cached(bool item_based, unsigned threads,
                                                          std::vector<StageTiming>* timings) {
  auto& slot = item_based ? item_ : user_;
  if (slot) return *slot;
  Stopwatch watch;
  const std::string kind = item_based ? "item" : "user";
  if (auto path = cache_path(kind)) {
    if (auto hit = load_graph_cache(*path)) {
      slot = CachedGraph{std::move(hit->first), std::move(hit->second)};
      note_time(timings, "proximity (cache)", watch);
      return *slot;
    }
  }
  slot = CachedGraph{in_stage("proximity",
                              [&] {
                                return item_based ? item_proximity(split_.train, threads)
                                                  : user_proximity(split_.train, threads);
                              }),
                     {}};
  note_time(timings, "proximity", watch);
  if (auto path = cache_path(kind)) save_graph_cache(*path, slot->graph, slot->stats);
  return *slot;
}

const ProximityGraph& ExperimentContext::graph(bool item_based, unsigned threads,
                                               std::vector<StageTiming>* timings) {
  return cached(item_based, threads, timings).graph;
}

const std::vector<SemiMetricEdgeStats>& ExperimentContext::stats(bool item_based,
                                                                 const DualAlgebra& algebra,
                                                                 unsigned threads,
                                                                 std::vector<StageTiming>* timings) {
  auto& entry = cached(item_based, threads, timings);
  if (auto it = entry.stats.find(algebra.name); it != entry.stats.end()) return it->second;
  Stopwatch watch;
  ClosureOptions options;
  options.threads = threads;
  auto [it, inserted] = entry.stats.emplace(
      algebra.name, in_stage("closure", [&] { return analyze(entry.graph, algebra, options); }));
  note_time(timings, "closure + semi-metric stats", watch);
  if (auto path = cache_path(item_based ? "item" : "user"))
    save_graph_cache(*path, entry.graph, entry.stats);
  return it->second;
}

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  Stopwatch watch;
  ExperimentContext context(config);
  const double load_seconds = watch.seconds();
  auto result = run_experiment(config, context);
  result.timings.insert(result.timings.begin(), StageTiming{"load + split", load_seconds});
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, ExperimentContext& context) {
  config.validate();
  const DualAlgebra algebra = algebra_by_name(config.algebra);
  const bool item_based = is_item_based(config.algorithm);
  const Split& data = context.split();

  ExperimentResult result;
  result.provenance = context.provenance();
  result.train_entries = data.train.entry_count();
  result.test_entries = data.test.entry_count();
  result.users = data.train.rows();
  result.items = data.train.cols();
  for (const auto& w : data.warnings)
    result.warnings.push_back("user " + std::to_string(w.user) + ": " + w.message);

  RecommenderConfig rc;
  rc.algorithm = config.algorithm;
  rc.k_neighbors = config.k_neighbors;
  rc.threshold_policy = config.threshold_policy;
  rc.rule = config.rule;
  rc.exclude_profile = config.exclude_profile;

  const ProximityGraph& base = context.graph(item_based, config.threads, &result.timings);
  std::optional<Recommender> recommender;
  if (is_semi_metric(config.algorithm)) {
    const auto& stats = context.stats(item_based, algebra, config.threads, &result.timings);
    Stopwatch watch;
    in_stage("enhancement", [&] {
      recommender.emplace(data.train, base, rc, algebra, std::span<const SemiMetricEdgeStats>(stats));
    });
    note_time(&result.timings, "threshold + enhancement", watch);
    result.enhancement = recommender->enhancement();
    for (const auto& w : result.enhancement->threshold.warnings) result.warnings.push_back(w);
    if (config.export_stats) {
      auto out = open_output(*config.export_stats);
      write_stats(out, stats, base.labels());
    }
  } else {
    recommender.emplace(data.train, base, rc, algebra);
  }
  result.graph_edges = recommender->graph().edges().edge_count();
  if (config.export_graph) {
    auto out = open_output(*config.export_graph);
    write_edge_list(out, recommender->graph());
  }

  Stopwatch scoring;
  const std::size_t users = data.train.rows();
  std::vector<std::optional<UserEvaluation>> evaluations(users);
  std::vector<std::uint8_t> status(users, 0);  // 0 evaluated, 1 no profile, 2 no test
  std::vector<std::uint8_t> short_neighbourhood(users, 0);
  std::vector<ScoredRecommendations> rankings(config.export_rankings ? users : 0);

  in_stage("scoring", [&] { parallel_for(users, config.threads, [&](std::size_t u) {
    const auto user = static_cast<Index>(u);
    if (data.train.row(user).empty()) {
      status[u] = 1;
      return;
    }
    const auto test_items = data.test.row(user);
    if (test_items.empty()) {
      status[u] = 2;
      return;
    }
    auto recs = recommender->recommend(user);
    short_neighbourhood[u] = recs.warnings.empty() ? 0 : 1;
    evaluations[u] = evaluate_user(recs, test_items, config.top_n, data.train.row_ids().external(user));
    if (config.export_rankings) rankings[u] = std::move(recs);
  }); });

  std::vector<UserEvaluation> per_user;
  std::size_t short_count = 0;
  for (std::size_t u = 0; u < users; ++u) {
    if (status[u] == 1) ++result.skipped_no_profile;
    if (status[u] == 2) ++result.skipped_no_test;
    if (evaluations[u]) per_user.push_back(*evaluations[u]);
    short_count += short_neighbourhood[u];
  }
  if (short_count)
    result.warnings.push_back(std::to_string(short_count) + " users had fewer than " +
                              std::to_string(config.k_neighbors) +
                              " neighbours with positive proximity");

  result.report = in_stage("evaluation", [&] { return aggregate(std::move(per_user), result.skipped_no_profile + result.skipped_no_test); });
  result.report.config_echo = config.echo();
  note_time(&result.timings, "scoring + evaluation", scoring);

  if (config.export_rankings) {
    auto out = open_output(*config.export_rankings);
    for (std::size_t u = 0; u < users; ++u)
      if (evaluations[u]) write_ranking(out, rankings[u], data.train, config.export_ranking_limit);
  }
  if (config.out) {
    auto out = open_output(*config.out);
    write_report(out, config, result);
  }
  return result;
}

bool SweepGrid::empty() const {
  return k_neighbors.empty() && top_n.empty() && b_percentiles.empty() && b_thresholds.empty() &&
         !b_powerlaw;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& base, const SweepGrid& grid) {
  if (grid.empty()) throw UsageError("sweep grid is empty");
  base.validate();

  std::vector<std::optional<unsigned>> ks(grid.k_neighbors.begin(), grid.k_neighbors.end());
  if (ks.empty()) ks.push_back(std::nullopt);
  std::vector<std::optional<std::size_t>> ns(grid.top_n.begin(), grid.top_n.end());
  if (ns.empty()) ns.push_back(std::nullopt);
  std::vector<std::optional<ThresholdPolicy>> policies;
  for (double p : grid.b_percentiles) policies.push_back(ThresholdPolicy::percentile(p));
  for (double t : grid.b_thresholds) policies.push_back(ThresholdPolicy::explicit_value(t));
  if (grid.b_powerlaw) policies.push_back(ThresholdPolicy::power_law(base.threshold_policy.kind == ThresholdKind::explicit_value ? 0.1 : base.threshold_policy.value));
  if (policies.empty()) policies.push_back(std::nullopt);

  ExperimentContext context(base);
  std::vector<SweepPoint> points;
  for (const auto& k : ks) {
    for (const auto& n : ns) {
      for (const auto& policy : policies) {
        SweepPoint point;
        point.config = base;
        point.config.out.reset();
        point.config.export_graph.reset();
        point.config.export_stats.reset();
        point.config.export_rankings.reset();
        std::string label;
        if (k) {
          point.config.k_neighbors = *k;
          label += "k=" + std::to_string(*k) + " ";
        }
        if (n) {
          point.config.top_n = *n;
          label += "top_n=" + std::to_string(*n) + " ";
        }
        if (policy) {
          point.config.threshold_policy = *policy;
          label += "b=" + policy->describe() + " ";
        }
        if (!label.empty()) label.pop_back();
        point.label = label;
        try {
          point.result = run_experiment(point.config, context);
        } catch (const Error& e) {
          point.error = e.what();
        }
        points.push_back(std::move(point));
      }
    }
  }
  return points;
}

namespace {

nlohmann::json number_or_inf(double value) {
  if (std::isinf(value)) return format_number(value);
  return value;
}

nlohmann::ordered_json ordered_report(const ExperimentConfig& config,
                                      const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["schema"] = "smrec-report/1";

  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.report.config_echo.empty() ? config.echo()
                                                              : result.report.config_echo)
    cfg[k] = v;
  j["config"] = cfg;

  nlohmann::ordered_json prov = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.provenance) prov[k] = v;
  j["provenance"] = prov;

  j["data"] = {{"users", result.users},
               {"items", result.items},
               {"train_entries", result.train_entries},
               {"test_entries", result.test_entries},
               {"graph_edges", result.graph_edges},
               {"skipped_no_profile", result.skipped_no_profile},
               {"skipped_no_test", result.skipped_no_test}};

  if (result.enhancement) {
    const auto& e = *result.enhancement;
    nlohmann::ordered_json enh;
    enh["semimetric_pairs"] = e.semimetric_pairs;
    enh["threshold"] = number_or_inf(e.threshold.value);
    enh["threshold_kind"] = kind_name(e.threshold.used);
    if (e.threshold.fit) {
      enh["powerlaw"] = {{"x_min", e.threshold.fit->x_min},
                         {"alpha", e.threshold.fit->alpha},
                         {"ks_distance", e.threshold.fit->ks_distance},
                         {"tail_size", e.threshold.fit->tail_size}};
    } else {
      enh["powerlaw"] = nullptr;
    }
    enh["inserted_edges"] = e.inserted;
    j["enhancement"] = enh;
  } else {
    j["enhancement"] = nullptr;
  }

  const auto& a = result.report.aggregate;
  j["aggregate"] = {{"precision", a.precision},
                    {"recall", a.recall},
                    {"f1", a.f1},
                    {"agreement_macro", a.agreement_macro},
                    {"agreement_pooled", a.agreement_pooled},
                    {"users_included", a.included},
                    {"users_with_agreement", a.agreement_included},
                    {"users_excluded", a.excluded}};

  nlohmann::ordered_json users = nlohmann::ordered_json::array();
  for (const auto& u : result.report.per_user) {
    nlohmann::ordered_json row;
    row["user"] = u.user;
    row["test_size"] = u.test_size;
    row["precision"] = u.retrieval.precision;
    row["recall"] = u.retrieval.recall;
    row["f1"] = u.retrieval.f1;
    if (u.agreement) {
      row["agreement"] = u.agreement->ratio();
      row["agreement_pairs"] = u.agreement->pairs;
    } else {
      row["agreement"] = nullptr;
      row["agreement_pairs"] = 0;
    }
    users.push_back(std::move(row));
  }
  j["per_user"] = std::move(users);
  j["warnings"] = result.warnings;
  return j;
}

}  // namespace

nlohmann::json report_json(const ExperimentConfig& config, const ExperimentResult& result) {
  return nlohmann::json::parse(ordered_report(config, result).dump());
}

void write_report_tsv(std::ostream& out, const ExperimentConfig& config,
                      const ExperimentResult& result) {
  const auto& echo = result.report.config_echo.empty() ? config.echo() : result.report.config_echo;
  for (const auto& [k, v] : echo) out << "# config\t" << k << '\t' << v << '\n';
  for (const auto& [k, v] : result.provenance) out << "# provenance\t" << k << '\t' << v << '\n';
  const auto& a = result.report.aggregate;
  out << "# aggregate\tprecision\t" << format_number(a.precision) << '\n'
      << "# aggregate\trecall\t" << format_number(a.recall) << '\n'
      << "# aggregate\tf1\t" << format_number(a.f1) << '\n'
      << "# aggregate\tagreement_macro\t" << format_number(a.agreement_macro) << '\n'
      << "# aggregate\tagreement_pooled\t" << format_number(a.agreement_pooled) << '\n'
      << "# aggregate\tusers_included\t" << a.included << '\n'
      << "# aggregate\tusers_excluded\t" << a.excluded << '\n';
  if (result.enhancement) {
    out << "# enhancement\tthreshold\t" << format_number(result.enhancement->threshold.value) << '\n'
        << "# enhancement\tinserted_edges\t" << result.enhancement->inserted << '\n';
  }
  out << "user\ttest_size\tprecision\trecall\tf1\tagreement\tagreement_pairs\n";
  for (const auto& u : result.report.per_user) {
    out << u.user << '\t' << u.test_size << '\t' << format_number(u.retrieval.precision) << '\t'
        << format_number(u.retrieval.recall) << '\t' << format_number(u.retrieval.f1) << '\t'
        << (u.agreement ? format_number(u.agreement->ratio()) : "NA") << '\t'
        << (u.agreement ? u.agreement->pairs : 0) << '\n';
  }
}

void write_report(std::ostream& out, const ExperimentConfig& config,
                  const ExperimentResult& result) {
  if (config.format == ReportFormat::tsv) {
    write_report_tsv(out, config, result);
  } else {
    out << ordered_report(config, result).dump(2) << '\n';
  }
}

std::string format_summary(const ExperimentConfig& config, const ExperimentResult& result) {
  std::ostringstream s;
  const auto& a = result.report.aggregate;
  s << "algorithm        " << to_string(config.algorithm) << '\n'
    << "data             " << result.users << " users x " << result.items << " items, "
    << result.train_entries << " train / " << result.test_entries << " test entries\n"
    << "top-n            " << config.top_n << '\n';
  if (!is_item_based(config.algorithm)) s << "k neighbours     " << config.k_neighbors << '\n';
  if (result.enhancement) {
    const auto& e = *result.enhancement;
    s << "semi-metric      " << e.semimetric_pairs << " pairs, threshold "
      << format_number(e.threshold.value) << " (" << kind_name(e.threshold.used) << "), "
      << e.inserted << " edges inserted\n";
  }
  s << std::fixed << std::setprecision(4);
  s << "precision        " << a.precision << '\n'
    << "recall           " << a.recall << '\n'
    << "F1               " << a.f1 << '\n'
    << "agreement macro  " << a.agreement_macro * 100.0 << " %\n"
    << "agreement pooled " << a.agreement_pooled * 100.0 << " %\n"
    << "users            " << a.included << " evaluated, " << a.excluded << " excluded\n";
  s << std::setprecision(3);
  for (const auto& t : result.timings) s << "  [" << t.stage << "] " << t.seconds << " s\n";
  for (const auto& w : result.warnings) s << "warning: " << w << '\n';
  return s.str();
}

std::string format_sweep_summary(const std::vector<SweepPoint>& points) {
  std::ostringstream s;
  s << std::left << std::setw(36) << "point" << std::right << std::setw(10) << "F1"
    << std::setw(12) << "agr.macro" << std::setw(12) << "agr.pooled" << std::setw(10)
    << "inserted" << '\n';
  s << std::fixed;
  for (const auto& p : points) {
    s << std::left << std::setw(36) << (p.label.empty() ? "(base)" : p.label) << std::right;
    if (!p.result) {
      s << "  error: " << p.error << '\n';
      continue;
    }
    const auto& a = p.result->report.aggregate;
    s << std::setprecision(4) << std::setw(10) << a.f1 << std::setw(11) << a.agreement_macro * 100
      << '%' << std::setw(11) << a.agreement_pooled * 100 << '%' << std::setw(10)
      << (p.result->enhancement ? std::to_string(p.result->enhancement->inserted) : "-") << '\n';
  }
  return s.str();
}

nlohmann::json sweep_json(const std::vector<SweepPoint>& points) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    nlohmann::ordered_json row;
    row["label"] = p.label;
    if (p.result) {
      row["report"] = ordered_report(p.config, *p.result);
    } else {
      row["error"] = p.error;
    }
    j.push_back(std::move(row));
  }
  return nlohmann::json::parse(j.dump());
}

}  // namespace smrec
