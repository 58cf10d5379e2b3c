#include "smrec/recommenders.hpp"

#include <algorithm>
#include <ostream>

#include "smrec/proximity.hpp"

namespace smrec {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::item_prox: return "item-prox";
    case Algorithm::item_sm: return "item-sm";
    case Algorithm::user_prox: return "user-prox";
    case Algorithm::user_sm: return "user-sm";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::item_prox, Algorithm::item_sm, Algorithm::user_prox, Algorithm::user_sm})
    if (to_string(a) == name) return a;
  throw UsageError("unknown algorithm '" + name +
                   "' (expected item-prox, item-sm, user-prox or user-sm)");
}

bool is_item_based(Algorithm algorithm) {
  return algorithm == Algorithm::item_prox || algorithm == Algorithm::item_sm;
}

bool is_semi_metric(Algorithm algorithm) {
  return algorithm == Algorithm::item_sm || algorithm == Algorithm::user_sm;
}

void RecommenderConfig::validate() const {
  if (k_neighbors < 1) throw UsageError("k_neighbors must be at least 1");
  if (is_semi_metric(algorithm)) threshold_policy.validate();
}

ScoredRecommendations rank_scores(Index user, std::vector<double> scores,
                                  std::span<const Index> profile, bool exclude_profile) {
  ScoredRecommendations out;
  out.user = user;
  out.excluded.assign(profile.begin(), profile.end());
  out.ranking.reserve(scores.size());
  auto p = profile.begin();
  for (Index item = 0; item < scores.size(); ++item) {
    while (p != profile.end() && *p < item) ++p;
    if (exclude_profile && p != profile.end() && *p == item) continue;
    out.ranking.push_back(item);
  }
  std::sort(out.ranking.begin(), out.ranking.end(), [&](Index a, Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  out.scores = std::move(scores);
  return out;
}

namespace {

std::span<const Index> training_profile(const BinaryRelation& train, Index user) {
  if (user >= train.rows())
    throw UsageError("user index " + std::to_string(user) + " outside relation");
  auto profile = train.row(user);
  if (profile.empty()) throw EmptyProfileError(train.row_ids().external(user));
  return profile;
}

}  // namespace

ScoredRecommendations item_based_scores(const ProximityGraph& iup, const BinaryRelation& train,
                                        Index user, bool exclude_profile) {
  const auto profile = training_profile(train, user);
  if (iup.size() != train.cols()) throw UsageError("item graph size does not match relation");

  // Sum over profile columns of the reduced matrix, walking each profile
  // item's adjacency instead of every (item, profile item) cell.
  std::vector<double> scores(train.cols(), 0.0);
  for (Index c : profile) {
    scores[c] += iup.weight(c, c);
    for (const Edge& e : iup.edges().neighbors(c)) scores[e.to] += e.weight;
  }
  const double count = static_cast<double>(profile.size());
  for (double& s : scores) s /= count;
  return rank_scores(user, std::move(scores), profile, exclude_profile);
}

ScoredRecommendations user_based_scores(const ProximityGraph& uip, const BinaryRelation& train,
                                        Index user, unsigned k, bool exclude_profile) {
  if (k < 1) throw UsageError("k must be at least 1");
  const auto profile = training_profile(train, user);
  if (uip.size() != train.rows()) throw UsageError("user graph size does not match relation");

  std::vector<Edge> candidates;
  for (const Edge& e : uip.edges().neighbors(user))
    if (e.to != user && e.weight > 0.0) candidates.push_back(e);
  auto closer = [](const Edge& a, const Edge& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.to < b.to;
  };
  const std::size_t take = std::min<std::size_t>(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), closer);

  std::vector<double> scores(train.cols(), 0.0);
  for (std::size_t n = 0; n < take; ++n)
    for (Index item : train.row(candidates[n].to)) scores[item] += 1.0;

  auto out = rank_scores(user, std::move(scores), profile, exclude_profile);
  if (take < k)
    out.warnings.push_back("only " + std::to_string(take) + " of " + std::to_string(k) +
                           " neighbours have positive proximity");
  return out;
}

namespace {

EnhancementSummary summarize(std::span<const SemiMetricEdgeStats> stats,
                             const ThresholdPolicy& policy) {
  EnhancementSummary summary;
  summary.semimetric_pairs = stats.size();
  if (stats.empty() && policy.kind != ThresholdKind::explicit_value) {
    policy.validate();
    summary.threshold.used = policy.kind;
    summary.threshold.warnings.push_back("graph has no semi-metric pairs; nothing to insert");
    return summary;
  }
  summary.threshold = select_threshold(stats, policy);
  return summary;
}

}  // namespace

ScoredRecommendations item_based_sm_scores(const ProximityGraph& iup, const BinaryRelation& train,
                                           Index user, const DualAlgebra& algebra,
                                           const ThresholdPolicy& policy) {
  const auto stats = analyze(iup, algebra);
  const auto summary = summarize(stats, policy);
  const auto enhanced = enhance(iup, stats, algebra, summary.threshold.value);
  return item_based_scores(enhanced.graph, train, user);
}

ScoredRecommendations user_based_sm_scores(const ProximityGraph& uip, const BinaryRelation& train,
                                           Index user, unsigned k, const DualAlgebra& algebra,
                                           const ThresholdPolicy& policy) {
  const auto stats = analyze(uip, algebra);
  const auto summary = summarize(stats, policy);
  const auto enhanced = enhance(uip, stats, algebra, summary.threshold.value);
  return user_based_scores(enhanced.graph, train, user, k);
}

Recommender::Recommender(const BinaryRelation& train, ProximityGraph graph,
                         const RecommenderConfig& config, const DualAlgebra& algebra,
                         std::optional<std::span<const SemiMetricEdgeStats>> stats)
    : train_(&train), config_(config), graph_(std::move(graph)) {
  config_.validate();
  const std::size_t expected = is_item_based(config_.algorithm) ? train.cols() : train.rows();
  if (graph_.size() != expected) throw UsageError("graph size does not match the algorithm");
  if (!is_semi_metric(config_.algorithm)) return;
  if (!stats) throw UsageError("semi-metric recommenders need semi-metric stats");

  EnhancementSummary summary = summarize(*stats, config_.threshold_policy);
  auto enhanced = enhance(graph_, *stats, algebra, summary.threshold.value, config_.rule);
  summary.inserted = enhanced.inserted;
  graph_ = std::move(enhanced.graph);
  enhancement_ = std::move(summary);
}

Recommender Recommender::build(const BinaryRelation& train, const RecommenderConfig& config,
                               const DualAlgebra& algebra, unsigned threads) {
  ProximityGraph graph = is_item_based(config.algorithm) ? item_proximity(train, threads)
                                                         : user_proximity(train, threads);
  if (!is_semi_metric(config.algorithm)) return Recommender(train, std::move(graph), config, algebra);
  ClosureOptions options;
  options.threads = threads;
  const auto stats = analyze(graph, algebra, options);
  return Recommender(train, std::move(graph), config, algebra,
                     std::span<const SemiMetricEdgeStats>(stats));
}

ScoredRecommendations Recommender::recommend(Index user) const {
  if (is_item_based(config_.algorithm))
    return item_based_scores(graph_, *train_, user, config_.exclude_profile);
  return user_based_scores(graph_, *train_, user, config_.k_neighbors, config_.exclude_profile);
}

void write_ranking(std::ostream& out, const ScoredRecommendations& recs,
                   const BinaryRelation& relation, std::size_t limit) {
  const ExternalId user = relation.row_ids().external(recs.user);
  const std::size_t rows = limit ? std::min(limit, recs.ranking.size()) : recs.ranking.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const Index item = recs.ranking[r];
    out << user << '\t' << r + 1 << '\t' << relation.col_ids().external(item) << '\t'
        << format_number(recs.scores[item]) << '\n';
  }
}

}  // namespace smrec
