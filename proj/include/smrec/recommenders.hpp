#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smrec/algebra.hpp"
#include "smrec/graph.hpp"
#include "smrec/relation.hpp"
#include "smrec/semimetric.hpp"

namespace smrec {

enum class Algorithm { item_prox, item_sm, user_prox, user_sm };

std::string to_string(Algorithm algorithm);
/// Parses "item-prox", "item-sm", "user-prox" or "user-sm".
Algorithm parse_algorithm(const std::string& name);
bool is_item_based(Algorithm algorithm);
bool is_semi_metric(Algorithm algorithm);

/// Thrown for a user with no training items; callers skip that user.
class EmptyProfileError : public Error {
public:
  explicit EmptyProfileError(ExternalId user)
      : Error("user " + std::to_string(user) + " has no training items"), user_(user) {}
  ExternalId user() const noexcept { return user_; }

private:
  ExternalId user_;
};

/// Scores for every item plus the ranking of candidate items.
struct ScoredRecommendations {
  Index user = 0;
  /// Indexed by item; profile items keep their raw score.
  std::vector<double> scores;
  /// Candidate items by descending score, ties by ascending item index (which
  /// is ascending external id). Excludes the training profile unless profile
  /// exclusion was turned off.
  std::vector<Index> ranking;
  /// The user's training items.
  std::vector<Index> excluded;
  std::vector<std::string> warnings;
};

struct RecommenderConfig {
  Algorithm algorithm = Algorithm::item_prox;
  unsigned k_neighbors = 60;
  ThresholdPolicy threshold_policy = ThresholdPolicy::power_law();
  QualificationRule rule = QualificationRule::either;
  bool exclude_profile = true;

  void validate() const;
};

/// Orders candidates by score; shared by every recommender.
ScoredRecommendations rank_scores(Index user, std::vector<double> scores,
                                  std::span<const Index> profile, bool exclude_profile);

/// Item-based proximity: score(j) is the mean of p(j, c) over the user's
/// profile items c, absent edges counting as 0.
ScoredRecommendations item_based_scores(const ProximityGraph& iup, const BinaryRelation& train,
                                        Index user, bool exclude_profile = true);

/// User-based proximity: the k users closest to `user` in `uip` (self
/// excluded, ties by ascending index, positive proximity only) vote; score(j)
/// counts neighbours whose profile contains j.
ScoredRecommendations user_based_scores(const ProximityGraph& uip, const BinaryRelation& train,
                                        Index user, unsigned k, bool exclude_profile = true);

/// Item-based proximity over the semi-metric enhanced IUP. Computes the
/// enhancement on every call; use Recommender to share it across users.
ScoredRecommendations item_based_sm_scores(const ProximityGraph& iup, const BinaryRelation& train,
                                           Index user, const DualAlgebra& algebra,
                                           const ThresholdPolicy& policy);

/// User-based proximity over the enhanced UIP, same caveat.
ScoredRecommendations user_based_sm_scores(const ProximityGraph& uip, const BinaryRelation& train,
                                           Index user, unsigned k, const DualAlgebra& algebra,
                                           const ThresholdPolicy& policy);

/// What the semi-metric preprocessing did to the graph.
struct EnhancementSummary {
  std::size_t semimetric_pairs = 0;
  ThresholdSelection threshold;
  std::size_t inserted = 0;
};

/// A configured recommender over one training relation. The proximity graph
/// and, for the semi-metric variants, its enhancement are built once here and
/// shared read-only by every recommend() call.
class Recommender {
public:
  /// `graph` must be the item graph for item-based algorithms and the user
  /// graph for user-based ones. `stats` are the semi-metric records of that
  /// graph, required for the sm variants.
  Recommender(const BinaryRelation& train, ProximityGraph graph, const RecommenderConfig& config,
              const DualAlgebra& algebra,
              std::optional<std::span<const SemiMetricEdgeStats>> stats = std::nullopt);

  /// Builds the proximity graph (and semi-metric stats when needed) itself.
  static Recommender build(const BinaryRelation& train, const RecommenderConfig& config,
                           const DualAlgebra& algebra, unsigned threads = 1);

  ScoredRecommendations recommend(Index user) const;

  const ProximityGraph& graph() const noexcept { return graph_; }
  const RecommenderConfig& config() const noexcept { return config_; }
  const std::optional<EnhancementSummary>& enhancement() const noexcept { return enhancement_; }

private:
  const BinaryRelation* train_;
  RecommenderConfig config_;
  ProximityGraph graph_;
  std::optional<EnhancementSummary> enhancement_;
};

/// Ranking TSV `user_id \t rank \t item_id \t score`, ranks starting at 1.
/// `limit` caps rows per user (0 = all).
void write_ranking(std::ostream& out, const ScoredRecommendations& recs,
                   const BinaryRelation& relation, std::size_t limit = 0);

}  // namespace smrec
