#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smrec/recommenders.hpp"

namespace smrec {

struct RetrievalScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision, recall and F1 of the first n ranked items against the test set.
/// `test_items` must be sorted. Empty when the test set is empty.
std::optional<RetrievalScores> precision_recall_f1(const ScoredRecommendations& recs,
                                                   std::span<const Index> test_items,
                                                   std::size_t n);

/// Concordance counts over (test, non-test) pairs of ranked items.
struct AgreementCount {
  double agreements = 0.0;  ///< tied scores count one half
  std::uint64_t pairs = 0;

  double ratio() const { return agreements / static_cast<double>(pairs); }
};

/// Degree of agreement: among pairs (a, b) of ranked items with a in the test
/// set and b not, the share where a scores above b. Depends on scores only
/// through their order. Empty when no such pair exists. `test_items` must be
/// sorted; test items absent from the ranking are ignored.
std::optional<AgreementCount> degree_of_agreement(const ScoredRecommendations& recs,
                                                  std::span<const Index> test_items);

struct UserEvaluation {
  ExternalId user = 0;
  std::size_t test_size = 0;
  RetrievalScores retrieval;
  /// Absent when the user had no (test, non-test) pair.
  std::optional<AgreementCount> agreement;
};

struct AggregateMetrics {
  double precision = 0.0;  ///< macro averages over included users
  double recall = 0.0;
  double f1 = 0.0;
  double agreement_macro = 0.0;
  double agreement_pooled = 0.0;  ///< total agreements / total pairs
  std::size_t included = 0;
  std::size_t agreement_included = 0;
  std::size_t excluded = 0;  ///< users with an empty test set or training profile
};

struct EvalReport {
  std::vector<UserEvaluation> per_user;
  AggregateMetrics aggregate;
  /// Ordered key/value echo of the configuration that produced the report.
  std::vector<std::pair<std::string, std::string>> config_echo;
};

/// Evaluates one user. Empty when the test set is empty.
std::optional<UserEvaluation> evaluate_user(const ScoredRecommendations& recs,
                                            std::span<const Index> test_items, std::size_t n,
                                            ExternalId user);

/// Macro averages plus pooled agreement. `excluded` counts users dropped
/// before evaluation. Throws ComputeError when no user is included.
EvalReport aggregate(std::vector<UserEvaluation> per_user, std::size_t excluded = 0);

}  // namespace smrec
