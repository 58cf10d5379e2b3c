#include "smrec/evaluation.hpp"

#include <algorithm>

namespace smrec {

namespace {

bool in_sorted(std::span<const Index> sorted, Index v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

}  // namespace

std::optional<RetrievalScores> precision_recall_f1(const ScoredRecommendations& recs,
                                                   std::span<const Index> test_items,
                                                   std::size_t n) {
  if (n < 1) throw UsageError("top-n must be at least 1");
  if (test_items.empty()) return std::nullopt;

  const std::size_t top = std::min(n, recs.ranking.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < top; ++r)
    if (in_sorted(test_items, recs.ranking[r])) ++hits;

  RetrievalScores out;
  out.recall = static_cast<double>(hits) / static_cast<double>(test_items.size());
  out.precision = top ? static_cast<double>(hits) / static_cast<double>(top) : 0.0;
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

std::optional<AgreementCount> degree_of_agreement(const ScoredRecommendations& recs,
                                                  std::span<const Index> test_items) {
  if (test_items.empty()) return std::nullopt;

  // Ranked items grouped by score, walked from the lowest score up: each test
  // item agrees with every non-test item in a strictly lower group and half
  // agrees with non-test items in its own group.
  std::vector<std::pair<double, bool>> ranked;
  ranked.reserve(recs.ranking.size());
  for (Index item : recs.ranking) ranked.emplace_back(recs.scores.at(item), in_sorted(test_items, item));
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  AgreementCount out;
  std::uint64_t tests = 0, others = 0, others_below = 0;
  for (std::size_t g = 0; g < ranked.size();) {
    std::size_t end = g;
    std::uint64_t t = 0, u = 0;
    while (end < ranked.size() && ranked[end].first == ranked[g].first) {
      (ranked[end].second ? t : u) += 1;
      ++end;
    }
    out.agreements += static_cast<double>(t * others_below) + 0.5 * static_cast<double>(t * u);
    others_below += u;
    tests += t;
    others += u;
    g = end;
  }
  out.pairs = tests * others;
  if (out.pairs == 0) return std::nullopt;
  return out;
}

std::optional<UserEvaluation> evaluate_user(const ScoredRecommendations& recs,
                                            std::span<const Index> test_items, std::size_t n,
                                            ExternalId user) {
  auto retrieval = precision_recall_f1(recs, test_items, n);
  if (!retrieval) return std::nullopt;
  return UserEvaluation{user, test_items.size(), *retrieval, degree_of_agreement(recs, test_items)};
}

EvalReport aggregate(std::vector<UserEvaluation> per_user, std::size_t excluded) {
  if (per_user.empty()) throw ComputeError("no user could be evaluated");

  EvalReport report;
  auto& agg = report.aggregate;
  double agreements = 0.0;
  std::uint64_t pairs = 0;
  for (const auto& u : per_user) {
    agg.precision += u.retrieval.precision;
    agg.recall += u.retrieval.recall;
    agg.f1 += u.retrieval.f1;
    if (u.agreement) {
      agg.agreement_macro += u.agreement->ratio();
      agreements += u.agreement->agreements;
      pairs += u.agreement->pairs;
      ++agg.agreement_included;
    }
  }
  agg.included = per_user.size();
  agg.excluded = excluded;
  const auto count = static_cast<double>(agg.included);
  agg.precision /= count;
  agg.recall /= count;
  agg.f1 /= count;
  if (agg.agreement_included) {
    agg.agreement_macro /= static_cast<double>(agg.agreement_included);
    agg.agreement_pooled = agreements / static_cast<double>(pairs);
  }
  report.per_user = std::move(per_user);
  return report;
}

}  // namespace smrec
