#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smrec/evaluation.hpp"

using namespace smrec;

namespace {

/// Ranking built from explicit scores over items 0..n-1, nothing excluded.
ScoredRecommendations from_scores(std::vector<double> scores) {
  return rank_scores(0, std::move(scores), {}, true);
}

/// Pairwise enumeration of the agreement definition.
double brute_agreement(const ScoredRecommendations& recs, const std::vector<Index>& test) {
  double agree = 0.0;
  std::size_t pairs = 0;
  auto in_test = [&](Index i) { return std::binary_search(test.begin(), test.end(), i); };
  for (Index a : recs.ranking) {
    if (!in_test(a)) continue;
    for (Index b : recs.ranking) {
      if (in_test(b)) continue;
      ++pairs;
      if (recs.scores[a] > recs.scores[b]) agree += 1.0;
      else if (recs.scores[a] == recs.scores[b]) agree += 0.5;
    }
  }
  return agree / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("two of three test items in the top five") {
  // x=0, y=2, z=5 with the list [0, 1, 2, 3, 4, 5, ...]
  const auto recs = from_scores({10, 9, 8, 7, 6, 5, 4});
  const std::vector<Index> test{0, 2, 5};
  const auto r = precision_recall_f1(recs, test, 5);
  REQUIRE(r.has_value());
  CHECK(r->recall == 2.0 / 3.0);
  CHECK(r->precision == 2.0 / 5.0);
  CHECK(r->f1 == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("perfect and empty retrieval") {
  const auto recs = from_scores({5, 4, 3, 2, 1});
  const std::vector<Index> top{0, 1, 2};
  const auto perfect = precision_recall_f1(recs, top, 3);
  CHECK(perfect->precision == 1.0);
  CHECK(perfect->recall == 1.0);
  CHECK(perfect->f1 == 1.0);
  const std::vector<Index> bottom{3, 4};
  const auto miss = precision_recall_f1(recs, bottom, 3);
  CHECK(miss->precision == 0.0);
  CHECK(miss->recall == 0.0);
  CHECK(miss->f1 == 0.0);
  CHECK_FALSE(precision_recall_f1(recs, {}, 3).has_value());
  CHECK_THROWS_AS(precision_recall_f1(recs, top, 0), UsageError);
}

TEST_CASE("agreement of a three-item ranking") {
  // a1=0, b1=1, a2=2
  const auto recs = from_scores({3, 2, 1});
  const std::vector<Index> test{0, 2};
  const auto d = degree_of_agreement(recs, test);
  REQUIRE(d.has_value());
  CHECK(d->pairs == 2);
  CHECK(d->ratio() == 0.5);
}

TEST_CASE("perfect and reversed orderings") {
  const std::vector<Index> test{0, 1};
  CHECK(degree_of_agreement(from_scores({4, 3, 2, 1}), test)->ratio() == 1.0);
  CHECK(degree_of_agreement(from_scores({1, 2, 3, 4}), test)->ratio() == 0.0);
  CHECK(degree_of_agreement(from_scores({1, 1, 1, 1}), test)->ratio() == 0.5);
  const std::vector<Index> all{0, 1, 2, 3};
  CHECK_FALSE(degree_of_agreement(from_scores({4, 3, 2, 1}), all).has_value());
}

TEST_CASE("agreement matches pair enumeration and ignores monotone rescaling") {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> level(0, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 30;
    std::vector<double> scores(n);
    for (auto& s : scores) s = level(rng) / 6.0;
    std::vector<Index> test;
    for (Index i = 0; i < n; ++i)
      if (unit(rng) < 0.3) test.push_back(i);
    const auto recs = from_scores(scores);
    const auto d = degree_of_agreement(recs, test);
    if (test.empty() || test.size() == n) {
      CHECK_FALSE(d.has_value());
      continue;
    }
    CHECK(d->ratio() == doctest::Approx(brute_agreement(recs, test)).epsilon(1e-12));

    std::vector<double> warped(scores);
    for (auto& s : warped) s = std::exp(3.0 * s) - 2.0;
    CHECK(degree_of_agreement(from_scores(warped), test)->ratio() == d->ratio());

    // A new test item strictly at the bottom never helps.
    std::vector<double> extended(scores);
    extended.push_back(-1.0);
    auto more = test;
    more.push_back(static_cast<Index>(n));
    CHECK(degree_of_agreement(from_scores(extended), more)->ratio() <= d->ratio() + 1e-15);

    const auto r = precision_recall_f1(recs, test, 1 + trial % 7);
    CHECK(r->f1 <= std::max(r->precision, r->recall) + 1e-15);
  }
}

TEST_CASE("macro and pooled aggregates") {
  UserEvaluation a{1, 3, {}, AgreementCount{10.0, 10}};
  UserEvaluation b{2, 3, {}, AgreementCount{15.0, 30}};
  const auto report = aggregate({a, b});
  CHECK(report.aggregate.agreement_macro == 0.75);
  CHECK(report.aggregate.agreement_pooled == 0.625);
  CHECK(report.aggregate.included == 2);

  const auto single = aggregate({b}, 4);
  CHECK(single.aggregate.agreement_macro == 0.5);
  CHECK(single.aggregate.agreement_pooled == 0.5);
  CHECK(single.aggregate.excluded == 4);

  CHECK_THROWS_AS(aggregate({}), ComputeError);
}

TEST_CASE("users without agreement pairs still count for F1") {
  UserEvaluation a{1, 1, {1.0, 1.0, 1.0}, std::nullopt};
  UserEvaluation b{2, 1, {0.0, 0.0, 0.0}, AgreementCount{1.0, 2}};
  const auto report = aggregate({a, b});
  CHECK(report.aggregate.f1 == 0.5);
  CHECK(report.aggregate.agreement_included == 1);
  CHECK(report.aggregate.agreement_macro == 0.5);
}
