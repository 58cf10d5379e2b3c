#include "smrec/semimetric.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "smrec/parallel.hpp"

namespace smrec {

namespace {

// Relative slack below which a closed distance counts as equal to the direct
// one; shortest-path sums can differ from a direct edge in the last ulp.
constexpr double kSemiMetricSlack = 1e-12;
constexpr double kConsistencySlack = 1e-9;

}  // namespace

std::optional<double> mean_direct_distance(const DistanceGraph& graph, Index vertex) {
  const auto edges = graph.edges().neighbors(vertex);
  if (edges.empty()) return std::nullopt;
  double sum = 0.0;
  for (const Edge& e : edges) sum += e.weight;
  return sum / static_cast<double>(edges.size());
}

std::vector<SemiMetricEdgeStats> semimetric_stats(const DistanceGraph& direct,
                                                  const DistanceGraph& closed, unsigned threads) {
  const std::size_t n = direct.size();
  if (closed.size() != n) throw ComputeError("closed graph size differs from direct graph");

  std::vector<std::optional<double>> means(n);
  for (Index v = 0; v < n; ++v) means[v] = mean_direct_distance(direct, v);

  std::vector<std::vector<SemiMetricEdgeStats>> per_row(n);
  parallel_for(n, threads, [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    const auto d_row = direct.edges().neighbors(i);
    const auto c_row = closed.edges().neighbors(i);
    auto d_it = std::lower_bound(d_row.begin(), d_row.end(), i + 1,
                                 [](const Edge& e, Index v) { return e.to < v; });
    auto c_it = std::lower_bound(c_row.begin(), c_row.end(), i + 1,
                                 [](const Edge& e, Index v) { return e.to < v; });

    auto& out = per_row[i];
    for (; c_it != c_row.end(); ++c_it) {
      const Index j = c_it->to;
      if (d_it != d_row.end() && d_it->to < j)
        throw ComputeError("direct edge (" + std::to_string(i) + ", " + std::to_string(d_it->to) +
                           ") is missing from the closed graph");
      double d = kInfinity;
      if (d_it != d_row.end() && d_it->to == j) {
        d = d_it->weight;
        ++d_it;
      }
      const double shortest = c_it->weight;
      if (shortest > d + kConsistencySlack * std::max(1.0, d))
        throw ComputeError("closed distance " + format_number(shortest) + " exceeds direct " +
                           format_number(d) + " on (" + std::to_string(i) + ", " +
                           std::to_string(j) + ")");
      if (!(shortest > 0.0) || !(d - shortest > kSemiMetricSlack * std::max(1.0, shortest)))
        continue;
      if (!means[i] || !means[j])
        throw ComputeError("semi-metric pair (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") touches a vertex without direct edges");
      out.push_back({i, j, d, shortest, d / shortest, *means[i] / shortest, *means[j] / shortest});
    }
    if (d_it != d_row.end())
      throw ComputeError("direct edge (" + std::to_string(i) + ", " + std::to_string(d_it->to) +
                         ") is missing from the closed graph");
  });

  std::size_t total = 0;
  for (const auto& r : per_row) total += r.size();
  std::vector<SemiMetricEdgeStats> stats;
  stats.reserve(total);
  for (auto& r : per_row) stats.insert(stats.end(), r.begin(), r.end());
  return stats;
}

void ThresholdPolicy::validate() const {
  switch (kind) {
    case ThresholdKind::explicit_value:
      if (!(value > 0.0)) throw UsageError("explicit b threshold must be > 0");
      break;
    case ThresholdKind::percentile:
    case ThresholdKind::power_law_cutoff:
      if (!(value > 0.0 && value < 1.0)) throw UsageError("b percentile must lie in (0, 1)");
      break;
  }
}

std::string ThresholdPolicy::describe() const {
  switch (kind) {
    case ThresholdKind::explicit_value:
      return "explicit:" + format_number(value);
    case ThresholdKind::percentile:
      return "percentile:" + format_number(value);
    case ThresholdKind::power_law_cutoff:
      return "powerlaw(fallback " + format_number(value) + ")";
  }
  return "";
}

double upper_quantile(std::vector<double> samples, double fraction) {
  if (samples.empty()) throw ComputeError("quantile of an empty sample");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw UsageError("quantile fraction must lie in (0, 1]");
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  // Guard against 1/3 * 6 landing a hair above 2.
  auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, n);
  return samples[n - keep];
}

std::optional<PowerLawFit> fit_power_law_tail(std::vector<double> samples,
                                              std::size_t max_candidates, std::size_t min_tail) {
  std::erase_if(samples, [](double x) { return !(x > 0.0) || std::isinf(x); });
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  min_tail = std::max<std::size_t>(min_tail, 2);
  if (n < min_tail || max_candidates == 0) return std::nullopt;

  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(samples[i]);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + logs[i];

  // Candidate cutoffs at evenly spaced order statistics, snapped to the first
  // occurrence of each value so ties stay inside the tail.
  std::vector<std::size_t> starts;
  const std::size_t span = n - min_tail;
  const std::size_t count = std::min(max_candidates, span + 1);
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t pos = count == 1 ? 0 : c * span / (count - 1);
    const auto first = static_cast<std::size_t>(
        std::lower_bound(samples.begin(), samples.end(), samples[pos]) - samples.begin());
    if (starts.empty() || starts.back() != first) starts.push_back(first);
  }

  std::optional<PowerLawFit> best;
  for (std::size_t s : starts) {
    const std::size_t tail = n - s;
    if (tail < min_tail) continue;
    const double log_min = logs[s];
    const double sum = suffix[s] - static_cast<double>(tail) * log_min;
    if (!(sum > 0.0)) continue;
    const double alpha = 1.0 + static_cast<double>(tail) / sum;

    double ks = 0.0;
    for (std::size_t i = s; i < n; ++i) {
      const double model = 1.0 - std::exp((1.0 - alpha) * (logs[i] - log_min));
      const double above = static_cast<double>(i - s + 1) / static_cast<double>(tail);
      const double below = static_cast<double>(i - s) / static_cast<double>(tail);
      ks = std::max({ks, std::abs(above - model), std::abs(model - below)});
    }
    if (!best || ks < best->ks_distance) best = PowerLawFit{samples[s], alpha, ks, tail};
  }
  return best;
}

namespace {

std::vector<double> pooled_b(std::span<const SemiMetricEdgeStats> stats) {
  std::vector<double> pooled;
  pooled.reserve(stats.size() * 2);
  for (const auto& r : stats) {
    pooled.push_back(r.b_ij);
    pooled.push_back(r.b_ji);
  }
  return pooled;
}

}  // namespace

ThresholdSelection select_threshold(std::span<const SemiMetricEdgeStats> stats,
                                    const ThresholdPolicy& policy) {
  policy.validate();
  ThresholdSelection out;
  out.used = policy.kind;
  if (policy.kind == ThresholdKind::explicit_value) {
    out.value = policy.value;
    return out;
  }
  if (stats.empty()) throw ComputeError("no semi-metric pairs to choose a b threshold from");

  auto pooled = pooled_b(stats);
  if (policy.kind == ThresholdKind::power_law_cutoff) {
    out.fit = fit_power_law_tail(pooled);
    if (out.fit) {
      out.value = out.fit->x_min;
      return out;
    }
    out.used = ThresholdKind::percentile;
    out.warnings.push_back("power-law fit failed on the b distribution; using upper " +
                           format_number(policy.value) + " quantile");
  }
  out.value = upper_quantile(std::move(pooled), policy.value);
  return out;
}

EnhancementResult enhance(const ProximityGraph& graph, std::span<const SemiMetricEdgeStats> stats,
                          const DualAlgebra& algebra, double threshold, QualificationRule rule) {
  if (!(threshold >= 0.0)) throw UsageError("enhancement threshold must be >= 0");
  const std::size_t n = graph.size();

  std::vector<std::vector<Edge>> updates(n);
  std::size_t inserted = 0;
  for (const auto& r : stats) {
    const double b = rule == QualificationRule::either ? std::max(r.b_ij, r.b_ji)
                                                       : std::min(r.b_ij, r.b_ji);
    if (!(b >= threshold)) continue;
    if (r.i >= n || r.j >= n) throw ComputeError("stats refer to a vertex outside the graph");
    const double p = algebra.phi_inverse(r.shortest);
    updates[r.i].push_back({r.j, p});
    updates[r.j].push_back({r.i, p});
    ++inserted;
  }

  std::vector<std::vector<Edge>> rows(n);
  for (Index v = 0; v < n; ++v) {
    const auto base = graph.edges().neighbors(v);
    auto& extra = updates[v];
    std::sort(extra.begin(), extra.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    auto& row = rows[v];
    row.reserve(base.size() + extra.size());
    auto b_it = base.begin();
    for (const Edge& e : extra) {
      while (b_it != base.end() && b_it->to < e.to) row.push_back(*b_it++);
      if (b_it != base.end() && b_it->to == e.to) ++b_it;
      row.push_back(e);
    }
    row.insert(row.end(), b_it, base.end());
  }
  return {ProximityGraph(SymmetricGraph::from_rows(std::move(rows)), graph.active_flags(),
                         graph.labels()),
          inserted};
}

std::vector<SemiMetricEdgeStats> analyze(const ProximityGraph& graph, const DualAlgebra& algebra,
                                         const ClosureOptions& options) {
  const DistanceGraph direct = to_distance(graph, algebra);
  const DistanceGraph closed = distance_closure(direct, algebra, options);
  return semimetric_stats(direct, closed, options.threads);
}

ProximityGraph enhance(const ProximityGraph& graph, const DualAlgebra& algebra, double threshold,
                       QualificationRule rule, const ClosureOptions& options) {
  const auto stats = analyze(graph, algebra, options);
  return enhance(graph, stats, algebra, threshold, rule).graph;
}

void write_stats(std::ostream& out, std::span<const SemiMetricEdgeStats> stats,
                 const std::vector<ExternalId>& labels) {
  for (const auto& r : stats) {
    out << labels.at(r.i) << '\t' << labels.at(r.j) << '\t' << format_number(r.direct) << '\t'
        << format_number(r.shortest) << '\t' << format_number(r.s) << '\t'
        << format_number(r.b_ij) << '\t' << format_number(r.b_ji) << '\n';
  }
}

}  // namespace smrec
