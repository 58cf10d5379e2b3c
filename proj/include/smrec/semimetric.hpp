#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smrec/algebra.hpp"
#include "smrec/closure.hpp"
#include "smrec/graph.hpp"

namespace smrec {

/// Ratios for one pair whose closed distance undercuts the direct one:
/// 0 < shortest < direct. `direct` is infinite when the pair has no edge.
struct SemiMetricEdgeStats {
  Index i;  ///< i < j
  Index j;
  double direct;
  double shortest;
  double s;     ///< direct / shortest, infinite without a direct edge
  double b_ij;  ///< mean direct distance of i / shortest
  double b_ji;  ///< mean direct distance of j / shortest

  friend bool operator==(const SemiMetricEdgeStats&, const SemiMetricEdgeStats&) = default;
};

/// Mean of the finite direct distances from `vertex` to other vertices.
/// Empty for a vertex with no edges.
std::optional<double> mean_direct_distance(const DistanceGraph& graph, Index vertex);

/// One record per pair (i < j) with 0 < closed_ij < direct_ij, in row-major
/// order. `closed` must be the closure of `direct`; a closed distance above the
/// direct one (or a direct edge missing from `closed`) throws ComputeError.
std::vector<SemiMetricEdgeStats> semimetric_stats(const DistanceGraph& direct,
                                                  const DistanceGraph& closed,
                                                  unsigned threads = 1);

enum class ThresholdKind { explicit_value, percentile, power_law_cutoff };

/// How the b-ratio enhancement threshold is chosen.
///   explicit_value:   `value` is the threshold (> 0, may be infinite)
///   percentile:       `value` in (0, 1) is the upper tail fraction kept
///   power_law_cutoff: fit a power-law tail; `value` is the fallback percentile
struct ThresholdPolicy {
  ThresholdKind kind = ThresholdKind::power_law_cutoff;
  double value = 0.1;

  static ThresholdPolicy explicit_value(double threshold) {
    return {ThresholdKind::explicit_value, threshold};
  }
  static ThresholdPolicy percentile(double fraction) { return {ThresholdKind::percentile, fraction}; }
  static ThresholdPolicy power_law(double fallback_fraction = 0.1) {
    return {ThresholdKind::power_law_cutoff, fallback_fraction};
  }

  /// Throws UsageError when `value` is out of range for `kind`.
  void validate() const;
  std::string describe() const;
};

/// Continuous power-law tail p(x) ~ x^-alpha for x >= x_min, chosen by
/// minimising the Kolmogorov-Smirnov distance over candidate cutoffs with the
/// maximum-likelihood exponent at each candidate.
struct PowerLawFit {
  double x_min = 0.0;
  double alpha = 0.0;
  double ks_distance = 0.0;
  std::size_t tail_size = 0;
};

/// Returns nothing when the sample cannot support a fit (too small, or no
/// spread above any candidate cutoff). At most `max_candidates` cutoffs,
/// spread over the sample quantiles, are tried; each leaves at least
/// `min_tail` points in the tail.
std::optional<PowerLawFit> fit_power_law_tail(std::vector<double> samples,
                                              std::size_t max_candidates = 100,
                                              std::size_t min_tail = 50);

/// Smallest value of the top ceil(fraction * N) samples.
double upper_quantile(std::vector<double> samples, double fraction);

struct ThresholdSelection {
  double value = kInfinity;
  ThresholdKind used = ThresholdKind::explicit_value;
  std::optional<PowerLawFit> fit;
  std::vector<std::string> warnings;
};

/// Chooses the threshold from the pooled {b_ij, b_ji} distribution. Quantile
/// and power-law policies need at least one record (ComputeError otherwise). A
/// power-law fit that fails falls back to the percentile `policy.value` with a
/// warning.
ThresholdSelection select_threshold(std::span<const SemiMetricEdgeStats> stats,
                                    const ThresholdPolicy& policy);

/// When a pair qualifies for insertion, given its two directed b ratios.
enum class QualificationRule { either, both };

struct EnhancementResult {
  ProximityGraph graph;
  std::size_t inserted = 0;
};

/// Raises every qualifying pair to its closure proximity phi_inverse(shortest);
/// all other weights are copied unchanged.
EnhancementResult enhance(const ProximityGraph& graph, std::span<const SemiMetricEdgeStats> stats,
                          const DualAlgebra& algebra, double threshold,
                          QualificationRule rule = QualificationRule::either);

/// Closure, stats and insertion in one call, for one-off use. Pipelines that
/// try several thresholds should compute the stats once.
ProximityGraph enhance(const ProximityGraph& graph, const DualAlgebra& algebra, double threshold,
                       QualificationRule rule = QualificationRule::either,
                       const ClosureOptions& options = {});

/// Distance conversion, closure and stats for a proximity graph.
std::vector<SemiMetricEdgeStats> analyze(const ProximityGraph& graph, const DualAlgebra& algebra,
                                         const ClosureOptions& options = {});

/// TSV `i \t j \t direct \t shortest \t s \t b_ij \t b_ji` with external ids
/// and `inf` tokens, one record per line.
void write_stats(std::ostream& out, std::span<const SemiMetricEdgeStats> stats,
                 const std::vector<ExternalId>& labels);

}  // namespace smrec
