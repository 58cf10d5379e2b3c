#pragma once

#include <cstddef>

#include "smrec/algebra.hpp"
#include "smrec/graph.hpp"

namespace smrec {

struct ClosureOptions {
  /// Maximum number of compositions for the fixed-point kernels; 0 means the
  /// vertex count.
  std::size_t max_iterations = 0;
  /// Absolute tolerance for detecting the fixed point.
  double tolerance = 1e-12;
  unsigned threads = 1;
};

/// d_ij = phi(p_ij) on present edges; absent proximity becomes absent
/// (infinite) distance.
DistanceGraph to_distance(const ProximityGraph& graph, const DualAlgebra& algebra);

/// p_ij = phi_inverse(d_ij) on present edges; infinite distance becomes an
/// absent edge.
ProximityGraph to_proximity(const DistanceGraph& graph, const DualAlgebra& algebra);

/// Transitive closure P^inf. Uses the shortest-path kernel through phi when the
/// algebra admits one, otherwise repeated composition.
ProximityGraph transitive_closure(const ProximityGraph& graph, const DualAlgebra& algebra,
                                  const ClosureOptions& options = {});

/// Distance closure D^inf, dispatched the same way.
DistanceGraph distance_closure(const DistanceGraph& graph, const DualAlgebra& algebra,
                               const ClosureOptions& options = {});

/// Repeats P <- P o P with p'_ij = OR_k AND(p_ik, p_kj) until no entry moves by
/// more than the tolerance. Dense, O(n^3) per composition. Throws
/// ConvergenceError when the iteration budget runs out.
ProximityGraph fixed_point_transitive_closure(const ProximityGraph& graph,
                                              const DualAlgebra& algebra,
                                              const ClosureOptions& options = {});

/// Distance-side counterpart: d'_ij = f_k g(d_ik, d_kj).
DistanceGraph fixed_point_distance_closure(const DistanceGraph& graph, const DualAlgebra& algebra,
                                           const ClosureOptions& options = {});

/// Best-first search from every source over the sparse adjacency, with path
/// length combined by + (metric) or max (ultrametric). Sources run in parallel.
/// Throws UsageError for ClosureKernel::fixed_point.
DistanceGraph shortest_path_closure(const DistanceGraph& graph, ClosureKernel kernel,
                                    unsigned threads = 1);

}  // namespace smrec
