#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace smrec {

using BinaryOp = std::function<double(double, double)>;
using UnaryMap = std::function<double(double)>;

/// Which distance-closure kernel an algebra admits. Algebras whose path
/// combination is monotone and whose path selection is `min` can be closed by
/// per-source best-first search instead of repeated composition.
enum class ClosureKernel {
  fixed_point,       ///< generic repeated composition
  shortest_path_sum, ///< f = min, g = +
  shortest_path_max, ///< f = min, g = max
};

/// Proximity-side (conjunction, disjunction) pair, distance-side
/// (td_norm, td_conorm) pair, and the decreasing bijection phi: [0,1] -> [0,inf]
/// linking them.
struct DualAlgebra {
  std::string name;
  BinaryOp conjunction;  ///< T-norm on [0, 1]
  BinaryOp disjunction;  ///< T-conorm on [0, 1]
  BinaryOp td_norm;      ///< g: combines distances along a path
  BinaryOp td_conorm;    ///< f: selects among alternative paths
  UnaryMap phi;          ///< proximity -> distance
  UnaryMap phi_inverse;  ///< distance -> proximity
  ClosureKernel kernel = ClosureKernel::fixed_point;
};

/// d = 1/p - 1, with phi(0) = inf and phi_inverse(inf) = 0.
double proximity_to_distance(double p);
double distance_to_proximity(double d);

/// ab / (a + b - ab), defined as 0 when either argument is 0.
double hamacher_product(double a, double b);

/// f = min, g = +, so the distance closure is all-pairs shortest paths.
/// The isomorphic proximity side is (max, Hamacher product).
DualAlgebra metric_algebra();

/// The classic fuzzy (max, min) closure. Under the same phi the distance side
/// is (min, max), the ultrametric closure.
DualAlgebra max_min_algebra();

/// Looks up a shipped algebra by name ("metric" or "max-min"); throws
/// UsageError otherwise.
DualAlgebra algebra_by_name(const std::string& name);

struct AlgebraCheck {
  bool ok = true;
  double max_error = 0.0;
  std::string detail;
};

/// Samples random arguments and checks that the distance-side operations are
/// the images of the proximity-side ones under phi:
///   g(x, y) = phi(and(phi^-1 x, phi^-1 y)),  f(x, y) = phi(or(phi^-1 x, phi^-1 y))
/// plus phi(1) = 0 and phi_inverse(phi(p)) = p. Errors are measured relative
/// to max(1, |expected|).
AlgebraCheck check_algebra(const DualAlgebra& algebra, std::size_t samples = 2000,
                           double tolerance = 1e-9, std::uint64_t seed = 7);

}  // namespace smrec
