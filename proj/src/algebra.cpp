#include "smrec/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "smrec/common.hpp"

namespace smrec {

double proximity_to_distance(double p) {
  if (p <= 0.0) return kInfinity;
  return 1.0 / p - 1.0;
}

double distance_to_proximity(double d) {
  if (std::isinf(d)) return 0.0;
  return 1.0 / (d + 1.0);
}

double hamacher_product(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b / (a + b - a * b);
}

DualAlgebra metric_algebra() {
  return {"metric",
          hamacher_product,
          [](double a, double b) { return std::max(a, b); },
          [](double x, double y) { return x + y; },
          [](double x, double y) { return std::min(x, y); },
          proximity_to_distance,
          distance_to_proximity,
          ClosureKernel::shortest_path_sum};
}

DualAlgebra max_min_algebra() {
  return {"max-min",
          [](double a, double b) { return std::min(a, b); },
          [](double a, double b) { return std::max(a, b); },
          [](double x, double y) { return std::max(x, y); },
          [](double x, double y) { return std::min(x, y); },
          proximity_to_distance,
          distance_to_proximity,
          ClosureKernel::shortest_path_max};
}

DualAlgebra algebra_by_name(const std::string& name) {
  if (name == "metric") return metric_algebra();
  if (name == "max-min") return max_min_algebra();
  throw UsageError("unknown algebra '" + name + "' (expected metric or max-min)");
}

namespace {

double mismatch(double got, double expected) {
  if (std::isinf(got) || std::isinf(expected)) return got == expected ? 0.0 : kInfinity;
  return std::abs(got - expected) / std::max(1.0, std::abs(expected));
}

}  // namespace

AlgebraCheck check_algebra(const DualAlgebra& a, std::size_t samples, double tolerance,
                           std::uint64_t seed) {
  AlgebraCheck check;
  auto record = [&](double err, const char* what, double x, double y) {
    if (err > check.max_error) check.max_error = err;
    if (err > tolerance && check.ok) {
      check.ok = false;
      std::ostringstream msg;
      msg << what << " fails at (" << x << ", " << y << "): relative error " << err;
      check.detail = msg.str();
    }
  };

  record(mismatch(a.phi(1.0), 0.0), "phi(1) = 0", 1.0, 1.0);
  if (!std::isinf(a.phi(0.0))) record(kInfinity, "phi(0) = inf", 0.0, 0.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    // Proximities away from 0 keep the distances finite and well conditioned.
    const double p = 0.01 + 0.99 * unit(rng);
    const double q = 0.01 + 0.99 * unit(rng);
    const double x = a.phi(p);
    const double y = a.phi(q);
    const double px = a.phi_inverse(x);
    const double py = a.phi_inverse(y);

    record(mismatch(px, p), "phi_inverse(phi(p)) = p", p, p);
    record(mismatch(a.td_norm(x, y), a.phi(a.conjunction(px, py))), "g = phi . and", x, y);
    record(mismatch(a.td_conorm(x, y), a.phi(a.disjunction(px, py))), "f = phi . or", x, y);
    record(mismatch(a.conjunction(p, q), a.phi_inverse(a.td_norm(a.phi(p), a.phi(q)))),
           "and = phi^-1 . g", p, q);
    record(mismatch(a.disjunction(p, q), a.phi_inverse(a.td_conorm(a.phi(p), a.phi(q)))),
           "or = phi^-1 . f", p, q);
  }
  return check;
}

}  // namespace smrec
