#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace qtflux {

enum class EdgeTreatment { none, sqrt_substitution };

// One piece of an integration domain. Either end may be infinite.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  EdgeTreatment lo_edge = EdgeTreatment::none;
  EdgeTreatment hi_edge = EdgeTreatment::none;
};

using Domain = std::vector<Interval>;

struct QuadratureSpec {
  double tol = 1e-10;
  double rel_tol = 0.0;
  double tail_eps = 1e-14;
  double max_range = 1e7;
  std::size_t max_subdivisions = 5000;
  // Points where the integrand has kinks or jumps; panels are split there and
  // tail probing starts beyond them.
  std::vector<double> breakpoints;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  std::size_t panels = 0;
  // Finite cutoffs chosen by the tail monitor, one pair per domain interval.
  std::vector<Interval> truncated_domain;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace quadrature {

QuadratureResult integrate(const std::function<double(double)>& f, const Domain& domain,
                           const QuadratureSpec& spec = {});

Domain real_line();
// ℝ \ [−a, a] as two half-lines, optionally with square-root edges.
Domain gapped_line(double a, EdgeTreatment edges = EdgeTreatment::none);

}  // namespace quadrature
}  // namespace qtflux
