#include "qtflux/fiber_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux {

ComplexMatrix FiberModel::density_excess(double lambda, const Occupation& reference) const {
  ComplexMatrix rho = density(lambda);
  rho -= reference(lambda) * linops::identity(rho.rows());
  return rho;
}

Fiber FiberModel::fiber(double lambda) const {
  return {s_matrix(lambda), charge(lambda), density(lambda)};
}

FunctionFiberModel::FunctionFiberModel(Domain support, std::size_t dim, MatrixFn s, MatrixFn q,
                                       MatrixFn rho)
    : support_(std::move(support)), dim_(dim), s_(std::move(s)), q_(std::move(q)),
      rho_(std::move(rho)) {}

std::size_t FunctionFiberModel::fiber_dim(double lambda) const {
  for (const Interval& iv : support_) {
    if (lambda >= iv.lo && lambda <= iv.hi) return dim_;
  }
  return 0;
}

double lb_integrand(const ComplexMatrix& s, const ComplexMatrix& q, const ComplexMatrix& rho) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n || q.rows() != n || q.cols() != n || rho.rows() != n || rho.cols() != n) {
    std::ostringstream msg;
    msg << "fiber shapes S " << s.rows() << "x" << s.cols() << ", Q " << q.rows() << "x"
        << q.cols() << ", rho " << rho.rows() << "x" << rho.cols();
    raise(ErrorCode::FiberMismatch, msg.str());
  }
  return (rho * (q - s.adjoint() * q * s)).trace().real();
}

namespace {

constexpr const char* kScAssumption =
    "assumed: the Hamiltonian has no singular continuous spectrum (not checked)";

std::vector<double> merged_breakpoints(const FiberModel& model, const QuadratureSpec& quad) {
  std::vector<double> b = quad.breakpoints;
  const auto extra = model.breakpoints();
  b.insert(b.end(), extra.begin(), extra.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

template <typename DensityFn>
CurrentResult run_current(const FiberModel& model, const Domain& domain,
                          const QuadratureSpec& quad, DensityFn&& density_of) {
  CurrentResult result;
  QuadratureSpec spec = quad;
  spec.breakpoints = merged_breakpoints(model, quad);
  auto integrand = [&](double lambda) {
    if (model.fiber_dim(lambda) == 0) return 0.0;
    Fiber fib = model.fiber(lambda);
    const ComplexMatrix rho = density_of(lambda, fib);
    const double res = linops::unitarity_residual(fib.s);
    result.max_unitarity_residual = std::max(result.max_unitarity_residual, res);
    const double value = lb_integrand(fib.s, fib.q, rho) / kTwoPi;
    result.samples.emplace_back(lambda, value);
    return value;
  };
  const QuadratureResult qr = quadrature::integrate(integrand, domain, spec);
  std::sort(result.samples.begin(), result.samples.end());
  result.value = qr.value;
  result.error_estimate = qr.error_estimate;
  result.evaluations = qr.evaluations;
  result.diagnostics.emplace_back(kScAssumption);
  std::ostringstream msg;
  msg << "max unitarity residual " << result.max_unitarity_residual;
  result.diagnostics.push_back(msg.str());
  if (result.max_unitarity_residual > model.unitarity_tol()) {
    std::ostringstream warn;
    warn << "warning: unitarity residual exceeds model tolerance " << model.unitarity_tol();
    result.diagnostics.push_back(warn.str());
  }
  return result;
}

}  // namespace

CurrentResult lb_current(const FiberModel& model, const QuadratureSpec& quad) {
  return run_current(model, model.spectral_support(), quad,
                     [](double, Fiber& fib) { return fib.rho; });
}

CurrentResult lb_current_renormalized(const FiberModel& model, const Occupation& reference,
                                      const QuadratureSpec& quad) {
  return run_current(model, model.spectral_support(), quad, [&](double lambda, Fiber&) {
    return model.density_excess(lambda, reference);
  });
}

Domain clip_domain(const Domain& domain, double cutoff) {
  Domain out;
  for (const Interval& iv : domain) {
    Interval c = iv;
    if (c.lo < -cutoff) {
      c.lo = -cutoff;
      c.lo_edge = EdgeTreatment::none;
    }
    if (c.hi > cutoff) {
      c.hi = cutoff;
      c.hi_edge = EdgeTreatment::none;
    }
    if (c.lo < c.hi) out.push_back(c);
  }
  return out;
}

TruncatedLimit truncated_current_limit(const FiberModel& model, const std::vector<double>& ladder,
                                       const QuadratureSpec& quad) {
  if (ladder.empty()) raise(ErrorCode::InvalidArgument, "empty cutoff ladder");
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
    if (!(ladder[i + 1] > ladder[i])) {
      raise(ErrorCode::InvalidArgument, "cutoff ladder must be increasing");
    }
  }
  TruncatedLimit out;
  CurrentResult last;
  for (double cutoff : ladder) {
    const Domain window = clip_domain(model.spectral_support(), cutoff);
    last = run_current(model, window, quad, [](double, Fiber& fib) { return fib.rho; });
    out.cutoffs.push_back(cutoff);
    out.values.push_back(last.value);
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < out.values.size(); ++i) {
    diffs.push_back(std::abs(out.values[i + 1] - out.values[i]));
  }
  const double floor = 10.0 * quad.tol;
  const std::size_t first = diffs.size() > 3 ? diffs.size() - 3 : 0;
  for (std::size_t i = std::max<std::size_t>(first, 1); i < diffs.size(); ++i) {
    if (diffs[i] > diffs[i - 1] && diffs[i] > floor) {
      std::ostringstream msg;
      msg << "successive differences grow at cutoff " << out.cutoffs[i + 1] << ": "
          << diffs[i - 1] << " -> " << diffs[i];
      raise(ErrorCode::NoConvergence, msg.str());
    }
  }
  out.limit = std::move(last);
  if (!diffs.empty()) {
    out.limit.error_estimate += diffs.back();
    std::ostringstream msg;
    msg << "last ladder difference " << diffs.back();
    out.limit.diagnostics.push_back(msg.str());
  }
  return out;
}

}  // namespace qtflux
