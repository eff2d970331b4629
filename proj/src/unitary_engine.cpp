#include "qtflux/unitary_engine.hpp"

#include <cmath>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux::engine {

Factorization factorize(const ComplexMatrix& v) {
  if (v.rows() != v.cols()) raise(ErrorCode::InvalidArgument, "factorize needs a square matrix");
  const ComplexMatrix v_r = 0.5 * (v + v.adjoint());
  const ComplexMatrix v_i = (v - v.adjoint()) / (2.0 * kI);
  const ComplexMatrix c2 = linops::hermitian_abs(v_r) + linops::hermitian_abs(v_i);
  const linops::HermitianEigen eig = linops::hermitian_eig(c2);
  const double top = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
  const double cut = 1e-13 * top;
  ComplexVector root(eig.values.size());
  ComplexVector pinv(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double mu = eig.values(i);
    root(i) = mu > 0.0 ? std::sqrt(mu) : 0.0;
    pinv(i) = mu > cut && mu > 0.0 ? 1.0 / std::sqrt(mu) : 0.0;
  }
  Factorization f;
  f.c = eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
  const ComplexMatrix c_plus = eig.vectors * pinv.asDiagonal() * eig.vectors.adjoint();
  f.g = c_plus * v * c_plus;
  return f;
}

UnitaryPair::UnitaryPair(ComplexMatrix u, ComplexMatrix u0) : u_(std::move(u)), u0_(std::move(u0)) {
  if (u_.rows() != u_.cols() || u0_.rows() != u0_.cols() || u_.rows() != u0_.rows()) {
    raise(ErrorCode::InvalidArgument, "unitary pair needs square matrices of equal size");
  }
  const double du = linops::unitarity_residual(u_);
  const double du0 = linops::unitarity_residual(u0_);
  if (du > 1e-12 || du0 > 1e-12) {
    std::ostringstream msg;
    msg << "unitarity residuals " << du << ", " << du0 << " exceed 1e-12";
    raise(ErrorCode::InvalidArgument, msg.str());
  }
  v_ = u_ - u0_;
  fac_ = factorize(v_);
}

double UnitaryPair::star_identity_residual() const {
  return linops::op_norm(u_.adjoint() * v_ + v_.adjoint() * u0_);
}

namespace {

void check_xi(Complex xi) {
  if (std::abs(xi) > 1.0 - kXiFloor) {
    std::ostringstream msg;
    msg << "|ξ| = " << std::abs(xi) << " exceeds 1 − " << kXiFloor;
    raise(ErrorCode::InvalidArgument, msg.str());
  }
}

}  // namespace

ComplexMatrix z_function(const UnitaryPair& pair, Complex xi) {
  check_xi(xi);
  const ComplexMatrix gs = pair.g().adjoint();
  const ComplexMatrix res =
      linops::solve(linops::identity(pair.dim()) - xi * pair.u().adjoint(), pair.c() * gs);
  return gs + xi * gs * pair.c() * res;
}

double resolvent_identity_residual(const UnitaryPair& pair, Complex xi) {
  const auto n = pair.dim();
  const ComplexMatrix lhs =
      linops::solve(linops::identity(n) - xi * pair.u().adjoint(), pair.v().adjoint());
  const ComplexMatrix rhs = linops::solve(linops::identity(n) - xi * pair.u0().adjoint(),
                                          pair.c() * z_function(pair, xi) * pair.c());
  return linops::op_norm(lhs - rhs);
}

std::size_t abel_truncation(double r, double v_norm, const AbelOptions& options) {
  if (!(r >= 0.0 && r < 1.0)) raise(ErrorCode::InvalidArgument, "Abel parameter must lie in [0, 1)");
  if (r == 0.0 || v_norm == 0.0) return 1;
  // r^n·‖V‖·n is eventually decreasing; walk past its maximum first.
  const double log_r = std::log(r);
  const double peak = -1.0 / log_r;
  double n = std::max(1.0, std::ceil(peak));
  const double target = std::log(options.series_eps);
  auto excess = [&](double k) { return k * log_r + std::log(v_norm * k) - target; };
  double lo = n;
  double hi = n;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 4.0 * static_cast<double>(options.max_terms)) break;
  }
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (excess(mid) > 0.0) lo = mid; else hi = mid;
  }
  const double terms = excess(lo) <= 0.0 ? lo : hi;
  if (terms > static_cast<double>(options.max_terms)) {
    std::ostringstream msg;
    msg << "Abel series needs " << terms << " terms at r = " << r << ", cap "
        << options.max_terms;
    raise(ErrorCode::TruncationBudgetExceeded, msg.str());
  }
  return static_cast<std::size_t>(terms);
}

ComplexMatrix abel_prewave(const UnitaryPair& pair, double r, const ComplexMatrix& p_ac,
                           const AbelOptions& options) {
  const auto n = pair.dim();
  const std::size_t terms = abel_truncation(r, linops::op_norm(pair.v()), options);
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  ComplexMatrix comp = ComplexMatrix::Zero(n, n);
  ComplexMatrix term = p_ac;  // U⁻ⁿ U₀ⁿ P_ac
  double weight = 1.0 - r;
  const ComplexMatrix u_inv = pair.u().adjoint();
  for (std::size_t k = 0; k <= terms; ++k) {
    const ComplexMatrix y = weight * term - comp;
    const ComplexMatrix t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    term = u_inv * term * pair.u0();
    term = term.eval();
    weight *= r;
  }
  return sum;
}

double dense_abel_current(const UnitaryPair& pair, const ComplexMatrix& rho,
                          const ComplexMatrix& q, double r, const ComplexMatrix& p_ac,
                          const AbelOptions& options) {
  const ComplexMatrix om = abel_prewave(pair, r, p_ac, options);
  const ComplexMatrix comm = linops::commutator(pair.v(), q);
  return -0.5 * (om * rho * pair.u0().adjoint() * om.adjoint() * comm).trace().real();
}

namespace {

// Eigenvalue groups: index ranges [start, end) in the ascending spectrum.
std::vector<std::pair<Eigen::Index, Eigen::Index>> group_eigenvalues(const RealVector& values) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values(i) - values(i - 1) >= kGapMerge) {
      groups.emplace_back(start, i);
      start = i;
    }
  }
  return groups;
}

}  // namespace

CesaroResult cesaro_state(const ComplexMatrix& h, const ComplexMatrix& rho0, double horizon) {
  linops::require_hermitian(h, "cesaro_state");
  if (!(horizon > 0.0)) raise(ErrorCode::InvalidArgument, "time horizon must be > 0");
  const linops::HermitianEigen eig = linops::hermitian_eig(h);
  const Eigen::Index n = eig.values.size();
  CesaroResult out;
  const auto groups = group_eigenvalues(eig.values);
  RealVector level(n);
  for (const auto& [s, e] : groups) {
    double mean = 0.0;
    for (Eigen::Index i = s; i < e; ++i) mean += eig.values(i);
    mean /= static_cast<double>(e - s);
    for (Eigen::Index i = s; i < e; ++i) level(i) = mean;
    if (e - s > 1) out.degenerate_gap = true;
  }
  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t g = 1; g < groups.size(); ++g) {
    out.min_gap = std::min(out.min_gap, level(groups[g].first) - level(groups[g - 1].first));
  }
  if (out.degenerate_gap) {
    out.warnings.emplace_back("DegenerateGap: eigenvalue spacing below 1e-10, projections merged");
  }
  ComplexMatrix tilde = eig.vectors.adjoint() * rho0 * eig.vectors;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double x = horizon * (level(j) - level(k));
      if (x == 0.0) continue;
      // (1 − e^{−ix})/(ix)
      const Complex phi = (1.0 - std::exp(-kI * x)) / (kI * x);
      tilde(j, k) *= phi;
    }
  }
  out.state = eig.vectors * tilde * eig.vectors.adjoint();
  return out;
}

ComplexMatrix spectral_average(const ComplexMatrix& h, const ComplexMatrix& rho0) {
  linops::require_hermitian(h, "spectral_average");
  const linops::HermitianEigen eig = linops::hermitian_eig(h);
  ComplexMatrix tilde = eig.vectors.adjoint() * rho0 * eig.vectors;
  const auto groups = group_eigenvalues(eig.values);
  std::vector<std::size_t> label(static_cast<std::size_t>(eig.values.size()));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (Eigen::Index i = groups[g].first; i < groups[g].second; ++i) {
      label[static_cast<std::size_t>(i)] = g;
    }
  }
  for (Eigen::Index j = 0; j < tilde.rows(); ++j) {
    for (Eigen::Index k = 0; k < tilde.cols(); ++k) {
      if (label[static_cast<std::size_t>(j)] != label[static_cast<std::size_t>(k)]) tilde(j, k) = 0.0;
    }
  }
  return eig.vectors * tilde * eig.vectors.adjoint();
}

}  // namespace qtflux::engine
