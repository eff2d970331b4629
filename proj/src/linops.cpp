#include "qtflux/linops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux::linops {

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix zero(Eigen::Index rows, Eigen::Index cols) {
  return ComplexMatrix::Zero(rows, cols);
}

ComplexMatrix diagonal(std::initializer_list<Complex> entries) {
  const auto n = static_cast<Eigen::Index>(entries.size());
  ComplexMatrix d = ComplexMatrix::Zero(n, n);
  Eigen::Index i = 0;
  for (const Complex& e : entries) {
    d(i, i) = e;
    ++i;
  }
  return d;
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

Complex trace(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) raise(ErrorCode::InvalidArgument, "trace of a non-square matrix");
  return a.trace();
}

Eigen::VectorXd singular_values(const ComplexMatrix& a) {
  if (a.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

double op_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

double trace_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).sum();
}

double hermitian_residual(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) raise(ErrorCode::InvalidArgument, "hermitian check on non-square matrix");
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (a.size() == 0) return true;
  return hermitian_residual(a) <= rel_tol * std::max(op_norm(a), 1e-300);
}

void require_hermitian(const ComplexMatrix& a, const char* what, double rel_tol) {
  if (!is_hermitian(a, rel_tol)) {
    std::ostringstream msg;
    msg << what << ": symmetry residual " << hermitian_residual(a) << " exceeds "
        << rel_tol << "·‖A‖_op";
    raise(ErrorCode::NotHermitian, msg.str());
  }
}

double unitarity_residual(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return op_norm(a.adjoint() * a - identity(a.cols()));
}

HermitianEigen hermitian_eig(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) raise(ErrorCode::InvalidArgument, "eigendecomposition of non-square matrix");
  if (a.size() == 0) return {RealVector(), ComplexMatrix()};
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    raise(ErrorCode::NoConvergence, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

template <typename F>
ComplexMatrix apply_spectral(const HermitianEigen& eig, F&& f) {
  const Eigen::Index n = eig.values.size();
  ComplexVector fv(n);
  for (Eigen::Index i = 0; i < n; ++i) fv(i) = Complex(f(eig.values(i)));
  return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace

ComplexMatrix hermitian_function(const ComplexMatrix& a, const std::function<double(double)>& f) {
  return apply_spectral(hermitian_eig(a), f);
}

ComplexMatrix hermitian_function(const ComplexMatrix& a,
                                 const std::function<Complex(double)>& f) {
  return apply_spectral(hermitian_eig(a), f);
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a, std::optional<double> tol_psd) {
  if (a.size() == 0) return a;
  require_hermitian(a, "psd_sqrt");
  const HermitianEigen eig = hermitian_eig(a);
  const double norm = eig.values.cwiseAbs().maxCoeff();
  const double tol = tol_psd.value_or(1e-12 * norm);
  if (eig.values(0) < -tol) {
    std::ostringstream msg;
    msg << "psd_sqrt: eigenvalue " << eig.values(0) << " below -" << tol;
    raise(ErrorCode::IndefiniteMatrix, msg.str());
  }
  return apply_spectral(eig, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

ComplexMatrix hermitian_abs(const ComplexMatrix& a) {
  if (a.size() == 0) return a;
  return apply_spectral(hermitian_eig(a), [](double x) { return std::abs(x); });
}

ComplexMatrix psd_pseudo_inverse(const ComplexMatrix& a, double rel_cut) {
  if (a.size() == 0) return a;
  const HermitianEigen eig = hermitian_eig(a);
  const double cut = rel_cut * std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
  return apply_spectral(eig, [cut](double x) { return x > cut ? 1.0 / x : 0.0; });
}

namespace {

void check_conditioning(const ComplexMatrix& a, std::optional<double> cond_floor) {
  const Eigen::VectorXd sv = singular_values(a);
  const double floor = cond_floor.value_or(1e-13 * sv(0));
  if (sv(sv.size() - 1) <= floor) {
    std::ostringstream msg;
    msg << "least singular value " << sv(sv.size() - 1) << " at or below floor " << floor;
    raise(ErrorCode::Singular, msg.str());
  }
}

}  // namespace

ComplexMatrix inverse(const ComplexMatrix& a, std::optional<double> cond_floor) {
  if (a.rows() != a.cols()) raise(ErrorCode::InvalidArgument, "inverse of non-square matrix");
  if (a.size() == 0) return a;
  check_conditioning(a, cond_floor);
  return a.partialPivLu().inverse();
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b,
                    std::optional<double> cond_floor) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    raise(ErrorCode::InvalidArgument, "solve: dimension mismatch");
  }
  if (a.size() == 0) return b;
  check_conditioning(a, cond_floor);
  return a.partialPivLu().solve(b);
}

}  // namespace qtflux::linops
