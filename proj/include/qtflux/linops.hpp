#pragma once

#include <complex>
#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace qtflux {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr Complex kI{0.0, 1.0};

namespace linops {

ComplexMatrix identity(Eigen::Index n);
ComplexMatrix zero(Eigen::Index rows, Eigen::Index cols);
ComplexMatrix diagonal(std::initializer_list<Complex> entries);
ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
Complex trace(const ComplexMatrix& a);

Eigen::VectorXd singular_values(const ComplexMatrix& a);
double op_norm(const ComplexMatrix& a);
double trace_norm(const ComplexMatrix& a);

// max |A_ij - conj(A_ji)|
double hermitian_residual(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-12);
void require_hermitian(const ComplexMatrix& a, const char* what, double rel_tol = 1e-12);

// Unitarity defect ‖A*A − I‖_op.
double unitarity_residual(const ComplexMatrix& a);

struct HermitianEigen {
  RealVector values;  // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

HermitianEigen hermitian_eig(const ComplexMatrix& a);

// f(A) for Hermitian A via the spectral decomposition.
ComplexMatrix hermitian_function(const ComplexMatrix& a, const std::function<double(double)>& f);
ComplexMatrix hermitian_function(const ComplexMatrix& a,
                                 const std::function<Complex(double)>& f);

ComplexMatrix psd_sqrt(const ComplexMatrix& a, std::optional<double> tol_psd = std::nullopt);
ComplexMatrix hermitian_abs(const ComplexMatrix& a);

// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix; eigenvalues below
// rel_cut·‖A‖ are treated as zero.
ComplexMatrix psd_pseudo_inverse(const ComplexMatrix& a, double rel_cut = 1e-12);

ComplexMatrix inverse(const ComplexMatrix& a, std::optional<double> cond_floor = std::nullopt);
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b,
                    std::optional<double> cond_floor = std::nullopt);

}  // namespace linops
}  // namespace qtflux
