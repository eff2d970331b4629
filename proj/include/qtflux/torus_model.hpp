#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qtflux/linops.hpp"
#include "qtflux/unitary_engine.hpp"

namespace qtflux::engine {

// η ↦ Σ_{n=min_degree}^{...} cₙ ηⁿ with cₙ ∈ ℂ^d.
struct TrigPolynomial {
  int min_degree = 0;
  std::vector<ComplexVector> coefficients;

  int max_degree() const { return min_degree + static_cast<int>(coefficients.size()) - 1; }
  ComplexVector operator()(Complex eta) const;
};

// Eigenvalues of U₀ outside the torus grid, with the components of the
// coupling vectors on them.
struct PurePointBlock {
  std::vector<Complex> eigenvalues;  // unit modulus
  ComplexMatrix coupling;            // s × p
  ComplexMatrix charge;              // s × s, diagonal
  ComplexMatrix density;             // s × s, diagonal PSD
};

using FiberFunction = std::function<ComplexMatrix(Complex)>;

struct TorusSpec {
  std::size_t grid = 256;        // N
  std::size_t fiber_dim = 2;     // d
  std::vector<TrigPolynomial> couplings;  // p vectors, orthonormalized internally
  ComplexMatrix mixing;          // p × p Hermitian κ
  FiberFunction charge;          // Q(ζ), d × d Hermitian
  FiberFunction density;         // ρ(ζ), d × d PSD
  std::optional<PurePointBlock> pure_point;
};

enum class FiberEvaluation {
  continuum,  // exact boundary values of the trig-polynomial model
  discrete,   // resolvent of the finite matrix U (requires r < 1)
};

struct FiberScattering {
  ComplexMatrix t;    // transition matrix on ℂ^d
  ComplexMatrix s;    // I − 2πi T
  ComplexMatrix t_h;  // iζ √Y Z √Y in the coordinates of ran C
};

enum class AbelSummation { resolvent, series };

struct AbelResult {
  double value = 0.0;
  double imaginary_part = 0.0;  // vanishes as r ↑ 1; reported for diagnostics
  std::size_t terms = 0;        // series terms used (0 for the resolvent route)
};

struct FiberCurrent {
  double value = 0.0;
  double symmetric_form = 0.0;
  double max_unitarity_residual = 0.0;
};

// U₀ = diag(ζ_k)⊗I_d on the grid ζ_k = e^{2πik/N} (plus an optional pure-point
// block), U = U₀(I + Ψ(e^{iκ} − I)Ψ*) with Ψ the orthonormalized couplings.
class TorusModel {
 public:
  explicit TorusModel(TorusSpec spec);

  std::size_t grid() const { return spec_.grid; }
  std::size_t fiber_dim() const { return spec_.fiber_dim; }
  std::size_t rank() const { return static_cast<std::size_t>(w_.rows()); }
  std::size_t span_dim() const { return static_cast<std::size_t>(v_.rows()); }
  std::size_t pp_dim() const { return pp_eigs_.size(); }
  std::size_t dim() const { return spec_.grid * spec_.fiber_dim + pp_dim(); }
  Complex grid_point(std::size_t k) const;
  const TorusSpec& spec() const { return spec_; }

  // V, C, G compressed to the orthonormal basis X of ran V + ran V*.
  const ComplexMatrix& v_compressed() const { return v_; }
  const ComplexMatrix& c_compressed() const { return c_; }
  const ComplexMatrix& g_compressed() const { return g_; }
  double v_trace_norm() const;

  // Y_k = (N/2π) C E_k C in X coordinates.
  ComplexMatrix y_block(std::size_t k) const;

  FiberScattering fiber_scattering(std::size_t k, double r,
                                   FiberEvaluation mode = FiberEvaluation::continuum) const;
  FiberScattering fiber_scattering_at(Complex zeta, double r) const;

  // K(r; ζ, ξ) = L(ζ) Z(rζ)* L(ξ)* on ℂ^d, L(ζ) = x(ζ)c/√(2π).
  ComplexMatrix kernel(double r, Complex zeta, Complex xi) const;
  ComplexMatrix kernel_m(double r, Complex zeta, Complex xi, Complex zeta2) const;

  FiberCurrent fiber_current() const;
  // (2π/N) Σ_k ‖T_k‖₁ at r = 1.
  double trace_sum() const;

  AbelResult abel_current(double r, AbelSummation method = AbelSummation::resolvent,
                          const AbelOptions& options = {}, unsigned threads = 1) const;

  // Dense matrices for small grids (testing).
  ComplexMatrix dense_u0() const;
  ComplexMatrix dense_u() const;
  ComplexMatrix dense_charge() const;
  ComplexMatrix dense_density() const;
  ComplexMatrix dense_p_ac() const;

  // Continuum and discrete Cauchy transforms X*(I − ξU₀*)⁻¹X.
  ComplexMatrix cauchy_continuum(Complex xi) const;
  ComplexMatrix cauchy_discrete(Complex xi) const;
  ComplexMatrix z_compressed(Complex xi, FiberEvaluation mode) const;

 private:
  ComplexMatrix x_at(Complex eta) const;  // d × m values of the basis functions
  ComplexMatrix row_block(const ComplexMatrix& tall, std::size_t k) const;

  TorusSpec spec_;
  std::vector<Complex> pp_eigs_;
  ComplexMatrix w_;          // e^{iκ} − I
  ComplexMatrix psi_;        // dim × p, orthonormal columns (grid rows scaled by 1/√N)
  // orthonormal basis functions of span{U₀ψ, ψ}: coefficient blocks per degree
  int x_min_degree_ = 0;
  std::vector<ComplexMatrix> x_coeffs_;  // d × m per degree
  ComplexMatrix x_pp_;                   // s × m
  std::vector<ComplexMatrix> a_coeffs_;  // m × m, x*x = Σ Aₙ ηⁿ for n ≥ 0
  ComplexMatrix x_grid_;                 // (N·d + s) × m, discrete X
  ComplexMatrix v_, c_, g_;
};

struct SingularPartResult {
  double j_with = 0.0;
  double j_without = 0.0;
  double relative_difference = 0.0;
};

// Abel current with and without the charge on the pure-point block.
SingularPartResult singular_part_test(const TorusModel& model, double r, unsigned threads = 1);

// Random rank-p model: couplings with degree ≤ max_degree and a random
// Hermitian mixing, drawn from `seed`.
TorusSpec random_torus_spec(std::size_t grid, std::size_t fiber_dim, std::size_t rank,
                            int max_degree, std::uint64_t seed);

}  // namespace qtflux::engine
