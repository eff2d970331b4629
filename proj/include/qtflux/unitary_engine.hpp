#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qtflux/linops.hpp"

namespace qtflux::engine {

struct Factorization {
  ComplexMatrix c;  // Hermitian PSD
  ComplexMatrix g;  // ‖G‖ ≤ 2
};

// V = C G C with C = (|V_R| + |V_I|)^{1/2}, V_R = (V + V*)/2,
// V_I = (V − V*)/(2i), and G = C⁺ V C⁺.
Factorization factorize(const ComplexMatrix& v);

// {U, U₀} with V = U − U₀ and its factorization.
class UnitaryPair {
 public:
  UnitaryPair(ComplexMatrix u, ComplexMatrix u0);

  Eigen::Index dim() const { return u_.rows(); }
  const ComplexMatrix& u() const { return u_; }
  const ComplexMatrix& u0() const { return u0_; }
  const ComplexMatrix& v() const { return v_; }
  const ComplexMatrix& c() const { return fac_.c; }
  const ComplexMatrix& g() const { return fac_.g; }

  // ‖U*V + V*U₀‖_op
  double star_identity_residual() const;

 private:
  ComplexMatrix u_, u0_, v_;
  Factorization fac_;
};

inline constexpr double kXiFloor = 1e-8;

// Z(ξ) = G* + G*C ξ(I − ξU*)⁻¹ C G*, |ξ| ≤ 1 − 1e−8.
ComplexMatrix z_function(const UnitaryPair& pair, Complex xi);

// ‖(I − ξU*)⁻¹V* − (I − ξU₀*)⁻¹ C Z(ξ) C‖_op
double resolvent_identity_residual(const UnitaryPair& pair, Complex xi);

struct AbelOptions {
  double series_eps = 1e-14;
  std::size_t max_terms = 1'000'000;
};

// Smallest n with r^n·‖V‖·n ≤ series_eps; throws TruncationBudgetExceeded
// above the cap.
std::size_t abel_truncation(double r, double v_norm, const AbelOptions& options);

// Ω₋(r) = (1−r) Σ rⁿ U⁻ⁿ U₀ⁿ P_ac, Kahan-summed in index order.
ComplexMatrix abel_prewave(const UnitaryPair& pair, double r, const ComplexMatrix& p_ac,
                           const AbelOptions& options = {});

// J(r) = −½ tr(Ω₋(r) ρ U₀* Ω₋(r)* [V, Q]), real part.
double dense_abel_current(const UnitaryPair& pair, const ComplexMatrix& rho,
                          const ComplexMatrix& q, double r, const ComplexMatrix& p_ac,
                          const AbelOptions& options = {});

struct CesaroResult {
  ComplexMatrix state;
  double min_gap = 0.0;          // smallest spacing between distinct eigenvalue groups
  bool degenerate_gap = false;   // some spacing fell below the merge threshold
  std::vector<std::string> warnings;
};

inline constexpr double kGapMerge = 1e-10;

// (1/T)∫₀ᵀ e^{−itH} ρ₀ e^{itH} dt in the eigenbasis of H.
CesaroResult cesaro_state(const ComplexMatrix& h, const ComplexMatrix& rho0, double horizon);

// Σ_k E_k ρ₀ E_k over eigenvalue groups of H (merged below 1e−10 spacing).
ComplexMatrix spectral_average(const ComplexMatrix& h, const ComplexMatrix& rho0);

}  // namespace qtflux::engine
