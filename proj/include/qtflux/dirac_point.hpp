#pragma once

#include "qtflux/density.hpp"
#include "qtflux/fiber_model.hpp"
#include "qtflux/linops.hpp"

namespace qtflux::dirac {

// Dirac operator with mass gap a and point interaction
// B = [[b₋, r̄], [r, b₊]] at the origin. Fiber basis order is (−, +).
struct DiracSpec {
  double a = 1.0;
  double b_minus = 0.0;
  double b_plus = 0.0;
  Complex r{1.0, 0.0};

  ComplexMatrix interaction() const;
  void validate() const;
};

enum class Lead { minus, plus };

// Default gap guard for |λ| close to a.
double gap_eps(const DiracSpec& spec);

// √((λ+a)/(λ−a)) as the principal root of the ratio.
double ratio_root(const DiracSpec& spec, double lambda);

ComplexMatrix weyl_function(const DiracSpec& spec, double lambda);
ComplexMatrix s_matrix(const DiracSpec& spec, double lambda);
Complex interaction_determinant(const DiracSpec& spec, double lambda);

struct TransitionEntries {
  Complex mm, mp, pm, pp;
};

// Closed-form entries of S(λ) − I.
TransitionEntries transition_entries(const DiracSpec& spec, double lambda);

double cross_section(const DiracSpec& spec, double lambda);

ComplexMatrix charge(Lead lead);

class DiracModel : public FiberModel {
 public:
  DiracModel(DiracSpec spec, DensitySpec leads, Lead charge_lead);

  Domain spectral_support() const override;
  std::size_t fiber_dim(double lambda) const override;
  ComplexMatrix s_matrix(double lambda) const override;
  ComplexMatrix charge(double lambda) const override;
  ComplexMatrix density(double lambda) const override;
  ComplexMatrix density_excess(double lambda, const Occupation& reference) const override;
  std::vector<double> breakpoints() const override;
  double unitarity_tol() const override { return 1e-12; }

  const DiracSpec& spec() const { return spec_; }
  const DensitySpec& leads() const { return leads_; }

 private:
  DiracSpec spec_;
  DensitySpec leads_;
  Lead charge_lead_;
};

struct ModelCurrent {
  CurrentResult lb;      // Landauer–Büttiker trace route
  double direct = 0.0;   // (1/2π)∫(ρ₋ − ρ₊)σ dλ, signed for the charge lead
  double direct_error = 0.0;
  double relative_gap = 0.0;
};

ModelCurrent model_current(const DiracSpec& spec, const DensitySpec& leads, Lead charge_lead,
                           const QuadratureSpec& quad = {});

// Closed form for b± = 0 and Fermi–Dirac leads:
// 2|r|²/((1+|r|²)²π) ∫_{ℝ∖[−a,a]} (f₋ − f₊) dλ.
double decoupled_bias_current(double a, double r_abs, double beta, double mu_minus,
                              double mu_plus);

}  // namespace qtflux::dirac
