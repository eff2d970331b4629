#pragma once

#include <array>
#include <string>
#include <vector>

#include "qtflux/density.hpp"
#include "qtflux/fiber_model.hpp"
#include "qtflux/linops.hpp"

namespace qtflux::schrodinger {

// Real coefficient profile on [a, b].
class Profile {
 public:
  static Profile constant(double value);
  // `breaks` are interior x-positions; values.size() == breaks.size() + 1.
  static Profile piecewise_constant(std::vector<double> breaks, std::vector<double> values);
  // Named closed forms:
  //   "gaussian" [offset, amplitude, center, width]
  //   "linear"   [value_at_zero, slope]
  //   "cosine"   [offset, amplitude, wavenumber, phase]
  static Profile closed_form(const std::string& name, std::vector<double> params);

  double operator()(double x) const;
  const std::vector<double>& breakpoints() const { return breaks_; }
  bool piecewise_constant_kind() const { return kind_ != Kind::closed; }
  // Extremes on [a, b] (exact for piecewise constant, sampled otherwise).
  std::pair<double, double> range(double a, double b) const;

 private:
  enum class Kind { constant, piecewise, closed };
  Kind kind_ = Kind::constant;
  std::vector<double> breaks_;
  std::vector<double> values_;
  std::string name_;
};

struct SampleSpec {
  double a = 0.0;
  double b = 1.0;
  Profile mass = Profile::constant(0.5);
  Profile potential = Profile::constant(0.0);
  Complex kappa_a{0.0, 0.5};
  Complex kappa_b{0.0, 0.5};
  double ode_tol = 1e-10;

  void validate() const;
  // κ = q + (i/2)α², α ≥ 0
  double alpha_a() const;
  double alpha_b() const;
  std::vector<double> interior_breakpoints() const;
};

enum class Side { from_a, from_b, starred_a, starred_b };

// Solution of l(v) = z v with its quasi-derivative p = (1/2m) v'.
class ElementarySolution {
 public:
  Side side() const { return side_; }
  Complex z() const { return z_; }
  Complex value(double x) const;
  Complex quasi_derivative(double x) const;
  std::size_t steps() const { return nodes_.size() - 1; }

 private:
  friend ElementarySolution solve_elementary(const SampleSpec&, Complex, Side);
  std::array<Complex, 2> state(double x) const;

  SampleSpec spec_;
  Side side_ = Side::from_a;
  Complex z_;
  std::vector<double> nodes_;  // ordered along the direction of integration
  std::vector<std::array<Complex, 2>> states_;
};

ElementarySolution solve_elementary(const SampleSpec& spec, Complex z, Side side);

struct WronskianResult {
  Complex value;       // at the midpoint
  double spread = 0.0; // max deviation over the interior check points
  std::vector<double> check_points;
};

WronskianResult wronskian(const SampleSpec& spec, Complex z);

struct ScatteringData {
  ComplexMatrix s;  // Θ(λ)* in the (b, a) fiber basis
  Complex w;
  Complex theta_a;
  Complex theta_b;
  Complex va_at_b;
  Complex vb_at_a;
  double unitarity_residual = 0.0;
};

ScatteringData scattering_matrix(const SampleSpec& spec, double lambda);
ComplexMatrix characteristic_function(const SampleSpec& spec, Complex z);

enum class Charge { a, b };
ComplexMatrix charge(Charge c);

// Density fiber [[ρ_b, τ̄], [τ, ρ_a]]: leads[0] = ρ_b, leads[1] = ρ_a.
class SchrodingerModel : public FiberModel {
 public:
  SchrodingerModel(SampleSpec spec, DensitySpec density, Charge charge);

  Domain spectral_support() const override { return quadrature::real_line(); }
  std::size_t fiber_dim(double) const override { return 2; }
  ComplexMatrix s_matrix(double lambda) const override;
  ComplexMatrix charge(double lambda) const override;
  ComplexMatrix density(double lambda) const override;
  ComplexMatrix density_excess(double lambda, const Occupation& reference) const override;
  Fiber fiber(double lambda) const override;
  std::vector<double> breakpoints() const override;
  double unitarity_tol() const override { return 1e-8; }

  const SampleSpec& spec() const { return spec_; }

 private:
  SampleSpec spec_;
  DensitySpec density_;
  Charge charge_;
};

// Integrand of the direct route at one energy, for charge Q_a.
double direct_integrand(const ScatteringData& sd, double alpha_a, double alpha_b,
                        double rho_b_minus_rho_a, Complex tau);

struct ModelCurrent {
  CurrentResult lb;
  double direct = 0.0;
  double direct_error = 0.0;
  double relative_gap = 0.0;
};

ModelCurrent model_current(const SampleSpec& spec, const DensitySpec& density, Charge charge,
                           const QuadratureSpec& quad = {});

// 200 nodes: linear over [V_min − 5, V_min + 5], logarithmic up to V_min + 50.
std::vector<double> default_energy_grid(const SampleSpec& spec, std::size_t nodes = 200);

}  // namespace qtflux::schrodinger
