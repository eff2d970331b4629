#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "qtflux/linops.hpp"

namespace qtflux {

struct FermiDirac {
  double beta = 1.0;
  double mu = 0.0;
};

// (1 + e^{β(λ−μ)})⁻¹, evaluated without overflow.
double fermi_dirac(double lambda, double beta, double mu);

// f(λ−μ₋) − f(λ−μ₊) from the factored form e^{βλ}(e^{−βμ₊} − e^{−βμ₋})f₋f₊,
// rearranged so that no factor overflows.
double fermi_dirac_difference(double lambda, double beta, double mu_minus, double mu_plus);

// ∫_lo^hi f(λ−μ) dλ in closed form; lo may be −∞ only through differences, so
// both ends must be finite.
double fermi_dirac_integral(double lo, double hi, double beta, double mu);

// A scalar occupation function of energy.
class Occupation {
 public:
  static Occupation fermi_dirac(double beta, double mu);
  // Piecewise-linear table, zero outside [x.front(), x.back()]. Repeated
  // abscissae encode jumps.
  static Occupation tabulated(std::vector<double> x, std::vector<double> y);
  static Occupation box(double lo, double hi, double height);
  static Occupation constant(double value);
  static Occupation function(std::function<double(double)> f,
                             std::vector<double> breakpoints = {});

  double operator()(double lambda) const;
  // this(λ) − other(λ); uses the factored difference when both are
  // Fermi–Dirac with the same β.
  double minus(const Occupation& other, double lambda) const;
  std::vector<double> breakpoints() const;
  const FermiDirac* fermi() const { return std::get_if<FermiDirac>(&repr_); }

 private:
  struct Table {
    std::vector<double> x;
    std::vector<double> y;
  };
  struct Function {
    std::function<double(double)> f;
    std::vector<double> breakpoints;
  };
  using Repr = std::variant<FermiDirac, Table, Function, double>;
  explicit Occupation(Repr repr) : repr_(std::move(repr)) {}
  Repr repr_;
};

enum class DensityKind { fermi_dirac_per_lead, tabulated, equilibrium };

// Steady state described lead by lead, diagonal in the lead basis except for
// an optional coherence τ(λ) placed at (1,0) and its conjugate at (0,1).
struct DensitySpec {
  DensityKind kind = DensityKind::fermi_dirac_per_lead;
  std::vector<Occupation> leads;
  std::function<Complex(double)> tau;

  static DensitySpec fermi_dirac_per_lead(double beta, const std::vector<double>& mu);
  static DensitySpec equilibrium(double beta, double mu, std::size_t lead_count);
  static DensitySpec tabulated(std::vector<Occupation> leads);

  std::size_t lead_count() const { return leads.size(); }
  ComplexMatrix evaluate(double lambda) const;
  ComplexMatrix excess(double lambda, const Occupation& reference) const;
  std::vector<double> breakpoints() const;
  // Throws DensityNotPSD when |τ|² > ρ₀ρ₁ or an occupation is negative.
  void check_admissible(double lambda) const;
};

}  // namespace qtflux
