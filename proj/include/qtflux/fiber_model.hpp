#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qtflux/density.hpp"
#include "qtflux/linops.hpp"
#include "qtflux/quadrature.hpp"

namespace qtflux {

// Scattering matrix, charge and density on a single energy fiber.
struct Fiber {
  ComplexMatrix s;
  ComplexMatrix q;
  ComplexMatrix rho;
};

// Energy-fibered scattering data of a model. Implementations must be reentrant.
class FiberModel {
 public:
  virtual ~FiberModel() = default;

  virtual Domain spectral_support() const = 0;
  virtual std::size_t fiber_dim(double lambda) const = 0;
  virtual ComplexMatrix s_matrix(double lambda) const = 0;
  virtual ComplexMatrix charge(double lambda) const = 0;
  virtual ComplexMatrix density(double lambda) const = 0;

  // ρ(λ) − f(λ)·I; models with Fermi–Dirac leads override this to use the
  // factored difference.
  virtual ComplexMatrix density_excess(double lambda, const Occupation& reference) const;
  // All three matrices at once, for models where S is expensive.
  virtual Fiber fiber(double lambda) const;
  virtual std::vector<double> breakpoints() const { return {}; }
  virtual double unitarity_tol() const { return 1e-10; }
};

// FiberModel assembled from callables; used for hand-built fibers.
class FunctionFiberModel : public FiberModel {
 public:
  using MatrixFn = std::function<ComplexMatrix(double)>;

  FunctionFiberModel(Domain support, std::size_t dim, MatrixFn s, MatrixFn q, MatrixFn rho);

  Domain spectral_support() const override { return support_; }
  std::size_t fiber_dim(double lambda) const override;
  ComplexMatrix s_matrix(double lambda) const override { return s_(lambda); }
  ComplexMatrix charge(double lambda) const override { return q_(lambda); }
  ComplexMatrix density(double lambda) const override { return rho_(lambda); }
  std::vector<double> breakpoints() const override { return breakpoints_; }
  void set_breakpoints(std::vector<double> b) { breakpoints_ = std::move(b); }

 private:
  Domain support_;
  std::size_t dim_;
  MatrixFn s_, q_, rho_;
  std::vector<double> breakpoints_;
};

struct CurrentResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<std::pair<double, double>> samples;  // (λ, integrand) at quadrature nodes
  double max_unitarity_residual = 0.0;
  std::size_t evaluations = 0;
  std::vector<std::string> diagnostics;
};

// tr(ρ(Q − S*QS)), real part. Throws FiberMismatch on inconsistent shapes.
double lb_integrand(const ComplexMatrix& s, const ComplexMatrix& q, const ComplexMatrix& rho);

CurrentResult lb_current(const FiberModel& model, const QuadratureSpec& quad = {});
CurrentResult lb_current_renormalized(const FiberModel& model, const Occupation& reference,
                                      const QuadratureSpec& quad = {});

struct TruncatedLimit {
  std::vector<double> cutoffs;
  std::vector<double> values;
  CurrentResult limit;
};

TruncatedLimit truncated_current_limit(const FiberModel& model, const std::vector<double>& ladder,
                                       const QuadratureSpec& quad = {});

// Intersection of a domain with (−L, L); declared edges survive where the
// endpoint is unchanged.
Domain clip_domain(const Domain& domain, double cutoff);

}  // namespace qtflux
