#include "qtflux/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux {

namespace {

// log(1 + e^x)
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// e^x / (1 + e^x) = 1 − (1 + e^x)⁻¹
double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double fermi_dirac(double lambda, double beta, double mu) {
  return logistic(-beta * (lambda - mu));
}

double fermi_dirac_difference(double lambda, double beta, double mu_minus, double mu_plus) {
  // e^{β(λ−μ₊)}(1 − e^{β(μ₊−μ₋)}) f₋ f₊ with e^{x}f(x) written as a logistic.
  const double f_minus = fermi_dirac(lambda, beta, mu_minus);
  const double weighted_plus = logistic(beta * (lambda - mu_plus));
  return -std::expm1(beta * (mu_plus - mu_minus)) * f_minus * weighted_plus;
}

double fermi_dirac_integral(double lo, double hi, double beta, double mu) {
  // antiderivative λ − log(1 + e^{β(λ−μ)})/β
  return (hi - lo) - (softplus(beta * (hi - mu)) - softplus(beta * (lo - mu))) / beta;
}

Occupation Occupation::fermi_dirac(double beta, double mu) {
  if (!(beta > 0.0)) raise(ErrorCode::InvalidArgument, "Fermi–Dirac occupation requires beta > 0");
  return Occupation(FermiDirac{beta, mu});
}

Occupation Occupation::tabulated(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    raise(ErrorCode::InvalidArgument, "tabulated occupation needs matching x/y with >= 2 points");
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i + 1] < x[i]) raise(ErrorCode::InvalidArgument, "tabulated abscissae must be sorted");
  }
  for (double v : y) {
    if (!(v >= 0.0)) raise(ErrorCode::InvalidArgument, "tabulated occupation must be nonnegative");
  }
  return Occupation(Table{std::move(x), std::move(y)});
}

Occupation Occupation::box(double lo, double hi, double height) {
  return tabulated({lo, lo, hi, hi}, {0.0, height, height, 0.0});
}

Occupation Occupation::constant(double value) { return Occupation(value); }

Occupation Occupation::function(std::function<double(double)> f, std::vector<double> breakpoints) {
  return Occupation(Function{std::move(f), std::move(breakpoints)});
}

double Occupation::operator()(double lambda) const {
  if (const auto* fd = std::get_if<FermiDirac>(&repr_)) {
    return qtflux::fermi_dirac(lambda, fd->beta, fd->mu);
  }
  if (const auto* t = std::get_if<Table>(&repr_)) {
    if (lambda < t->x.front() || lambda > t->x.back()) return 0.0;
    auto it = std::upper_bound(t->x.begin(), t->x.end(), lambda);
    if (it == t->x.end()) return t->y.back();
    const std::size_t j = static_cast<std::size_t>(it - t->x.begin());
    const std::size_t i = j - 1;
    const double w = (lambda - t->x[i]) / (t->x[j] - t->x[i]);
    return (1.0 - w) * t->y[i] + w * t->y[j];
  }
  if (const auto* fn = std::get_if<Function>(&repr_)) return fn->f(lambda);
  return std::get<double>(repr_);
}

double Occupation::minus(const Occupation& other, double lambda) const {
  const FermiDirac* a = fermi();
  const FermiDirac* b = other.fermi();
  if (a != nullptr && b != nullptr && a->beta == b->beta) {
    return fermi_dirac_difference(lambda, a->beta, a->mu, b->mu);
  }
  return (*this)(lambda) - other(lambda);
}

std::vector<double> Occupation::breakpoints() const {
  if (const auto* fd = std::get_if<FermiDirac>(&repr_)) return {fd->mu};
  if (const auto* t = std::get_if<Table>(&repr_)) {
    std::vector<double> x = t->x;
    x.erase(std::unique(x.begin(), x.end()), x.end());
    return x;
  }
  if (const auto* fn = std::get_if<Function>(&repr_)) return fn->breakpoints;
  return {};
}

DensitySpec DensitySpec::fermi_dirac_per_lead(double beta, const std::vector<double>& mu) {
  DensitySpec spec;
  spec.kind = DensityKind::fermi_dirac_per_lead;
  for (double m : mu) spec.leads.push_back(Occupation::fermi_dirac(beta, m));
  return spec;
}

DensitySpec DensitySpec::equilibrium(double beta, double mu, std::size_t lead_count) {
  DensitySpec spec;
  spec.kind = DensityKind::equilibrium;
  spec.leads.assign(lead_count, Occupation::fermi_dirac(beta, mu));
  return spec;
}

DensitySpec DensitySpec::tabulated(std::vector<Occupation> leads) {
  DensitySpec spec;
  spec.kind = DensityKind::tabulated;
  spec.leads = std::move(leads);
  return spec;
}

ComplexMatrix DensitySpec::evaluate(double lambda) const {
  const auto n = static_cast<Eigen::Index>(leads.size());
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) rho(i, i) = leads[static_cast<std::size_t>(i)](lambda);
  if (tau && n >= 2) {
    const Complex t = tau(lambda);
    rho(1, 0) = t;
    rho(0, 1) = std::conj(t);
  }
  return rho;
}

ComplexMatrix DensitySpec::excess(double lambda, const Occupation& reference) const {
  const auto n = static_cast<Eigen::Index>(leads.size());
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rho(i, i) = leads[static_cast<std::size_t>(i)].minus(reference, lambda);
  }
  if (tau && n >= 2) {
    const Complex t = tau(lambda);
    rho(1, 0) = t;
    rho(0, 1) = std::conj(t);
  }
  return rho;
}

std::vector<double> DensitySpec::breakpoints() const {
  std::vector<double> out;
  for (const Occupation& o : leads) {
    const auto b = o.breakpoints();
    out.insert(out.end(), b.begin(), b.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void DensitySpec::check_admissible(double lambda) const {
  for (std::size_t i = 0; i < leads.size(); ++i) {
    const double v = leads[i](lambda);
    if (v < 0.0) {
      std::ostringstream msg;
      msg << "lead " << i << " occupation " << v << " < 0 at λ = " << lambda;
      raise(ErrorCode::DensityNotPSD, msg.str());
    }
  }
  if (tau && leads.size() >= 2) {
    const double t2 = std::norm(tau(lambda));
    const double bound = leads[0](lambda) * leads[1](lambda);
    if (t2 > bound * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "|τ|² = " << t2 << " exceeds ρ₀ρ₁ = " << bound << " at λ = " << lambda;
      raise(ErrorCode::DensityNotPSD, msg.str());
    }
  }
}

}  // namespace qtflux
