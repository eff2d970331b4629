#include "qtflux/dirac_point.hpp"

#include <cmath>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux::dirac {

ComplexMatrix DiracSpec::interaction() const {
  ComplexMatrix b(2, 2);
  b << Complex(b_minus), std::conj(r), r, Complex(b_plus);
  return b;
}

void DiracSpec::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) raise(ErrorCode::InvalidArgument, "Dirac gap a must be > 0");
  if (!std::isfinite(b_minus) || !std::isfinite(b_plus) || !std::isfinite(r.real()) ||
      !std::isfinite(r.imag())) {
    raise(ErrorCode::InvalidArgument, "Dirac interaction entries must be finite");
  }
}

double gap_eps(const DiracSpec& spec) { return 1e-9 * spec.a; }

double ratio_root(const DiracSpec& spec, double lambda) {
  if (!(std::abs(lambda) > spec.a + gap_eps(spec))) {
    std::ostringstream msg;
    msg << "λ = " << lambda << " inside the closed gap [−" << spec.a << ", " << spec.a << "]";
    raise(ErrorCode::InsideGap, msg.str());
  }
  return std::sqrt((lambda + spec.a) / (lambda - spec.a));
}

ComplexMatrix weyl_function(const DiracSpec& spec, double lambda) {
  const double s = ratio_root(spec, lambda);
  return linops::diagonal({Complex(0.0, s), Complex(0.0, 1.0 / s)});
}

ComplexMatrix s_matrix(const DiracSpec& spec, double lambda) {
  const ComplexMatrix m = weyl_function(spec, lambda);
  const double s = m(0, 0).imag();
  const ComplexMatrix sqrt_im = linops::diagonal({std::sqrt(s), 1.0 / std::sqrt(s)});
  const ComplexMatrix resolvent = linops::inverse(spec.interaction() - m);
  return linops::identity(2) + 2.0 * kI * sqrt_im * resolvent * sqrt_im;
}

Complex interaction_determinant(const DiracSpec& spec, double lambda) {
  const double s = ratio_root(spec, lambda);
  return (spec.b_minus - kI * s) * (spec.b_plus - kI / s) - std::norm(spec.r);
}

TransitionEntries transition_entries(const DiracSpec& spec, double lambda) {
  const double s = ratio_root(spec, lambda);
  const Complex scale = 2.0 * kI / interaction_determinant(spec, lambda);
  return {scale * (spec.b_plus * s - kI), -std::conj(spec.r) * scale, -spec.r * scale,
          scale * (spec.b_minus / s - kI)};
}

double cross_section(const DiracSpec& spec, double lambda) {
  return 4.0 * std::norm(spec.r) / std::norm(interaction_determinant(spec, lambda));
}

ComplexMatrix charge(Lead lead) {
  return lead == Lead::minus ? linops::diagonal({1.0, 0.0}) : linops::diagonal({0.0, 1.0});
}

DiracModel::DiracModel(DiracSpec spec, DensitySpec leads, Lead charge_lead)
    : spec_(spec), leads_(std::move(leads)), charge_lead_(charge_lead) {
  spec_.validate();
  if (leads_.lead_count() != 2) {
    raise(ErrorCode::FiberMismatch, "Dirac model needs exactly two lead occupations");
  }
}

Domain DiracModel::spectral_support() const {
  // The band edge is moved out by 2·gap_eps so that no rounded node lands in
  // the guarded sliver; σ vanishes linearly there, so the sliver is O(gap_eps²).
  return quadrature::gapped_line(spec_.a + 2.0 * gap_eps(spec_), EdgeTreatment::sqrt_substitution);
}

std::size_t DiracModel::fiber_dim(double lambda) const {
  return std::abs(lambda) > spec_.a ? 2 : 0;
}

ComplexMatrix DiracModel::s_matrix(double lambda) const { return dirac::s_matrix(spec_, lambda); }

ComplexMatrix DiracModel::charge(double) const { return dirac::charge(charge_lead_); }

ComplexMatrix DiracModel::density(double lambda) const { return leads_.evaluate(lambda); }

ComplexMatrix DiracModel::density_excess(double lambda, const Occupation& reference) const {
  return leads_.excess(lambda, reference);
}

std::vector<double> DiracModel::breakpoints() const { return leads_.breakpoints(); }

ModelCurrent model_current(const DiracSpec& spec, const DensitySpec& leads, Lead charge_lead,
                           const QuadratureSpec& quad) {
  const DiracModel model(spec, leads, charge_lead);
  ModelCurrent out;
  out.lb = lb_current_renormalized(model, leads.leads[1], quad);

  QuadratureSpec direct_quad = quad;
  const auto extra = leads.breakpoints();
  direct_quad.breakpoints.insert(direct_quad.breakpoints.end(), extra.begin(), extra.end());
  const double sign = charge_lead == Lead::minus ? 1.0 : -1.0;
  const auto direct = quadrature::integrate(
      [&](double lambda) {
        return sign * leads.leads[0].minus(leads.leads[1], lambda) *
               cross_section(spec, lambda) / kTwoPi;
      },
      model.spectral_support(), direct_quad);
  out.direct = direct.value;
  out.direct_error = direct.error_estimate;
  const double scale = std::max(std::abs(out.direct), 1e-300);
  out.relative_gap = std::abs(out.lb.value - out.direct) / scale;
  std::ostringstream msg;
  msg << "direct σ-weighted route " << out.direct << " (relative gap " << out.relative_gap << ")";
  out.lb.diagnostics.push_back(msg.str());
  return out;
}

double decoupled_bias_current(double a, double r_abs, double beta, double mu_minus,
                              double mu_plus) {
  // ∫_ℝ (f₋ − f₊) = μ₋ − μ₊; remove the gap contribution.
  const double gap_part =
      fermi_dirac_integral(-a, a, beta, mu_minus) - fermi_dirac_integral(-a, a, beta, mu_plus);
  const double r2 = r_abs * r_abs;
  return 2.0 * r2 / ((1.0 + r2) * (1.0 + r2) * kPi) * ((mu_minus - mu_plus) - gap_part);
}

}  // namespace qtflux::dirac
