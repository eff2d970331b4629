#include "qtflux/cayley.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux::cayley {

Complex line_to_circle(double lambda) {
  if (!std::isfinite(lambda)) raise(ErrorCode::DomainExcluded, "λ must be finite");
  // cos 2φ = (1 − t²)/(1 + t²), sin 2φ = 2t/(1 + t²) with t = tan φ = λ
  if (std::abs(lambda) > 1e150) {
    const double inv = 1.0 / lambda;
    return {-1.0, 2.0 * inv};
  }
  const double l2 = lambda * lambda;
  const double den = 1.0 + l2;
  return {(1.0 - l2) / den, 2.0 * lambda / den};
}

double circle_to_line(Complex zeta) {
  const double c = zeta.real();
  const double s = zeta.imag();
  if (c < 0.0) {
    if (s == 0.0) raise(ErrorCode::DomainExcluded, "ζ = −1 corresponds to λ = ±∞");
    return (1.0 - c) / s;  // tan(θ/2) = (1 − cos θ)/sin θ
  }
  return s / (1.0 + c);    // tan(θ/2) = sin θ/(1 + cos θ)
}

double line_to_angle(double lambda) {
  if (std::isinf(lambda)) return lambda > 0 ? kPi : -kPi;
  return 2.0 * std::atan(lambda);
}

double angle_to_line(double theta) {
  if (!(std::abs(theta) < kPi)) raise(ErrorCode::DomainExcluded, "angle ±π corresponds to λ = ±∞");
  return std::tan(0.5 * theta);
}

double measure_weight(double lambda) { return 2.0 / (1.0 + lambda * lambda); }

CircleFamily::CircleFamily(const FiberModel& line, std::optional<Occupation> reference)
    : line_(line), reference_(std::move(reference)) {}

Fiber CircleFamily::at_line(double lambda) const {
  Fiber fib = line_.fiber(lambda);
  if (reference_) fib.rho = line_.density_excess(lambda, *reference_);
  fib.rho *= 1.0 + lambda * lambda;
  return fib;
}

Fiber CircleFamily::at(Complex zeta) const { return at_line(circle_to_line(zeta)); }

Fiber CircleFamily::at_angle(double theta) const { return at_line(angle_to_line(theta)); }

Domain CircleFamily::angular_support() const {
  Domain out;
  for (const Interval& iv : line_.spectral_support()) {
    out.push_back(Interval{line_to_angle(iv.lo), line_to_angle(iv.hi), iv.lo_edge, iv.hi_edge});
  }
  return out;
}

std::vector<double> CircleFamily::angular_breakpoints() const {
  std::vector<double> out;
  for (double b : line_.breakpoints()) out.push_back(line_to_angle(b));
  return out;
}

CircleFamily transport_fibers(const FiberModel& line, std::optional<Occupation> reference) {
  return CircleFamily(line, std::move(reference));
}

CurrentResult circle_current(const CircleFamily& family, const QuadratureSpec& quad) {
  CurrentResult result;
  QuadratureSpec spec = quad;
  const auto extra = family.angular_breakpoints();
  spec.breakpoints.clear();
  spec.breakpoints.insert(spec.breakpoints.end(), extra.begin(), extra.end());
  auto integrand = [&](double theta) {
    Fiber fib = family.at_angle(theta);
    if (fib.s.size() == 0) return 0.0;
    result.max_unitarity_residual =
        std::max(result.max_unitarity_residual, linops::unitarity_residual(fib.s));
    const double value = lb_integrand(fib.s, fib.q, fib.rho) / (4.0 * kPi);
    result.samples.emplace_back(theta, value);
    return value;
  };
  const QuadratureResult qr = quadrature::integrate(integrand, family.angular_support(), spec);
  std::sort(result.samples.begin(), result.samples.end());
  result.value = qr.value;
  result.error_estimate = qr.error_estimate;
  result.evaluations = qr.evaluations;
  std::ostringstream msg;
  msg << "circle picture, max unitarity residual " << result.max_unitarity_residual;
  result.diagnostics.push_back(msg.str());
  return result;
}

double integrate_circle(const std::function<double(Complex)>& g, const QuadratureSpec& quad) {
  auto f = [&](double theta) { return g(Complex(std::cos(theta), std::sin(theta))); };
  return quadrature::integrate(f, {Interval{-kPi, kPi}}, quad).value;
}

double integrate_line_pullback(const std::function<double(Complex)>& g,
                               const QuadratureSpec& quad) {
  // |λ| > 1 is folded onto (−1, 1) by λ = 1/t, where ζ(1/t) = −conj ζ(t) and
  // the weight is again 2/(1+t²); the 1/λ² tail never reaches the tail monitor.
  auto f = [&](double t) {
    const Complex z = line_to_circle(t);
    return (g(z) + g(-std::conj(z))) * measure_weight(t);
  };
  return quadrature::integrate(f, Domain{Interval{-1.0, 1.0}}, quad).value;
}

}  // namespace qtflux::cayley
