#pragma once

#include <functional>
#include <optional>

#include "qtflux/fiber_model.hpp"

namespace qtflux::cayley {

// ζ = e^{2i arctan λ}, evaluated with the double-angle formulas so that the
// round trip through circle_to_line keeps full relative precision.
Complex line_to_circle(double lambda);
// λ = tan(arg ζ / 2), arg ∈ (−π, π). Throws DomainExcluded at ζ = −1.
double circle_to_line(Complex zeta);

double line_to_angle(double lambda);
double angle_to_line(double theta);
// dν/dλ = 2/(1+λ²)
double measure_weight(double lambda);

// Pullback of a line fiber model to the circle. The density carries the
// weight (1 + λ²) so that integration against dν reproduces line currents.
class CircleFamily {
 public:
  explicit CircleFamily(const FiberModel& line,
                        std::optional<Occupation> reference = std::nullopt);

  Fiber at(Complex zeta) const;
  Fiber at_angle(double theta) const;
  Domain angular_support() const;
  std::vector<double> angular_breakpoints() const;

 private:
  Fiber at_line(double lambda) const;

  const FiberModel& line_;
  std::optional<Occupation> reference_;
};

CircleFamily transport_fibers(const FiberModel& line,
                              std::optional<Occupation> reference = std::nullopt);

// (1/4π)∫_T tr(ρ(Q − S*QS)) dν over the transported family.
CurrentResult circle_current(const CircleFamily& family, const QuadratureSpec& quad = {});

// ∫_T g dν with ν(T) = 2π, integrated in the angle.
double integrate_circle(const std::function<double(Complex)>& g, const QuadratureSpec& quad = {});
// ∫_ℝ g(e^{2i arctan λ})·2/(1+λ²) dλ, with |λ| > 1 folded onto (−1, 1) by λ = 1/t
double integrate_line_pullback(const std::function<double(Complex)>& g,
                               const QuadratureSpec& quad = {});

}  // namespace qtflux::cayley
