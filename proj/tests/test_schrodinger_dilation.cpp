#include <cmath>

#include "doctest.h"
#include "qtflux/errors.hpp"
#include "qtflux/schrodinger_dilation.hpp"

using namespace qtflux;
using namespace qtflux::schrodinger;

namespace {

// Free particle on [0, 1] with 1/(2m) = 1 and κ = i/2 at both ends.
SampleSpec free_spec() { return SampleSpec{}; }

Complex free_wronskian(double lambda) {
  const double k = std::sqrt(lambda);
  return Complex(0.0, std::cos(k)) + (k + 1.0 / (4.0 * k)) * std::sin(k);
}

}  // namespace

TEST_CASE("free solution from a matches the closed form") {
  const double lambda = 2.3;
  const double k = std::sqrt(lambda);
  const auto sol = solve_elementary(free_spec(), Complex(lambda, 0.0), Side::from_a);
  for (double x : {0.0, 0.25, 0.6, 1.0}) {
    const Complex expected = std::cos(k * x) - Complex(0.0, 0.5 / k) * std::sin(k * x);
    CHECK(std::abs(sol.value(x) - expected) < 1e-8);
  }
  // Boundary condition at a: p(a) = κ_a v(a).
  CHECK(std::abs(sol.value(0.0) - 1.0) < 1e-14);
}

TEST_CASE("Wronskian of the free sample") {
  for (double lambda : {0.4, 2.3, 17.0}) {
    const auto w = wronskian(free_spec(), Complex(lambda, 0.0));
    CHECK(std::abs(w.value - free_wronskian(lambda)) < 1e-7 * std::abs(w.value));
    CHECK(w.spread < 1e-8);
  }
}

TEST_CASE("starred solutions are conjugates at the reflected point") {
  SampleSpec spec = free_spec();
  spec.potential = Profile::piecewise_constant({0.4}, {0.0, 1.5});
  const Complex z(1.7, -0.3);
  const auto star = solve_elementary(spec, z, Side::starred_b);
  const auto plain = solve_elementary(spec, std::conj(z), Side::from_b);
  for (double x : {0.0, 0.3, 0.7}) {
    CHECK(std::abs(star.value(x) - std::conj(plain.value(x))) < 1e-9);
  }
}

TEST_CASE("scattering matrix is unitary and reproduces the closed form") {
  const double lambda = 3.1;
  const double k = std::sqrt(lambda);
  const auto sd = scattering_matrix(free_spec(), lambda);
  CHECK(sd.unitarity_residual < 1e-8);
  CHECK(std::abs(sd.w - free_wronskian(lambda)) < 1e-7);
  const Complex theta_b = (k - 1.0 / (4.0 * k)) * std::sin(k);
  CHECK(std::abs(sd.theta_b - theta_b) < 1e-7);
  CHECK(std::abs(sd.theta_a - std::conj(sd.theta_b)) < 1e-7);
}

TEST_CASE("decoupled ends give the identity characteristic function") {
  SampleSpec spec = free_spec();
  spec.kappa_a = Complex(0.3, 0.0);
  spec.kappa_b = Complex(-0.2, 0.0);
  CHECK(spec.alpha_a() == 0.0);
  const ComplexMatrix theta = characteristic_function(spec, Complex(2.0, -0.5));
  CHECK(linops::op_norm(theta - linops::identity(2)) < 1e-12);
}

TEST_CASE("characteristic function is contractive below the axis") {
  SampleSpec spec = free_spec();
  spec.mass = Profile::piecewise_constant({0.5}, {0.5, 1.0});
  for (const Complex z : {Complex(1.0, -0.1), Complex(4.0, -1.0), Complex(-2.0, -0.5)}) {
    const ComplexMatrix theta = characteristic_function(spec, z);
    CHECK(linops::op_norm(theta) <= 1.0 + 1e-9);
  }
  // Approaches a unitary at the real axis.
  const ComplexMatrix edge = characteristic_function(spec, Complex(2.5, -1e-9));
  CHECK(linops::op_norm(edge.adjoint() * edge - linops::identity(2)) < 1e-6);
}

TEST_CASE("equal lead densities carry no current") {
  const DensitySpec density = DensitySpec::fermi_dirac_per_lead(2.0, {0.7, 0.7});
  const auto res = model_current(free_spec(), density, Charge::a);
  CHECK(std::abs(res.lb.value) < 1e-12);
  CHECK(std::abs(res.direct) < 1e-12);
}

TEST_CASE("biased sample: routes agree and the sign follows the bias") {
  const auto forward = model_current(free_spec(), DensitySpec::fermi_dirac_per_lead(2.0, {1.5, 0.5}),
                                     Charge::a);
  const auto backward = model_current(free_spec(), DensitySpec::fermi_dirac_per_lead(2.0, {0.5, 1.5}),
                                      Charge::a);
  CHECK(forward.relative_gap < 1e-6);
  CHECK(std::abs(forward.lb.value + backward.lb.value) < 1e-8 * std::abs(forward.lb.value));
}

TEST_CASE("invalid samples are rejected") {
  SampleSpec spec = free_spec();
  spec.b = spec.a;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = free_spec();
  spec.mass = Profile::constant(-1.0);
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = free_spec();
  spec.kappa_a = Complex(0.0, -1.0);
  CHECK_THROWS_AS(spec.validate(), Error);
}
