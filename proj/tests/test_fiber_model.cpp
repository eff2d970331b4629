#include <cmath>

#include "doctest.h"
#include "qtflux/density.hpp"
#include "qtflux/dirac_point.hpp"
#include "qtflux/errors.hpp"
#include "qtflux/fiber_model.hpp"

using namespace qtflux;

namespace {

// Energy-dependent rotation mixing two channels; unitary at every λ.
ComplexMatrix rotation(double lambda) {
  const double t = std::atan(lambda) + 0.3;
  ComplexMatrix s(2, 2);
  s << std::cos(t), Complex(0.0, std::sin(t)), Complex(0.0, std::sin(t)), std::cos(t);
  return s;
}

ComplexMatrix lead_density(double lambda) {
  return linops::diagonal({fermi_dirac(lambda, 2.0, 1.0), fermi_dirac(lambda, 2.0, -1.0)});
}

}  // namespace

TEST_CASE("S = I gives zero current") {
  const FunctionFiberModel model(
      quadrature::real_line(), 2, [](double) { return linops::identity(2); },
      [](double) { return linops::diagonal({1.0, 0.0}); },
      [](double l) { return linops::diagonal({std::exp(-l * l), 0.5 * std::exp(-l * l)}); });
  CHECK(lb_current(model).value == 0.0);
}

TEST_CASE("equilibrium density gives zero current") {
  const FunctionFiberModel model(
      quadrature::real_line(), 2, rotation, [](double) { return linops::diagonal({1.0, 0.0}); },
      [](double l) -> ComplexMatrix { return linops::identity(2) * fermi_dirac(l, 1.0, 0.0); });
  const auto res = lb_current_renormalized(model, Occupation::fermi_dirac(1.0, 0.0));
  CHECK(res.value == 0.0);
  bool recorded = false;
  for (const auto& d : res.diagnostics) recorded = recorded || d.find("singular continuous") != std::string::npos;
  CHECK(recorded);
}

TEST_CASE("renormalization with f = 0 is the plain current") {
  const FunctionFiberModel model(
      quadrature::real_line(), 2, rotation, [](double) { return linops::diagonal({1.0, 0.0}); },
      [](double l) { return linops::diagonal({std::exp(-l * l), 0.2 * std::exp(-(l - 1) * (l - 1))}); });
  const double plain = lb_current(model).value;
  const double renorm = lb_current_renormalized(model, Occupation::constant(0.0)).value;
  CHECK(plain == doctest::Approx(renorm).epsilon(1e-14));
  CHECK(plain != 0.0);
}

TEST_CASE("Fermi-Dirac leads: renormalized current matches the cross-section route") {
  const dirac::DiracSpec spec{1.0, 0.3, -0.6, Complex(0.9, 0.2)};
  const DensitySpec leads = DensitySpec::fermi_dirac_per_lead(2.0, {1.0, -0.5});
  const auto res = dirac::model_current(spec, leads, dirac::Lead::minus);
  CHECK(res.relative_gap <= 1e-6);
}

TEST_CASE("gauge shift of the charge leaves the integrand unchanged") {
  for (double l : {-3.0, -0.2, 0.0, 1.7, 25.0}) {
    const ComplexMatrix s = rotation(l);
    const ComplexMatrix q = linops::diagonal({1.0, 0.0});
    const ComplexMatrix rho = lead_density(l);
    const double base = lb_integrand(s, q, rho);
    const double shifted = lb_integrand(s, q + 3.5 * linops::identity(2), rho);
    CHECK(std::abs(base - shifted) <= 3.5 * linops::trace_norm(rho) * 1e-14);
  }
}

TEST_CASE("integrand is linear in rho and in Q") {
  const ComplexMatrix s = rotation(0.4);
  const ComplexMatrix q1 = linops::diagonal({1.0, 0.0});
  const ComplexMatrix q2 = linops::diagonal({0.0, 1.0});
  const ComplexMatrix r1 = lead_density(0.4);
  const ComplexMatrix r2 = linops::diagonal({0.3, 0.9});
  CHECK(std::abs(lb_integrand(s, q1 + 2.0 * q2, r1) -
                 (lb_integrand(s, q1, r1) + 2.0 * lb_integrand(s, q2, r1))) < 1e-12);
  CHECK(std::abs(lb_integrand(s, q1, r1 + 0.5 * r2) -
                 (lb_integrand(s, q1, r1) + 0.5 * lb_integrand(s, q1, r2))) < 1e-12);
}

TEST_CASE("charge completeness") {
  const FunctionFiberModel qa(
      quadrature::real_line(), 2, rotation, [](double) { return linops::diagonal({1.0, 0.0}); },
      [](double l) { return linops::diagonal({std::exp(-l * l), 0.1 * std::exp(-l * l)}); });
  const FunctionFiberModel qb(
      quadrature::real_line(), 2, rotation, [](double) { return linops::diagonal({0.0, 1.0}); },
      [](double l) { return linops::diagonal({std::exp(-l * l), 0.1 * std::exp(-l * l)}); });
  const double a = lb_current(qa).value;
  const double b = lb_current(qb).value;
  CHECK(std::abs(a + b) <= 1e-10);
}

TEST_CASE("fiber mismatch") {
  CHECK_THROWS_AS(lb_integrand(linops::identity(2), linops::identity(3), linops::identity(2)), Error);
  try {
    lb_integrand(linops::identity(2), linops::identity(2), linops::identity(3));
    FAIL("expected FiberMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FiberMismatch);
  }
}

TEST_CASE("truncated limit with compact support is constant once covered") {
  FunctionFiberModel model(
      quadrature::real_line(), 2, rotation, [](double) { return linops::diagonal({1.0, 0.0}); },
      [](double l) {
        return std::abs(l) < 2.0 ? linops::diagonal({1.0, 0.25}) : linops::zero(2, 2);
      });
  model.set_breakpoints({-2.0, 2.0});
  const auto lim = truncated_current_limit(model, {3.0, 5.0, 8.0, 13.0});
  for (double v : lim.values) CHECK(v == doctest::Approx(lim.values.front()).epsilon(1e-12));
}

TEST_CASE("truncated limit converges for Fermi-Dirac leads") {
  const dirac::DiracModel model(dirac::DiracSpec{1.0, 0.0, 0.0, Complex(1.0, 0.0)},
                                DensitySpec::fermi_dirac_per_lead(2.0, {1.0, -1.0}),
                                dirac::Lead::minus);
  // Plain (unrenormalized) windows: Q − S*QS integrates to zero only in the limit.
  const auto lim = truncated_current_limit(model, {4.0, 8.0, 16.0, 32.0});
  const double reference = dirac::decoupled_bias_current(1.0, 1.0, 2.0, 1.0, -1.0);
  CHECK(std::abs(lim.values.back() - reference) <= 1e-8);
  CHECK(std::abs(lim.values[2] - lim.values[1]) < std::abs(lim.values[1] - lim.values[0]));
}

TEST_CASE("Fermi-Dirac difference avoids cancellation") {
  // Both occupations are 1 − O(e^{−80}) at λ = −50.
  const double d = fermi_dirac_difference(-50.0, 2.0, 1.0, -1.0);
  const double exact = std::exp(2.0 * -51.0) - std::exp(2.0 * -49.0);  // leading order
  CHECK(d == doctest::Approx(exact).epsilon(1e-10));
  CHECK(fermi_dirac(0.0, 3.0, 0.0) == 0.5);
}

TEST_CASE("coherent density must stay positive") {
  DensitySpec d = DensitySpec::fermi_dirac_per_lead(1.0, {0.0, 0.0});
  d.tau = [](double) { return Complex(0.6, 0.0); };
  CHECK_THROWS_AS(d.check_admissible(0.0), Error);
  d.tau = [](double) { return Complex(0.3, 0.3); };
  CHECK_NOTHROW(d.check_admissible(0.0));
}
