#include <cmath>
#include <random>

#include "doctest.h"
#include "qtflux/dirac_point.hpp"
#include "qtflux/errors.hpp"

using namespace qtflux;

TEST_CASE("Weyl function at lambda = 5/3") {
  const dirac::DiracSpec spec{1.0, 0.0, 0.0, Complex(1.0, 0.0)};
  const ComplexMatrix m = dirac::weyl_function(spec, 5.0 / 3.0);
  CHECK(std::abs(m(0, 0) - Complex(0.0, 2.0)) < 1e-14);
  CHECK(std::abs(m(1, 1) - Complex(0.0, 0.5)) < 1e-14);
  CHECK(std::abs(m(0, 1)) == 0.0);
  // Both rays give PSD Im M.
  const ComplexMatrix left = dirac::weyl_function(spec, -5.0 / 3.0);
  CHECK(left(0, 0).imag() > 0.0);
  CHECK(left(1, 1).imag() > 0.0);
}

TEST_CASE("Weyl function tends to iI") {
  const dirac::DiracSpec spec{1.0, 0.0, 0.0, Complex(1.0, 0.0)};
  const ComplexMatrix m = dirac::weyl_function(spec, 1e8);
  CHECK(linops::op_norm(m - Complex(0.0, 1.0) * linops::identity(2)) < 1e-7);
}

TEST_CASE("inside the gap") {
  const dirac::DiracSpec spec{1.0, 0.0, 0.0, Complex(1.0, 0.0)};
  for (double l : {0.0, 0.5, -0.99, 1.0, 1.0 + 1e-10}) {
    try {
      dirac::weyl_function(spec, l);
      FAIL("expected InsideGap");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsideGap);
    }
  }
  CHECK_THROWS_AS(dirac::cross_section(spec, 0.3), Error);
}

TEST_CASE("S at lambda = 5/3 with b = 0, r = 1") {
  // det(B − M) = (−2i)(−i/2) − 1 = −2, so S is the full swap [[0, i], [i, 0]].
  const dirac::DiracSpec spec{1.0, 0.0, 0.0, Complex(1.0, 0.0)};
  CHECK(std::abs(dirac::interaction_determinant(spec, 5.0 / 3.0) - Complex(-2.0, 0.0)) < 1e-14);
  ComplexMatrix expected(2, 2);
  expected << 0.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 0.0;
  CHECK(linops::op_norm(dirac::s_matrix(spec, 5.0 / 3.0) - expected) < 1e-14);
  CHECK(dirac::cross_section(spec, 5.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("decoupled leads") {
  const dirac::DiracSpec spec{1.0, 0.0, 0.0, Complex(0.0, 0.0)};
  for (double l : {-4.0, 1.5, 30.0}) {
    const ComplexMatrix s = dirac::s_matrix(spec, l);
    CHECK(s(0, 1) == Complex(0.0, 0.0));
    CHECK(s(1, 0) == Complex(0.0, 0.0));
    CHECK(dirac::cross_section(spec, l) == 0.0);
  }
}

TEST_CASE("closed-form transition entries and unitarity") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int draw = 0; draw < 10; ++draw) {
    const dirac::DiracSpec spec{0.5 + std::abs(u(rng)), u(rng), u(rng), Complex(u(rng), u(rng))};
    for (double l : {-50.0, -3.7, -spec.a * 1.001, spec.a * 1.0001, 2.2 * spec.a, 400.0}) {
      const ComplexMatrix s = dirac::s_matrix(spec, l);
      const auto t = dirac::transition_entries(spec, l);
      CHECK(std::abs(s(0, 0) - 1.0 - t.mm) < 1e-12);
      CHECK(std::abs(s(0, 1) - t.mp) < 1e-12);
      CHECK(std::abs(s(1, 0) - t.pm) < 1e-12);
      CHECK(std::abs(s(1, 1) - 1.0 - t.pp) < 1e-12);
      CHECK(linops::unitarity_residual(s) <= 1e-12);
      const double sigma = dirac::cross_section(spec, l);
      CHECK(std::abs(std::norm(t.mp) - std::norm(t.pm)) < 1e-13);
      CHECK(std::abs(sigma - std::norm(t.mp)) < 1e-12);
      CHECK(sigma <= 2.0);
    }
  }
}

TEST_CASE("cross section depends on |r| only") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const dirac::DiracSpec base{1.0, 0.7, -0.2, Complex(1.3, 0.0)};
  for (int i = 0; i < 10; ++i) {
    dirac::DiracSpec rotated = base;
    rotated.r = std::polar(1.3, phase(rng));
    for (double l : {-2.0, 1.2, 6.0}) {
      CHECK(dirac::cross_section(rotated, l) ==
            doctest::Approx(dirac::cross_section(base, l)).epsilon(1e-13));
    }
  }
}

TEST_CASE("b = 0 current matches the closed form") {
  const DensitySpec leads = DensitySpec::fermi_dirac_per_lead(3.0, {2.0, 0.5});
  for (double r : {0.1, 1.0, 10.0}) {
    const auto res = dirac::model_current(dirac::DiracSpec{1.0, 0.0, 0.0, Complex(r, 0.0)}, leads,
                                          dirac::Lead::minus);
    const double exact = dirac::decoupled_bias_current(1.0, r, 3.0, 2.0, 0.5);
    CHECK(res.lb.value == doctest::Approx(exact).epsilon(1e-6));
    CHECK(res.direct == doctest::Approx(exact).epsilon(1e-6));
    CHECK(res.lb.value > 0.0);  // flows from the higher chemical potential
  }
}

TEST_CASE("b = 0, |r| = 1 with box densities") {
  // (1/2π)∫(ρ₋ − ρ₊) with ρ₋ = 1 on [1.5, 3.5] and ρ₊ = 0.5 on [−4, −2].
  DensitySpec leads = DensitySpec::tabulated({Occupation::box(1.5, 3.5, 1.0), Occupation::box(-4.0, -2.0, 0.5)});
  const dirac::DiracModel model(dirac::DiracSpec{1.0, 0.0, 0.0, Complex(1.0, 0.0)}, leads,
                                dirac::Lead::minus);
  CHECK(lb_current(model).value == doctest::Approx((2.0 - 1.0) / kTwoPi).epsilon(1e-9));
}

TEST_CASE("charge antisymmetry and bound") {
  const DensitySpec leads = DensitySpec::fermi_dirac_per_lead(1.0, {0.5, -1.5});
  const dirac::DiracSpec spec{0.8, 1.2, -0.7, Complex(0.4, -0.9)};
  const auto jm = dirac::model_current(spec, leads, dirac::Lead::minus);
  const auto jp = dirac::model_current(spec, leads, dirac::Lead::plus);
  CHECK(std::abs(jm.lb.value + jp.lb.value) <= 1e-9);

  const DensitySpec boxes = DensitySpec::tabulated({Occupation::box(1.0, 4.0, 0.7), Occupation::box(-3.0, -1.0, 0.4)});
  const dirac::DiracModel model(spec, boxes, dirac::Lead::minus);
  const double bound = (3.0 * 0.7 + 2.0 * 0.4) / kPi;
  CHECK(std::abs(lb_current(model).value) <= bound);
}

TEST_CASE("equilibrium leads carry no current") {
  const auto res = dirac::model_current(dirac::DiracSpec{1.0, 0.3, 0.3, Complex(2.0, 1.0)},
                                        DensitySpec::fermi_dirac_per_lead(2.0, {0.4, 0.4}),
                                        dirac::Lead::minus);
  CHECK(std::abs(res.lb.value) <= 1e-10);
  CHECK(std::abs(res.direct) <= 1e-10);
}

TEST_CASE("current vanishes for strong coupling") {
  const DensitySpec leads = DensitySpec::fermi_dirac_per_lead(2.0, {1.5, -0.5});
  const double j1 = dirac::model_current(dirac::DiracSpec{1.0, 0.0, 0.0, Complex(1.0, 0.0)}, leads, dirac::Lead::minus).lb.value;
  const double jbig = dirac::model_current(dirac::DiracSpec{1.0, 0.0, 0.0, Complex(1e3, 0.0)}, leads, dirac::Lead::minus).lb.value;
  CHECK(std::abs(jbig) <= 1e-4 * std::abs(j1));
}
