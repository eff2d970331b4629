#include <cmath>

#include "doctest.h"
#include "qtflux/errors.hpp"
#include "qtflux/linops.hpp"
#include "qtflux/quadrature.hpp"

using namespace qtflux;

TEST_CASE("Gaussian over the real line") {
  const auto res = quadrature::integrate([](double x) { return std::exp(-x * x); },
                                         quadrature::real_line());
  CHECK(std::abs(res.value - std::sqrt(kPi)) < 1e-12);
  CHECK(res.error_estimate <= 1e-10);
}

TEST_CASE("exponential over a gapped line") {
  const auto res = quadrature::integrate([](double x) { return std::exp(-std::abs(x)); },
                                         quadrature::gapped_line(1.0));
  CHECK(std::abs(res.value - 2.0 * std::exp(-1.0)) < 1e-12);
}

TEST_CASE("inverse square root edge with substitution") {
  const Domain d{Interval{1.0, 2.0, EdgeTreatment::sqrt_substitution, EdgeTreatment::none}};
  const auto res = quadrature::integrate([](double x) { return 1.0 / std::sqrt(x - 1.0); }, d);
  CHECK(std::abs(res.value - 2.0) < 1e-10);
}

TEST_CASE("additivity over disjoint subdomains") {
  auto f = [](double x) { return std::exp(-0.5 * x * x) * (1.0 + 0.3 * std::sin(3.0 * x)); };
  const double whole = quadrature::integrate(f, {Interval{-3.0, 4.0}}).value;
  const double split = quadrature::integrate(f, {Interval{-3.0, 0.7}}).value +
                       quadrature::integrate(f, {Interval{0.7, 4.0}}).value;
  CHECK(std::abs(whole - split) <= 1e-13 * std::abs(whole));
}

TEST_CASE("identical inputs give bit-identical results") {
  auto f = [](double x) { return 1.0 / (1.0 + x * x * x * x) * std::exp(-0.1 * x * x); };
  QuadratureSpec spec;
  spec.breakpoints = {-1.0, 0.5};
  const auto a = quadrature::integrate(f, quadrature::real_line(), spec);
  const auto b = quadrature::integrate(f, quadrature::real_line(), spec);
  CHECK(a.value == b.value);
  CHECK(a.error_estimate == b.error_estimate);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("breakpoints resolve jumps") {
  QuadratureSpec spec;
  spec.breakpoints = {0.25, 1.5};
  auto box = [](double x) { return x >= 0.25 && x < 1.5 ? 2.0 : 0.0; };
  const auto res = quadrature::integrate(box, {Interval{-1.0, 3.0}}, spec);
  CHECK(std::abs(res.value - 2.5) < 1e-13);
}

TEST_CASE("tail monitor rejects slowly decaying integrands") {
  try {
    quadrature::integrate([](double x) { return 1.0 / (1.0 + std::abs(x)); }, quadrature::real_line());
    FAIL("expected NonIntegrable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonIntegrable);
  }
}

TEST_CASE("subdivision cap") {
  QuadratureSpec spec;
  spec.max_subdivisions = 20;
  spec.tol = 1e-14;
  spec.tail_eps = 1e-16;
  try {
    quadrature::integrate([](double x) { return std::sin(200.0 * x * x); }, {Interval{0.0, 5.0}}, spec);
    FAIL("expected MaxSubdivisions");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MaxSubdivisions);
  }
}

TEST_CASE("invalid spec") {
  QuadratureSpec spec;
  spec.tail_eps = 1.0;
  CHECK_THROWS_AS(quadrature::integrate([](double) { return 0.0; }, {Interval{0.0, 1.0}}, spec), Error);
}
