#include <cmath>
#include <random>

#include <Eigen/QR>

#include "doctest.h"
#include "qtflux/errors.hpp"
#include "qtflux/torus_model.hpp"
#include "qtflux/unitary_engine.hpp"

using namespace qtflux;
using namespace qtflux::engine;

namespace {

ComplexMatrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

ComplexMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(n, rng));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

}  // namespace

TEST_CASE("factorization reproduces V") {
  std::mt19937_64 rng(7);
  const ComplexMatrix hermitian = linops::diagonal({2.0, -1.0, 0.0});
  auto fac = factorize(hermitian);
  CHECK(linops::op_norm(fac.c * fac.g * fac.c - hermitian) < 1e-13);
  CHECK(linops::op_norm(fac.c - fac.c.adjoint()) < 1e-14);

  const ComplexMatrix u = random_unitary(4, rng);
  const ComplexMatrix u0 = random_unitary(4, rng);
  const ComplexMatrix v = u - u0;
  fac = factorize(v);
  CHECK(linops::op_norm(fac.c * fac.g * fac.c - v) < 1e-12);
  CHECK(linops::op_norm(fac.g) <= 2.0 + 1e-12);
}

TEST_CASE("pair identities") {
  std::mt19937_64 rng(11);
  const UnitaryPair pair(random_unitary(3, rng), random_unitary(3, rng));
  CHECK(pair.star_identity_residual() < 1e-12);
  CHECK(linops::op_norm(z_function(pair, Complex(0.0, 0.0)) - pair.g().adjoint()) < 1e-14);
  for (const Complex xi : {Complex(0.3, 0.1), Complex(-0.5, 0.6), Complex(0.0, -0.9)}) {
    CHECK(resolvent_identity_residual(pair, xi) < 1e-9);
  }
}

TEST_CASE("scalar Z function") {
  // U = e^{ia}, U₀ = 1: Z(ξ) = G* + G*C ξ/(1 − ξe^{−ia}) C G*.
  const double a = 0.7;
  const UnitaryPair pair(ComplexMatrix::Constant(1, 1, std::polar(1.0, a)),
                         ComplexMatrix::Identity(1, 1));
  const Complex xi(0.4, -0.2);
  const Complex g = pair.g()(0, 0);
  const Complex c = pair.c()(0, 0);
  const Complex expected =
      std::conj(g) + std::conj(g) * c * xi / (1.0 - xi * std::polar(1.0, -a)) * c * std::conj(g);
  CHECK(std::abs(z_function(pair, xi)(0, 0) - expected) < 1e-14);
}

TEST_CASE("dense Abel current vanishes without coupling or with Q = I") {
  std::mt19937_64 rng(3);
  const Eigen::Index n = 4;
  const ComplexMatrix u0 = random_unitary(n, rng);
  const ComplexMatrix rho = linops::diagonal({0.9, 0.1, 0.4, 0.6});
  const ComplexMatrix q = linops::diagonal({1.0, 0.0, 0.0, 1.0});
  const ComplexMatrix p = ComplexMatrix::Identity(n, n);

  const UnitaryPair same(u0, u0);
  CHECK(dense_abel_current(same, rho, q, 0.9, p) == 0.0);

  const UnitaryPair coupled(random_unitary(n, rng), u0);
  CHECK(std::abs(dense_abel_current(coupled, rho, ComplexMatrix::Identity(n, n), 0.9, p)) <
        1e-12);
}

TEST_CASE("prewave of an uncoupled pair is a partial geometric sum") {
  std::mt19937_64 rng(5);
  // P must be a spectral projection of U₀.
  const ComplexMatrix q = random_unitary(3, rng);
  const ComplexMatrix u0 = q * linops::diagonal({
                                   std::polar(1.0, 0.3), std::polar(1.0, 1.9), Complex(-1.0, 0.0)}) *
                           q.adjoint();
  const UnitaryPair pair(u0, u0);
  const ComplexMatrix p = q * linops::diagonal({1.0, 1.0, 0.0}) * q.adjoint();
  const ComplexMatrix w = abel_prewave(pair, 0.5, p);
  const double scale = (w * p).trace().real() / 2.0;
  CHECK(linops::op_norm(w - scale * p) < 1e-14);
  // V = 0 stops after two terms: (1 − r)(1 + r).
  CHECK(scale == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("truncation budget") {
  const std::size_t n = abel_truncation(0.5, 1.0, {});
  CHECK(n > 40);
  CHECK(n < 60);
  AbelOptions tight;
  tight.max_terms = 10;
  CHECK_THROWS_AS(abel_truncation(0.99, 1.0, tight), Error);
}

TEST_CASE("Cesaro average of a commuting state is the state") {
  const ComplexMatrix h = linops::diagonal({0.0, 1.0, 3.0});
  const ComplexMatrix rho = linops::diagonal({0.2, 0.5, 0.3});
  const auto res = cesaro_state(h, rho, 50.0);
  CHECK(linops::op_norm(res.state - rho) < 1e-14);
  CHECK(linops::op_norm(spectral_average(h, rho) - rho) < 1e-14);
  CHECK(res.min_gap == doctest::Approx(1.0));
}

TEST_CASE("Cesaro coherences decay like sinc") {
  const ComplexMatrix h = linops::diagonal({0.0, 1.0});
  ComplexMatrix rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  for (double t : {1.0, 10.0, 1000.0}) {
    const auto res = cesaro_state(h, rho, t);
    const double expected = 0.5 * std::abs(2.0 * std::sin(t / 2.0) / t);
    CHECK(std::abs(std::abs(res.state(0, 1)) - expected) < 1e-13);
    CHECK(std::abs(res.state(0, 0) - 0.5) < 1e-14);
  }
  const ComplexMatrix avg = spectral_average(h, rho);
  CHECK(std::abs(avg(0, 1)) == 0.0);
}

TEST_CASE("torus routes agree with the dense current") {
  const TorusModel model(random_torus_spec(32, 2, 2, 2, 20240521));
  const UnitaryPair pair(model.dense_u(), model.dense_u0());
  for (double r : {0.5, 0.9}) {
    const double dense = dense_abel_current(pair, model.dense_density(), model.dense_charge(), r,
                                            model.dense_p_ac());
    const double resolvent = model.abel_current(r, AbelSummation::resolvent).value;
    const double series = model.abel_current(r, AbelSummation::series).value;
    CHECK(std::abs(resolvent - dense) < 1e-11);
    CHECK(std::abs(series - dense) < 1e-11);
  }
}

TEST_CASE("discrete and continuum Cauchy transforms agree away from the circle") {
  const TorusModel model(random_torus_spec(32, 2, 2, 2, 5));
  const Complex xi(0.5, 0.0);
  const ComplexMatrix diff =
      model.z_compressed(xi, FiberEvaluation::discrete) - model.z_compressed(xi, FiberEvaluation::continuum);
  CHECK(linops::op_norm(diff) < 1e-8);
  CHECK_THROWS_AS(model.fiber_scattering(0, 1.0, FiberEvaluation::discrete), Error);
}

TEST_CASE("fiber scattering and currents") {
  const TorusModel model(random_torus_spec(64, 2, 2, 2, 9));
  const Complex zeta = model.grid_point(5);
  const auto fs = model.fiber_scattering_at(zeta, 1.0);
  CHECK(linops::op_norm(fs.s.adjoint() * fs.s - linops::identity(2)) < 1e-10);

  const auto fc = model.fiber_current();
  CHECK(std::abs(fc.value - fc.symmetric_form) < 1e-10);
  CHECK(fc.max_unitarity_residual < 1e-10);
  CHECK(model.trace_sum() > 0.0);
}

TEST_CASE("equilibrium torus density carries no current") {
  TorusSpec spec = random_torus_spec(32, 2, 2, 2, 13);
  spec.density = [](Complex) -> ComplexMatrix { return 0.4 * linops::identity(2); };
  const TorusModel model(spec);
  CHECK(std::abs(model.fiber_current().value) < 1e-13);
}
