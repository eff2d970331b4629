#include <random>

#include "doctest.h"
#include "qtflux/errors.hpp"
#include "qtflux/linops.hpp"

using namespace qtflux;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = {re, im};
    }
  }
  return m;
}

}  // namespace

TEST_CASE("psd_sqrt on closed forms") {
  CHECK(linops::op_norm(linops::psd_sqrt(linops::identity(2)) - linops::identity(2)) < 1e-15);
  const ComplexMatrix r = linops::psd_sqrt(linops::diagonal({4.0, 9.0}));
  CHECK(linops::op_norm(r - linops::diagonal({2.0, 3.0})) < 1e-14);
}

TEST_CASE("psd_sqrt squares back for random PSD inputs") {
  std::mt19937_64 rng(11);
  for (Eigen::Index n : {1, 2, 4, 7, 16}) {
    const ComplexMatrix b = random_matrix(rng, n);
    const ComplexMatrix a = b * b.adjoint();
    const ComplexMatrix r = linops::psd_sqrt(a);
    CHECK(linops::is_hermitian(r));
    CHECK(linops::op_norm(r * r - a) <= 1e-10 * (1.0 + linops::op_norm(a)));
  }
}

TEST_CASE("psd_sqrt clamps tiny negative eigenvalues and rejects indefinite input") {
  const ComplexMatrix nearly = linops::diagonal({1.0, -1e-14});
  CHECK(linops::op_norm(linops::psd_sqrt(nearly) - linops::diagonal({1.0, 0.0})) < 1e-15);
  try {
    linops::psd_sqrt(linops::diagonal({1.0, -0.5}));
    FAIL("expected IndefiniteMatrix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndefiniteMatrix);
  }
  ComplexMatrix skew(2, 2);
  skew << 1.0, 1.0, -1.0, 1.0;
  try {
    linops::psd_sqrt(skew);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
}

TEST_CASE("inverse") {
  CHECK(linops::op_norm(linops::inverse(linops::identity(3)) - linops::identity(3)) == 0.0);
  const ComplexMatrix inv = linops::inverse(linops::diagonal({2.0, Complex(0.0, -1.0)}));
  CHECK(linops::op_norm(inv - linops::diagonal({0.5, Complex(0.0, 1.0)})) < 1e-16);

  std::mt19937_64 rng(12);
  const ComplexMatrix a = random_matrix(rng, 6) + 6.0 * linops::identity(6);
  CHECK(linops::op_norm(a * linops::inverse(a) - linops::identity(6)) < 1e-13);
  CHECK(linops::op_norm(linops::inverse(linops::inverse(a)) - a) <= 1e-8 * linops::op_norm(a));

  try {
    linops::inverse(linops::diagonal({1.0, 0.0}));
    FAIL("expected Singular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Singular);
  }
}

TEST_CASE("trace norm") {
  CHECK(linops::trace_norm(linops::zero(3, 3)) == 0.0);
  CHECK(linops::trace_norm(linops::diagonal({1.0, -2.0, Complex(0.0, 3.0)})) ==
        doctest::Approx(6.0).epsilon(1e-14));
  ComplexVector u(3), v(3);
  u << 1.0, Complex(0.0, 2.0), -1.0;
  v << Complex(0.5, 0.5), 2.0, 0.0;
  const ComplexMatrix rank1 = u * v.adjoint();
  CHECK(linops::trace_norm(rank1) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-13));
}

TEST_CASE("norm ordering on random matrices") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10; ++i) {
    const ComplexMatrix a = random_matrix(rng, 5);
    const double tn = linops::trace_norm(a);
    const double op = linops::op_norm(a);
    CHECK(tn >= op);
    CHECK(op >= std::abs(linops::trace(a)) / 5.0);
  }
}

TEST_CASE("hermitian_eig is reproducible") {
  std::mt19937_64 rng(14);
  const ComplexMatrix b = random_matrix(rng, 8);
  const ComplexMatrix h = b + b.adjoint();
  const auto e1 = linops::hermitian_eig(h);
  const auto e2 = linops::hermitian_eig(h);
  CHECK((e1.values - e2.values).norm() == 0.0);
  CHECK((e1.vectors - e2.vectors).norm() == 0.0);
  const ComplexMatrix rebuilt =
      e1.vectors * e1.values.cast<Complex>().asDiagonal() * e1.vectors.adjoint();
  CHECK(linops::op_norm(rebuilt - h) < 1e-12 * linops::op_norm(h));
}
