// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "doctest.h"
#include "gentropy/error.hpp"
#include "gentropy/numerics.hpp"
#include "gentropy/random.hpp"

using namespace gentropy;

namespace {

Matrix random_spd(int d, Rng& rng) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  }
  return a * a.transpose() + 0.3 * Matrix::Identity(d, d);
}

double std_normal_pdf(const Vector& x) {
  return std::exp(-0.5 * x.squaredNorm()) / std::pow(2.0 * M_PI, 0.5 * static_cast<double>(x.size()));
}

}  // namespace

TEST_CASE("SpdMatrix agrees with a generic LU oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + trial % 4;
    const Matrix m = random_spd(d, rng);
    const SpdMatrix s(m);
    const Eigen::FullPivLU<Matrix> lu(m);
    const Vector b = rng.normal_vector(d);
    CHECK((s.solve(b) - lu.solve(b)).norm() < 1e-10);
    CHECK((s.inverse() - lu.inverse()).norm() < 1e-9);
    CHECK(s.log_det() == doctest::Approx(std::log(lu.determinant())).epsilon(1e-10));
    CHECK(s.trace_inverse() == doctest::Approx(lu.inverse().trace()).epsilon(1e-10));
    CHECK((s.chol() * s.chol().transpose() - m).norm() < 1e-10);
  }
}

TEST_CASE("SpdMatrix rejects indefinite and non-square input") {
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(SpdMatrix{m}, Error);
  try {
    SpdMatrix bad(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  CHECK_THROWS_AS(SpdMatrix(Matrix::Ones(2, 3)), Error);
}

TEST_CASE("from_cholesky round-trips") {
  Rng rng(3);
  const SpdMatrix s(random_spd(3, rng));
  const SpdMatrix t = SpdMatrix::from_cholesky(s.chol());
  CHECK((t.matrix() - s.matrix()).norm() < 1e-12);
}

TEST_CASE("trapezoid quadrature reproduces standard normal moments") {
  const QuadratureGrid g1({{-12.0, 12.0}}, kQuadPoints1d);
  CHECK(g1.total_weight() == doctest::Approx(24.0));
  const double m2 = quadrature_expect([](const Vector& x) { return x(0) * x(0); }, std_normal_pdf, g1);
  const double m4 = quadrature_expect([](const Vector& x) { return std::pow(x(0), 4); }, std_normal_pdf, g1);
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-9));

  const QuadratureGrid g2({{-10.0, 10.0}, {-10.0, 10.0}}, kQuadPoints2d);
  CHECK(g2.size() == static_cast<std::size_t>(kQuadPoints2d) * kQuadPoints2d);
  const double cross = quadrature_expect([](const Vector& x) { return x.squaredNorm(); }, std_normal_pdf, g2);
  CHECK(cross == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("quadrature flags a box that misses density mass") {
  const QuadratureGrid narrow({{-2.0, 2.0}}, 401);
  try {
    (void)quadrature_expect([](const Vector&) { return 1.0; }, std_normal_pdf, narrow);
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooCoarse);
  }
}

TEST_CASE("finite differences of a smooth test function") {
  const ScalarFn f = [](const Vector& x) { return std::sin(x(0)) * std::exp(x(1)) + x(0) * x(1) * x(1); };
  Vector x(2);
  x << 0.4, -0.7;
  Vector grad(2);
  grad << std::cos(x(0)) * std::exp(x(1)) + x(1) * x(1), std::sin(x(0)) * std::exp(x(1)) + 2 * x(0) * x(1);
  const double lap = -std::sin(x(0)) * std::exp(x(1)) + std::sin(x(0)) * std::exp(x(1)) + 2 * x(0);
  CHECK(relative_error(finite_diff_gradient(f, x), grad) < 1e-8);
  CHECK(finite_diff_laplacian(f, x) == doctest::Approx(lap).epsilon(1e-5));
  const VectorFn v = [](const Vector& y) { return Vector(y.array().square()); };
  const Matrix jac = finite_diff_jacobian(v, x);
  CHECK(jac(0, 0) == doctest::Approx(2 * x(0)).epsilon(1e-7));
  CHECK(std::abs(jac(0, 1)) < 1e-9);
}

TEST_CASE("Monte Carlo expectation is exact-seeded and thread-count invariant") {
  const Sampler normal = [](Rng& rng) { return rng.normal_vector(2); };
  const ScalarFn sq = [](const Vector& x) { return x.squaredNorm(); };
  const RandomStream stream(2026);
  const McEstimate one = monte_carlo_expect(sq, normal, 50000, stream, 1);
  const McEstimate four = monte_carlo_expect(sq, normal, 50000, stream, 4);
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
  CHECK(one.n == 50000);
  CHECK(std::abs(one.mean - 2.0) < 4.0 * one.std_error);
  const McEstimate other = monte_carlo_expect(sq, normal, 50000, RandomStream(2027), 1);
  CHECK(other.mean != one.mean);
}

TEST_CASE("Monte Carlo standard error shrinks like one over root n") {
  const Sampler normal = [](Rng& rng) { return rng.normal_vector(1); };
  const ScalarFn id = [](const Vector& x) { return x(0); };
  const McEstimate small = monte_carlo_expect(id, normal, 10000, RandomStream(5));
  const McEstimate large = monte_carlo_expect(id, normal, 160000, RandomStream(5));
  CHECK(small.std_error / large.std_error == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("relative_error and complement_indices") {
  CHECK(relative_error(1.5, 1.0) == doctest::Approx(0.5));
  CHECK(relative_error(1e-3, 0.0) == doctest::Approx(1e-3));
  CHECK(complement_indices({0, 2}, 4) == std::vector<int>{1, 3});
  CHECK(complement_indices({}, 2) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(complement_indices({5}, 2), Error);
}
