// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>

#include "doctest.h"
#include "gentropy/entropy.hpp"
#include "gentropy/error.hpp"
#include "gentropy/models.hpp"

using namespace gentropy;

namespace {

GaussianModel g1(double mu, double var) {
  return GaussianModel(Vector::Constant(1, mu), SpdMatrix(Matrix::Constant(1, 1, var)));
}

GaussianModel bivariate(double sx, double sy, double rho) {
  Matrix s(2, 2);
  s << sx * sx, rho * sx * sy, rho * sx * sy, sy * sy;
  return GaussianModel(Vector::Zero(2), SpdMatrix(s));
}

GaussianModel random_gaussian(int d, Rng& rng) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  }
  return GaussianModel(rng.normal_vector(d), SpdMatrix(Matrix(a * a.transpose() + 0.2 * Matrix::Identity(d, d))));
}

Budget mc(std::size_t n, std::uint64_t seed, int threads = 1) {
  Budget b;
  b.samples = n;
  b.stream = RandomStream(seed);
  b.threads = threads;
  return b;
}

GaussianMixtureModel bimodal() {
  return GaussianMixtureModel({0.7, 0.3}, {Vector::Constant(1, -3.0), Vector::Constant(1, 3.0)},
                              {SpdMatrix::identity(1), SpdMatrix::identity(1)});
}

}  // namespace

TEST_CASE("1-D Gaussian G-entropy, cross-entropy and Fisher divergence") {
  const GaussianModel p = g1(0.0, 1.0);
  for (double m : {0.0, 0.5, -2.0}) {
    for (double s2 : {0.5, 1.0, 3.0}) {
      const GaussianModel q = g1(m, s2);
      // W(x, q) = -(x-m)^2/s2^2 + 2/s2 averaged over N(0, 1).
      const double cross = -(1.0 + m * m) / (s2 * s2) + 2.0 / s2;
      const double df = 0.5 * ((1.0 / s2 - 1.0) * (1.0 / s2 - 1.0) + m * m / (s2 * s2));
      CHECK(g_cross_entropy(p, q, Method::ClosedForm).value == doctest::Approx(cross).epsilon(1e-12));
      CHECK(g_cross_entropy(p, q, Method::Quadrature).value == doctest::Approx(cross).epsilon(1e-9));
      CHECK(fisher_divergence(p, q, Method::ClosedForm).value == doctest::Approx(df).epsilon(1e-12));
      CHECK(fisher_divergence(p, q, Method::Quadrature).value == doctest::Approx(df).epsilon(1e-9));
    }
  }
  CHECK(g_entropy(g1(3.0, 0.25), Method::ClosedForm).value == doctest::Approx(4.0));
  CHECK(g_entropy(g1(3.0, 0.25), Method::Quadrature).value == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("the Laplacian form of G-entropy agrees with the squared-score form") {
  const GaussianMixtureModel m = bimodal();
  const double a = g_entropy(m, Method::Quadrature).value;
  const double b = g_entropy_laplacian_form(m, Method::Quadrature).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-8));
  const MultivariateTModel t(Vector::Zero(1), SpdMatrix::identity(1), 5.0);
  // Location Fisher information of a standard t: (nu + 1) / (nu + 3).
  CHECK(g_entropy(t, Method::Quadrature).value == doctest::Approx(6.0 / 8.0).epsilon(1e-6));
  CHECK(g_entropy_laplacian_form(t, Method::Quadrature).value == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("G-cross-entropy is maximized at q = p") {
  Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 1 + trial % 3;
    const GaussianModel p = random_gaussian(d, rng);
    const GaussianModel q = random_gaussian(d, rng);
    const double hp = g_entropy(p, Method::ClosedForm).value;
    const double cross = g_cross_entropy(p, q, Method::ClosedForm).value;
    const double df = fisher_divergence(p, q, Method::ClosedForm).value;
    CHECK(cross <= hp + 1e-12);
    CHECK(df >= 0.0);
    CHECK(2.0 * df == doctest::Approx(hp - cross).epsilon(1e-9));
    CHECK(g_cross_entropy(p, p, Method::ClosedForm).value == doctest::Approx(hp).epsilon(1e-12));
    CHECK(fisher_divergence(p, p, Method::ClosedForm).value == doctest::Approx(0.0));
  }
}

TEST_CASE("decomposition parts hold by quadrature and by Monte Carlo") {
  const Theorem1Parts q = theorem1_decomposition(bimodal(), g1(0.5, 4.0), Method::Quadrature);
  CHECK(std::abs(q.lhs - (q.hg_p - q.cross)) < 1e-6);
  Rng rng(5);
  const GaussianModel p3 = random_gaussian(3, rng);
  const GaussianModel q3 = random_gaussian(3, rng);
  const Theorem1Parts m = theorem1_decomposition(p3, q3, Method::MonteCarlo, mc(100000, 8));
  CHECK(std::abs(m.lhs - (m.hg_p - m.cross)) <= 4.0 * m.gap_std_error);
}

TEST_CASE("Gaussian G-mutual information and conditional G-entropy") {
  for (double rho : {0.0, 0.3, 0.5, 0.8}) {
    const double sx = 1.0;
    const double sy = 2.0;
    const GaussianModel j = bivariate(sx, sy, rho);
    const double joint = (1.0 / (sx * sx) + 1.0 / (sy * sy)) / (1.0 - rho * rho);
    const double ig = joint - 1.0 / (sx * sx) - 1.0 / (sy * sy);
    const double hyx = joint - 1.0 / (sx * sx);
    CHECK(g_mutual_information(j, 1, Method::ClosedForm).value == doctest::Approx(ig).epsilon(1e-12));
    CHECK(g_mutual_information(j, 1, Method::Quadrature).value == doctest::Approx(ig).epsilon(1e-6));
    CHECK(g_mutual_information_fisher(j, 1, Method::Quadrature).value == doctest::Approx(ig).epsilon(1e-6));
    CHECK(g_conditional_entropy(j, 1, Method::Quadrature, ConditionalForm::Direct).value ==
          doctest::Approx(hyx).epsilon(1e-6));
    CHECK(g_conditional_entropy(j, 1, Method::ClosedForm, ConditionalForm::Difference).value ==
          doctest::Approx(hyx).epsilon(1e-12));
  }
  const GaussianModel ex = bivariate(1.0, 2.0, 0.5);
  CHECK(g_mutual_information(ex, 1, Method::ClosedForm).value == doctest::Approx(5.0 / 12.0));
}

TEST_CASE("G-mutual information is nonnegative by Monte Carlo") {
  Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const GaussianModel j = random_gaussian(3, rng);
    const EntropyEstimate e = g_mutual_information(j, 1, Method::MonteCarlo, mc(50000, 100 + trial));
    CHECK(e.value > -4.0 * e.std_error);
    CHECK(g_mutual_information(j, 1, Method::ClosedForm).value >= 0.0);
  }
}

TEST_CASE("G-information matrix and score identities") {
  const GaussianModel g = bivariate(1.0, 2.0, 0.5);
  const MatrixEstimate gim = g_information_matrix(g, Method::MonteCarlo, mc(200000, 3));
  const Matrix exact = g.precision();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(std::abs(gim.value(i, j) - exact(i, j)) < 4.0 * gim.std_error(i, j));
  }
  CHECK(g_information_matrix(g, Method::Quadrature).value.trace() ==
        doctest::Approx(g_entropy(g, Method::ClosedForm).value).epsilon(1e-6));
  const McVectorEstimate sm = score_mean_check(bimodal(), mc(100000, 4));
  CHECK(std::abs(sm.mean(0)) < 4.0 * sm.std_error(0));
  CHECK(gi_three_ways(bimodal(), mc(100000, 5)).max_z() < 4.0);
}

TEST_CASE("Monte Carlo estimates are reproducible across thread counts") {
  const GaussianMixtureModel m = bimodal();
  const EntropyEstimate a = g_entropy(m, Method::MonteCarlo, mc(30000, 9, 1));
  const EntropyEstimate b = g_entropy(m, Method::MonteCarlo, mc(30000, 9, 3));
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.n_used == 30000);
}

TEST_CASE("Shannon and Kullback-Leibler quadrature") {
  CHECK(shannon_entropy(g1(0.0, 2.0)) == doctest::Approx(0.5 * std::log(2.0 * M_PI * M_E * 2.0)).epsilon(1e-8));
  const double kl = 0.5 * (std::log(3.0 / 1.0) + (1.0 + 4.0) / 3.0 - 1.0);
  CHECK(jkl_divergence(g1(0.0, 1.0), g1(2.0, 3.0)) == doctest::Approx(kl).epsilon(1e-8));
  CHECK(shannon_cross_entropy(g1(0.0, 1.0), g1(2.0, 3.0)) - shannon_entropy(g1(0.0, 1.0)) ==
        doctest::Approx(kl).epsilon(1e-8));
}

TEST_CASE("KL derivative under Gaussian smoothing equals minus the Fisher divergence") {
  // With D_F carrying its own one-half, dD/dt = -D_F(p_t || q_t).
  for (const auto& [p, q] : {std::pair{g1(0, 1), g1(1, 1)}, std::pair{g1(0, 1), g1(0, 2)}}) {
    const LyuCheck c = lyu_derivative_check(p, q, 0.01);
    CHECK(c.fd_derivative == doctest::Approx(-c.fisher).epsilon(1e-3));
    CHECK(c.neg_half_df == doctest::Approx(-0.5 * c.fisher));
  }
}

TEST_CASE("entropy functions reject bad input with typed errors") {
  try {
    (void)g_entropy(bimodal(), Method::ClosedForm);
    FAIL("expected UnsupportedClosedForm");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedClosedForm);
  }
  CHECK_THROWS_AS((void)g_cross_entropy(g1(0, 1), bivariate(1, 1, 0), Method::ClosedForm), Error);
  CHECK(parse_method(to_string(Method::Quadrature)) == Method::Quadrature);
  CHECK_THROWS_AS((void)parse_method("simpson"), Error);
}

TEST_CASE("sample G-cross-entropy of data") {
  Matrix rows(3, 1);
  rows << -1.0, 0.0, 1.0;
  const EntropyEstimate e = g_cross_entropy(Dataset(rows), g1(0.0, 1.0));
  CHECK(e.value == doctest::Approx((-1.0 + 2.0 + 2.0 - 1.0 + 2.0) / 3.0));
  CHECK_THROWS_AS((void)g_cross_entropy(Dataset(Matrix::Zero(1, 1)), g1(0.0, 1.0)), Error);
}
