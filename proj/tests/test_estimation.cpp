// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "gentropy/error.hpp"
#include "gentropy/estimation.hpp"

using namespace gentropy;

namespace {

GaussianModel truth2() {
  Matrix s(2, 2);
  s << 1.5, -0.4, -0.4, 0.8;
  Vector mu(2);
  mu << 0.5, -1.0;
  return GaussianModel(mu, SpdMatrix(s));
}

}  // namespace

TEST_CASE("Gaussian MGICE equals the sample mean and biased covariance") {
  const GaussianModel truth = truth2();
  const GaussianModel init(Vector::Zero(2), SpdMatrix::identity(2));
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    Rng rng(seed);
    const Dataset data = sample_dataset(truth, 300, rng);
    const FitResult fit = mgice_fit(data, init);
    Vector mle(5);
    mle << data.mean(), vech(data.covariance());
    CHECK(fit.converged);
    CHECK((fit.theta_hat - mle).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fit.gic_value == doctest::Approx(gic(fit.theta_hat, data, init)).epsilon(1e-12));
    // Ascent: the recorded objective never decreases beyond rounding.
    for (std::size_t k = 1; k < fit.history.size(); ++k) {
      CHECK(fit.history[k] >= fit.history[k - 1] - 1e-12 * std::abs(fit.history[k - 1]));
    }
  }
}

TEST_CASE("the generic GIC path agrees with the Gaussian sufficient-statistics path") {
  Rng rng(8);
  const Dataset data = sample_dataset(truth2(), 200, rng);
  const GaussianModel g = truth2();
  const Vector th = g.theta();
  double direct = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) direct += g.w_value(data.row(i));
  CHECK(gic(th, data, g) == doctest::Approx(direct / static_cast<double>(data.size())).epsilon(1e-12));
}

TEST_CASE("t-family MGICE recovers location and scatter") {
  Vector mu(2);
  mu << 1.0, -0.5;
  Matrix s(2, 2);
  s << 1.0, 0.3, 0.3, 0.6;
  const MultivariateTModel truth(mu, SpdMatrix(s), 6.0);
  Rng rng(21);
  const Dataset data = sample_dataset(truth, 5000, rng);
  const ModelPtr init = moment_initial(truth, data);
  const FitResult fit = mgice_fit(data, *init);
  CHECK(fit.converged);
  CHECK((fit.theta_hat - truth.theta()).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("1-D Gaussian sandwich is diag(sigma^2, 2 sigma^4)") {
  const GaussianModel truth(Vector::Zero(1), SpdMatrix(Matrix::Constant(1, 1, 1.5)));
  const SandwichCovariance sw = sandwich_expected(truth, 400000, RandomStream(4));
  CHECK(sw.sandwich(0, 0) == doctest::Approx(1.5).epsilon(0.02));
  CHECK(sw.sandwich(1, 1) == doctest::Approx(2.0 * 1.5 * 1.5).epsilon(0.03));
  CHECK(std::abs(sw.sandwich(0, 1)) < 0.05);
}

TEST_CASE("assemble_sandwich on known matrices and singular D") {
  Matrix d(2, 2);
  d << 2.0, 0.0, 0.0, 4.0;
  Matrix l(2, 2);
  l << 1.0, 0.5, 0.5, 2.0;
  const SandwichCovariance s = assemble_sandwich(d, l);
  CHECK(s.sandwich(0, 0) == doctest::Approx(0.25));
  CHECK(s.sandwich(0, 1) == doctest::Approx(0.0625));
  CHECK(s.sandwich(1, 1) == doctest::Approx(0.125));
  Matrix sing(2, 2);
  sing << 1.0, 1.0, 1.0, 1.0;
  try {
    (void)assemble_sandwich(sing, l);
    FAIL("expected SingularD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularD);
  }
}

TEST_CASE("asymptotic experiment is reproducible and thread-count invariant") {
  const GaussianModel truth(Vector::Zero(1), SpdMatrix::identity(1));
  const AsymptoticReport a = asymptotic_normality_experiment(truth, 200, 100, RandomStream(6), 1, 20000);
  const AsymptoticReport b = asymptotic_normality_experiment(truth, 200, 100, RandomStream(6), 2, 20000);
  CHECK(a.theta_hats == b.theta_hats);
  CHECK(a.sandwich == b.sandwich);
  CHECK(a.not_converged == 0);
  // 100 replications leave about 14% relative noise on each variance.
  CHECK(a.diag_gap < 0.5);
  CHECK_THROWS_AS((void)asymptotic_normality_experiment(truth, 200, 10, RandomStream(6)), Error);
}

TEST_CASE("fits fail loudly on parameterless families") {
  const GaussianMixtureModel m({1.0}, {Vector::Zero(1)}, {SpdMatrix::identity(1)});
  CHECK_THROWS_AS((void)mgice_fit(Dataset(Matrix::Zero(3, 1)), m), Error);
}
