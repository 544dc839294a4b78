// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>

#include <Eigen/LU>

#include "doctest.h"
#include "gentropy/error.hpp"
#include "gentropy/models.hpp"
#include "gentropy/numerics.hpp"

using namespace gentropy;

namespace {

SpdMatrix spd3() {
  Matrix s(3, 3);
  s << 2.0, 0.3, -0.2, 0.3, 1.0, 0.4, -0.2, 0.4, 1.5;
  return SpdMatrix(s);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

GaussianMixtureModel bimodal() {
  return GaussianMixtureModel({0.7, 0.3}, {vec({-3.0}), vec({3.0})},
                              {SpdMatrix::identity(1), SpdMatrix::identity(1)});
}

double integrate_1d(const ScalarFn& f, double lo, double hi, int n = 20001) {
  const double h = (hi - lo) / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    s += w * f(Vector::Constant(1, lo + i * h));
  }
  return s * h;
}

// FD oracle for every pointwise derivative a density model reports.
void check_pointwise(const DensityModel& m, const Vector& x) {
  const ScalarFn logp = [&](const Vector& y) { return m.log_density_unnorm(y); };
  CHECK(relative_error(m.score(x), finite_diff_gradient(logp, x)) < 1e-7);
  Vector diag(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const ScalarFn si = [&, i](const Vector& y) { return m.score(y)(i); };
    diag(i) = finite_diff_gradient(si, x)(i);
  }
  CHECK(relative_error(m.log_hessian_diag(x), diag) < 1e-6);
  const double w = -m.score(x).squaredNorm() - 2.0 * diag.sum();
  CHECK(m.w_value(x) == doctest::Approx(w).epsilon(1e-6));
  CHECK(w_value(x, m) == m.w_value(x));
}

void check_theta_derivatives(const DensityModel& m, const Vector& x) {
  const Vector th = m.theta();
  const ScalarFn w_of_theta = [&](const Vector& t) { return m.with_theta(t)->w_value(x); };
  CHECK(relative_error(m.theta_grad_w(x), finite_diff_gradient(w_of_theta, th)) < 1e-5);
  const VectorFn g_of_theta = [&](const Vector& t) { return m.with_theta(t)->theta_grad_w(x); };
  CHECK((m.theta_hess_w(x) - finite_diff_jacobian(g_of_theta, th)).norm() /
            std::max(1.0, m.theta_hess_w(x).norm()) < 1e-4);
}

}  // namespace

TEST_CASE("vech and unvech are inverse and run over lower-triangle rows") {
  const Matrix s = spd3().matrix();
  const Vector v = vech(s);
  CHECK(v.size() == vech_size(3));
  CHECK(v(0) == s(0, 0));
  CHECK(v(1) == s(1, 0));
  CHECK(v(2) == s(1, 1));
  CHECK(v(3) == s(2, 0));
  CHECK((unvech(v, 3) - s).norm() == 0.0);
  CHECK_THROWS_AS(unvech(Vector::Zero(4), 3), Error);
}

TEST_CASE("Dataset moments use the biased covariance") {
  Matrix rows(4, 2);
  rows << 1, 2, 3, 4, 5, 0, 7, 2;
  const Dataset d(rows);
  CHECK(d.mean()(0) == doctest::Approx(4.0));
  CHECK(d.covariance()(0, 0) == doctest::Approx(5.0));
  CHECK(d.covariance()(0, 1) == doctest::Approx(-1.0));
  CHECK(Dataset::concat(d, d).size() == 8);
}

TEST_CASE("Gaussian pointwise derivatives match finite differences") {
  const GaussianModel g(vec({0.5, -1.0, 2.0}), spd3());
  check_pointwise(g, vec({0.1, 0.2, 0.3}));
  check_pointwise(g, vec({-2.0, 1.0, 4.0}));
  CHECK(relative_error(g.score(vec({1, 1, 1})), gaussian_score(vec({1, 1, 1}), g)) == 0.0);
}

TEST_CASE("multivariate t pointwise derivatives match finite differences") {
  const MultivariateTModel t(vec({0.5, -1.0, 2.0}), spd3(), 4.0);
  check_pointwise(t, vec({0.1, 0.2, 0.3}));
  check_pointwise(t, vec({3.0, -2.0, 0.0}));
}

TEST_CASE("mixture and product derivatives match finite differences") {
  const GaussianMixtureModel m = bimodal();
  for (double x : {-4.0, -0.3, 0.0, 2.5}) check_pointwise(m, vec({x}));
  const ProductModel p(std::make_shared<GaussianMixtureModel>(bimodal()),
                       std::make_shared<GaussianModel>(vec({1.0}), SpdMatrix::identity(1)));
  CHECK(p.dim() == 2);
  check_pointwise(p, vec({0.5, -0.5}));
}

TEST_CASE("normalized densities integrate to one in 1-D") {
  const GaussianModel g(vec({0.3}), SpdMatrix(Matrix::Constant(1, 1, 2.0)));
  const MultivariateTModel t(vec({0.3}), SpdMatrix(Matrix::Constant(1, 1, 2.0)), 5.0);
  const GaussianMixtureModel m = bimodal();
  for (const DensityModel* d : std::initializer_list<const DensityModel*>{&g, &t, &m}) {
    const double mass = integrate_1d([&](const Vector& x) { return std::exp(d->log_density(x)); }, -200, 200, 200001);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("Gaussian conditional matches the precision-block oracle") {
  const GaussianModel g(vec({0.5, -1.0, 2.0}), spd3());
  const std::vector<int> obs = {0, 2};
  const Vector xo = vec({1.0, 1.0});
  const ModelPtr c = g.conditional(obs, xo);
  const Matrix p = g.sigma().inverse();
  const double pmm = p(1, 1);
  const double mean = g.mu()(1) - (p(1, 0) * (xo(0) - g.mu()(0)) + p(1, 2) * (xo(1) - g.mu()(2))) / pmm;
  const auto& cg = dynamic_cast<const GaussianModel&>(*c);
  CHECK(cg.mu()(0) == doctest::Approx(mean).epsilon(1e-12));
  CHECK(cg.sigma().matrix()(0, 0) == doctest::Approx(1.0 / pmm).epsilon(1e-12));

  const ConditionalBlocks cb = conditional_blocks(g.mu(), g.sigma(), obs);
  CHECK(cb.missing == std::vector<int>{1});
  CHECK(cb.schur.matrix()(0, 0) == doctest::Approx(1.0 / pmm).epsilon(1e-12));

  // grad_x log p(z | x) against FD of the exact conditional density.
  const Vector z = vec({0.4});
  const ScalarFn lc = [&](const Vector& x) { return g.conditional(obs, x)->log_density(z); };
  CHECK(relative_error(g.conditional_score_x(obs, xo, z), finite_diff_gradient(lc, xo)) < 1e-7);
}

TEST_CASE("marginals integrate the joint") {
  Matrix s(2, 2);
  s << 1.0, 0.6, 0.6, 2.0;
  const GaussianModel g(vec({0.0, 1.0}), SpdMatrix(s));
  const MultivariateTModel t(vec({0.0, 1.0}), SpdMatrix(s), 3.0);
  for (const DensityModel* d : std::initializer_list<const DensityModel*>{&g, &t}) {
    const ModelPtr mx = d->marginal({0});
    for (double x : {-1.5, 0.0, 0.7}) {
      const double integral = integrate_1d(
          [&](const Vector& z) { return std::exp(d->log_density(vec({x, z(0)}))); }, -400, 400, 400001);
      CHECK(std::exp(mx->log_density(vec({x}))) == doctest::Approx(integral).epsilon(1e-6));
    }
  }
  const GaussianMixtureModel m = bimodal();
  CHECK(m.marginal({0})->dim() == 1);
}

TEST_CASE("t conditional density and scores are consistent") {
  const MultivariateTModel t(vec({0.5, -1.0, 2.0}), spd3(), 3.0, 2);
  const Vector x = vec({0.2, -0.4});
  const Vector z = vec({1.1});
  const ModelPtr mx = t.marginal({0, 1});
  const double direct = t.log_density(vec({0.2, -0.4, 1.1})) - mx->log_density(x);
  CHECK(t_conditional_log_density(z, x, t) == doctest::Approx(direct).epsilon(1e-12));
  const ScalarFn fz = [&](const Vector& zz) { return t_conditional_log_density(zz, x, t); };
  const ScalarFn fx = [&](const Vector& xx) { return t_conditional_log_density(z, xx, t); };
  CHECK(relative_error(t_cond_score_z(z, x, t), finite_diff_gradient(fz, z)) < 1e-7);
  CHECK(relative_error(t_cond_score_x(z, x, t), finite_diff_gradient(fx, x)) < 1e-7);
  // Reading the determinant coefficient as the full dimension p shifts the
  // score by (p - p_z) g / (nu + d2); the FD oracle rejects that.
  const ConditionalBlocks cb = conditional_blocks(t.mu(), t.sigma(), {0, 1});
  const Vector gx = cb.sigma_oo.solve(Vector(x - cb.mu_o));
  const double d2 = (x - cb.mu_o).dot(gx);
  const Vector full_p = t_cond_score_x(z, x, t) - (3.0 - 1.0) / (3.0 + d2) * gx;
  CHECK(relative_error(full_p, finite_diff_gradient(fx, x)) > 1e-2);
  const ScalarFn fm = [&](const Vector& xx) { return mx->log_density(xx); };
  CHECK(relative_error(t_score_x(x, t), finite_diff_gradient(fm, x)) < 1e-7);
}

TEST_CASE("conditional samplers match quadrature of the conditional density") {
  const MultivariateTModel t(vec({0.5, -1.0, 2.0}), spd3(), 7.0, 2);
  const GaussianModel g(vec({0.5, -1.0, 2.0}), spd3());
  const Vector x = vec({0.2, -0.4});
  const double tm = integrate_1d([&](const Vector& z) { return z(0) * std::exp(t_conditional_log_density(z, x, t)); }, -200, 200, 200001);
  const double tm2 = integrate_1d([&](const Vector& z) { return z(0) * z(0) * std::exp(t_conditional_log_density(z, x, t)); }, -200, 200, 200001);
  const int m = 200000;
  const Matrix ts = gaussian_conditional_sampler(x, t, m, RandomStream(1));
  CHECK(ts.rows() == m);
  const double se = std::sqrt((tm2 - tm * tm) / m);
  CHECK(std::abs(ts.col(0).mean() - tm) < 4.0 * se);
  CHECK(ts.col(0).squaredNorm() / m == doctest::Approx(tm2).epsilon(0.02));

  const ConditionalBlocks cb = conditional_blocks(g.mu(), g.sigma(), {0, 1});
  const double gm = (cb.mu_m + cb.gain * (x - cb.mu_o))(0);
  const Matrix gs = gaussian_conditional_sampler(x, g, m, RandomStream(2));
  CHECK(std::abs(gs.col(0).mean() - gm) < 4.0 * std::sqrt(cb.schur.matrix()(0, 0) / m));
  // Same stream, same draws.
  CHECK(gaussian_conditional_sampler(x, g, 5, RandomStream(2)) == gs.topRows(5));
}

TEST_CASE("theta derivatives of W match finite differences") {
  const GaussianModel g(vec({0.5, -1.0}), SpdMatrix(Matrix(Eigen::Matrix2d{{1.0, 0.3}, {0.3, 2.0}})));
  check_theta_derivatives(g, vec({0.1, 0.7}));
  const MultivariateTModel t(vec({0.5, -1.0}), SpdMatrix(Matrix(Eigen::Matrix2d{{1.0, 0.3}, {0.3, 2.0}})), 5.0);
  check_theta_derivatives(t, vec({0.1, 0.7}));
}

TEST_CASE("unconstrained coordinates round-trip and keep Sigma positive") {
  const GaussianModel g(vec({0.5, -1.0, 2.0}), spd3());
  const Vector eta = g.to_unconstrained();
  CHECK(relative_error(g.from_unconstrained(eta)->theta(), g.theta()) < 1e-12);
  const Matrix jac = g.unconstrained_jacobian();
  for (Eigen::Index k = 0; k < eta.size(); ++k) {
    const ScalarFn comp = [&, k](const Vector& e) { return g.from_unconstrained(e)->theta()(k); };
    CHECK(relative_error(Vector(jac.row(k).transpose()), finite_diff_gradient(comp, eta)) < 1e-6);
  }
  Vector wild = eta;
  wild.tail(6).setConstant(-3.0);
  CHECK_NOTHROW((void)g.from_unconstrained(wild));
}

TEST_CASE("Gaussian smoothing adds t to the covariance") {
  const GaussianModel g(vec({0.5, -1.0, 2.0}), spd3());
  const ModelPtr cp = g.convolved(0.25);
  const auto& c = dynamic_cast<const GaussianModel&>(*cp);
  CHECK((c.sigma().matrix() - spd3().matrix() - 0.25 * Matrix::Identity(3, 3)).norm() < 1e-14);
  const GaussianMixtureModel m = bimodal();
  const ModelPtr cmp = m.convolved(1.0);
  const auto& cm = dynamic_cast<const GaussianMixtureModel&>(*cmp);
  CHECK(cm.components()[0].sigma().matrix()(0, 0) == doctest::Approx(2.0));
  CHECK(cm.weights() == m.weights());
}

TEST_CASE("mixture constructor validates its inputs") {
  CHECK_THROWS_AS(GaussianMixtureModel({0.5, 0.4}, {vec({0.0}), vec({1.0})},
                                       {SpdMatrix::identity(1), SpdMatrix::identity(1)}),
                  Error);
  CHECK_THROWS_AS(GaussianMixtureModel({1.0}, {vec({0.0}), vec({1.0})}, {SpdMatrix::identity(1)}), Error);
  const GaussianMixtureModel m = bimodal();
  CHECK(m.responsibilities(vec({-3.0}))(0) > 0.99);
  CHECK(m.mean()(0) == doctest::Approx(0.7 * -3.0 + 0.3 * 3.0));
}

TEST_CASE("ConditionalRatioModel has the conditional score in z") {
  Matrix s(2, 2);
  s << 1.0, 0.5, 0.5, 2.0;
  const auto joint = std::make_shared<GaussianModel>(vec({0.0, 0.0}), SpdMatrix(s));
  const ConditionalRatioModel r(joint, 1);
  const Vector v = vec({0.3, -0.8});
  CHECK(r.log_density(v) == doctest::Approx(joint->log_density(v) - joint->marginal({0})->log_density(vec({0.3}))));
  check_pointwise(r, v);
}

TEST_CASE("AR residual, W and its theta derivatives") {
  ArModel m{vec({0.5, -0.3}), 1.5};
  const Vector x = vec({1.0, 2.0, 0.5, -1.0, 0.3});
  CHECK(ar_residual(2, x, m) == doctest::Approx(0.5 - 0.5 * 2.0 + 0.3 * 1.0));
  const double r = ar_residual(3, x, m);
  CHECK(ar_w_value(3, x, m) == doctest::Approx(-r * r / (1.5 * 1.5) + 2.0 / 1.5));
  CHECK_THROWS_AS(ar_residual(1, x, m), Error);
  const ScalarFn w = [&](const Vector& th) { return ar_w_value(4, x, ArModel::from_theta(th)); };
  CHECK(relative_error(ar_theta_grad_w(4, x, m), finite_diff_gradient(w, m.theta())) < 1e-7);
  const VectorFn g = [&](const Vector& th) { return ar_theta_grad_w(4, x, ArModel::from_theta(th)); };
  CHECK((ar_theta_hess_w(4, x, m) - finite_diff_jacobian(g, m.theta())).norm() < 1e-5);
  CHECK_THROWS_AS(validate(ArModel{vec({0.1}), -1.0}), Error);
}

TEST_CASE("default hooks raise typed errors") {
  const GaussianMixtureModel m = bimodal();
  try {
    (void)m.conditional({0}, vec({0.0}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() != ErrorCode::ConfigError);
  }
  const GaussianModel g(vec({0.0}), SpdMatrix::identity(1));
  CHECK_THROWS_AS((void)g.score(vec({0.0, 1.0})), Error);
}
