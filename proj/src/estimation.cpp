// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/estimation.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "gentropy/error.hpp"

namespace gentropy {

double gic(const Vector& theta, const Dataset& data, const DensityModel& family) {
  if (data.size() == 0) fail(ErrorCode::InsufficientData, "gic needs at least one observation");
  const ModelPtr m = family.with_theta(theta);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) acc += m->w_value(data.row(i));
  return acc / static_cast<double>(data.size());
}

namespace {

struct Point {
  ModelPtr model;
  Vector eta;
  double value;
  Vector grad_theta;
  Vector grad_eta;
};

bool evaluate(const DensityModel& family, const GicObjective& obj, const Vector& eta, Point& out) {
  try {
    ModelPtr m = family.from_unconstrained(eta);
    const Vector th = m->theta();
    const double v = obj.value(th);
    if (!std::isfinite(v)) return false;
    Vector g = obj.gradient(th);
    if (!g.allFinite()) return false;
    Vector ge = m->unconstrained_jacobian().transpose() * g;
    out = Point{std::move(m), eta, v, std::move(g), std::move(ge)};
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

FitResult mgice_fit(const Dataset& data, const DensityModel& init, const OptimizerConfig& config) {
  if (init.theta_dim() == 0) fail(ErrorCode::Unsupported, "family has no parameters to fit");
  const std::unique_ptr<GicObjective> obj = init.gic_objective(data);
  Point cur;
  if (!evaluate(init, *obj, init.to_unconstrained(), cur)) {
    fail(ErrorCode::NonFiniteValue, "GIC is not finite at the initial parameters");
  }
  FitResult res;
  res.history.push_back(cur.value);
  double step = 1.0 / std::max(1.0, cur.grad_eta.norm());
  Vector prev_eta;
  Vector prev_grad;
  int it = 0;
  while (it < config.max_iters && cur.grad_theta.norm() >= config.grad_tol) {
    if (prev_eta.size() > 0) {
      const Vector s = cur.eta - prev_eta;
      const Vector y = cur.grad_eta - prev_grad;
      const double sy = std::abs(s.dot(y));
      if (sy > 0.0) step = s.squaredNorm() / sy;
    }
    const double g2 = cur.grad_eta.squaredNorm();
    Point trial;
    bool accepted = false;
    for (int h = 0; h <= config.max_halvings; ++h) {
      if (evaluate(init, *obj, cur.eta + step * cur.grad_eta, trial)) {
        // Near the optimum the Armijo gain sinks below the rounding of the
        // objective; there, progress is judged by the gradient instead.
        const double noise = 1e-13 * std::max(1.0, std::abs(cur.value));
        const bool flat = std::abs(trial.value - cur.value) <= noise;
        if (flat ? trial.grad_eta.norm() < cur.grad_eta.norm()
                 : trial.value >= cur.value + config.armijo * step * g2) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
    prev_eta = cur.eta;
    prev_grad = cur.grad_eta;
    cur = std::move(trial);
    res.history.push_back(cur.value);
    ++it;
  }
  res.theta_hat = cur.model->theta();
  res.gic_value = cur.value;
  res.iterations = it;
  res.gradient_norm = cur.grad_theta.norm();
  res.converged = res.gradient_norm < config.grad_tol;
  res.model = cur.model;
  return res;
}

ModelPtr moment_initial(const DensityModel& family, const Dataset& data) {
  const auto* ell = dynamic_cast<const EllipticalModel*>(&family);
  if (ell == nullptr) return family.with_theta(family.theta());
  if (data.dim() != family.dim()) fail(ErrorCode::DimensionMismatch, "dataset dim mismatch");
  Matrix cov = data.covariance();
  if (const auto* t = dynamic_cast<const MultivariateTModel*>(&family); t && t->nu() > 2.0) {
    cov *= (t->nu() - 2.0) / t->nu();
  }
  Vector th(family.theta_dim());
  th << data.mean(), vech(cov);
  return family.with_theta(th);
}

SandwichCovariance assemble_sandwich(const Matrix& d, const Matrix& lambda) {
  const Matrix ds = 0.5 * (d + d.transpose());
  const Eigen::JacobiSVD<Matrix> svd(ds);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || sv(0) / smin > kSingularDCondition) {
    fail(ErrorCode::SingularD, "D is numerically singular");
  }
  const Eigen::FullPivLU<Matrix> lu(ds);
  const Matrix left = lu.solve(0.5 * (lambda + lambda.transpose()));
  const Matrix sand = lu.solve(Matrix(left.transpose()));
  return SandwichCovariance{ds, 0.5 * (lambda + lambda.transpose()),
                            0.5 * (sand + sand.transpose())};
}

SandwichCovariance sandwich_at(const Vector& theta, const Dataset& data,
                               const DensityModel& family) {
  if (data.size() == 0) fail(ErrorCode::InsufficientData, "sandwich needs data");
  const ModelPtr m = family.with_theta(theta);
  const int h = m->theta_dim();
  Matrix d = Matrix::Zero(h, h);
  Matrix lambda = Matrix::Zero(h, h);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Vector x = data.row(i);
    const Vector g = m->theta_grad_w(x);
    d -= m->theta_hess_w(x);
    lambda += g * g.transpose();
  }
  const double n = static_cast<double>(data.size());
  return assemble_sandwich(d / n, lambda / n);
}

SandwichCovariance sandwich_expected(const DensityModel& truth, std::size_t samples,
                                     const RandomStream& stream, int threads) {
  const int h = truth.theta_dim();
  const VectorFn f = [&truth, h](const Vector& x) {
    const Vector g = truth.theta_grad_w(x);
    const Matrix hess = truth.theta_hess_w(x);
    Vector out(2 * h * h);
    out.head(h * h) = (-hess).reshaped();
    out.tail(h * h) = (g * g.transpose()).reshaped();
    return out;
  };
  const Sampler s = [&truth](Rng& rng) { return truth.sample(rng); };
  const McVectorEstimate est = monte_carlo_expect(f, s, samples, stream, threads);
  const Matrix d = est.mean.head(h * h).reshaped(h, h);
  const Matrix lambda = est.mean.tail(h * h).reshaped(h, h);
  return assemble_sandwich(d, lambda);
}

Dataset sample_dataset(const DensityModel& model, int n, Rng& rng) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "sample size must be >= 0");
  Matrix m(n, model.dim());
  for (int i = 0; i < n; ++i) m.row(i) = model.sample(rng).transpose();
  return Dataset(std::move(m));
}

AsymptoticReport asymptotic_normality_experiment(const DensityModel& truth, int n,
                                                 int replications, const RandomStream& stream,
                                                 int threads, std::size_t reference_samples) {
  if (replications < 100) fail(ErrorCode::InvalidArgument, "need at least 100 replications");
  if (n < 2) fail(ErrorCode::InsufficientData, "need n >= 2");
  AsymptoticReport rep;
  rep.n = n;
  rep.replications = replications;
  rep.theta_star = truth.theta();
  const int h = truth.theta_dim();
  rep.theta_hats = Matrix::Zero(replications, h);
  std::vector<char> conv(static_cast<std::size_t>(replications), 0);
  const RandomStream data_streams = stream.child(0);
  for_each_block(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
    Rng rng = data_streams.child(r).engine();
    const Dataset data = sample_dataset(truth, n, rng);
    const ModelPtr init = moment_initial(truth, data);
    const FitResult fit = mgice_fit(data, *init);
    rep.theta_hats.row(static_cast<Eigen::Index>(r)) = fit.theta_hat.transpose();
    conv[r] = fit.converged ? 1 : 0;
  });
  for (char c : conv) {
    rep.converged.push_back(c != 0);
    if (c == 0) ++rep.not_converged;
  }
  const double reps = replications;
  rep.mean_theta_hat = rep.theta_hats.colwise().mean().transpose();
  const Matrix centered = rep.theta_hats.rowwise() - rep.mean_theta_hat.transpose();
  const Matrix cov = centered.transpose() * centered / (reps - 1.0);
  rep.mean_std_error = (cov.diagonal() / reps).cwiseSqrt();
  rep.empirical_cov = cov * static_cast<double>(n);
  rep.sandwich = sandwich_expected(truth, reference_samples, stream.child(1), threads).sandwich;
  rep.diag_gap = 0.0;
  for (int i = 0; i < h; ++i) {
    const double gap =
        std::abs(rep.empirical_cov(i, i) - rep.sandwich(i, i)) / std::abs(rep.sandwich(i, i));
    rep.diag_gap = std::max(rep.diag_gap, gap);
  }
  return rep;
}

}  // namespace gentropy
