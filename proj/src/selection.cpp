// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "gentropy/error.hpp"
#include "gentropy/estimation.hpp"

namespace gentropy {

double gic_n(const DensityModel& model, const Dataset& data) {
  if (data.size() == 0) fail(ErrorCode::InsufficientData, "gic_n needs at least one observation");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) acc += model.w_value(data.row(i));
  return acc;
}

double gic_n(const Vector& series, const ArModel& model, Eigen::Index t0) {
  validate(model);
  if (t0 >= series.size()) fail(ErrorCode::InsufficientData, "no observations after t0");
  double acc = 0.0;
  for (Eigen::Index t = t0; t < series.size(); ++t) acc += ar_w_value(t, series, model);
  return acc;
}

double bias_correction(const DensityModel& model, const Dataset& data) {
  const SandwichCovariance s = sandwich_at(model.theta(), data, model);
  return s.d_matrix.fullPivLu().solve(s.lambda_matrix).trace();
}

double gic_c(const DensityModel& model, const Dataset& data) {
  return gic_n(model, data) - bias_correction(model, data);
}

double ar_bias_closed_form(int order, double sigma2) { return 2.0 * (order + 2) / sigma2; }

double ar_gic_c_closed_form(Eigen::Index n, int order, double sigma2) {
  const double nn = static_cast<double>(n);
  return (nn / sigma2) * (1.0 - 2.0 * (order + 2) / nn);
}

namespace {

// Probabilists' Gauss-Hermite rule (weights sum to 1) via Golub-Welsch.
void gauss_hermite(int k, Vector& nodes, Vector& weights) {
  Matrix j = Matrix::Zero(k, k);
  for (int i = 1; i < k; ++i) {
    j(i, i - 1) = std::sqrt(static_cast<double>(i));
    j(i - 1, i) = j(i, i - 1);
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  nodes = es.eigenvalues();
  weights = es.eigenvectors().row(0).transpose().array().square().matrix();
}

double trace_lambda_dinv(const Matrix& d, const Matrix& lambda) {
  return assemble_sandwich(d, lambda).d_matrix.fullPivLu().solve(lambda).trace();
}

void check_t0(const Vector& series, const ArModel& model, Eigen::Index t0) {
  validate(model);
  if (t0 < model.order()) fail(ErrorCode::InsufficientLags, "t0 is smaller than the AR order");
  if (t0 >= series.size()) fail(ErrorCode::InsufficientData, "no observations after t0");
}

}  // namespace

double ar_bias_generic(const Vector& series, const ArModel& model, Eigen::Index t0) {
  check_t0(series, model, t0);
  Vector nodes;
  Vector weights;
  gauss_hermite(12, nodes, weights);
  const int h = model.order() + 1;
  const double sd = std::sqrt(model.sigma2);
  Matrix d = Matrix::Zero(h, h);
  Matrix lambda = Matrix::Zero(h, h);
  Vector work = series;
  for (Eigen::Index t = t0; t < series.size(); ++t) {
    const double fitted = series(t) - ar_residual(t, series, model);
    for (Eigen::Index k = 0; k < nodes.size(); ++k) {
      work(t) = fitted + sd * nodes(k);
      const Vector g = ar_theta_grad_w(t, work, model);
      d -= weights(k) * ar_theta_hess_w(t, work, model);
      lambda += weights(k) * (g * g.transpose());
    }
    work(t) = series(t);
  }
  const double n = static_cast<double>(series.size() - t0);
  return trace_lambda_dinv(d / n, lambda / n);
}

double ar_bias_empirical(const Vector& series, const ArModel& model, Eigen::Index t0) {
  check_t0(series, model, t0);
  const int h = model.order() + 1;
  Matrix d = Matrix::Zero(h, h);
  Matrix lambda = Matrix::Zero(h, h);
  for (Eigen::Index t = t0; t < series.size(); ++t) {
    const Vector g = ar_theta_grad_w(t, series, model);
    d -= ar_theta_hess_w(t, series, model);
    lambda += g * g.transpose();
  }
  const double n = static_cast<double>(series.size() - t0);
  return trace_lambda_dinv(d / n, lambda / n);
}

ArFit fit_ar_least_squares(const Vector& series, int order, Eigen::Index t0) {
  if (order < 0) fail(ErrorCode::InvalidArgument, "AR order must be >= 0");
  if (t0 < order) fail(ErrorCode::InsufficientLags, "t0 is smaller than the AR order");
  const Eigen::Index n = series.size() - t0;
  if (n <= order) fail(ErrorCode::InsufficientData, "too few observations for this order");
  if (!series.allFinite()) fail(ErrorCode::NonFiniteValue, "series has non-finite values");
  Matrix x(n, order);
  Vector y = series.segment(t0, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int i = 1; i <= order; ++i) x(r, i - 1) = series(t0 + r - i);
  }
  ArFit fit;
  fit.n = n;
  fit.model.coeffs = Vector::Zero(order);
  if (order > 0) {
    const SpdMatrix gram(Matrix(x.transpose() * x));
    fit.model.coeffs = gram.solve(Vector(x.transpose() * y));
  }
  const Vector resid = y - x * fit.model.coeffs;
  fit.rss = resid.squaredNorm();
  double s2 = fit.rss / static_cast<double>(n);
  if (s2 < kSigma2Floor) {
    s2 = kSigma2Floor;
    fit.sigma_floor_hit = true;
  }
  fit.model.sigma2 = s2;
  return fit;
}

Criterion parse_criterion(const std::string& s) {
  if (s == "gic_c") return Criterion::GicC;
  if (s == "aic") return Criterion::Aic;
  fail(ErrorCode::ConfigError, "unknown criterion '" + s + "' (expected gic_c or aic)");
}

std::string to_string(Criterion c) { return c == Criterion::GicC ? "gic_c" : "aic"; }

namespace {

// Index of the best value; ties (within relative 1e-12) go to the lowest index.
std::size_t best_index(const std::vector<double>& v, bool maximize, bool* tie) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (maximize ? v[i] > v[best] : v[i] < v[best]) best = i;
  }
  if (tie != nullptr) {
    *tie = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i != best && std::abs(v[i] - v[best]) <= 1e-12 * std::max(1.0, std::abs(v[best]))) {
        *tie = true;
        if (i < best) best = i;
      }
    }
  }
  return best;
}

std::vector<std::size_t> ranking(const std::vector<double>& v, bool descending) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? v[a] > v[b] : v[a] < v[b];
  });
  return idx;
}

}  // namespace

GicReport select_ar_order(const Vector& series, int max_order, const SelectionConfig& config) {
  if (max_order < 0) fail(ErrorCode::InvalidArgument, "max order must be >= 0");
  if (series.size() <= max_order + 10) {
    fail(ErrorCode::InsufficientData, "series needs more than max_order + 10 observations");
  }
  const Eigen::Index t0 = max_order;
  std::vector<ArFit> fits(static_cast<std::size_t>(max_order + 1));
  for_each_block(fits.size(), config.threads, [&](std::size_t p) {
    fits[p] = fit_ar_least_squares(series, static_cast<int>(p), t0);
  });
  GicReport rep;
  rep.criterion = config.criterion;
  rep.n = series.size() - t0;
  const double n = static_cast<double>(rep.n);
  const double largest_sigma2 = fits.back().model.sigma2;
  std::vector<double> gc;
  std::vector<double> aic;
  std::vector<double> lf;
  for (std::size_t p = 0; p < fits.size(); ++p) {
    const ArFit& f = fits[p];
    GicRow row;
    row.order = static_cast<int>(p);
    row.theta_hat = f.model.theta();
    row.sigma2 = f.model.sigma2;
    row.sigma_floor_hit = f.sigma_floor_hit;
    row.gic_n = gic_n(series, f.model, t0);
    const double bias_s2 = config.bias_sigma == BiasSigma::Candidate ? f.model.sigma2 : largest_sigma2;
    row.bias = ar_bias_closed_form(row.order, bias_s2);
    row.gic_c = row.gic_n - row.bias;
    const double mse = std::max(f.rss / n, kSigma2Floor);
    row.aic = n * std::log(mse) + 2.0 * row.order;
    row.log_form = std::log(mse) + 2.0 * row.order / n + 4.0 / n;
    gc.push_back(row.gic_c);
    aic.push_back(row.aic);
    lf.push_back(row.log_form);
    rep.rows.push_back(std::move(row));
  }
  bool tie_gc = false;
  bool tie_aic = false;
  rep.selected_gic_c = static_cast<int>(best_index(gc, true, &tie_gc));
  rep.selected_aic = static_cast<int>(best_index(aic, false, &tie_aic));
  rep.selected_log_form = static_cast<int>(best_index(lf, false, nullptr));
  if (config.criterion == Criterion::GicC) {
    rep.selected_order = rep.selected_gic_c;
    rep.tie_broken = tie_gc;
  } else {
    rep.selected_order = rep.selected_aic;
    rep.tie_broken = tie_aic;
  }
  rep.rankings_agree = ranking(gc, true) == ranking(lf, false);
  return rep;
}

Vector simulate_ar(const ArModel& model, Eigen::Index n, Rng& rng, Eigen::Index burn_in) {
  validate(model);
  const int p = model.order();
  const double sd = std::sqrt(model.sigma2);
  const Eigen::Index total = n + burn_in + p;
  Vector x = Vector::Zero(total);
  for (Eigen::Index t = p; t < total; ++t) {
    double v = sd * rng.normal();
    for (int i = 1; i <= p; ++i) v += model.coeffs(i - 1) * x(t - i);
    x(t) = v;
  }
  return x.tail(n);
}

}  // namespace gentropy
