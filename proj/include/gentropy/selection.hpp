// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "gentropy/models.hpp"
#include "gentropy/numerics.hpp"

namespace gentropy {

/// Sum of W over the observations (n times gic).
double gic_n(const DensityModel& model, const Dataset& data);
/// Sum of the AR W-values over t = t0 .. N-1.
double gic_n(const Vector& series, const ArModel& model, Eigen::Index t0);

/// tr(Lambda D^{-1}) with the empirical matrices at the model's parameters.
double bias_correction(const DensityModel& model, const Dataset& data);
double gic_c(const DensityModel& model, const Dataset& data);

/// 2(p+2)/sigma2
double ar_bias_closed_form(int order, double sigma2);
/// (n/sigma2)(1 - 2(p+2)/n)
double ar_gic_c_closed_form(Eigen::Index n, int order, double sigma2);

/// tr(Lambda D^{-1}) for an AR model with D and Lambda averaged over
/// t = t0 .. N-1, each term taken in expectation over the innovation
/// r ~ N(0, sigma2) given the observed lags (Gauss-Hermite, exact for the
/// polynomial integrands involved).
double ar_bias_generic(const Vector& series, const ArModel& model, Eigen::Index t0);
/// Same trace with the observed residuals plugged in directly.
double ar_bias_empirical(const Vector& series, const ArModel& model, Eigen::Index t0);

inline constexpr double kSigma2Floor = 1e-12;

struct ArFit {
  ArModel model;
  double rss = 0.0;
  Eigen::Index n = 0;
  bool sigma_floor_hit = false;
};

/// Conditional least squares on t = t0 .. N-1 (normal equations, Cholesky).
ArFit fit_ar_least_squares(const Vector& series, int order, Eigen::Index t0);

enum class Criterion { GicC, Aic };
enum class BiasSigma { Candidate, Largest };

Criterion parse_criterion(const std::string& s);
std::string to_string(Criterion c);

struct GicRow {
  int order = 0;
  Vector theta_hat;
  double sigma2 = 0.0;
  double gic_n = 0.0;
  double bias = 0.0;
  double gic_c = 0.0;
  double aic = 0.0;
  /// log(RSS/n) + 2p/n + 4/n
  double log_form = 0.0;
  bool sigma_floor_hit = false;
};

struct GicReport {
  std::vector<GicRow> rows;
  Criterion criterion = Criterion::GicC;
  int selected_order = 0;
  bool tie_broken = false;
  int selected_gic_c = 0;
  int selected_aic = 0;
  int selected_log_form = 0;
  /// Whether ranking by gic_c (descending) and by log_form (ascending)
  /// give the same order of candidates.
  bool rankings_agree = false;
  Eigen::Index n = 0;
};

struct SelectionConfig {
  Criterion criterion = Criterion::GicC;
  BiasSigma bias_sigma = BiasSigma::Candidate;
  int threads = 1;
};

GicReport select_ar_order(const Vector& series, int max_order, const SelectionConfig& config = {});

/// Simulate a stationary AR series of length n after `burn_in` discarded draws.
Vector simulate_ar(const ArModel& model, Eigen::Index n, Rng& rng, Eigen::Index burn_in = 200);

}  // namespace gentropy
