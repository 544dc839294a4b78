// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "gentropy/models.hpp"
#include "gentropy/numerics.hpp"
#include "gentropy/random.hpp"

namespace gentropy {

struct OptimizerConfig {
  int max_iters = 10000;
  double grad_tol = 1e-8;
  double armijo = 1e-4;
  int max_halvings = 60;
};

struct FitResult {
  Vector theta_hat;
  double gic_value = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  /// GIC after each accepted step; the first entry is the initial value.
  std::vector<double> history;
  ModelPtr model;
};

/// Mean of W(x_i, p(theta)) over the data.
double gic(const Vector& theta, const Dataset& data, const DensityModel& family);

/// Maximize GIC by gradient ascent in the family's unconstrained
/// coordinates, starting from `init`'s parameters. Non-convergence is
/// reported through FitResult::converged; the best iterate is returned.
FitResult mgice_fit(const Dataset& data, const DensityModel& init,
                    const OptimizerConfig& config = {});

/// Method-of-moments start for elliptical families (sample mean and
/// covariance, rescaled for t scatter), the family itself otherwise.
ModelPtr moment_initial(const DensityModel& family, const Dataset& data);

struct SandwichCovariance {
  Matrix d_matrix;
  Matrix lambda_matrix;
  Matrix sandwich;
};

inline constexpr double kSingularDCondition = 1e12;

/// D^{-1} Lambda D^{-1} from its two factors; SingularD when D is
/// numerically singular.
SandwichCovariance assemble_sandwich(const Matrix& d, const Matrix& lambda);

/// Empirical D = -mean Hess_theta W and Lambda = mean grad W grad W^T.
SandwichCovariance sandwich_at(const Vector& theta, const Dataset& data,
                               const DensityModel& family);

/// D and Lambda as expectations under the model itself, by Monte Carlo.
SandwichCovariance sandwich_expected(const DensityModel& truth, std::size_t samples,
                                     const RandomStream& stream, int threads = 1);

struct AsymptoticReport {
  int n = 0;
  int replications = 0;
  Vector theta_star;
  /// One row per replication.
  Matrix theta_hats;
  std::vector<bool> converged;
  int not_converged = 0;
  Vector mean_theta_hat;
  /// Standard error of mean_theta_hat.
  Vector mean_std_error;
  /// Covariance of sqrt(n)(theta_hat - theta*) across replications.
  Matrix empirical_cov;
  Matrix sandwich;
  /// max_i |empirical_ii - sandwich_ii| / sandwich_ii
  double diag_gap = 0.0;
};

inline constexpr std::size_t kSandwichReferenceSamples = 1000000;

AsymptoticReport asymptotic_normality_experiment(
    const DensityModel& truth, int n, int replications, const RandomStream& stream,
    int threads = 1, std::size_t reference_samples = kSandwichReferenceSamples);

/// n draws from `model`, one RNG for the whole dataset.
Dataset sample_dataset(const DensityModel& model, int n, Rng& rng);

}  // namespace gentropy
