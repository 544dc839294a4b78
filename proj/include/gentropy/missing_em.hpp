// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "gentropy/estimation.hpp"
#include "gentropy/models.hpp"
#include "gentropy/numerics.hpp"
#include "gentropy/random.hpp"

namespace gentropy {

using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Data with a per-entry observed flag. Rows sharing a mask form a pattern.
class MaskedDataset {
 public:
  struct Pattern {
    std::vector<int> observed;
    std::vector<int> missing;
    std::vector<Eigen::Index> rows;
  };

  MaskedDataset(Matrix values, MaskMatrix mask);
  static MaskedDataset from_complete(const Dataset& data);

  Eigen::Index size() const noexcept { return values_.rows(); }
  Eigen::Index dim() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  const MaskMatrix& mask() const noexcept { return mask_; }
  /// Patterns in lexicographic order of their observed index sets.
  const std::vector<Pattern>& patterns() const noexcept { return patterns_; }
  bool complete() const;
  Vector observed_values(Eigen::Index row, const std::vector<int>& observed) const;
  double missing_fraction() const;

 private:
  Matrix values_;
  MaskMatrix mask_;
  std::vector<Pattern> patterns_;
};

enum class EmMode { Literal, WSurrogate };

EmMode parse_em_mode(const std::string& s);
std::string to_string(EmMode m);

struct EmConfig {
  int m_conditional_samples = 50;
  int max_outer_iters = 100;
  OptimizerConfig inner;
  EmMode mode = EmMode::WSurrogate;
  double convergence_tol = 1e-5;
  int threads = 1;
  /// Sufficient-statistics evaluation of the surrogate for Gaussian models.
  bool gaussian_fast_path = true;
};

void validate(const EmConfig& config);

/// Conditional draws for every incomplete row, taken at theta_t and held
/// fixed while the M-step runs.
struct EStep {
  /// samples[r] is m x |missing| for row r (empty for complete rows).
  std::vector<Matrix> samples;
  int m = 0;
};

EStep draw_e_step(const MaskedDataset& data, const DensityModel& theta_t, int m,
                  const RandomStream& stream, int threads = 1);

/// (1/2n) sum_i ||s(x_i, theta) - s(x_i, theta_t)||^2 over observed blocks.
double g_x_bar(const DensityModel& theta, const DensityModel& theta_t, const MaskedDataset& data);

/// (1/m) sum_j ||s_x(z_j|x, theta) - s_x(z_j|x, theta_t)||^2 with
/// z_j ~ p(z|x; theta_t).
double d_x_t(const Vector& x_obs, const std::vector<int>& observed, const DensityModel& theta,
             const DensityModel& theta_t, int m, const RandomStream& stream);
/// Same with the z-scores s_z.
double d_z_t(const Vector& x_obs, const std::vector<int>& observed, const DensityModel& theta,
             const DensityModel& theta_t, int m, const RandomStream& stream);

struct QBarValue {
  /// Literal sum in literal mode, surrogate otherwise.
  double value = 0.0;
  double g_x = 0.0;
  double h_x = 0.0;
  double h_z = 0.0;
  /// -(1/n) sum_i W(x_i^obs; marginal at theta)
  double w_marginal = 0.0;
  /// -(1/nm) sum_ij W(z_ij; conditional at theta)
  double w_conditional = 0.0;
};

QBarValue q_bar(const DensityModel& theta, const DensityModel& theta_t, const MaskedDataset& data,
                const EStep& estep, EmMode mode);
QBarValue q_bar(const DensityModel& theta, const DensityModel& theta_t, const MaskedDataset& data,
                const EmConfig& config, const RandomStream& stream);

/// Surrogate value through the generic per-row path (any family).
double surrogate_generic(const DensityModel& theta, const MaskedDataset& data, const EStep& estep);
/// Surrogate value through Gaussian sufficient statistics.
double surrogate_gaussian(const GaussianModel& theta, const MaskedDataset& data,
                          const EStep& estep);

struct MStepResult {
  ModelPtr model;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

MStepResult m_step(const DensityModel& theta_t, const MaskedDataset& data, const EStep& estep,
                   const EmConfig& config);
MStepResult m_step(const DensityModel& theta_t, const MaskedDataset& data,
                   const EmConfig& config, const RandomStream& stream);

struct EmIteration {
  int iteration = 0;
  Vector theta_t;
  Vector theta_next;
  double g_x = 0.0;
  double h_x = 0.0;
  double h_z = 0.0;
  double q_bar = 0.0;
  double surrogate = 0.0;
  double step_norm = 0.0;
  bool inner_converged = false;
};

struct EmTrace {
  std::vector<EmIteration> iterations;
  ModelPtr final_model;
  bool converged = false;
};

/// Available-case means and variances (zero covariances) as a start.
ModelPtr em_initial(const DensityModel& family, const MaskedDataset& data);

EmTrace run_em(const MaskedDataset& data, const DensityModel& init, const EmConfig& config,
               const RandomStream& stream);

/// Hide entries of `column` independently with probability `rate`.
MaskedDataset mask_mcar(const Dataset& data, int column, double rate, Rng& rng);

}  // namespace gentropy
