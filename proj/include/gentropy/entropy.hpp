// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>

#include "gentropy/models.hpp"
#include "gentropy/numerics.hpp"
#include "gentropy/random.hpp"

namespace gentropy {

enum class Method { ClosedForm, MonteCarlo, Quadrature };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// Evaluation budget shared by the entropy routines.
struct Budget {
  std::size_t samples = 100000;
  RandomStream stream{0};
  int threads = 1;
  int points_1d = kQuadPoints1d;
  int points_2d = kQuadPoints2d;
};

struct EntropyEstimate {
  double value = 0.0;
  Method method = Method::ClosedForm;
  /// Zero for deterministic methods.
  double std_error = 0.0;
  std::size_t n_used = 0;
};

/// Trapezoid grid over the model's support box (1-D or 2-D only).
QuadratureGrid default_grid(const DensityModel& p, const Budget& budget = {});

/// H_G(p) = E_p ||grad log p||^2.
EntropyEstimate g_entropy(const DensityModel& p, Method method, const Budget& budget = {});
/// The same quantity as -E_p[lap log p].
EntropyEstimate g_entropy_laplacian_form(const DensityModel& p, Method method,
                                         const Budget& budget = {});

/// H_G(p, q) = E_p W(x, q).
EntropyEstimate g_cross_entropy(const DensityModel& p, const DensityModel& q, Method method,
                                const Budget& budget = {});
/// Sample mean of W(x_i, q) over a dataset.
EntropyEstimate g_cross_entropy(const Dataset& data, const DensityModel& q);

/// D_F(p || q) = 1/2 E_p ||s_p - s_q||^2.
EntropyEstimate fisher_divergence(const DensityModel& p, const DensityModel& q, Method method,
                                  const Budget& budget = {});

struct Theorem1Parts {
  /// E_p ||s_p - s_q||^2
  double lhs = 0.0;
  double hg_p = 0.0;
  double cross = 0.0;
  /// Standard error of lhs - (hg_p - cross) (MC only).
  double gap_std_error = 0.0;
  Method method = Method::Quadrature;
};

Theorem1Parts theorem1_decomposition(const DensityModel& p, const DensityModel& q, Method method,
                                     const Budget& budget = {});

/// I_G = H_G(x, y) - H_G(x) - H_G(y), x the first x_dim coordinates.
EntropyEstimate g_mutual_information(const DensityModel& joint, int x_dim, Method method,
                                     const Budget& budget = {});
/// 2 D_F(p_xy || p_x p_y).
EntropyEstimate g_mutual_information_fisher(const DensityModel& joint, int x_dim, Method method,
                                            const Budget& budget = {});

enum class ConditionalForm { Direct, Difference };

/// H_G(y | x): Direct evaluates E W((x,y), p(x,y)/p(x)); Difference
/// evaluates H_G(x,y) - H_G(x).
EntropyEstimate g_conditional_entropy(const DensityModel& joint, int x_dim, Method method,
                                      ConditionalForm form, const Budget& budget = {});

struct MatrixEstimate {
  Matrix value;
  Matrix std_error;
  std::size_t n_used = 0;
};

/// GIM = E_p[s s^T].
MatrixEstimate g_information_matrix(const DensityModel& p, Method method,
                                    const Budget& budget = {});

/// Monte Carlo E_p[score].
McVectorEstimate score_mean_check(const DensityModel& p, const Budget& budget = {});

/// Per-coordinate GI_i as E[s_i^2], -E[d^2 log p / dx_i^2] and Var(s_i),
/// all from one Monte Carlo sample.
struct GiThreeWays {
  Vector score_sq;
  Vector score_sq_se;
  Vector neg_hessian;
  Vector neg_hessian_se;
  Vector variance;
  Vector variance_se;
  std::size_t n_used = 0;

  /// Largest pairwise |a - b| / sqrt(se_a^2 + se_b^2) over coordinates.
  double max_z() const;
};

GiThreeWays gi_three_ways(const DensityModel& p, const Budget& budget = {});

/// E_p log(p/q) on a grid (dims <= 2).
double jkl_divergence(const DensityModel& p, const DensityModel& q, const QuadratureGrid& grid);
double jkl_divergence(const DensityModel& p, const DensityModel& q, const Budget& budget = {});

struct LyuCheck {
  double fd_derivative = 0.0;
  /// -1/2 D_F(p_t || q_t), D_F carrying its own 1/2.
  double neg_half_df = 0.0;
  double fisher = 0.0;
  /// |fd - neg_half_df| / |neg_half_df| (0 when both vanish).
  double relative_gap = 0.0;
};

/// Central difference in t of D_JKL(p_t || q_t) against -1/2 D_F(p_t || q_t),
/// p_t, q_t the exact Gaussian convolutions. One-dimensional models only.
LyuCheck lyu_derivative_check(const DensityModel& p, const DensityModel& q, double t_small,
                              const Budget& budget = {});

double shannon_entropy(const DensityModel& p, const QuadratureGrid& grid);
double shannon_entropy(const DensityModel& p, const Budget& budget = {});
double shannon_cross_entropy(const DensityModel& p, const DensityModel& q,
                             const QuadratureGrid& grid);
double shannon_cross_entropy(const DensityModel& p, const DensityModel& q,
                             const Budget& budget = {});

}  // namespace gentropy
