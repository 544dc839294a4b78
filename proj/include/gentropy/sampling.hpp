// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "gentropy/models.hpp"
#include "gentropy/numerics.hpp"
#include "gentropy/random.hpp"

namespace gentropy {

using ScoreFn = std::function<Vector(const Vector&)>;
using ScoreAtSigma = std::function<ScoreFn(double)>;

/// Strictly decreasing noise levels sigma_1 > ... > sigma_T > 0 and the base
/// step size epsilon used at the finest level.
struct NoiseSchedule {
  std::vector<double> sigmas;
  double epsilon = 0.005;

  /// alpha_i = epsilon * sigma_i^2 / sigma_T^2
  double alpha(std::size_t level) const;
};

void validate(const NoiseSchedule& schedule);

NoiseSchedule geometric_schedule(double sigma_max, double sigma_min, int levels,
                                 double epsilon = 0.005);

enum class StepRule { Constant, Decaying };

struct ChainConfig {
  int steps = 0;
  int burn_in = 0;
  double alpha = 0.01;
  StepRule rule = StepRule::Constant;
  /// Decaying rule: alpha_t = alpha * (t0 / (t0 + t))^power.
  double decay_t0 = 100.0;
  double decay_power = 0.55;

  double alpha_at(int t) const;
};

void validate(const ChainConfig& config);

/// x + alpha s(x) + sqrt(2 alpha) z with the given z (test hook).
Vector langevin_step(const Vector& x, const ScoreFn& score, double alpha, const Vector& z);
Vector langevin_step(const Vector& x, const ScoreFn& score, double alpha, Rng& rng);
Vector langevin_step(const Vector& x, const ScoreFn& score, double alpha,
                     const RandomStream& stream);

/// Post-burn-in states, one per row. The end state is written to
/// `last` when non-null.
Matrix run_langevin(const Vector& x0, const ScoreFn& score, const ChainConfig& config, Rng& rng,
                    Vector* last = nullptr);
Matrix run_langevin(const Vector& x0, const ScoreFn& score, const ChainConfig& config,
                    const RandomStream& stream);

/// x + sigma * eps, eps ~ N(0, I).
Vector corrupt(const Vector& x, double sigma, Rng& rng);
Vector corrupt(const Vector& x, double sigma, const RandomStream& stream);

/// Langevin at each level, coarsest first, warm-starting every level from
/// the previous end state. Every level keeps its second half; the returned
/// rows are the finest level's post-burn-in states.
Matrix annealed_langevin(const Vector& x0, const ScoreAtSigma& score_at_sigma,
                         const NoiseSchedule& schedule, int steps_per_level, Rng& rng,
                         Vector* last = nullptr);
Matrix annealed_langevin(const Vector& x0, const ScoreAtSigma& score_at_sigma,
                         const NoiseSchedule& schedule, int steps_per_level,
                         const RandomStream& stream);

/// Analytic scores of `target` convolved with N(0, sigma^2 I).
ScoreAtSigma convolved_scores(const ModelPtr& target);

/// End states of independent annealed chains, one row each. Chain c draws
/// its start and its noise from stream.child(c).
Matrix annealed_chains(const Sampler& init, const ScoreAtSigma& score_at_sigma,
                       const NoiseSchedule& schedule, int steps_per_level, int chains,
                       const RandomStream& stream, int threads = 1);

/// Post-burn-in samples of independent plain chains, stacked chain by chain.
Matrix langevin_chains(const Sampler& init, const ScoreFn& score, const ChainConfig& config,
                       int chains, const RandomStream& stream, int threads = 1);

/// Fraction of rows closest (highest responsibility) to each component.
std::vector<double> mode_masses(const Matrix& samples, const GaussianMixtureModel& target);

}  // namespace gentropy
