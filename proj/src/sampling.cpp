// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/sampling.hpp"

#include <cmath>
#include <string>

#include "gentropy/error.hpp"

namespace gentropy {

double NoiseSchedule::alpha(std::size_t level) const {
  // The ratio form makes the final level exactly epsilon.
  const double r = sigmas.at(level) / sigmas.back();
  return epsilon * r * r;
}

void validate(const NoiseSchedule& schedule) {
  if (schedule.sigmas.empty()) fail(ErrorCode::InvalidSchedule, "schedule has no levels");
  if (!(schedule.epsilon > 0.0)) fail(ErrorCode::InvalidSchedule, "epsilon must be > 0");
  for (std::size_t i = 0; i < schedule.sigmas.size(); ++i) {
    if (!(schedule.sigmas[i] > 0.0) || !std::isfinite(schedule.sigmas[i])) {
      fail(ErrorCode::InvalidSchedule, "noise levels must be positive and finite");
    }
    if (i > 0 && !(schedule.sigmas[i] < schedule.sigmas[i - 1])) {
      fail(ErrorCode::InvalidSchedule, "noise levels must be strictly decreasing");
    }
  }
}

NoiseSchedule geometric_schedule(double sigma_max, double sigma_min, int levels, double epsilon) {
  if (!(sigma_max > sigma_min) || !(sigma_min > 0.0)) {
    fail(ErrorCode::InvalidSchedule, "need sigma_max > sigma_min > 0");
  }
  if (levels < 2) fail(ErrorCode::InvalidSchedule, "need at least two levels");
  NoiseSchedule s;
  s.epsilon = epsilon;
  const double ratio = sigma_min / sigma_max;
  for (int i = 0; i < levels; ++i) {
    s.sigmas.push_back(i == levels - 1
                           ? sigma_min
                           : sigma_max * std::pow(ratio, static_cast<double>(i) / (levels - 1)));
  }
  validate(s);
  return s;
}

double ChainConfig::alpha_at(int t) const {
  if (rule == StepRule::Constant) return alpha;
  return alpha * std::pow(decay_t0 / (decay_t0 + t), decay_power);
}

void validate(const ChainConfig& config) {
  if (config.burn_in < 0 || config.steps < config.burn_in) {
    fail(ErrorCode::InvalidArgument, "need steps >= burn_in >= 0");
  }
  if (!(config.alpha > 0.0)) fail(ErrorCode::InvalidArgument, "step size must be > 0");
  if (config.rule == StepRule::Decaying && !(config.decay_t0 > 0.0 && config.decay_power >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "decay parameters must be positive");
  }
}

Vector langevin_step(const Vector& x, const ScoreFn& score, double alpha, const Vector& z) {
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "step size must be > 0");
  return x + alpha * score(x) + std::sqrt(2.0 * alpha) * z;
}

Vector langevin_step(const Vector& x, const ScoreFn& score, double alpha, Rng& rng) {
  Vector out = langevin_step(x, score, alpha, rng.normal_vector(x.size()));
  if (!out.allFinite()) fail(ErrorCode::NonFiniteValue, "Langevin state is not finite");
  return out;
}

Vector langevin_step(const Vector& x, const ScoreFn& score, double alpha,
                     const RandomStream& stream) {
  Rng rng = stream.engine();
  return langevin_step(x, score, alpha, rng);
}

Matrix run_langevin(const Vector& x0, const ScoreFn& score, const ChainConfig& config, Rng& rng,
                    Vector* last) {
  validate(config);
  Matrix out(config.steps - config.burn_in, x0.size());
  Vector x = x0;
  for (int t = 0; t < config.steps; ++t) {
    x = langevin_step(x, score, config.alpha_at(t), rng.normal_vector(x.size()));
    if (!x.allFinite()) {
      fail(ErrorCode::NonFiniteValue, "chain diverged at step " + std::to_string(t));
    }
    if (t >= config.burn_in) out.row(t - config.burn_in) = x.transpose();
  }
  if (last != nullptr) *last = x;
  return out;
}

Matrix run_langevin(const Vector& x0, const ScoreFn& score, const ChainConfig& config,
                    const RandomStream& stream) {
  Rng rng = stream.engine();
  return run_langevin(x0, score, config, rng);
}

Vector corrupt(const Vector& x, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "noise level must be >= 0");
  return x + sigma * rng.normal_vector(x.size());
}

Vector corrupt(const Vector& x, double sigma, const RandomStream& stream) {
  Rng rng = stream.engine();
  return corrupt(x, sigma, rng);
}

Matrix annealed_langevin(const Vector& x0, const ScoreAtSigma& score_at_sigma,
                         const NoiseSchedule& schedule, int steps_per_level, Rng& rng,
                         Vector* last) {
  validate(schedule);
  if (steps_per_level < 1) fail(ErrorCode::InvalidArgument, "need at least one step per level");
  Vector x = x0;
  Matrix kept;
  for (std::size_t i = 0; i < schedule.sigmas.size(); ++i) {
    ChainConfig cfg;
    cfg.steps = steps_per_level;
    cfg.burn_in = steps_per_level / 2;
    cfg.alpha = schedule.alpha(i);
    const ScoreFn score = score_at_sigma(schedule.sigmas[i]);
    Vector end;
    kept = run_langevin(x, score, cfg, rng, &end);
    x = end;
  }
  if (last != nullptr) *last = x;
  return kept;
}

Matrix annealed_langevin(const Vector& x0, const ScoreAtSigma& score_at_sigma,
                         const NoiseSchedule& schedule, int steps_per_level,
                         const RandomStream& stream) {
  Rng rng = stream.engine();
  return annealed_langevin(x0, score_at_sigma, schedule, steps_per_level, rng);
}

ScoreAtSigma convolved_scores(const ModelPtr& target) {
  return [target](double sigma) -> ScoreFn {
    const ModelPtr conv = target->convolved(sigma * sigma);
    return [conv](const Vector& x) { return conv->score(x); };
  };
}

Matrix annealed_chains(const Sampler& init, const ScoreAtSigma& score_at_sigma,
                       const NoiseSchedule& schedule, int steps_per_level, int chains,
                       const RandomStream& stream, int threads) {
  validate(schedule);
  if (chains < 1) fail(ErrorCode::InvalidArgument, "need at least one chain");
  // Scores are built once per level and shared read-only across chains.
  std::vector<ScoreFn> scores;
  for (double s : schedule.sigmas) scores.push_back(score_at_sigma(s));
  const ScoreAtSigma cached = [&](double sigma) {
    for (std::size_t i = 0; i < schedule.sigmas.size(); ++i) {
      if (schedule.sigmas[i] == sigma) return scores[i];
    }
    return score_at_sigma(sigma);
  };
  std::vector<Vector> ends(static_cast<std::size_t>(chains));
  for_each_block(ends.size(), threads, [&](std::size_t c) {
    Rng rng = stream.child(c).engine();
    const Vector x0 = init(rng);
    annealed_langevin(x0, cached, schedule, steps_per_level, rng, &ends[c]);
  });
  Matrix out(chains, ends.front().size());
  for (int c = 0; c < chains; ++c) out.row(c) = ends[static_cast<std::size_t>(c)].transpose();
  return out;
}

Matrix langevin_chains(const Sampler& init, const ScoreFn& score, const ChainConfig& config,
                       int chains, const RandomStream& stream, int threads) {
  validate(config);
  if (chains < 1) fail(ErrorCode::InvalidArgument, "need at least one chain");
  std::vector<Matrix> parts(static_cast<std::size_t>(chains));
  for_each_block(parts.size(), threads, [&](std::size_t c) {
    Rng rng = stream.child(c).engine();
    const Vector x0 = init(rng);
    parts[c] = run_langevin(x0, score, config, rng);
  });
  const Eigen::Index per = config.steps - config.burn_in;
  Matrix out(per * chains, parts.front().cols());
  for (int c = 0; c < chains; ++c) out.middleRows(per * c, per) = parts[static_cast<std::size_t>(c)];
  return out;
}

std::vector<double> mode_masses(const Matrix& samples, const GaussianMixtureModel& target) {
  std::vector<double> mass(target.components().size(), 0.0);
  if (samples.rows() == 0) return mass;
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    Eigen::Index k = 0;
    target.responsibilities(samples.row(r).transpose()).maxCoeff(&k);
    mass[static_cast<std::size_t>(k)] += 1.0;
  }
  for (double& m : mass) m /= static_cast<double>(samples.rows());
  return mass;
}

}  // namespace gentropy
