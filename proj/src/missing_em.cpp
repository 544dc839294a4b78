// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/missing_em.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "gentropy/error.hpp"

namespace gentropy {

// ----------------------------------------------------------- MaskedDataset

MaskedDataset::MaskedDataset(Matrix values, MaskMatrix mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
    fail(ErrorCode::DimensionMismatch, "mask shape differs from data shape");
  }
  if (values_.rows() == 0) fail(ErrorCode::InsufficientData, "empty dataset");
  std::map<std::vector<int>, Pattern> groups;
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    std::vector<int> obs;
    std::vector<int> mis;
    for (Eigen::Index c = 0; c < values_.cols(); ++c) {
      if (mask_(r, c)) {
        if (!std::isfinite(values_(r, c))) {
          fail(ErrorCode::NonFiniteValue, "observed entry is not finite in row " + std::to_string(r));
        }
        obs.push_back(static_cast<int>(c));
      } else {
        mis.push_back(static_cast<int>(c));
        values_(r, c) = std::numeric_limits<double>::quiet_NaN();
      }
    }
    if (obs.empty()) {
      fail(ErrorCode::InsufficientData, "row " + std::to_string(r) + " has no observed entries");
    }
    Pattern& p = groups[obs];
    if (p.rows.empty()) {
      p.observed = obs;
      p.missing = mis;
    }
    p.rows.push_back(r);
  }
  for (auto& [key, p] : groups) patterns_.push_back(std::move(p));
}

MaskedDataset MaskedDataset::from_complete(const Dataset& data) {
  return MaskedDataset(data.values(), MaskMatrix::Constant(data.size(), data.dim(), true));
}

bool MaskedDataset::complete() const { return mask_.all(); }

Vector MaskedDataset::observed_values(Eigen::Index row, const std::vector<int>& observed) const {
  Vector v(static_cast<Eigen::Index>(observed.size()));
  for (std::size_t k = 0; k < observed.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = values_(row, observed[k]);
  }
  return v;
}

double MaskedDataset::missing_fraction() const {
  return 1.0 - static_cast<double>(mask_.count()) / static_cast<double>(mask_.size());
}

EmMode parse_em_mode(const std::string& s) {
  if (s == "literal") return EmMode::Literal;
  if (s == "w_surrogate") return EmMode::WSurrogate;
  fail(ErrorCode::ConfigError, "unknown EM mode '" + s + "' (expected literal or w_surrogate)");
}

std::string to_string(EmMode m) { return m == EmMode::Literal ? "literal" : "w_surrogate"; }

void validate(const EmConfig& config) {
  if (config.m_conditional_samples < 1) fail(ErrorCode::ConfigError, "m must be >= 1");
  if (!(config.convergence_tol > 0.0)) fail(ErrorCode::ConfigError, "tol must be > 0");
  if (config.max_outer_iters < 1) fail(ErrorCode::ConfigError, "max_outer_iters must be >= 1");
}

namespace {

bool is_complete(const MaskedDataset::Pattern& p) { return p.missing.empty(); }

ModelPtr observed_marginal(const DensityModel& model, const MaskedDataset::Pattern& p) {
  if (is_complete(p)) return model.with_theta(model.theta());
  return model.marginal(p.observed);
}

Matrix conditional_draws(const DensityModel& theta_t, const std::vector<int>& observed,
                         const Vector& x_obs, int m, Rng& rng) {
  const ModelPtr cond = theta_t.conditional(observed, x_obs);
  Matrix out(m, cond->dim());
  for (int j = 0; j < m; ++j) out.row(j) = cond->sample(rng).transpose();
  return out;
}

double d_gap(const Matrix& z, const std::function<Vector(const Vector&)>& gap) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < z.rows(); ++j) acc += gap(z.row(j).transpose()).squaredNorm();
  return acc / static_cast<double>(z.rows());
}

// Stacked residuals whose squared norm is the literal Q-bar.
Vector literal_residuals(const DensityModel& theta, const DensityModel& theta_t,
                         const MaskedDataset& data, const EStep& estep) {
  const double n = static_cast<double>(data.size());
  const double m = static_cast<double>(std::max(estep.m, 1));
  std::vector<double> out;
  for (const auto& p : data.patterns()) {
    const ModelPtr ma = observed_marginal(theta, p);
    const ModelPtr mb = observed_marginal(theta_t, p);
    for (Eigen::Index r : p.rows) {
      const Vector x = data.observed_values(r, p.observed);
      const Vector g = (ma->score(x) - mb->score(x)) / std::sqrt(2.0 * n);
      out.insert(out.end(), g.data(), g.data() + g.size());
      if (is_complete(p)) continue;
      const ModelPtr ca = theta.conditional(p.observed, x);
      const ModelPtr cb = theta_t.conditional(p.observed, x);
      const Matrix& z = estep.samples[static_cast<std::size_t>(r)];
      for (Eigen::Index j = 0; j < z.rows(); ++j) {
        const Vector zj = z.row(j).transpose();
        const Vector hx = (theta.conditional_score_x(p.observed, x, zj) -
                           theta_t.conditional_score_x(p.observed, x, zj)) /
                          std::sqrt(2.0 * n * m);
        const Vector hz = (ca->score(zj) - cb->score(zj)) / std::sqrt(2.0 * n * m);
        out.insert(out.end(), hx.data(), hx.data() + hx.size());
        out.insert(out.end(), hz.data(), hz.data() + hz.size());
      }
    }
  }
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

// Per-pattern sufficient statistics of the surrogate for Gaussian models.
class GaussianSurrogateStats {
 public:
  GaussianSurrogateStats(const MaskedDataset& data, const EStep& estep)
      : n_(static_cast<double>(data.size())) {
    for (const auto& p : data.patterns()) {
      Group g;
      g.observed = p.observed;
      g.count = static_cast<double>(p.rows.size());
      const int po = static_cast<int>(p.observed.size());
      const int pm = static_cast<int>(p.missing.size());
      Matrix xo(static_cast<Eigen::Index>(p.rows.size()), po);
      for (std::size_t k = 0; k < p.rows.size(); ++k) {
        xo.row(static_cast<Eigen::Index>(k)) = data.observed_values(p.rows[k], p.observed).transpose();
      }
      const Dataset obs(xo);
      g.xbar = obs.mean();
      g.cov = obs.covariance();
      if (pm > 0) {
        g.m1 = Vector::Zero(po + pm);
        g.m2 = Matrix::Zero(po + pm, po + pm);
        double pairs = 0.0;
        for (std::size_t k = 0; k < p.rows.size(); ++k) {
          const Matrix& z = estep.samples[static_cast<std::size_t>(p.rows[k])];
          Vector v(po + pm);
          v.head(po) = xo.row(static_cast<Eigen::Index>(k)).transpose();
          for (Eigen::Index j = 0; j < z.rows(); ++j) {
            v.tail(pm) = z.row(j).transpose();
            g.m1 += v;
            g.m2.noalias() += v * v.transpose();
            pairs += 1.0;
          }
        }
        g.m1 /= pairs;
        g.m2 /= pairs;
      }
      groups_.push_back(std::move(g));
    }
  }

  double value(const GaussianModel& theta) const {
    double acc = 0.0;
    for (const Group& g : groups_) {
      const ModelPtr mp = g.m1.size() == 0 && static_cast<int>(g.observed.size()) == theta.dim()
                              ? theta.with_theta(theta.theta())
                              : theta.marginal(g.observed);
      const auto& marg = static_cast<const GaussianModel&>(*mp);
      const Matrix& p = marg.precision();
      const Vector dm = g.xbar - marg.mu();
      const Matrix s2 = g.cov + dm * dm.transpose();
      acc += g.count * (-(p * p * s2).trace() + 2.0 * p.trace());
      if (g.m1.size() == 0) continue;
      const ConditionalBlocks cb = conditional_blocks(theta.mu(), theta.sigma(), g.observed);
      const Eigen::Index po = static_cast<Eigen::Index>(g.observed.size());
      const Eigen::Index pm = static_cast<Eigen::Index>(cb.missing.size());
      Matrix a(pm, po + pm);
      a << -cb.gain, Matrix::Identity(pm, pm);
      const Vector c = cb.mu_m - cb.gain * cb.mu_o;
      const Vector am1 = a * g.m1;
      const Matrix ce = a * g.m2 * a.transpose() - am1 * c.transpose() - c * am1.transpose() +
                        c * c.transpose();
      const Matrix si = cb.schur.inverse();
      acc += g.count * (-(si * si * ce).trace() + 2.0 * si.trace());
    }
    return -acc / n_;
  }

 private:
  struct Group {
    std::vector<int> observed;
    double count = 0.0;
    Vector xbar;
    Matrix cov;
    Vector m1;
    Matrix m2;
  };

  double n_;
  std::vector<Group> groups_;
};

struct DescentResult {
  Vector eta;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

using EvalFn = std::function<bool(const Vector&, double&, Vector&)>;

// Gradient descent with a Barzilai-Borwein trial step and Armijo halving.
DescentResult descend(const EvalFn& eval, const Vector& eta0, const OptimizerConfig& config) {
  DescentResult res;
  Vector eta = eta0;
  double f = 0.0;
  Vector g;
  if (!eval(eta, f, g)) fail(ErrorCode::NonFiniteValue, "M-step objective not finite at start");
  double step = 1.0 / std::max(1.0, g.norm());
  Vector prev_eta;
  Vector prev_g;
  int it = 0;
  while (it < config.max_iters && g.norm() >= config.grad_tol) {
    if (prev_eta.size() > 0) {
      const Vector s = eta - prev_eta;
      const Vector y = g - prev_g;
      const double sy = std::abs(s.dot(y));
      if (sy > 0.0) step = s.squaredNorm() / sy;
    }
    const double g2 = g.squaredNorm();
    bool accepted = false;
    Vector eta_new;
    double f_new = 0.0;
    Vector g_new;
    for (int h = 0; h <= config.max_halvings; ++h) {
      eta_new = eta - step * g;
      if (eval(eta_new, f_new, g_new)) {
        // Inside the rounding band of f the Armijo test is meaningless;
        // require a smaller gradient instead.
        const bool flat = std::abs(f_new - f) <= 1e-13 * std::max(1.0, std::abs(f));
        if (flat ? g_new.norm() < g.norm() : f_new <= f - config.armijo * step * g2) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
    prev_eta = eta;
    prev_g = g;
    eta = eta_new;
    f = f_new;
    g = g_new;
    ++it;
  }
  res.eta = eta;
  res.iterations = it;
  res.gradient_norm = g.norm();
  res.converged = res.gradient_norm < config.grad_tol;
  return res;
}

Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x(i)));
    Vector a = x;
    Vector b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

}  // namespace

EStep draw_e_step(const MaskedDataset& data, const DensityModel& theta_t, int m,
                  const RandomStream& stream, int threads) {
  if (m < 1) fail(ErrorCode::ConfigError, "m must be >= 1");
  EStep e;
  e.m = m;
  e.samples.resize(static_cast<std::size_t>(data.size()));
  std::vector<std::pair<const MaskedDataset::Pattern*, Eigen::Index>> work;
  for (const auto& p : data.patterns()) {
    if (is_complete(p)) continue;
    for (Eigen::Index r : p.rows) work.emplace_back(&p, r);
  }
  for_each_block(work.size(), threads, [&](std::size_t k) {
    const auto [p, r] = work[k];
    Rng rng = stream.child(static_cast<std::uint64_t>(r)).engine();
    e.samples[static_cast<std::size_t>(r)] =
        conditional_draws(theta_t, p->observed, data.observed_values(r, p->observed), m, rng);
  });
  return e;
}

double g_x_bar(const DensityModel& theta, const DensityModel& theta_t, const MaskedDataset& data) {
  double acc = 0.0;
  for (const auto& p : data.patterns()) {
    const ModelPtr ma = observed_marginal(theta, p);
    const ModelPtr mb = observed_marginal(theta_t, p);
    for (Eigen::Index r : p.rows) {
      const Vector x = data.observed_values(r, p.observed);
      acc += (ma->score(x) - mb->score(x)).squaredNorm();
    }
  }
  const double v = acc / (2.0 * static_cast<double>(data.size()));
  if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "G_x is not finite");
  return v;
}

double d_x_t(const Vector& x_obs, const std::vector<int>& observed, const DensityModel& theta,
             const DensityModel& theta_t, int m, const RandomStream& stream) {
  Rng rng = stream.engine();
  const Matrix z = conditional_draws(theta_t, observed, x_obs, m, rng);
  return d_gap(z, [&](const Vector& zj) {
    return Vector(theta.conditional_score_x(observed, x_obs, zj) -
                  theta_t.conditional_score_x(observed, x_obs, zj));
  });
}

double d_z_t(const Vector& x_obs, const std::vector<int>& observed, const DensityModel& theta,
             const DensityModel& theta_t, int m, const RandomStream& stream) {
  Rng rng = stream.engine();
  const Matrix z = conditional_draws(theta_t, observed, x_obs, m, rng);
  const ModelPtr ca = theta.conditional(observed, x_obs);
  const ModelPtr cb = theta_t.conditional(observed, x_obs);
  return d_gap(z, [&](const Vector& zj) { return Vector(ca->score(zj) - cb->score(zj)); });
}

double surrogate_generic(const DensityModel& theta, const MaskedDataset& data,
                         const EStep& estep) {
  double acc_m = 0.0;
  double acc_c = 0.0;
  for (const auto& p : data.patterns()) {
    const ModelPtr marg = observed_marginal(theta, p);
    for (Eigen::Index r : p.rows) {
      const Vector x = data.observed_values(r, p.observed);
      acc_m += marg->w_value(x);
      if (is_complete(p)) continue;
      const ModelPtr cond = theta.conditional(p.observed, x);
      const Matrix& z = estep.samples[static_cast<std::size_t>(r)];
      for (Eigen::Index j = 0; j < z.rows(); ++j) acc_c += cond->w_value(z.row(j).transpose());
    }
  }
  const double n = static_cast<double>(data.size());
  return -acc_m / n - acc_c / (n * std::max(estep.m, 1));
}

double surrogate_gaussian(const GaussianModel& theta, const MaskedDataset& data,
                          const EStep& estep) {
  return GaussianSurrogateStats(data, estep).value(theta);
}

namespace {

// Conditional scores for one missingness pattern. Gaussian blocks are
// factored once per pattern; other families go through the model.
class ConditionalScorer {
 public:
  ConditionalScorer(const DensityModel& model, const std::vector<int>& observed)
      : model_(model), observed_(observed) {
    if (const auto* g = dynamic_cast<const GaussianModel*>(&model)) {
      blocks_ = std::make_unique<ConditionalBlocks>(conditional_blocks(g->mu(), g->sigma(), observed));
      schur_inv_ = blocks_->schur.inverse();
      trace_ = schur_inv_.trace();
    }
  }

  void set_row(const Vector& x) {
    x_ = x;
    if (blocks_) {
      loc_ = blocks_->mu_m + blocks_->gain * (x - blocks_->mu_o);
    } else {
      cond_ = model_.conditional(observed_, x);
    }
  }

  Vector score_x(const Vector& z) const {
    if (blocks_) return blocks_->gain.transpose() * (schur_inv_ * (z - loc_));
    return model_.conditional_score_x(observed_, x_, z);
  }

  Vector score_z(const Vector& z) const {
    if (blocks_) return -(schur_inv_ * (z - loc_));
    return cond_->score(z);
  }

  double w_z(const Vector& z) const {
    if (blocks_) return -score_z(z).squaredNorm() + 2.0 * trace_;
    return cond_->w_value(z);
  }

 private:
  const DensityModel& model_;
  std::vector<int> observed_;
  std::unique_ptr<ConditionalBlocks> blocks_;
  Matrix schur_inv_;
  double trace_ = 0.0;
  Vector x_;
  Vector loc_;
  ModelPtr cond_;
};

}  // namespace

QBarValue q_bar(const DensityModel& theta, const DensityModel& theta_t, const MaskedDataset& data,
                const EStep& estep, EmMode mode) {
  QBarValue q;
  q.g_x = g_x_bar(theta, theta_t, data);
  const double n = static_cast<double>(data.size());
  double hx = 0.0;
  double hz = 0.0;
  double acc_m = 0.0;
  double acc_c = 0.0;
  for (const auto& p : data.patterns()) {
    const ModelPtr marg = observed_marginal(theta, p);
    if (is_complete(p)) {
      for (Eigen::Index r : p.rows) acc_m += marg->w_value(data.observed_values(r, p.observed));
      continue;
    }
    ConditionalScorer a(theta, p.observed);
    ConditionalScorer b(theta_t, p.observed);
    for (Eigen::Index r : p.rows) {
      const Vector x = data.observed_values(r, p.observed);
      acc_m += marg->w_value(x);
      a.set_row(x);
      b.set_row(x);
      const Matrix& z = estep.samples[static_cast<std::size_t>(r)];
      hx += d_gap(z, [&](const Vector& zj) { return Vector(a.score_x(zj) - b.score_x(zj)); });
      hz += d_gap(z, [&](const Vector& zj) { return Vector(a.score_z(zj) - b.score_z(zj)); });
      for (Eigen::Index j = 0; j < z.rows(); ++j) acc_c += a.w_z(z.row(j).transpose());
    }
  }
  q.h_x = hx / (2.0 * n);
  q.h_z = hz / (2.0 * n);
  q.w_marginal = -acc_m / n;
  q.w_conditional = -acc_c / (n * std::max(estep.m, 1));
  q.value = mode == EmMode::Literal ? q.g_x + q.h_x + q.h_z : q.w_marginal + q.w_conditional;
  return q;
}

QBarValue q_bar(const DensityModel& theta, const DensityModel& theta_t, const MaskedDataset& data,
                const EmConfig& config, const RandomStream& stream) {
  validate(config);
  const EStep e = draw_e_step(data, theta_t, config.m_conditional_samples, stream, config.threads);
  return q_bar(theta, theta_t, data, e, config.mode);
}

MStepResult m_step(const DensityModel& theta_t, const MaskedDataset& data, const EStep& estep,
                   const EmConfig& config) {
  validate(config);
  if (data.dim() != theta_t.dim()) fail(ErrorCode::DimensionMismatch, "data dim mismatch");
  EvalFn eval;
  std::unique_ptr<GaussianSurrogateStats> stats;
  std::function<double(const Vector&)> value;
  if (config.mode == EmMode::Literal) {
    eval = [&](const Vector& eta, double& f, Vector& g) {
      try {
        const Vector r = literal_residuals(*theta_t.from_unconstrained(eta), theta_t, data, estep);
        f = r.squaredNorm();
        const VectorFn rf = [&](const Vector& e) {
          return literal_residuals(*theta_t.from_unconstrained(e), theta_t, data, estep);
        };
        // Gradient 2 J^T r; it vanishes exactly when every residual does.
        g = r.cwiseAbs().maxCoeff() == 0.0 ? Vector(Vector::Zero(eta.size()))
                                           : Vector(2.0 * finite_diff_jacobian(rf, eta).transpose() * r);
        return std::isfinite(f) && g.allFinite();
      } catch (const Error&) {
        return false;
      }
    };
  } else {
    const bool fast = config.gaussian_fast_path &&
                      dynamic_cast<const GaussianModel*>(&theta_t) != nullptr;
    if (fast) stats = std::make_unique<GaussianSurrogateStats>(data, estep);
    value = [&](const Vector& eta) {
      const ModelPtr mdl = theta_t.from_unconstrained(eta);
      if (stats) return stats->value(static_cast<const GaussianModel&>(*mdl));
      return surrogate_generic(*mdl, data, estep);
    };
    eval = [&](const Vector& eta, double& f, Vector& g) {
      try {
        f = value(eta);
        if (!std::isfinite(f)) return false;
        g = central_gradient(value, eta);
        return g.allFinite();
      } catch (const Error&) {
        return false;
      }
    };
  }
  const DescentResult d = descend(eval, theta_t.to_unconstrained(), config.inner);
  MStepResult res;
  res.converged = d.converged;
  res.iterations = d.iterations;
  res.gradient_norm = d.gradient_norm;
  res.model = d.iterations == 0 ? theta_t.with_theta(theta_t.theta())
                                : theta_t.from_unconstrained(d.eta);
  return res;
}

MStepResult m_step(const DensityModel& theta_t, const MaskedDataset& data,
                   const EmConfig& config, const RandomStream& stream) {
  validate(config);
  const EStep e = draw_e_step(data, theta_t, config.m_conditional_samples, stream, config.threads);
  return m_step(theta_t, data, e, config);
}

ModelPtr em_initial(const DensityModel& family, const MaskedDataset& data) {
  const auto* ell = dynamic_cast<const EllipticalModel*>(&family);
  if (ell == nullptr) fail(ErrorCode::Unsupported, "EM start needs a Gaussian or t family");
  if (data.dim() != family.dim()) fail(ErrorCode::DimensionMismatch, "data dim mismatch");
  const int d = family.dim();
  Vector mean(d);
  Vector var(d);
  for (int c = 0; c < d; ++c) {
    double s = 0.0;
    double s2 = 0.0;
    double k = 0.0;
    for (Eigen::Index r = 0; r < data.size(); ++r) {
      if (!data.mask()(r, c)) continue;
      s += data.values()(r, c);
      s2 += data.values()(r, c) * data.values()(r, c);
      k += 1.0;
    }
    if (k < 2.0) fail(ErrorCode::InsufficientData, "column needs two observed entries");
    mean(c) = s / k;
    var(c) = std::max(s2 / k - mean(c) * mean(c), 1e-12);
  }
  if (const auto* t = dynamic_cast<const MultivariateTModel*>(&family); t && t->nu() > 2.0) {
    var *= (t->nu() - 2.0) / t->nu();
  }
  Vector th(family.theta_dim());
  th << mean, vech(Matrix(var.asDiagonal()));
  return family.with_theta(th);
}

EmTrace run_em(const MaskedDataset& data, const DensityModel& init, const EmConfig& config,
               const RandomStream& stream) {
  validate(config);
  EmTrace trace;
  ModelPtr cur = init.with_theta(init.theta());
  for (int t = 0; t < config.max_outer_iters; ++t) {
    const EStep e = draw_e_step(data, *cur, config.m_conditional_samples,
                                stream.child(static_cast<std::uint64_t>(t)), config.threads);
    const MStepResult ms = m_step(*cur, data, e, config);
    const QBarValue q = q_bar(*ms.model, *cur, data, e, config.mode);
    EmIteration it;
    it.iteration = t + 1;
    it.theta_t = cur->theta();
    it.theta_next = ms.model->theta();
    it.g_x = q.g_x;
    it.h_x = q.h_x;
    it.h_z = q.h_z;
    it.q_bar = q.g_x + q.h_x + q.h_z;
    it.surrogate = q.w_marginal + q.w_conditional;
    it.step_norm = (it.theta_next - it.theta_t).norm();
    it.inner_converged = ms.converged;
    trace.iterations.push_back(it);
    cur = ms.model;
    if (it.step_norm < config.convergence_tol) {
      trace.converged = true;
      break;
    }
  }
  trace.final_model = cur;
  return trace;
}

MaskedDataset mask_mcar(const Dataset& data, int column, double rate, Rng& rng) {
  if (column < 0 || column >= data.dim()) fail(ErrorCode::DimensionMismatch, "column out of range");
  if (!(rate >= 0.0 && rate < 1.0)) fail(ErrorCode::InvalidArgument, "rate must be in [0, 1)");
  if (data.dim() < 2) fail(ErrorCode::DimensionMismatch, "masking needs at least two columns");
  MaskMatrix mask = MaskMatrix::Constant(data.size(), data.dim(), true);
  for (Eigen::Index r = 0; r < data.size(); ++r) mask(r, column) = !(rng.uniform() < rate);
  return MaskedDataset(data.values(), std::move(mask));
}

}  // namespace gentropy
