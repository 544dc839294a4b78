// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/entropy.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "gentropy/error.hpp"

namespace gentropy {

std::string to_string(Method m) {
  switch (m) {
    case Method::ClosedForm:
      return "closed_form";
    case Method::MonteCarlo:
      return "monte_carlo";
    case Method::Quadrature:
      return "quadrature";
  }
  return "unknown";
}

Method parse_method(const std::string& s) {
  if (s == "closed_form") return Method::ClosedForm;
  if (s == "monte_carlo") return Method::MonteCarlo;
  if (s == "quadrature") return Method::Quadrature;
  fail(ErrorCode::ConfigError, "unknown method '" + s + "'");
}

QuadratureGrid default_grid(const DensityModel& p, const Budget& budget) {
  if (p.dim() > 2) fail(ErrorCode::DimensionMismatch, "quadrature supports dims <= 2 only");
  return QuadratureGrid(p.support_box(), p.dim() == 1 ? budget.points_1d : budget.points_2d);
}

namespace {

const GaussianModel* as_gaussian(const DensityModel& m) {
  return dynamic_cast<const GaussianModel*>(&m);
}

std::vector<int> prefix(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<int> suffix(int from, int dim) {
  std::vector<int> v;
  for (int i = from; i < dim; ++i) v.push_back(i);
  return v;
}

ScalarFn density_of(const DensityModel& p) {
  return [&p](const Vector& x) { return std::exp(p.log_density(x)); };
}

Sampler sampler_of(const DensityModel& p) {
  return [&p](Rng& rng) { return p.sample(rng); };
}

// Expectation of f under p by the requested numerical method.
EntropyEstimate expect(const DensityModel& p, const ScalarFn& f, Method method,
                       const Budget& budget) {
  EntropyEstimate e;
  e.method = method;
  if (method == Method::Quadrature) {
    const QuadratureGrid grid = default_grid(p, budget);
    e.value = quadrature_expect(f, density_of(p), grid);
    e.n_used = grid.size();
  } else if (method == Method::MonteCarlo) {
    const McEstimate m = monte_carlo_expect(f, sampler_of(p), budget.samples, budget.stream,
                                            budget.threads);
    e.value = m.mean;
    e.std_error = m.std_error;
    e.n_used = m.n;
  } else {
    fail(ErrorCode::InvalidArgument, "expect() needs a numerical method");
  }
  return e;
}

EntropyEstimate closed(double v) {
  EntropyEstimate e;
  e.value = v;
  e.method = Method::ClosedForm;
  return e;
}

void check_dims(const DensityModel& p, const DensityModel& q) {
  if (p.dim() != q.dim()) fail(ErrorCode::DimensionMismatch, "models differ in dimension");
}

void check_split(const DensityModel& joint, int x_dim) {
  if (x_dim <= 0 || x_dim >= joint.dim()) {
    fail(ErrorCode::DimensionMismatch, "x block must be a proper prefix of the joint");
  }
}

}  // namespace

EntropyEstimate g_entropy(const DensityModel& p, Method method, const Budget& budget) {
  if (method == Method::ClosedForm) {
    if (const auto* g = as_gaussian(p)) return closed(g->sigma().trace_inverse());
    fail(ErrorCode::UnsupportedClosedForm, "no closed-form G-entropy for " + p.family());
  }
  return expect(p, [&p](const Vector& x) { return p.score(x).squaredNorm(); }, method, budget);
}

EntropyEstimate g_entropy_laplacian_form(const DensityModel& p, Method method,
                                         const Budget& budget) {
  if (method == Method::ClosedForm) {
    if (const auto* g = as_gaussian(p)) return closed(-g->laplacian_log(g->mu()));
    fail(ErrorCode::UnsupportedClosedForm, "no closed-form G-entropy for " + p.family());
  }
  return expect(p, [&p](const Vector& x) { return -p.laplacian_log(x); }, method, budget);
}

EntropyEstimate g_cross_entropy(const DensityModel& p, const DensityModel& q, Method method,
                                const Budget& budget) {
  check_dims(p, q);
  if (method == Method::ClosedForm) {
    const auto* gp = as_gaussian(p);
    const auto* gq = as_gaussian(q);
    if (gp == nullptr || gq == nullptr) {
      fail(ErrorCode::UnsupportedClosedForm, "closed-form G-cross-entropy needs two Gaussians");
    }
    const Matrix& pq = gq->precision();
    const Vector dm = gp->mu() - gq->mu();
    const Matrix s2 = gp->sigma().matrix() + dm * dm.transpose();
    return closed(-(pq * pq * s2).trace() + 2.0 * pq.trace());
  }
  return expect(p, [&q](const Vector& x) { return q.w_value(x); }, method, budget);
}

EntropyEstimate g_cross_entropy(const Dataset& data, const DensityModel& q) {
  if (data.size() < 2) fail(ErrorCode::InsufficientData, "need at least two observations");
  Vector w(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) w(i) = q.w_value(data.row(i));
  EntropyEstimate e;
  e.method = Method::MonteCarlo;
  e.value = w.mean();
  const double n = static_cast<double>(data.size());
  e.std_error = std::sqrt((w.array() - e.value).square().sum() / (n - 1.0) / n);
  e.n_used = static_cast<std::size_t>(data.size());
  return e;
}

EntropyEstimate fisher_divergence(const DensityModel& p, const DensityModel& q, Method method,
                                  const Budget& budget) {
  check_dims(p, q);
  if (method == Method::ClosedForm) {
    const auto* gp = as_gaussian(p);
    const auto* gq = as_gaussian(q);
    if (gp == nullptr || gq == nullptr) {
      fail(ErrorCode::UnsupportedClosedForm, "closed-form Fisher divergence needs two Gaussians");
    }
    // s_p - s_q = (P_q - P_p) r + P_q (mu_p - mu_q), r ~ N(0, Sigma_p)
    const Matrix dp = gq->precision() - gp->precision();
    const Vector shift = gq->precision() * (gp->mu() - gq->mu());
    return closed(0.5 * ((dp * gp->sigma().matrix() * dp).trace() + shift.squaredNorm()));
  }
  return expect(
      p, [&p, &q](const Vector& x) { return 0.5 * (p.score(x) - q.score(x)).squaredNorm(); },
      method, budget);
}

Theorem1Parts theorem1_decomposition(const DensityModel& p, const DensityModel& q, Method method,
                                     const Budget& budget) {
  check_dims(p, q);
  Theorem1Parts t;
  t.method = method;
  const VectorFn f = [&p, &q](const Vector& x) {
    const Vector sp = p.score(x);
    Vector v(3);
    v << (sp - q.score(x)).squaredNorm(), sp.squaredNorm(), q.w_value(x);
    return v;
  };
  if (method == Method::ClosedForm) {
    t.lhs = 2.0 * fisher_divergence(p, q, method).value;
    t.hg_p = g_entropy(p, method).value;
    t.cross = g_cross_entropy(p, q, method).value;
  } else if (method == Method::Quadrature) {
    const Vector v = quadrature_expect(f, density_of(p), default_grid(p, budget));
    t.lhs = v(0);
    t.hg_p = v(1);
    t.cross = v(2);
  } else {
    const VectorFn fg = [&f](const Vector& x) {
      const Vector v = f(x);
      Vector out(4);
      out << v, v(0) - v(1) + v(2);
      return out;
    };
    const McVectorEstimate m =
        monte_carlo_expect(fg, sampler_of(p), budget.samples, budget.stream, budget.threads);
    t.lhs = m.mean(0);
    t.hg_p = m.mean(1);
    t.cross = m.mean(2);
    t.gap_std_error = m.std_error(3);
  }
  return t;
}

EntropyEstimate g_mutual_information(const DensityModel& joint, int x_dim, Method method,
                                     const Budget& budget) {
  check_split(joint, x_dim);
  const ModelPtr px = joint.marginal(prefix(x_dim));
  const ModelPtr py = joint.marginal(suffix(x_dim, joint.dim()));
  if (method == Method::ClosedForm) {
    return closed(g_entropy(joint, method).value - g_entropy(*px, method).value -
                  g_entropy(*py, method).value);
  }
  if (method == Method::Quadrature) {
    EntropyEstimate e;
    e.method = method;
    e.value = g_entropy(joint, method, budget).value - g_entropy(*px, method, budget).value -
              g_entropy(*py, method, budget).value;
    e.n_used = default_grid(joint, budget).size();
    return e;
  }
  // One joint sample; marginal terms use the projected coordinates.
  const ScalarFn f = [&](const Vector& v) {
    return joint.score(v).squaredNorm() - px->score(v.head(x_dim)).squaredNorm() -
           py->score(v.tail(joint.dim() - x_dim)).squaredNorm();
  };
  return expect(joint, f, method, budget);
}

EntropyEstimate g_mutual_information_fisher(const DensityModel& joint, int x_dim, Method method,
                                            const Budget& budget) {
  check_split(joint, x_dim);
  const ProductModel product(joint.marginal(prefix(x_dim)),
                             joint.marginal(suffix(x_dim, joint.dim())));
  EntropyEstimate e;
  if (method == Method::ClosedForm) {
    const auto* g = as_gaussian(joint);
    if (g == nullptr) fail(ErrorCode::UnsupportedClosedForm, "closed form needs a Gaussian joint");
    const ModelPtr px = joint.marginal(prefix(x_dim));
    const ModelPtr py = joint.marginal(suffix(x_dim, joint.dim()));
    Matrix block = Matrix::Zero(joint.dim(), joint.dim());
    block.topLeftCorner(x_dim, x_dim) = static_cast<const GaussianModel&>(*px).sigma().matrix();
    block.bottomRightCorner(joint.dim() - x_dim, joint.dim() - x_dim) =
        static_cast<const GaussianModel&>(*py).sigma().matrix();
    const GaussianModel prod(g->mu(), SpdMatrix(block));
    e = fisher_divergence(joint, prod, method, budget);
  } else {
    e = fisher_divergence(joint, product, method, budget);
  }
  e.value *= 2.0;
  e.std_error *= 2.0;
  return e;
}

EntropyEstimate g_conditional_entropy(const DensityModel& joint, int x_dim, Method method,
                                      ConditionalForm form, const Budget& budget) {
  check_split(joint, x_dim);
  if (form == ConditionalForm::Difference) {
    const ModelPtr px = joint.marginal(prefix(x_dim));
    if (method == Method::MonteCarlo) {
      const ScalarFn f = [&](const Vector& v) {
        return joint.score(v).squaredNorm() - px->score(v.head(x_dim)).squaredNorm();
      };
      return expect(joint, f, method, budget);
    }
    EntropyEstimate e = g_entropy(joint, method, budget);
    e.value -= g_entropy(*px, method, budget).value;
    return e;
  }
  const auto ratio = std::make_shared<ConditionalRatioModel>(
      std::shared_ptr<const DensityModel>(&joint, [](const DensityModel*) {}), x_dim);
  if (method == Method::ClosedForm) {
    fail(ErrorCode::UnsupportedClosedForm, "direct form is evaluated numerically only");
  }
  return expect(joint, [&ratio](const Vector& v) { return ratio->w_value(v); }, method, budget);
}

MatrixEstimate g_information_matrix(const DensityModel& p, Method method, const Budget& budget) {
  const int d = p.dim();
  MatrixEstimate out;
  if (method == Method::ClosedForm) {
    const auto* g = as_gaussian(p);
    if (g == nullptr) fail(ErrorCode::UnsupportedClosedForm, "closed-form GIM needs a Gaussian");
    out.value = g->precision();
    out.std_error = Matrix::Zero(d, d);
    return out;
  }
  const VectorFn f = [&p](const Vector& x) {
    const Vector s = p.score(x);
    return Vector((s * s.transpose()).reshaped());
  };
  if (method == Method::Quadrature) {
    const QuadratureGrid grid = default_grid(p, budget);
    out.value = quadrature_expect(f, density_of(p), grid).reshaped(d, d);
    out.std_error = Matrix::Zero(d, d);
    out.n_used = grid.size();
  } else {
    const McVectorEstimate m =
        monte_carlo_expect(f, sampler_of(p), budget.samples, budget.stream, budget.threads);
    out.value = m.mean.reshaped(d, d);
    out.std_error = m.std_error.reshaped(d, d);
    out.n_used = m.n;
  }
  out.value = 0.5 * (out.value + out.value.transpose());
  return out;
}

McVectorEstimate score_mean_check(const DensityModel& p, const Budget& budget) {
  return monte_carlo_expect([&p](const Vector& x) { return p.score(x); }, sampler_of(p),
                            budget.samples, budget.stream, budget.threads);
}

double GiThreeWays::max_z() const {
  double worst = 0.0;
  auto z = [](double a, double sa, double b, double sb) {
    const double se = std::sqrt(sa * sa + sb * sb);
    if (se == 0.0) return a == b ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(a - b) / se;
  };
  for (Eigen::Index i = 0; i < score_sq.size(); ++i) {
    worst = std::max(worst, z(score_sq(i), score_sq_se(i), neg_hessian(i), neg_hessian_se(i)));
    worst = std::max(worst, z(score_sq(i), score_sq_se(i), variance(i), variance_se(i)));
    worst = std::max(worst, z(neg_hessian(i), neg_hessian_se(i), variance(i), variance_se(i)));
  }
  return worst;
}

GiThreeWays gi_three_ways(const DensityModel& p, const Budget& budget) {
  const int d = p.dim();
  const VectorFn f = [&p, d](const Vector& x) {
    const Vector s = p.score(x);
    Vector out(3 * d);
    out << s.cwiseProduct(s), -p.log_hessian_diag(x), s;
    return out;
  };
  const McVectorEstimate m =
      monte_carlo_expect(f, sampler_of(p), budget.samples, budget.stream, budget.threads);
  GiThreeWays g;
  g.n_used = m.n;
  g.score_sq = m.mean.head(d);
  g.score_sq_se = m.std_error.head(d);
  g.neg_hessian = m.mean.segment(d, d);
  g.neg_hessian_se = m.std_error.segment(d, d);
  const Vector mean_s = m.mean.tail(d);
  const double n = static_cast<double>(m.n);
  // Unbiased variance from the same sample; its error is dominated by E[s^2].
  g.variance = (g.score_sq - mean_s.cwiseProduct(mean_s)) * (n / (n - 1.0));
  g.variance_se = g.score_sq_se;
  return g;
}

double jkl_divergence(const DensityModel& p, const DensityModel& q, const QuadratureGrid& grid) {
  check_dims(p, q);
  const double v = quadrature_expect(
      [&p, &q](const Vector& x) { return p.log_density(x) - q.log_density(x); }, density_of(p),
      grid);
  return v;
}

double jkl_divergence(const DensityModel& p, const DensityModel& q, const Budget& budget) {
  return jkl_divergence(p, q, default_grid(p, budget));
}

LyuCheck lyu_derivative_check(const DensityModel& p, const DensityModel& q, double t_small,
                              const Budget& budget) {
  if (!(t_small > 0.0)) fail(ErrorCode::InvalidArgument, "t must be > 0");
  if (p.dim() != 1 || q.dim() != 1) fail(ErrorCode::DimensionMismatch, "1-D models only");
  const double h = 0.25 * t_small;
  // A single grid for all three densities keeps the difference smooth in t.
  const QuadratureGrid grid = default_grid(*p.convolved(t_small + h), budget);
  const double up = jkl_divergence(*p.convolved(t_small + h), *q.convolved(t_small + h), grid);
  const double down = jkl_divergence(*p.convolved(t_small - h), *q.convolved(t_small - h), grid);
  const ModelPtr pt = p.convolved(t_small);
  const ModelPtr qt = q.convolved(t_small);
  LyuCheck c;
  c.fd_derivative = (up - down) / (2.0 * h);
  c.fisher = quadrature_expect(
      [&](const Vector& x) { return 0.5 * (pt->score(x) - qt->score(x)).squaredNorm(); },
      density_of(*pt), grid);
  c.neg_half_df = -0.5 * c.fisher;
  const double scale = std::abs(c.neg_half_df);
  c.relative_gap = scale == 0.0 ? std::abs(c.fd_derivative) : std::abs(c.fd_derivative - c.neg_half_df) / scale;
  return c;
}

double shannon_entropy(const DensityModel& p, const QuadratureGrid& grid) {
  return quadrature_expect([&p](const Vector& x) { return -p.log_density(x); }, density_of(p),
                           grid);
}

double shannon_entropy(const DensityModel& p, const Budget& budget) {
  return shannon_entropy(p, default_grid(p, budget));
}

double shannon_cross_entropy(const DensityModel& p, const DensityModel& q,
                             const QuadratureGrid& grid) {
  check_dims(p, q);
  return quadrature_expect([&q](const Vector& x) { return -q.log_density(x); }, density_of(p),
                           grid);
}

double shannon_cross_entropy(const DensityModel& p, const DensityModel& q, const Budget& budget) {
  return shannon_cross_entropy(p, q, default_grid(p, budget));
}

}  // namespace gentropy
