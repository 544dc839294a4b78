// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gentropy/numerics.hpp"
#include "gentropy/random.hpp"

namespace gentropy {

/// n observations of a d-vector, one per row.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Matrix rows) : values_(std::move(rows)) {}

  Eigen::Index size() const noexcept { return values_.rows(); }
  Eigen::Index dim() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  Vector row(Eigen::Index i) const { return values_.row(i).transpose(); }

  Vector mean() const;
  /// Biased (divide-by-n) sample covariance.
  Matrix covariance() const;

  static Dataset concat(const Dataset& a, const Dataset& b);

 private:
  Matrix values_;
};

class DensityModel;
using ModelPtr = std::shared_ptr<const DensityModel>;

/// GIC(theta) = mean of W(x_i, p(theta)) over a fixed dataset, with its
/// gradient in the model's natural parameter vector.
class GicObjective {
 public:
  virtual ~GicObjective() = default;
  virtual double value(const Vector& theta) const = 0;
  virtual Vector gradient(const Vector& theta) const = 0;
};

/// A density on R^d known through its log-density (possibly unnormalized),
/// score, and diagonal of the log-density Hessian.
///
/// Models are immutable; parameter changes produce new instances through
/// with_theta / from_unconstrained.
class DensityModel {
 public:
  virtual ~DensityModel() = default;

  virtual std::string family() const = 0;
  virtual int dim() const = 0;

  virtual double log_density_unnorm(const Vector& x) const = 0;
  /// Normalized log-density; UnsupportedClosedForm when unavailable.
  virtual double log_density(const Vector& x) const;
  virtual Vector score(const Vector& x) const = 0;
  virtual Vector log_hessian_diag(const Vector& x) const = 0;
  double laplacian_log(const Vector& x) const { return log_hessian_diag(x).sum(); }
  /// W(x, q) = -||grad log q||^2 - 2 lap log q; NonFiniteValue when it
  /// cannot be evaluated.
  double w_value(const Vector& x) const;

  virtual Vector sample(Rng& rng) const;
  /// Box used for quadrature oracles: wide enough that the density mass
  /// outside is far below the oracle tolerance.
  virtual std::vector<Interval> support_box() const;

  virtual int theta_dim() const { return 0; }
  virtual Vector theta() const { return {}; }
  virtual ModelPtr with_theta(const Vector& theta) const;
  /// Gradient / Hessian of W(x, p(theta)) in theta. The defaults use central
  /// differences of w_value (and of theta_grad_w for the Hessian).
  virtual Vector theta_grad_w(const Vector& x) const;
  virtual Matrix theta_hess_w(const Vector& x) const;

  /// Unconstrained coordinates eta used by optimizers, with
  /// dtheta/deta as unconstrained_jacobian. Defaults: eta = theta.
  virtual Vector to_unconstrained() const { return theta(); }
  virtual ModelPtr from_unconstrained(const Vector& eta) const { return with_theta(eta); }
  virtual Matrix unconstrained_jacobian() const;

  virtual std::unique_ptr<GicObjective> gic_objective(const Dataset& data) const;

  /// Marginal over `idx` (ascending coordinate indices).
  virtual ModelPtr marginal(const std::vector<int>& idx) const;
  /// Conditional density of the complementary coordinates given x_obs at
  /// `observed`.
  virtual ModelPtr conditional(const std::vector<int>& observed, const Vector& x_obs) const;
  /// grad_x log p(z | x) for the split induced by `observed`.
  virtual Vector conditional_score_x(const std::vector<int>& observed, const Vector& x_obs,
                                     const Vector& z) const;
  /// Density of x + sqrt(t) * eps, eps ~ N(0, I).
  virtual ModelPtr convolved(double t) const;

  virtual Vector mean() const;
};

double w_value(const Vector& x, const DensityModel& q);

/// Parameter layout shared by the Gaussian and t families:
/// theta = (mu, vech(Sigma)) with vech running over rows of the lower
/// triangle, (0,0), (1,0), (1,1), (2,0), ...
int vech_size(int d);
Vector vech(const Matrix& s);
Matrix unvech(const Vector& v, int d);

/// Gain, Schur complement and observed-block pieces for conditioning an
/// elliptical (mu, Sigma) on the coordinates `observed`.
struct ConditionalBlocks {
  std::vector<int> observed;
  std::vector<int> missing;
  Vector mu_o;
  Vector mu_m;
  SpdMatrix sigma_oo;
  /// Sigma_MO Sigma_OO^{-1}
  Matrix gain;
  /// Sigma_MM - Sigma_MO Sigma_OO^{-1} Sigma_OM
  SpdMatrix schur;
};

ConditionalBlocks conditional_blocks(const Vector& mu, const SpdMatrix& sigma,
                                     const std::vector<int>& observed);

/// Common base for the Gaussian and multivariate-t families: location mu,
/// scatter Sigma, Cholesky-with-log-diagonal unconstrained coordinates.
class EllipticalModel : public DensityModel {
 public:
  EllipticalModel(Vector mu, SpdMatrix sigma);

  int dim() const override { return static_cast<int>(mu_.size()); }
  const Vector& mu() const noexcept { return mu_; }
  const SpdMatrix& sigma() const noexcept { return sigma_; }
  const Matrix& precision() const noexcept { return precision_; }
  double mahalanobis(const Vector& x) const;

  int theta_dim() const override { return dim() + vech_size(dim()); }
  Vector theta() const override;
  ModelPtr with_theta(const Vector& theta) const override;
  Vector to_unconstrained() const override;
  ModelPtr from_unconstrained(const Vector& eta) const override;
  Matrix unconstrained_jacobian() const override;
  Vector mean() const override { return mu_; }

 protected:
  virtual ModelPtr rebuild(Vector mu, SpdMatrix sigma) const = 0;

  Vector mu_;
  SpdMatrix sigma_;
  Matrix precision_;
  double trace_precision_;
};

class GaussianModel final : public EllipticalModel {
 public:
  GaussianModel(Vector mu, SpdMatrix sigma);

  std::string family() const override { return "gaussian"; }
  double log_density_unnorm(const Vector& x) const override;
  double log_density(const Vector& x) const override;
  Vector score(const Vector& x) const override;
  Vector log_hessian_diag(const Vector& x) const override;
  Vector sample(Rng& rng) const override;
  std::vector<Interval> support_box() const override;

  Vector theta_grad_w(const Vector& x) const override;
  Matrix theta_hess_w(const Vector& x) const override;
  std::unique_ptr<GicObjective> gic_objective(const Dataset& data) const override;

  ModelPtr marginal(const std::vector<int>& idx) const override;
  ModelPtr conditional(const std::vector<int>& observed, const Vector& x_obs) const override;
  Vector conditional_score_x(const std::vector<int>& observed, const Vector& x_obs,
                             const Vector& z) const override;
  ModelPtr convolved(double t) const override;

 protected:
  ModelPtr rebuild(Vector mu, SpdMatrix sigma) const override;
};

/// Multivariate t with location mu, scale Sigma and nu degrees of freedom.
/// The first `block_split` coordinates form the observed block x and the
/// rest the latent block z for the conditional helpers below.
class MultivariateTModel final : public EllipticalModel {
 public:
  MultivariateTModel(Vector mu, SpdMatrix sigma, double nu, int block_split = -1);

  std::string family() const override { return "t"; }
  double nu() const noexcept { return nu_; }
  int block_split() const noexcept { return block_split_; }

  double log_density_unnorm(const Vector& x) const override;
  double log_density(const Vector& x) const override;
  Vector score(const Vector& x) const override;
  Vector log_hessian_diag(const Vector& x) const override;
  Vector sample(Rng& rng) const override;
  std::vector<Interval> support_box() const override;

  Vector theta_grad_w(const Vector& x) const override;
  Matrix theta_hess_w(const Vector& x) const override;

  ModelPtr marginal(const std::vector<int>& idx) const override;
  ModelPtr conditional(const std::vector<int>& observed, const Vector& x_obs) const override;
  Vector conditional_score_x(const std::vector<int>& observed, const Vector& x_obs,
                             const Vector& z) const override;

 protected:
  ModelPtr rebuild(Vector mu, SpdMatrix sigma) const override;

 private:
  double nu_;
  int block_split_;
};

class GaussianMixtureModel final : public DensityModel {
 public:
  GaussianMixtureModel(std::vector<double> weights, std::vector<Vector> means,
                       std::vector<SpdMatrix> covariances);

  std::string family() const override { return "mixture"; }
  int dim() const override;
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<GaussianModel>& components() const noexcept { return components_; }

  double log_density_unnorm(const Vector& x) const override { return log_density(x); }
  double log_density(const Vector& x) const override;
  Vector score(const Vector& x) const override;
  Vector log_hessian_diag(const Vector& x) const override;
  Vector sample(Rng& rng) const override;
  std::vector<Interval> support_box() const override;
  Vector responsibilities(const Vector& x) const;

  ModelPtr marginal(const std::vector<int>& idx) const override;
  ModelPtr convolved(double t) const override;
  Vector mean() const override;

 private:
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<GaussianModel> components_;
};

/// p_a(x_a) p_b(x_b) on the concatenated vector (x_a, x_b).
class ProductModel final : public DensityModel {
 public:
  ProductModel(ModelPtr a, ModelPtr b);

  std::string family() const override { return "product"; }
  int dim() const override { return a_->dim() + b_->dim(); }
  double log_density_unnorm(const Vector& x) const override;
  double log_density(const Vector& x) const override;
  Vector score(const Vector& x) const override;
  Vector log_hessian_diag(const Vector& x) const override;
  Vector sample(Rng& rng) const override;
  std::vector<Interval> support_box() const override;
  Vector mean() const override;

 private:
  ModelPtr a_;
  ModelPtr b_;
};

/// log p(x, y) - log p_x(x) viewed as a function of the concatenated (x, y),
/// with x the first `x_dim` coordinates of the joint.
class ConditionalRatioModel final : public DensityModel {
 public:
  ConditionalRatioModel(ModelPtr joint, int x_dim);

  std::string family() const override { return "conditional_ratio"; }
  int dim() const override { return joint_->dim(); }
  double log_density_unnorm(const Vector& x) const override { return log_density(x); }
  double log_density(const Vector& x) const override;
  Vector score(const Vector& x) const override;
  Vector log_hessian_diag(const Vector& x) const override;
  std::vector<Interval> support_box() const override { return joint_->support_box(); }

 private:
  ModelPtr joint_;
  ModelPtr marginal_x_;
  int x_dim_;
};

// Gaussian and t helpers in the vocabulary of the (x, z) block split.

Vector gaussian_score(const Vector& x, const GaussianModel& model);

/// Marginal score of the observed block: -(nu+p_x)/(nu+d2) Sigma_x^{-1}(x-mu_x).
Vector t_score_x(const Vector& x, const MultivariateTModel& model);

struct TConditional {
  Vector mu_z_given_x;
  SpdMatrix sigma_z_given_x;
  SpdMatrix sigma_tilde;
  double d2;
};

TConditional t_conditional_params(const Vector& x, const MultivariateTModel& model);
/// grad_x log p(z | x) for the t family.
Vector t_cond_score_x(const Vector& z, const Vector& x, const MultivariateTModel& model);
/// grad_z log p(z | x) for the t family.
Vector t_cond_score_z(const Vector& z, const Vector& x, const MultivariateTModel& model);
/// Exact normalized log p(z | x) for the t family.
double t_conditional_log_density(const Vector& z, const Vector& x,
                                 const MultivariateTModel& model);

/// Draw m samples (rows) of z ~ p(z | x) for the block split of `model`
/// (GaussianModel splits after x.size() coordinates).
Matrix gaussian_conditional_sampler(const Vector& x, const DensityModel& model, int m,
                                    const RandomStream& stream);

/// Stationary AR(p) with Gaussian innovations; theta = (a_1..a_p, sigma2).
struct ArModel {
  Vector coeffs;
  double sigma2 = 1.0;

  int order() const noexcept { return static_cast<int>(coeffs.size()); }
  Vector theta() const;
  static ArModel from_theta(const Vector& theta);
};

void validate(const ArModel& model);

/// r_t = x_t - sum_i a_i x_{t-i}; t is a 0-based index and needs t >= p.
double ar_residual(Eigen::Index t, const Vector& series, const ArModel& model);
double ar_w_value(Eigen::Index t, const Vector& series, const ArModel& model);
Vector ar_theta_grad_w(Eigen::Index t, const Vector& series, const ArModel& model);
Matrix ar_theta_hess_w(Eigen::Index t, const Vector& series, const ArModel& model);

}  // namespace gentropy
