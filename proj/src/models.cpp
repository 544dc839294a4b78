// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "gentropy/error.hpp"

namespace gentropy {

namespace {

constexpr double kLogPi = 1.1447298858494002;
constexpr double kLog2Pi = 1.8378770664093453;

std::vector<std::pair<int, int>> vech_pairs(int d) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(vech_size(d)));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) out.emplace_back(i, j);
  }
  return out;
}

// Symmetric basis matrices dSigma/dtheta_k for the vech coordinates.
std::vector<Matrix> vech_basis(int d) {
  std::vector<Matrix> out;
  for (auto [i, j] : vech_pairs(d)) {
    Matrix e = Matrix::Zero(d, d);
    e(i, j) = 1.0;
    e(j, i) = 1.0;
    out.push_back(std::move(e));
  }
  return out;
}

// Gradient of a scalar in vech coordinates given the symmetric matrix M with
// df = tr(M dSigma).
Vector vech_gradient(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  Vector g(vech_size(d));
  int k = 0;
  for (auto [i, j] : vech_pairs(d)) g(k++) = (i == j) ? m(i, i) : 2.0 * m(i, j);
  return g;
}

void check_dim(const Vector& x, int d, const char* what) {
  if (x.size() != d) fail(ErrorCode::DimensionMismatch, what);
}

Vector select(const Vector& v, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(idx[k]);
  return out;
}

Matrix select(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(rows[a], cols[b]);
    }
  }
  return out;
}

std::vector<int> iota(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

void check_indices(const std::vector<int>& idx, int d) {
  if (idx.empty()) fail(ErrorCode::DimensionMismatch, "index set is empty");
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= d) fail(ErrorCode::DimensionMismatch, "index out of range");
    if (k > 0 && idx[k] <= idx[k - 1]) {
      fail(ErrorCode::InvalidArgument, "indices must be strictly increasing");
    }
  }
}

std::vector<Interval> box_from(const Vector& center, const Vector& half) {
  std::vector<Interval> box;
  for (Eigen::Index i = 0; i < center.size(); ++i) {
    box.push_back({center(i) - half(i), center(i) + half(i)});
  }
  return box;
}

// Quantities of the conditional t shared by the score helpers.
struct TCondState {
  ConditionalBlocks blocks;
  Vector g;      // Sigma_OO^{-1}(x - mu_O)
  double d2;
  Vector mu_c;   // mu_{z|x}
  double px;
  double pz;
};

TCondState t_cond_state(const MultivariateTModel& model, const std::vector<int>& observed,
                        const Vector& x_obs) {
  TCondState s{conditional_blocks(model.mu(), model.sigma(), observed), {}, 0.0, {}, 0.0, 0.0};
  check_dim(x_obs, static_cast<int>(observed.size()), "observed block size mismatch");
  const Vector dx = x_obs - s.blocks.mu_o;
  s.g = s.blocks.sigma_oo.solve(dx);
  s.d2 = dx.dot(s.g);
  s.mu_c = s.blocks.mu_m + s.blocks.gain * dx;
  s.px = static_cast<double>(observed.size());
  s.pz = static_cast<double>(s.blocks.missing.size());
  return s;
}

std::vector<int> t_observed(const MultivariateTModel& model, const Vector& x) {
  if (model.block_split() <= 0 || model.block_split() >= model.dim()) {
    fail(ErrorCode::InvalidArgument, "t model has no x/z block split");
  }
  check_dim(x, model.block_split(), "x block size mismatch");
  return iota(model.block_split());
}

Vector t_cond_score_x_impl(const TCondState& s, double nu, double p, const Vector& z) {
  check_dim(z, static_cast<int>(s.pz), "z block size mismatch");
  const Vector e = z - s.mu_c;
  const Vector s_inv_e = s.blocks.schur.solve(e);
  const double q0 = e.dot(s_inv_e);
  const double scale = (nu + s.d2) / (nu + s.px);
  const double q = q0 / scale;
  const Vector tilde_inv_e = s_inv_e / scale;
  const double denom = nu + s.px + q;
  Vector out = ((nu + p) / denom) * (s.blocks.gain.transpose() * tilde_inv_e);
  out += ((nu + p) * q0 / ((nu + s.d2) * (nu + s.d2) * (1.0 + q / (nu + s.px)))) * s.g;
  out -= (s.pz / (nu + s.d2)) * s.g;
  if (!out.allFinite()) fail(ErrorCode::NonFiniteValue, "conditional x-score is not finite");
  return out;
}

Vector t_cond_score_z_impl(const TCondState& s, double nu, double p, const Vector& z) {
  check_dim(z, static_cast<int>(s.pz), "z block size mismatch");
  const Vector e = z - s.mu_c;
  const double scale = (nu + s.d2) / (nu + s.px);
  const Vector tilde_inv_e = s.blocks.schur.solve(e) / scale;
  const double q = e.dot(tilde_inv_e);
  Vector out = -((nu + p) / (nu + s.px + q)) * tilde_inv_e;
  if (!out.allFinite()) fail(ErrorCode::NonFiniteValue, "conditional z-score is not finite");
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Dataset

Vector Dataset::mean() const {
  if (size() == 0) fail(ErrorCode::InsufficientData, "empty dataset");
  return values_.colwise().mean().transpose();
}

Matrix Dataset::covariance() const {
  if (size() == 0) fail(ErrorCode::InsufficientData, "empty dataset");
  const Matrix centered = values_.rowwise() - values_.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(size());
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "dataset dims differ");
  Matrix m(a.size() + b.size(), a.dim());
  m << a.values(), b.values();
  return Dataset(std::move(m));
}

// ----------------------------------------------------------- DensityModel

double DensityModel::log_density(const Vector&) const {
  fail(ErrorCode::UnsupportedClosedForm, family() + " has no normalized log-density");
}

double DensityModel::w_value(const Vector& x) const {
  const Vector s = score(x);
  const double w = -s.squaredNorm() - 2.0 * laplacian_log(x);
  if (!std::isfinite(w)) fail(ErrorCode::NonFiniteValue, "W is not finite at this point");
  return w;
}

Vector DensityModel::sample(Rng&) const {
  fail(ErrorCode::Unsupported, family() + " does not support sampling");
}

std::vector<Interval> DensityModel::support_box() const {
  fail(ErrorCode::Unsupported, family() + " has no quadrature box");
}

ModelPtr DensityModel::with_theta(const Vector&) const {
  fail(ErrorCode::Unsupported, family() + " has no parameter vector");
}

Vector DensityModel::theta_grad_w(const Vector& x) const {
  const ScalarFn f = [this, &x](const Vector& th) { return with_theta(th)->w_value(x); };
  return finite_diff_gradient(f, theta());
}

Matrix DensityModel::theta_hess_w(const Vector& x) const {
  const VectorFn g = [this, &x](const Vector& th) { return with_theta(th)->theta_grad_w(x); };
  const Matrix h = finite_diff_jacobian(g, theta());
  return 0.5 * (h + h.transpose());
}

Matrix DensityModel::unconstrained_jacobian() const {
  return Matrix::Identity(theta_dim(), theta_dim());
}

namespace {

class GenericGicObjective final : public GicObjective {
 public:
  GenericGicObjective(const DensityModel& model, const Dataset& data)
      : model_(model), data_(data) {}

  double value(const Vector& theta) const override {
    const ModelPtr m = model_.with_theta(theta);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < data_.size(); ++i) acc += m->w_value(data_.row(i));
    return acc / static_cast<double>(data_.size());
  }

  Vector gradient(const Vector& theta) const override {
    const ModelPtr m = model_.with_theta(theta);
    Vector acc = Vector::Zero(theta.size());
    for (Eigen::Index i = 0; i < data_.size(); ++i) acc += m->theta_grad_w(data_.row(i));
    return acc / static_cast<double>(data_.size());
  }

 private:
  const DensityModel& model_;
  Dataset data_;
};

// GIC of a Gaussian through the sufficient statistics (xbar, S).
class GaussianGicObjective final : public GicObjective {
 public:
  GaussianGicObjective(int d, const Dataset& data)
      : d_(d), xbar_(data.mean()), s_(data.covariance()) {}

  double value(const Vector& theta) const override {
    const auto [p, s2] = pieces(theta);
    return -(p * p * s2).trace() + 2.0 * p.trace();
  }

  Vector gradient(const Vector& theta) const override {
    const auto [p, s2] = pieces(theta);
    const Matrix p2 = p * p;
    Vector g(theta.size());
    g.head(d_) = 2.0 * p2 * (xbar_ - theta.head(d_));
    const Matrix m = p2 * s2 * p + p * s2 * p2 - 2.0 * p2;
    g.tail(vech_size(d_)) = vech_gradient(0.5 * (m + m.transpose()));
    return g;
  }

 private:
  std::pair<Matrix, Matrix> pieces(const Vector& theta) const {
    if (theta.size() != d_ + vech_size(d_)) fail(ErrorCode::DimensionMismatch, "theta size");
    const SpdMatrix sigma(unvech(theta.tail(vech_size(d_)), d_));
    const Vector dm = xbar_ - theta.head(d_);
    return {sigma.inverse(), s_ + dm * dm.transpose()};
  }

  int d_;
  Vector xbar_;
  Matrix s_;
};

}  // namespace

std::unique_ptr<GicObjective> DensityModel::gic_objective(const Dataset& data) const {
  if (data.size() == 0) fail(ErrorCode::InsufficientData, "empty dataset");
  if (data.dim() != dim()) fail(ErrorCode::DimensionMismatch, "dataset dim mismatch");
  return std::make_unique<GenericGicObjective>(*this, data);
}

ModelPtr DensityModel::marginal(const std::vector<int>&) const {
  fail(ErrorCode::UnsupportedMarginal, family() + " does not expose marginals");
}

ModelPtr DensityModel::conditional(const std::vector<int>&, const Vector&) const {
  fail(ErrorCode::Unsupported, family() + " does not expose conditionals");
}

Vector DensityModel::conditional_score_x(const std::vector<int>&, const Vector&,
                                         const Vector&) const {
  fail(ErrorCode::Unsupported, family() + " does not expose conditional scores");
}

ModelPtr DensityModel::convolved(double) const {
  fail(ErrorCode::Unsupported, family() + " has no closed-form convolution");
}

Vector DensityModel::mean() const {
  fail(ErrorCode::Unsupported, family() + " has no closed-form mean");
}

double w_value(const Vector& x, const DensityModel& q) { return q.w_value(x); }

// ------------------------------------------------------------------- vech

int vech_size(int d) { return d * (d + 1) / 2; }

Vector vech(const Matrix& s) {
  const int d = static_cast<int>(s.rows());
  Vector v(vech_size(d));
  int k = 0;
  for (auto [i, j] : vech_pairs(d)) v(k++) = s(i, j);
  return v;
}

Matrix unvech(const Vector& v, int d) {
  if (v.size() != vech_size(d)) fail(ErrorCode::DimensionMismatch, "vech length mismatch");
  Matrix s(d, d);
  int k = 0;
  for (auto [i, j] : vech_pairs(d)) {
    s(i, j) = v(k);
    s(j, i) = v(k);
    ++k;
  }
  return s;
}

ConditionalBlocks conditional_blocks(const Vector& mu, const SpdMatrix& sigma,
                                     const std::vector<int>& observed) {
  const int d = static_cast<int>(mu.size());
  check_indices(observed, d);
  std::vector<int> missing = complement_indices(observed, d);
  if (missing.empty()) fail(ErrorCode::DimensionMismatch, "nothing left to condition");
  const Matrix& s = sigma.matrix();
  SpdMatrix soo(select(s, observed, observed));
  const Matrix smo = select(s, missing, observed);
  Matrix gain = soo.solve(Matrix(smo.transpose())).transpose();
  const Matrix schur = select(s, missing, missing) - gain * smo.transpose();
  ConditionalBlocks out{observed,
                        missing,
                        select(mu, observed),
                        select(mu, missing),
                        std::move(soo),
                        std::move(gain),
                        SpdMatrix(0.5 * (schur + schur.transpose()))};
  return out;
}

// -------------------------------------------------------- EllipticalModel

EllipticalModel::EllipticalModel(Vector mu, SpdMatrix sigma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (mu_.size() != sigma_.dim()) fail(ErrorCode::DimensionMismatch, "mu and sigma dims differ");
  if (!mu_.allFinite()) fail(ErrorCode::NonFiniteValue, "mu has non-finite entries");
  precision_ = sigma_.inverse();
  trace_precision_ = precision_.trace();
}

double EllipticalModel::mahalanobis(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  const Vector r = x - mu_;
  return std::max(0.0, r.dot(sigma_.solve(r)));
}

Vector EllipticalModel::theta() const {
  Vector th(theta_dim());
  th << mu_, vech(sigma_.matrix());
  return th;
}

ModelPtr EllipticalModel::with_theta(const Vector& theta) const {
  if (theta.size() != theta_dim()) fail(ErrorCode::DimensionMismatch, "theta size mismatch");
  const int d = dim();
  return rebuild(theta.head(d), SpdMatrix(unvech(theta.tail(vech_size(d)), d)));
}

Vector EllipticalModel::to_unconstrained() const {
  const int d = dim();
  const Matrix& l = sigma_.chol();
  Vector eta(theta_dim());
  eta.head(d) = mu_;
  int k = d;
  for (auto [i, j] : vech_pairs(d)) eta(k++) = (i == j) ? std::log(l(i, i)) : l(i, j);
  return eta;
}

ModelPtr EllipticalModel::from_unconstrained(const Vector& eta) const {
  if (eta.size() != theta_dim()) fail(ErrorCode::DimensionMismatch, "eta size mismatch");
  if (!eta.allFinite()) fail(ErrorCode::NonFiniteValue, "eta has non-finite entries");
  const int d = dim();
  Matrix l = Matrix::Zero(d, d);
  int k = d;
  for (auto [i, j] : vech_pairs(d)) {
    l(i, j) = (i == j) ? std::exp(eta(k)) : eta(k);
    ++k;
  }
  return rebuild(eta.head(d), SpdMatrix::from_cholesky(l));
}

Matrix EllipticalModel::unconstrained_jacobian() const {
  const int d = dim();
  const Matrix& l = sigma_.chol();
  Matrix j = Matrix::Zero(theta_dim(), theta_dim());
  j.topLeftCorner(d, d).setIdentity();
  int col = d;
  for (auto [a, b] : vech_pairs(d)) {
    Matrix ds = Matrix::Zero(d, d);
    const Vector lb = l.col(b);
    ds.row(a) += lb.transpose();
    ds.col(a) += lb;
    if (a == b) ds *= l(a, a);
    j.col(col).tail(vech_size(d)) = vech(ds);
    ++col;
  }
  return j;
}

// ---------------------------------------------------------- GaussianModel

GaussianModel::GaussianModel(Vector mu, SpdMatrix sigma)
    : EllipticalModel(std::move(mu), std::move(sigma)) {}

ModelPtr GaussianModel::rebuild(Vector mu, SpdMatrix sigma) const {
  return std::make_shared<GaussianModel>(std::move(mu), std::move(sigma));
}

double GaussianModel::log_density_unnorm(const Vector& x) const { return -0.5 * mahalanobis(x); }

double GaussianModel::log_density(const Vector& x) const {
  return -0.5 * mahalanobis(x) - 0.5 * sigma_.log_det() - 0.5 * dim() * kLog2Pi;
}

Vector GaussianModel::score(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  return -spd_solve(sigma_, x - mu_);
}

Vector GaussianModel::log_hessian_diag(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  return -precision_.diagonal();
}

Vector GaussianModel::sample(Rng& rng) const {
  return mu_ + sigma_.chol() * rng.normal_vector(dim());
}

std::vector<Interval> GaussianModel::support_box() const {
  return box_from(mu_, 10.0 * sigma_.matrix().diagonal().cwiseSqrt());
}

Vector GaussianModel::theta_grad_w(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  const int d = dim();
  const Matrix& p = precision_;
  const Vector b = p * (x - mu_);
  const Vector a = p * b;
  Vector g(theta_dim());
  g.head(d) = 2.0 * a;
  const Matrix m = a * b.transpose() + b * a.transpose() - 2.0 * p * p;
  g.tail(vech_size(d)) = vech_gradient(m);
  return g;
}

Matrix GaussianModel::theta_hess_w(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  const int d = dim();
  const int hs = vech_size(d);
  const Matrix& p = precision_;
  const Matrix p2 = p * p;
  const Vector b = p * (x - mu_);
  const Vector a = p * b;
  const std::vector<Matrix> e = vech_basis(d);
  Matrix h = Matrix::Zero(d + hs, d + hs);
  h.topLeftCorner(d, d) = -2.0 * p2;
  std::vector<Vector> da(static_cast<std::size_t>(hs));
  for (int k = 0; k < hs; ++k) {
    // d a / d theta_k = -(P E_k a + P^2 E_k b)
    da[static_cast<std::size_t>(k)] = -(p * e[k] * a + p2 * e[k] * b);
    h.block(0, d + k, d, 1) = 2.0 * da[static_cast<std::size_t>(k)];
    h.block(d + k, 0, 1, d) = 2.0 * da[static_cast<std::size_t>(k)].transpose();
  }
  for (int k = 0; k < hs; ++k) {
    for (int l = 0; l < hs; ++l) {
      const Vector db = -p * e[l] * b;
      const double v = 2.0 * da[static_cast<std::size_t>(l)].dot(e[k] * b) +
                       2.0 * a.dot(e[k] * db) +
                       2.0 * ((p * e[l] * p2 + p2 * e[l] * p) * e[k]).trace();
      h(d + k, d + l) = v;
    }
  }
  return 0.5 * (h + h.transpose());
}

std::unique_ptr<GicObjective> GaussianModel::gic_objective(const Dataset& data) const {
  if (data.size() == 0) fail(ErrorCode::InsufficientData, "empty dataset");
  if (data.dim() != dim()) fail(ErrorCode::DimensionMismatch, "dataset dim mismatch");
  return std::make_unique<GaussianGicObjective>(dim(), data);
}

ModelPtr GaussianModel::marginal(const std::vector<int>& idx) const {
  check_indices(idx, dim());
  return std::make_shared<GaussianModel>(select(mu_, idx),
                                         SpdMatrix(select(sigma_.matrix(), idx, idx)));
}

ModelPtr GaussianModel::conditional(const std::vector<int>& observed, const Vector& x_obs) const {
  const ConditionalBlocks cb = conditional_blocks(mu_, sigma_, observed);
  check_dim(x_obs, static_cast<int>(observed.size()), "observed block size mismatch");
  return std::make_shared<GaussianModel>(cb.mu_m + cb.gain * (x_obs - cb.mu_o), cb.schur);
}

Vector GaussianModel::conditional_score_x(const std::vector<int>& observed, const Vector& x_obs,
                                          const Vector& z) const {
  const ConditionalBlocks cb = conditional_blocks(mu_, sigma_, observed);
  check_dim(x_obs, static_cast<int>(observed.size()), "observed block size mismatch");
  check_dim(z, static_cast<int>(cb.missing.size()), "z block size mismatch");
  const Vector e = z - cb.mu_m - cb.gain * (x_obs - cb.mu_o);
  return cb.gain.transpose() * cb.schur.solve(e);
}

ModelPtr GaussianModel::convolved(double t) const {
  if (!(t >= 0.0)) fail(ErrorCode::InvalidArgument, "convolution time must be >= 0");
  return std::make_shared<GaussianModel>(
      mu_, SpdMatrix(sigma_.matrix() + t * Matrix::Identity(dim(), dim())));
}

Vector gaussian_score(const Vector& x, const GaussianModel& model) { return model.score(x); }

// ------------------------------------------------------ MultivariateTModel

MultivariateTModel::MultivariateTModel(Vector mu, SpdMatrix sigma, double nu, int block_split)
    : EllipticalModel(std::move(mu), std::move(sigma)), nu_(nu), block_split_(block_split) {
  if (!(nu_ > 0.0) || !std::isfinite(nu_)) {
    fail(ErrorCode::InvalidArgument, "degrees of freedom must be positive and finite");
  }
  if (block_split_ < 0) block_split_ = dim();
  if (block_split_ > dim()) fail(ErrorCode::DimensionMismatch, "block split exceeds dimension");
}

ModelPtr MultivariateTModel::rebuild(Vector mu, SpdMatrix sigma) const {
  return std::make_shared<MultivariateTModel>(std::move(mu), std::move(sigma), nu_, block_split_);
}

double MultivariateTModel::log_density_unnorm(const Vector& x) const {
  return -0.5 * (nu_ + dim()) * std::log1p(mahalanobis(x) / nu_);
}

double MultivariateTModel::log_density(const Vector& x) const {
  const double p = dim();
  return std::lgamma(0.5 * (nu_ + p)) - std::lgamma(0.5 * nu_) - 0.5 * p * (std::log(nu_) + kLogPi) -
         0.5 * sigma_.log_det() + log_density_unnorm(x);
}

Vector MultivariateTModel::score(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  const Vector b = sigma_.solve(Vector(x - mu_));
  const double c = (nu_ + dim()) / (nu_ + (x - mu_).dot(b));
  return -c * b;
}

Vector MultivariateTModel::log_hessian_diag(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  const Vector b = sigma_.solve(Vector(x - mu_));
  const double np = nu_ + dim();
  const double c = np / (nu_ + (x - mu_).dot(b));
  return -c * precision_.diagonal() + (2.0 * c * c / np) * b.cwiseProduct(b);
}

Vector MultivariateTModel::sample(Rng& rng) const {
  const Vector z = rng.normal_vector(dim());
  const double w = std::sqrt(nu_ / rng.chi_squared(nu_));
  return mu_ + w * (sigma_.chol() * z);
}

std::vector<Interval> MultivariateTModel::support_box() const {
  // Tail mass beyond k scale units decays like k^{-nu}.
  const double k = std::min(1e4, std::max(10.0, 10.0 * std::pow(1e6, 1.0 / nu_)));
  return box_from(mu_, k * sigma_.matrix().diagonal().cwiseSqrt());
}

Vector MultivariateTModel::theta_grad_w(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  const int d = dim();
  const double np = nu_ + d;
  const Matrix& p = precision_;
  const Vector b = p * (x - mu_);
  const Vector a = p * b;
  const double dist = (x - mu_).dot(b);
  const double c = np / (nu_ + dist);
  const double k = 1.0 + 4.0 / np;
  const double q2 = b.squaredNorm();
  // W = -k c^2 q2 + 2 c tr(P); A collects the derivative through c.
  const double big_a = (2.0 * c * c / np) * (k * c * q2 - trace_precision_);
  Vector g(theta_dim());
  g.head(d) = 2.0 * k * c * c * a - 2.0 * big_a * b;
  const Matrix m =
      -big_a * b * b.transpose() + k * c * c * (a * b.transpose() + b * a.transpose()) -
      2.0 * c * p * p;
  g.tail(vech_size(d)) = vech_gradient(m);
  return g;
}

Matrix MultivariateTModel::theta_hess_w(const Vector& x) const {
  return DensityModel::theta_hess_w(x);
}

ModelPtr MultivariateTModel::marginal(const std::vector<int>& idx) const {
  check_indices(idx, dim());
  return std::make_shared<MultivariateTModel>(select(mu_, idx),
                                              SpdMatrix(select(sigma_.matrix(), idx, idx)), nu_);
}

ModelPtr MultivariateTModel::conditional(const std::vector<int>& observed,
                                         const Vector& x_obs) const {
  const TCondState s = t_cond_state(*this, observed, x_obs);
  const double scale = (nu_ + s.d2) / (nu_ + s.px);
  return std::make_shared<MultivariateTModel>(
      s.mu_c, SpdMatrix(scale * s.blocks.schur.matrix()), nu_ + s.px);
}

Vector MultivariateTModel::conditional_score_x(const std::vector<int>& observed,
                                               const Vector& x_obs, const Vector& z) const {
  return t_cond_score_x_impl(t_cond_state(*this, observed, x_obs), nu_, dim(), z);
}

Vector t_score_x(const Vector& x, const MultivariateTModel& model) {
  const int px = model.block_split();
  check_dim(x, px, "x block size mismatch");
  if (px == model.dim()) return model.score(x);
  return model.marginal(iota(px))->score(x);
}

TConditional t_conditional_params(const Vector& x, const MultivariateTModel& model) {
  const TCondState s = t_cond_state(model, t_observed(model, x), x);
  const double scale = (model.nu() + s.d2) / (model.nu() + s.px);
  return TConditional{s.mu_c, s.blocks.schur, SpdMatrix(scale * s.blocks.schur.matrix()), s.d2};
}

Vector t_cond_score_x(const Vector& z, const Vector& x, const MultivariateTModel& model) {
  return t_cond_score_x_impl(t_cond_state(model, t_observed(model, x), x), model.nu(),
                             model.dim(), z);
}

Vector t_cond_score_z(const Vector& z, const Vector& x, const MultivariateTModel& model) {
  return t_cond_score_z_impl(t_cond_state(model, t_observed(model, x), x), model.nu(),
                             model.dim(), z);
}

double t_conditional_log_density(const Vector& z, const Vector& x,
                                 const MultivariateTModel& model) {
  const TConditional c = t_conditional_params(x, model);
  const MultivariateTModel cond(c.mu_z_given_x, c.sigma_tilde,
                                model.nu() + static_cast<double>(x.size()));
  return cond.log_density(z);
}

Matrix gaussian_conditional_sampler(const Vector& x, const DensityModel& model, int m,
                                    const RandomStream& stream) {
  if (m < 0) fail(ErrorCode::InvalidArgument, "sample count must be >= 0");
  Vector loc;
  Matrix chol;
  double dof = 0.0;  // 0 selects the Gaussian case
  if (const auto* g = dynamic_cast<const GaussianModel*>(&model)) {
    const int px = static_cast<int>(x.size());
    if (px <= 0 || px >= g->dim()) fail(ErrorCode::DimensionMismatch, "x block size invalid");
    const ConditionalBlocks cb = conditional_blocks(g->mu(), g->sigma(), iota(px));
    loc = cb.mu_m + cb.gain * (x - cb.mu_o);
    chol = cb.schur.chol();
  } else if (const auto* t = dynamic_cast<const MultivariateTModel*>(&model)) {
    const TConditional c = t_conditional_params(x, *t);
    loc = c.mu_z_given_x;
    chol = c.sigma_tilde.chol();
    dof = t->nu() + static_cast<double>(x.size());
  } else {
    fail(ErrorCode::Unsupported, "conditional sampling needs a Gaussian or t model");
  }
  Rng rng = stream.engine();
  Matrix out(m, loc.size());
  for (int i = 0; i < m; ++i) {
    Vector z = chol * rng.normal_vector(loc.size());
    if (dof > 0.0) z *= std::sqrt(dof / rng.chi_squared(dof));
    out.row(i) = (loc + z).transpose();
  }
  return out;
}

// ---------------------------------------------------- GaussianMixtureModel

GaussianMixtureModel::GaussianMixtureModel(std::vector<double> weights, std::vector<Vector> means,
                                           std::vector<SpdMatrix> covariances)
    : weights_(std::move(weights)) {
  if (weights_.empty() || weights_.size() != means.size() ||
      weights_.size() != covariances.size()) {
    fail(ErrorCode::DimensionMismatch, "mixture needs matching weights, means, covariances");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) fail(ErrorCode::InvalidArgument, "mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "weights must sum to 1");
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    components_.emplace_back(std::move(means[k]), std::move(covariances[k]));
    if (components_.back().dim() != components_.front().dim()) {
      fail(ErrorCode::DimensionMismatch, "mixture components differ in dimension");
    }
    log_weights_.push_back(std::log(weights_[k]));
  }
}

int GaussianMixtureModel::dim() const { return components_.front().dim(); }

Vector GaussianMixtureModel::responsibilities(const Vector& x) const {
  Vector lp(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) {
    lp(static_cast<Eigen::Index>(k)) = log_weights_[k] + components_[k].log_density(x);
  }
  const double mx = lp.maxCoeff();
  Vector g = (lp.array() - mx).exp().matrix();
  return g / g.sum();
}

double GaussianMixtureModel::log_density(const Vector& x) const {
  Vector lp(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) {
    lp(static_cast<Eigen::Index>(k)) = log_weights_[k] + components_[k].log_density(x);
  }
  const double mx = lp.maxCoeff();
  return mx + std::log((lp.array() - mx).exp().sum());
}

Vector GaussianMixtureModel::score(const Vector& x) const {
  const Vector g = responsibilities(x);
  Vector s = Vector::Zero(dim());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    s += g(static_cast<Eigen::Index>(k)) * components_[k].score(x);
  }
  return s;
}

Vector GaussianMixtureModel::log_hessian_diag(const Vector& x) const {
  const Vector g = responsibilities(x);
  Vector s = Vector::Zero(dim());
  Vector h = Vector::Zero(dim());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const double gk = g(static_cast<Eigen::Index>(k));
    const Vector sk = components_[k].score(x);
    s += gk * sk;
    h += gk * (components_[k].log_hessian_diag(x) + sk.cwiseProduct(sk));
  }
  return h - s.cwiseProduct(s);
}

Vector GaussianMixtureModel::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t pick = components_.size() - 1;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    acc += weights_[k];
    if (u < acc) {
      pick = k;
      break;
    }
  }
  return components_[pick].sample(rng);
}

std::vector<Interval> GaussianMixtureModel::support_box() const {
  std::vector<Interval> box = components_.front().support_box();
  for (const auto& c : components_) {
    const auto b = c.support_box();
    for (std::size_t i = 0; i < box.size(); ++i) {
      box[i].lo = std::min(box[i].lo, b[i].lo);
      box[i].hi = std::max(box[i].hi, b[i].hi);
    }
  }
  return box;
}

ModelPtr GaussianMixtureModel::marginal(const std::vector<int>& idx) const {
  std::vector<Vector> means;
  std::vector<SpdMatrix> covs;
  for (const auto& c : components_) {
    const ModelPtr m = c.marginal(idx);
    const auto& g = static_cast<const GaussianModel&>(*m);
    means.push_back(g.mu());
    covs.push_back(g.sigma());
  }
  return std::make_shared<GaussianMixtureModel>(weights_, std::move(means), std::move(covs));
}

ModelPtr GaussianMixtureModel::convolved(double t) const {
  if (!(t >= 0.0)) fail(ErrorCode::InvalidArgument, "convolution time must be >= 0");
  std::vector<Vector> means;
  std::vector<SpdMatrix> covs;
  for (const auto& c : components_) {
    means.push_back(c.mu());
    covs.emplace_back(c.sigma().matrix() + t * Matrix::Identity(dim(), dim()));
  }
  return std::make_shared<GaussianMixtureModel>(weights_, std::move(means), std::move(covs));
}

Vector GaussianMixtureModel::mean() const {
  Vector m = Vector::Zero(dim());
  for (std::size_t k = 0; k < components_.size(); ++k) m += weights_[k] * components_[k].mu();
  return m;
}

// ------------------------------------------------------------ ProductModel

ProductModel::ProductModel(ModelPtr a, ModelPtr b) : a_(std::move(a)), b_(std::move(b)) {
  if (!a_ || !b_) fail(ErrorCode::InvalidArgument, "product factors must be non-null");
}

double ProductModel::log_density_unnorm(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  return a_->log_density_unnorm(x.head(a_->dim())) + b_->log_density_unnorm(x.tail(b_->dim()));
}

double ProductModel::log_density(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  return a_->log_density(x.head(a_->dim())) + b_->log_density(x.tail(b_->dim()));
}

Vector ProductModel::score(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  Vector s(dim());
  s << a_->score(x.head(a_->dim())), b_->score(x.tail(b_->dim()));
  return s;
}

Vector ProductModel::log_hessian_diag(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  Vector h(dim());
  h << a_->log_hessian_diag(x.head(a_->dim())), b_->log_hessian_diag(x.tail(b_->dim()));
  return h;
}

Vector ProductModel::sample(Rng& rng) const {
  Vector x(dim());
  x.head(a_->dim()) = a_->sample(rng);
  x.tail(b_->dim()) = b_->sample(rng);
  return x;
}

std::vector<Interval> ProductModel::support_box() const {
  std::vector<Interval> box = a_->support_box();
  const auto b = b_->support_box();
  box.insert(box.end(), b.begin(), b.end());
  return box;
}

Vector ProductModel::mean() const {
  Vector m(dim());
  m << a_->mean(), b_->mean();
  return m;
}

// --------------------------------------------------- ConditionalRatioModel

ConditionalRatioModel::ConditionalRatioModel(ModelPtr joint, int x_dim)
    : joint_(std::move(joint)), x_dim_(x_dim) {
  if (!joint_) fail(ErrorCode::InvalidArgument, "joint model must be non-null");
  if (x_dim_ <= 0 || x_dim_ >= joint_->dim()) {
    fail(ErrorCode::DimensionMismatch, "x block must be a proper prefix of the joint");
  }
  marginal_x_ = joint_->marginal(iota(x_dim_));
}

double ConditionalRatioModel::log_density(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  return joint_->log_density(x) - marginal_x_->log_density(x.head(x_dim_));
}

Vector ConditionalRatioModel::score(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  Vector s = joint_->score(x);
  s.head(x_dim_) -= marginal_x_->score(x.head(x_dim_));
  return s;
}

Vector ConditionalRatioModel::log_hessian_diag(const Vector& x) const {
  check_dim(x, dim(), "point dim mismatch");
  Vector h = joint_->log_hessian_diag(x);
  h.head(x_dim_) -= marginal_x_->log_hessian_diag(x.head(x_dim_));
  return h;
}

// ---------------------------------------------------------------- ArModel

Vector ArModel::theta() const {
  Vector th(order() + 1);
  th << coeffs, sigma2;
  return th;
}

ArModel ArModel::from_theta(const Vector& theta) {
  if (theta.size() < 1) fail(ErrorCode::DimensionMismatch, "AR theta needs sigma2");
  ArModel m{theta.head(theta.size() - 1), theta(theta.size() - 1)};
  validate(m);
  return m;
}

void validate(const ArModel& model) {
  if (!(model.sigma2 > 0.0) || !std::isfinite(model.sigma2)) {
    fail(ErrorCode::InvalidArgument, "AR innovation variance must be positive");
  }
  if (!model.coeffs.allFinite()) fail(ErrorCode::NonFiniteValue, "AR coefficients not finite");
}

double ar_residual(Eigen::Index t, const Vector& series, const ArModel& model) {
  const int p = model.order();
  if (t < p || t >= series.size()) {
    fail(ErrorCode::InsufficientLags, "index " + std::to_string(t) + " lacks " +
                                          std::to_string(p) + " lagged values");
  }
  double r = series(t);
  for (int i = 1; i <= p; ++i) r -= model.coeffs(i - 1) * series(t - i);
  if (!std::isfinite(r)) fail(ErrorCode::NonFiniteValue, "AR residual is not finite");
  return r;
}

double ar_w_value(Eigen::Index t, const Vector& series, const ArModel& model) {
  const double r = ar_residual(t, series, model);
  const double v = model.sigma2;
  return -r * r / (v * v) + 2.0 / v;
}

Vector ar_theta_grad_w(Eigen::Index t, const Vector& series, const ArModel& model) {
  const double r = ar_residual(t, series, model);
  const double v = model.sigma2;
  const int p = model.order();
  Vector g(p + 1);
  for (int i = 1; i <= p; ++i) g(i - 1) = 2.0 * r * series(t - i) / (v * v);
  g(p) = 2.0 * r * r / (v * v * v) - 2.0 / (v * v);
  return g;
}

Matrix ar_theta_hess_w(Eigen::Index t, const Vector& series, const ArModel& model) {
  const double r = ar_residual(t, series, model);
  const double v = model.sigma2;
  const int p = model.order();
  Matrix h(p + 1, p + 1);
  for (int i = 1; i <= p; ++i) {
    for (int j = 1; j <= p; ++j) h(i - 1, j - 1) = -2.0 * series(t - i) * series(t - j) / (v * v);
    h(i - 1, p) = -4.0 * r * series(t - i) / (v * v * v);
    h(p, i - 1) = h(i - 1, p);
  }
  h(p, p) = -6.0 * r * r / (v * v * v * v) + 4.0 / (v * v * v);
  return h;
}

}  // namespace gentropy
