// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gentropy/error.hpp"

namespace gentropy {

namespace {

constexpr double kSymmetryTol = 1e-12;

Matrix checked_symmetric(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::DimensionMismatch, "SPD matrix must be square and non-empty");
  }
  if (!m.allFinite()) fail(ErrorCode::NonFiniteValue, "SPD matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    fail(ErrorCode::InvalidArgument, "matrix is not symmetric");
  }
  return 0.5 * (m + m.transpose());
}

Matrix lower_cholesky(const Matrix& sym) {
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::NotPositiveDefinite, "Cholesky pivot <= 0");
  }
  Matrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0)) fail(ErrorCode::NotPositiveDefinite, "Cholesky pivot <= 0");
  }
  return l;
}

// Per-block running moments (Welford), merged with Chan's update.
struct Moments {
  double n = 0.0;
  Vector mean;
  Vector m2;

  void init(Eigen::Index k) {
    mean = Vector::Zero(k);
    m2 = Vector::Zero(k);
  }
  void push(const Vector& v) {
    n += 1.0;
    const Vector delta = v - mean;
    mean += delta / n;
    m2 += delta.cwiseProduct(v - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const Vector delta = o.mean - mean;
    mean += delta * (o.n / total);
    m2 += o.m2 + delta.cwiseProduct(delta) * (n * o.n / total);
    n = total;
  }
};

std::vector<Moments> block_moments(const VectorFn& f, const Sampler& sampler, std::size_t n,
                                   const RandomStream& stream, int threads) {
  const std::size_t nblocks = (n + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<Moments> blocks(nblocks);
  for_each_block(nblocks, threads, [&](std::size_t b) {
    Rng rng = stream.child(b).engine();
    const std::size_t begin = b * kMcBlockSize;
    const std::size_t end = std::min(n, begin + kMcBlockSize);
    Moments& m = blocks[b];
    for (std::size_t i = begin; i < end; ++i) {
      const Vector v = f(sampler(rng));
      if (m.n == 0.0) m.init(v.size());
      if (!v.allFinite()) fail(ErrorCode::NonFiniteValue, "Monte Carlo integrand is not finite");
      m.push(v);
    }
  });
  return blocks;
}

}  // namespace

SpdMatrix::SpdMatrix(const Matrix& m) : m_(checked_symmetric(m)), l_(lower_cholesky(m_)) {}

SpdMatrix SpdMatrix::identity(Eigen::Index d) { return SpdMatrix(Matrix::Identity(d, d)); }

SpdMatrix SpdMatrix::diagonal(const Vector& diag) { return SpdMatrix(Matrix(diag.asDiagonal())); }

SpdMatrix SpdMatrix::from_cholesky(const Matrix& lower) {
  if (lower.rows() != lower.cols()) fail(ErrorCode::DimensionMismatch, "factor must be square");
  Matrix l = lower.triangularView<Eigen::Lower>();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) {
      fail(ErrorCode::NotPositiveDefinite, "Cholesky factor diagonal must be positive");
    }
  }
  Matrix m = l * l.transpose();
  m = 0.5 * (m + m.transpose());
  return SpdMatrix(std::move(m), std::move(l));
}

Vector SpdMatrix::solve(const Vector& v) const {
  if (v.size() != dim()) fail(ErrorCode::DimensionMismatch, "spd_solve: vector length mismatch");
  Vector y = l_.triangularView<Eigen::Lower>().solve(v);
  return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdMatrix::solve(const Matrix& b) const {
  if (b.rows() != dim()) fail(ErrorCode::DimensionMismatch, "spd_solve: matrix rows mismatch");
  Matrix y = l_.triangularView<Eigen::Lower>().solve(b);
  return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdMatrix::inverse() const {
  Matrix inv = solve(Matrix(Matrix::Identity(dim(), dim())));
  return 0.5 * (inv + inv.transpose());
}

double SpdMatrix::log_det() const { return 2.0 * l_.diagonal().array().log().sum(); }

double SpdMatrix::trace_inverse() const {
  // tr(S^-1) = ||L^-1||_F^2
  const Matrix linv = l_.triangularView<Eigen::Lower>().solve(Matrix::Identity(dim(), dim()));
  return linv.squaredNorm();
}

SpdMatrix cholesky_factor(const Matrix& m) { return SpdMatrix(m); }

Vector spd_solve(const SpdMatrix& m, const Vector& v) { return m.solve(v); }

QuadratureGrid::QuadratureGrid(std::vector<Interval> bounds, int points_per_dim)
    : bounds_(std::move(bounds)), points_(points_per_dim) {
  if (bounds_.empty() || bounds_.size() > 2) {
    fail(ErrorCode::InvalidArgument, "quadrature grids support 1 or 2 dimensions");
  }
  if (points_ < 3 || points_ % 2 == 0) {
    fail(ErrorCode::InvalidArgument, "points_per_dim must be odd and >= 3");
  }
  for (const auto& b : bounds_) {
    if (!(b.hi > b.lo)) fail(ErrorCode::InvalidArgument, "grid bounds must satisfy lo < hi");
  }
}

std::size_t QuadratureGrid::size() const noexcept {
  std::size_t s = 1;
  for (std::size_t i = 0; i < bounds_.size(); ++i) s *= static_cast<std::size_t>(points_);
  return s;
}

double QuadratureGrid::node(int dim, int k) const {
  const auto& b = bounds_[static_cast<std::size_t>(dim)];
  return b.lo + (b.hi - b.lo) * static_cast<double>(k) / static_cast<double>(points_ - 1);
}

double QuadratureGrid::weight(int dim, int k) const {
  const auto& b = bounds_[static_cast<std::size_t>(dim)];
  const double h = (b.hi - b.lo) / static_cast<double>(points_ - 1);
  return (k == 0 || k == points_ - 1) ? 0.5 * h : h;
}

double QuadratureGrid::total_weight() const {
  double total = 0.0;
  for_each([&](const Vector&, double w) { total += w; });
  return total;
}

void QuadratureGrid::for_each(const std::function<void(const Vector&, double)>& fn) const {
  Vector x(dims());
  if (dims() == 1) {
    for (int i = 0; i < points_; ++i) {
      x[0] = node(0, i);
      fn(x, weight(0, i));
    }
    return;
  }
  for (int i = 0; i < points_; ++i) {
    x[0] = node(0, i);
    const double wi = weight(0, i);
    for (int j = 0; j < points_; ++j) {
      x[1] = node(1, j);
      fn(x, wi * weight(1, j));
    }
  }
}

Vector quadrature_expect(const VectorFn& f, const ScalarFn& density, const QuadratureGrid& grid) {
  double mass = 0.0;
  Vector acc;
  grid.for_each([&](const Vector& x, double w) {
    const double p = density(x);
    if (!std::isfinite(p)) fail(ErrorCode::NonFiniteValue, "density is not finite on the grid");
    mass += w * p;
    if (p == 0.0) return;
    const Vector v = f(x);
    if (acc.size() == 0) acc = Vector::Zero(v.size());
    if (!v.allFinite()) fail(ErrorCode::NonFiniteValue, "quadrature integrand is not finite");
    acc += (w * p) * v;
  });
  if (std::abs(mass - 1.0) > kDensityMassTol) {
    fail(ErrorCode::GridTooCoarse,
         "density mass on grid is " + std::to_string(mass) + ", expected 1 within 1e-6");
  }
  if (acc.size() == 0) acc = f(Vector::Zero(grid.dims())) * 0.0;
  return acc;
}

double quadrature_expect(const ScalarFn& f, const ScalarFn& density, const QuadratureGrid& grid) {
  const Vector r = quadrature_expect(
      [&](const Vector& x) { return Vector::Constant(1, f(x)); }, density, grid);
  return r[0];
}

Vector finite_diff_gradient(const ScalarFn& f, const Vector& x, double h) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      fail(ErrorCode::NonFiniteValue, "function not finite at a probe point");
    }
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Vector finite_diff_gradient(const ScalarFn& f, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    Vector probe = x;
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      fail(ErrorCode::NonFiniteValue, "function not finite at a probe point");
    }
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

namespace {

double second_difference_sum(const ScalarFn& f, const Vector& x,
                             const std::function<double(Eigen::Index)>& step) {
  const double f0 = f(x);
  if (!std::isfinite(f0)) fail(ErrorCode::NonFiniteValue, "function not finite at x");
  double total = 0.0;
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step(i);
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      fail(ErrorCode::NonFiniteValue, "function not finite at a probe point");
    }
    total += (fp - 2.0 * f0 + fm) / (h * h);
  }
  return total;
}

}  // namespace

double finite_diff_laplacian(const ScalarFn& f, const Vector& x, double h) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  return second_difference_sum(f, x, [h](Eigen::Index) { return h; });
}

double finite_diff_laplacian(const ScalarFn& f, const Vector& x) {
  return second_difference_sum(
      f, x, [&x](Eigen::Index i) { return 1e-4 * std::max(1.0, std::abs(x[i])); });
}

Matrix finite_diff_jacobian(const VectorFn& f, const Vector& x) {
  Matrix jac;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
    Vector probe = x;
    probe[j] = x[j] + h;
    const Vector fp = f(probe);
    probe[j] = x[j] - h;
    const Vector fm = f(probe);
    if (jac.size() == 0) jac.resize(fp.size(), x.size());
    if (!fp.allFinite() || !fm.allFinite()) {
      fail(ErrorCode::NonFiniteValue, "function not finite at a probe point");
    }
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

McVectorEstimate monte_carlo_expect(const VectorFn& f, const Sampler& sampler, std::size_t n,
                                    const RandomStream& stream, int threads) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "monte_carlo_expect needs n >= 2");
  const auto blocks = block_moments(f, sampler, n, stream, threads);
  Moments total;
  for (const auto& b : blocks) total.merge(b);
  McVectorEstimate est;
  est.n = n;
  est.mean = total.mean;
  const Vector var = total.m2 / (total.n - 1.0);
  est.std_error = (var.array().max(0.0) / total.n).sqrt().matrix();
  return est;
}

McEstimate monte_carlo_expect(const ScalarFn& f, const Sampler& sampler, std::size_t n,
                              const RandomStream& stream, int threads) {
  const auto v = monte_carlo_expect(
      VectorFn([&](const Vector& x) { return Vector::Constant(1, f(x)); }), sampler, n, stream,
      threads);
  return {v.mean[0], v.std_error[0], v.n};
}

double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<int> complement_indices(const std::vector<int>& idx, int dim) {
  std::vector<bool> in(static_cast<std::size_t>(dim), false);
  for (int i : idx) {
    if (i < 0 || i >= dim) fail(ErrorCode::DimensionMismatch, "index out of range");
    in[static_cast<std::size_t>(i)] = true;
  }
  std::vector<int> out;
  for (int i = 0; i < dim; ++i) {
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

}  // namespace gentropy
